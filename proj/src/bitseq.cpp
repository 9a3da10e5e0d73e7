#include "cvep/bitseq.hpp"

#include "cvep/errors.hpp"

namespace cvep {

BitSequence make_bitseq(std::string_view bits01, double rate_hz, std::string name) {
    BitSequence s;
    s.bits.reserve(bits01.size());
    for (char c : bits01) {
        if (c != '0' && c != '1') throw ValidationError("bit string may contain only '0' and '1'");
        s.bits.push_back(static_cast<uint8_t>(c - '0'));
    }
    s.rate_hz = rate_hz;
    s.name = std::move(name);
    validate_bits(s);
    return s;
}

std::string to_string01(const BitSequence& s) {
    std::string out(s.bits.size(), '0');
    for (size_t i = 0; i < s.bits.size(); ++i)
        if (s.bits[i]) out[i] = '1';
    return out;
}

void validate_bits(const BitSequence& s) {
    if (s.bits.empty()) throw ValidationError("bit sequence '" + s.name + "' is empty");
    for (uint8_t b : s.bits)
        if (b > 1) throw ValidationError("bit sequence '" + s.name + "' contains a non-binary value");
}

BitSequence rotate(const BitSequence& s, long k) {
    const long n = static_cast<long>(s.bits.size());
    if (n == 0) throw ValidationError("cannot rotate an empty sequence");
    BitSequence out = s;
    const long shift = ((k % n) + n) % n;
    for (long i = 0; i < n; ++i) out.bits[i] = s.bits[(i + shift) % n];
    return out;
}

BitSequence complement(const BitSequence& s) {
    BitSequence out = s;
    for (auto& b : out.bits) b = static_cast<uint8_t>(1 - b);
    return out;
}

long circular_correlation_sum(const BitSequence& a, const BitSequence& b, long lag) {
    if (a.bits.size() != b.bits.size())
        throw ValidationError("circular correlation requires equal lengths (" +
                              std::to_string(a.bits.size()) + " vs " + std::to_string(b.bits.size()) + ")");
    validate_bits(a);
    validate_bits(b);
    const long n = static_cast<long>(a.bits.size());
    const long shift = ((lag % n) + n) % n;
    long sum = 0;
    for (long i = 0; i < n; ++i) {
        // product of +/-1 encodings is +1 when the bits agree
        sum += (a.bits[i] == b.bits[(i + shift) % n]) ? 1 : -1;
    }
    return sum;
}

double circular_correlation(const BitSequence& a, const BitSequence& b, long lag) {
    return static_cast<double>(circular_correlation_sum(a, b, lag)) / static_cast<double>(a.bits.size());
}

std::vector<std::pair<size_t, size_t>> one_runs(const std::vector<uint8_t>& bits) {
    std::vector<std::pair<size_t, size_t>> runs;
    size_t i = 0;
    while (i < bits.size()) {
        if (bits[i]) {
            size_t start = i;
            while (i < bits.size() && bits[i]) ++i;
            runs.emplace_back(start, i - start);
        } else {
            ++i;
        }
    }
    return runs;
}

}  // namespace cvep
