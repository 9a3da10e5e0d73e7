#include "cvep/codes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "cvep/errors.hpp"

namespace cvep {

void validate(const LfsrSpec& spec) {
    if (spec.degree < 2) throw ValidationError("LFSR degree must be >= 2");
    if (spec.degree > 24) throw ValidationError("LFSR degree above 24 is not supported");
    if (spec.taps.empty()) throw ValidationError("LFSR taps must be non-empty");
    std::set<int> uniq(spec.taps.begin(), spec.taps.end());
    if (uniq.size() != spec.taps.size()) throw ValidationError("LFSR taps contain duplicates");
    for (int t : spec.taps)
        if (t < 1 || t > spec.degree) throw ValidationError("LFSR tap out of range 1..degree");
    if (uniq.count(spec.degree) == 0) throw ValidationError("LFSR taps must include the degree");
    if (spec.seed == 0) throw ValidationError("LFSR seed must not be all-zeros");
    if (spec.degree < 64 && (spec.seed >> spec.degree) != 0)
        throw ValidationError("LFSR seed has bits beyond the register length");
}

BitSequence lfsr_msequence(const LfsrSpec& spec) {
    validate(spec);
    const int n = spec.degree;
    const size_t period = (size_t{1} << n) - 1;

    std::vector<uint8_t> s;
    s.reserve(period + n);
    for (int i = 0; i < n; ++i) s.push_back(static_cast<uint8_t>((spec.seed >> i) & 1));
    for (size_t m = n; m < period + n; ++m) {
        uint8_t b = 0;
        for (int t : spec.taps) b ^= s[m - t];
        s.push_back(b);
    }

    // Maximality check: the state window must not recur before one full
    // period, and must recur exactly at the period.
    uint64_t state0 = 0, state = 0;
    for (int i = 0; i < n; ++i) state0 |= uint64_t(s[i]) << i;
    state = state0;
    for (size_t m = 1; m <= period; ++m) {
        state = (state >> 1) | (uint64_t(s[m + n - 1]) << (n - 1));
        if (state == state0 && m < period)
            throw ValidationError("feedback polynomial is not primitive (period " + std::to_string(m) +
                                  " < " + std::to_string(period) + ")");
    }
    if (state != state0)
        throw ValidationError("feedback polynomial is not primitive (state does not recur at full period)");

    BitSequence out;
    out.bits.assign(s.begin(), s.begin() + period);
    out.rate_hz = kPresentationRateHz / 2.0;
    out.name = "mseq";
    return out;
}

namespace {

// Allowed cross-correlation sums {-t, -1, t-2} for a preferred pair.
bool three_valued(const BitSequence& a, const BitSequence& b, int degree) {
    const long t = (degree % 2 == 0) ? (1L << ((degree + 2) / 2)) + 1 : (1L << ((degree + 1) / 2)) + 1;
    const long n = static_cast<long>(a.bits.size());
    for (long lag = 0; lag < n; ++lag) {
        const long c = circular_correlation_sum(a, b, lag);
        if (c != -t && c != -1 && c != t - 2) return false;
    }
    return true;
}

}  // namespace

std::vector<BitSequence> gold_code_set(const LfsrSpec& spec_a, const LfsrSpec& spec_b) {
    if (spec_a.degree != spec_b.degree)
        throw ValidationError("Gold pair requires equal degrees");
    if (spec_a.degree % 4 == 0)
        throw ValidationError("no preferred pairs exist for degrees divisible by 4");

    BitSequence u = lfsr_msequence(spec_a);
    BitSequence v = lfsr_msequence(spec_b);
    if (u.bits == v.bits)
        throw ValidationError("degenerate pair: both specs generate the same m-sequence");
    if (!three_valued(u, v, spec_a.degree))
        throw ValidationError("cross-correlation spectrum is not three-valued: not a preferred pair");

    const size_t n = u.bits.size();
    std::vector<BitSequence> set;
    set.reserve(n + 2);
    u.name = "gold00";
    v.name = "gold01";
    set.push_back(u);
    set.push_back(v);
    for (size_t shift = 0; shift < n; ++shift) {
        BitSequence vs = rotate(v, static_cast<long>(shift));
        BitSequence g = u;
        for (size_t i = 0; i < n; ++i) g.bits[i] = u.bits[i] ^ vs.bits[i];
        char buf[16];
        std::snprintf(buf, sizeof buf, "gold%02zu", shift + 2);
        g.name = buf;
        set.push_back(g);
    }
    return set;
}

BitSequence modulate(const BitSequence& code) {
    validate_bits(code);
    BitSequence out;
    out.bits.reserve(code.bits.size() * 2);
    for (uint8_t b : code.bits) {
        out.bits.push_back(b);                            // (b, b) XOR (0, 1)
        out.bits.push_back(static_cast<uint8_t>(1 - b));
    }
    out.rate_hz = code.rate_hz * 2.0;
    out.name = code.name;
    return out;
}

BitSequence demodulate(const BitSequence& modulated) {
    validate_bits(modulated);
    if (modulated.bits.size() % 2 != 0)
        throw ValidationError("modulated sequence must have even length");
    BitSequence out;
    out.bits.reserve(modulated.bits.size() / 2);
    for (size_t i = 0; i < modulated.bits.size(); i += 2) {
        if (modulated.bits[i] == modulated.bits[i + 1])
            throw ValidationError("sequence '" + modulated.name + "' is not in modulated form at bit " +
                                  std::to_string(i));
        out.bits.push_back(modulated.bits[i]);
    }
    out.rate_hz = modulated.rate_hz / 2.0;
    out.name = modulated.name;
    return out;
}

void verify_modulated_set(const std::vector<BitSequence>& codes) {
    if (codes.empty()) throw ValidationError("code set is empty");
    const size_t len = codes.front().size();
    if (len % 2 != 0) throw ValidationError("modulated codes must have even length");

    int degree = 0;
    while ((size_t{2} << degree) - 2 < len) ++degree;
    if ((size_t{2} << degree) - 2 != len)
        throw ValidationError("code length " + std::to_string(len) +
                              " is not 2*(2^d - 1) for any degree d");

    std::vector<BitSequence> demod;
    demod.reserve(codes.size());
    for (const auto& c : codes) {
        validate_bits(c);
        if (c.size() != len) throw ValidationError("codes differ in length");
        size_t ones = 0;
        for (size_t i = 0; i < len; ++i) {
            ones += c.bits[i];
            if (c.bits[i] && c.bits[(i + 1) % len] && c.bits[(i + 2) % len])
                throw ValidationError("code '" + c.name + "' has a run of 1s longer than 2");
        }
        if (ones * 2 != len)
            throw ValidationError("code '" + c.name + "' is not balanced");
        demod.push_back(demodulate(c));
    }
    for (size_t i = 0; i < codes.size(); ++i)
        for (size_t j = i + 1; j < codes.size(); ++j) {
            if (codes[i].bits == codes[j].bits)
                throw ValidationError("codes '" + codes[i].name + "' and '" + codes[j].name +
                                      "' are identical");
            if (!three_valued(demod[i], demod[j], degree))
                throw ValidationError("codes '" + codes[i].name + "' and '" + codes[j].name +
                                      "' violate the three-valued cross-correlation bound");
        }
}

CodePair select_code_pair(const std::vector<BitSequence>& codes, int shift_bits) {
    if (codes.empty()) throw ValidationError("candidate code list is empty");
    const long n = static_cast<long>(codes.front().size());
    for (const auto& c : codes)
        if (static_cast<long>(c.size()) != n)
            throw ValidationError("candidate codes differ in length");
    if (shift_bits <= 0 || shift_bits >= n)
        throw ValidationError("shift of " + std::to_string(shift_bits) +
                              " bits is degenerate for codes of length " + std::to_string(n));

    size_t best = 0;
    double best_abs = 2.0;
    for (size_t i = 0; i < codes.size(); ++i) {
        const double rho = std::abs(circular_correlation(codes[i], codes[i], shift_bits));
        if (rho < best_abs - 1e-15) {  // strict improvement; ties keep the lowest index
            best_abs = rho;
            best = i;
        }
    }

    CodePair pair;
    pair.left = codes[best];
    pair.right = rotate(codes[best], shift_bits);
    pair.right.name = pair.left.name + "_rot" + std::to_string(shift_bits);
    pair.shift_bits = shift_bits;
    return pair;
}

LfsrSpec default_lfsr_a() { return LfsrSpec{6, {6, 1}, 1}; }          // x^6 + x + 1
LfsrSpec default_lfsr_b() { return LfsrSpec{6, {6, 5, 2, 1}, 1}; }    // x^6 + x^5 + x^2 + x + 1

std::vector<BitSequence> default_modulated_set() {
    auto set = gold_code_set(default_lfsr_a(), default_lfsr_b());
    std::vector<BitSequence> mod;
    mod.reserve(set.size());
    for (const auto& c : set) mod.push_back(modulate(c));
    return mod;
}

CodePair default_code_pair() { return select_code_pair(default_modulated_set(), kDefaultShiftBits); }

}  // namespace cvep
