#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvep {

// Ordered binary sequence together with its presentation rate.
struct BitSequence {
    std::vector<uint8_t> bits;  // each element 0 or 1
    double rate_hz = 0.0;
    std::string name;

    size_t size() const { return bits.size(); }
    double duration_s() const { return rate_hz > 0 ? static_cast<double>(bits.size()) / rate_hz : 0.0; }
};

BitSequence make_bitseq(std::string_view bits01, double rate_hz, std::string name);
std::string to_string01(const BitSequence& s);

// Throws ValidationError if empty or any element is not 0/1.
void validate_bits(const BitSequence& s);

// out[i] = in[(i + k) mod n]; negative k allowed.
BitSequence rotate(const BitSequence& s, long k);
BitSequence complement(const BitSequence& s);

// Correlation of the +/-1 encodings (0 -> -1, 1 -> +1) of a and b rotated
// by `lag`:  sum_i a[i] * b[(i+lag) mod n] / n.
// For balanced sequences (equal count of ones and zeros) this equals the
// Pearson correlation of the encoded sequences.
double circular_correlation(const BitSequence& a, const BitSequence& b, long lag);

// Integer numerator of circular_correlation (sum of +/-1 products), exact.
long circular_correlation_sum(const BitSequence& a, const BitSequence& b, long lag);

// Runs of consecutive ones as (start index, length) pairs, in order.
std::vector<std::pair<size_t, size_t>> one_runs(const std::vector<uint8_t>& bits);

}  // namespace cvep
