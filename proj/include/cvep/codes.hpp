#pragma once

#include <cstdint>
#include <vector>

#include "cvep/bitseq.hpp"

namespace cvep {

// Linear feedback shift register over GF(2). `taps` are the exponents of
// the feedback polynomial f(x) = 1 + sum_{t in taps} x^t; the degree must
// be a member of `taps` so that f has full degree. The generated sequence
// follows s[m] = XOR over taps t of s[m - t], seeded with bits s[0..n-1]
// taken from the low bits of `seed`.
struct LfsrSpec {
    int degree = 6;
    std::vector<int> taps;
    uint64_t seed = 1;  // bit i = s_i; must be nonzero
};

void validate(const LfsrSpec& spec);

// Maximal-length sequence of period 2^degree - 1. Throws ValidationError if
// the tap polynomial is not primitive (detected by a period check).
BitSequence lfsr_msequence(const LfsrSpec& spec);

// Gold family from a preferred pair of degree-n m-sequences: the two
// sequences u, v plus u XOR rotate(v, s) for every shift s. 2^n + 1 codes of
// length 2^n - 1. The pair is verified by checking that all pairwise
// cross-correlations take only the three values {-t(n), -1, t(n)-2} (as
// integer sums), with t(n) = 2^((n+2)/2)+1 for even n and 2^((n+1)/2)+1 for
// odd n; a non-preferred pair is rejected.
std::vector<BitSequence> gold_code_set(const LfsrSpec& spec_a, const LfsrSpec& spec_b);

// Run-length-limiting modulation: each source bit is doubled and the result
// is XORed with the alternating clock 0,1,0,1,... so that 0 -> "01" and
// 1 -> "10". The output is twice as long, has exactly one '1' per source
// bit (hence is balanced), runs at twice the input rate, and contains no
// run of ones longer than two, even across the cyclic boundary.
BitSequence modulate(const BitSequence& code);

// Inverse of modulate (for verification of stored code files).
BitSequence demodulate(const BitSequence& modulated);

// Full re-check of a stored modulated Gold family: uniform even length
// 2*(2^d - 1), balanced bits, no run of ones longer than 2 (cyclically),
// pairwise distinct, and three-valued cross-correlations of all distinct
// demodulated pairs. Throws ValidationError with a diagnostic on the first
// violation.
void verify_modulated_set(const std::vector<BitSequence>& codes);

struct CodePair {
    BitSequence left;
    BitSequence right;
    int shift_bits = 0;
};

// Picks the candidate whose +/-1 autocorrelation at `shift_bits` has the
// smallest magnitude (ties broken by lowest index) and pairs it with its
// rotation by shift_bits.
CodePair select_code_pair(const std::vector<BitSequence>& codes, int shift_bits);

// Default degree-6 preferred pair: x^6+x+1 and x^6+x^5+x^2+x+1. The pair
// property is re-verified on every construction, not trusted.
LfsrSpec default_lfsr_a();
LfsrSpec default_lfsr_b();

// The 65 modulated Gold codes from the default pair (126 bits at 60 Hz).
std::vector<BitSequence> default_modulated_set();

// Left/right stimulation pair from the default set at a 61-bit shift.
CodePair default_code_pair();

constexpr int kDefaultShiftBits = 61;
constexpr double kPresentationRateHz = 60.0;

}  // namespace cvep
