#pragma once

#include <vector>

#include <Eigen/Dense>

namespace cvep {

// One second-order IIR section, normalized so a0 = 1.
struct Biquad {
    double b0 = 1, b1 = 0, b2 = 0;
    double a1 = 0, a2 = 0;

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

// Audio-EQ-cookbook designs. Frequencies in Hz; fs is the sampling rate.
Biquad design_lowpass(double f0_hz, double fs_hz, double q);
Biquad design_highpass(double f0_hz, double fs_hz, double q);
Biquad design_notch(double f0_hz, double fs_hz, double q);

// Cascaded single-pass filtering (direct form II transposed), zero initial
// state.
Eigen::VectorXd sosfilt(const std::vector<Biquad>& sections, const Eigen::VectorXd& x);

// Forward-backward filtering with odd-reflection padding of pad_len samples
// on both ends and steady-state initial conditions, so steps pass without
// edge ringing. pad_len is clamped to len(x) - 1.
Eigen::VectorXd sosfiltfilt(const std::vector<Biquad>& sections, const Eigen::VectorXd& x,
                            int pad_len);

// Polyphase rational-rate resampling by up/down with a Kaiser-windowed-sinc
// anti-alias filter (beta 5.0, 10*max(up,down) taps per side, cutoff at the
// tighter of the two Nyquist limits). Output length is ceil(n*up/down);
// group delay is compensated, edges are zero-padded.
Eigen::VectorXd resample_poly(const Eigen::VectorXd& x, int up, int down);

// Modified Bessel function of the first kind, order zero (power series).
double bessel_i0(double x);

}  // namespace cvep
