#include "cvep/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "cvep/errors.hpp"

namespace cvep {

namespace {

void check_band(double f0_hz, double fs_hz) {
    if (fs_hz <= 0) throw ValidationError("sampling rate must be positive");
    if (f0_hz <= 0 || f0_hz >= fs_hz / 2)
        throw ValidationError("filter frequency must lie strictly between 0 and Nyquist");
}

struct RbjTerms {
    double cw, alpha;
};

RbjTerms rbj_terms(double f0_hz, double fs_hz, double q) {
    check_band(f0_hz, fs_hz);
    if (q <= 0) throw ValidationError("filter Q must be positive");
    const double w0 = 2.0 * M_PI * f0_hz / fs_hz;
    return {std::cos(w0), std::sin(w0) / (2.0 * q)};
}

Biquad normalized(double b0, double b1, double b2, double a0, double a1, double a2) {
    Biquad s;
    s.b0 = b0 / a0;
    s.b1 = b1 / a0;
    s.b2 = b2 / a0;
    s.a1 = a1 / a0;
    s.a2 = a2 / a0;
    if (std::abs(s.a2) >= 1.0 || std::abs(s.a1) >= 1.0 + s.a2)
        throw ValidationError("unstable filter section (pole outside the unit circle)");
    return s;
}

}  // namespace

Biquad design_lowpass(double f0_hz, double fs_hz, double q) {
    const auto [cw, alpha] = rbj_terms(f0_hz, fs_hz, q);
    return normalized((1 - cw) / 2, 1 - cw, (1 - cw) / 2, 1 + alpha, -2 * cw, 1 - alpha);
}

Biquad design_highpass(double f0_hz, double fs_hz, double q) {
    const auto [cw, alpha] = rbj_terms(f0_hz, fs_hz, q);
    return normalized((1 + cw) / 2, -(1 + cw), (1 + cw) / 2, 1 + alpha, -2 * cw, 1 - alpha);
}

Biquad design_notch(double f0_hz, double fs_hz, double q) {
    const auto [cw, alpha] = rbj_terms(f0_hz, fs_hz, q);
    return normalized(1, -2 * cw, 1, 1 + alpha, -2 * cw, 1 - alpha);
}

namespace {

struct SectionState {
    double z1 = 0, z2 = 0;
};

inline double step_section(const Biquad& s, SectionState& st, double x) {
    const double y = s.b0 * x + st.z1;
    st.z1 = s.b1 * x - s.a1 * y + st.z2;
    st.z2 = s.b2 * x - s.a2 * y;
    return y;
}

// Steady-state DF2T state for a constant unit input, per section; used to
// start filtfilt passes without a step transient. The input scale of each
// section in the cascade is the product of the upstream DC gains.
std::vector<SectionState> steady_states(const std::vector<Biquad>& sections) {
    std::vector<SectionState> zi(sections.size());
    double scale = 1.0;
    for (size_t k = 0; k < sections.size(); ++k) {
        const Biquad& s = sections[k];
        const double y = s.dc_gain();
        zi[k].z2 = scale * (s.b2 - s.a2 * y);
        zi[k].z1 = scale * (s.b1 + s.b2 - (s.a1 + s.a2) * y);
        scale *= y;
    }
    return zi;
}

Eigen::VectorXd run_cascade(const std::vector<Biquad>& sections, const Eigen::VectorXd& x,
                            std::vector<SectionState> state) {
    Eigen::VectorXd y = x;
    for (size_t k = 0; k < sections.size(); ++k)
        for (long i = 0; i < y.size(); ++i) y[i] = step_section(sections[k], state[k], y[i]);
    return y;
}

std::vector<SectionState> scaled(std::vector<SectionState> zi, double x0) {
    for (auto& s : zi) {
        s.z1 *= x0;
        s.z2 *= x0;
    }
    return zi;
}

}  // namespace

Eigen::VectorXd sosfilt(const std::vector<Biquad>& sections, const Eigen::VectorXd& x) {
    return run_cascade(sections, x, std::vector<SectionState>(sections.size()));
}

Eigen::VectorXd sosfiltfilt(const std::vector<Biquad>& sections, const Eigen::VectorXd& x,
                            int pad_len) {
    const long n = x.size();
    if (n < 2) throw ValidationError("signal too short to filter");
    const long pad = std::clamp<long>(pad_len, 0, n - 1);

    Eigen::VectorXd ext(n + 2 * pad);
    for (long i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
    ext.segment(pad, n) = x;
    for (long i = 0; i < pad; ++i) ext[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];

    const auto zi = steady_states(sections);
    Eigen::VectorXd fwd = run_cascade(sections, ext, scaled(zi, ext[0]));
    fwd.reverseInPlace();
    Eigen::VectorXd bwd = run_cascade(sections, fwd, scaled(zi, fwd[0]));
    bwd.reverseInPlace();
    return bwd.segment(pad, n);
}

double bessel_i0(double x) {
    const double half = x / 2.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

Eigen::VectorXd resample_poly(const Eigen::VectorXd& x, int up, int down) {
    if (up < 1 || down < 1) throw ValidationError("resampling factors must be positive");
    const long n = x.size();
    if (n == 0) throw ValidationError("empty signal");
    if (up == down) return x;

    const int max_rate = std::max(up, down);
    const int half = 10 * max_rate;
    const double beta = 5.0;
    const double fc = 1.0 / max_rate;  // relative to Nyquist at rate fs*up

    // Kaiser-windowed sinc, unit DC gain, then scaled by `up` to undo the
    // zero-stuffing attenuation.
    std::vector<double> h(static_cast<size_t>(2 * half + 1));
    const double i0b = bessel_i0(beta);
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double t = fc * k;
        const double sinc = t == 0.0 ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
        const double frac = static_cast<double>(k) / half;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - frac * frac))) / i0b;
        h[static_cast<size_t>(k + half)] = sinc * w;
        sum += sinc * w;
    }
    for (double& v : h) v *= up / sum;

    const long n_up = n * up;
    const long n_out = n_up / down + (n_up % down != 0 ? 1 : 0);
    Eigen::VectorXd y(n_out);
    for (long m = 0; m < n_out; ++m) {
        // y[m] = sum_k x[k] * h[m*down + half - k*up]
        const long center = m * down + half;
        long k_lo = (center - 2L * half + up - 1) / up;
        long k_hi = center / up;
        k_lo = std::max(k_lo, 0L);
        k_hi = std::min(k_hi, n - 1);
        double acc = 0.0;
        for (long k = k_lo; k <= k_hi; ++k) acc += x[k] * h[static_cast<size_t>(center - k * up)];
        y[m] = acc;
    }
    return y;
}

}  // namespace cvep
