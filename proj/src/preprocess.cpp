#include "cvep/preprocess.hpp"

#include <cmath>
#include <numeric>

#include "cvep/errors.hpp"
#include "cvep/reconvolution.hpp"
#include "cvep/stimulus.hpp"

namespace cvep {

void validate(const RawRecording& rec) {
    if (rec.rate_hz <= 0) throw ValidationError("recording rate must be positive");
    if (rec.data.rows() < 1 || rec.data.cols() < 1) throw ValidationError("empty recording");
    if (!rec.channel_names.empty() &&
        static_cast<long>(rec.channel_names.size()) != rec.data.rows())
        throw ValidationError("channel name count does not match the data");
    const long trial_len = std::lround(kTrialSeconds * rec.rate_hz);
    long prev = -1;
    for (long onset : rec.stimulus_onsets) {
        if (onset <= prev) throw ValidationError("stimulus onsets must be strictly increasing");
        if (onset + trial_len > rec.data.cols())
            throw ValidationError("onset at sample " + std::to_string(onset) +
                                  " leaves less than 20 s of recording");
        prev = onset;
    }
}

FilterSpec FilterSpec::notch(double center_hz, double q) {
    FilterSpec s;
    s.kind = Kind::Notch;
    s.center_hz = center_hz;
    s.q = q;
    s.order = 2;
    return s;
}

FilterSpec FilterSpec::bandpass(double low_hz, double high_hz, int order) {
    FilterSpec s;
    s.kind = Kind::Bandpass;
    s.low_hz = low_hz;
    s.high_hz = high_hz;
    s.order = order;
    return s;
}

std::vector<Biquad> design_sections(const FilterSpec& spec, double rate_hz) {
    const double butterworth_q = 1.0 / std::sqrt(2.0);
    switch (spec.kind) {
        case FilterSpec::Kind::Notch:
            return {design_notch(spec.center_hz, rate_hz, spec.q)};
        case FilterSpec::Kind::Bandpass:
            if (spec.order != 4)
                throw ValidationError("bandpass is realized as a 4th-order cascade; got order " +
                                      std::to_string(spec.order));
            if (spec.low_hz >= spec.high_hz)
                throw ValidationError("bandpass cutoffs out of order");
            return {design_highpass(spec.low_hz, rate_hz, butterworth_q),
                    design_lowpass(spec.high_hz, rate_hz, butterworth_q)};
    }
    throw ValidationError("unknown filter kind");
}

RawRecording apply_filter(const RawRecording& rec, const FilterSpec& spec) {
    validate(rec);
    const auto sections = design_sections(spec, rec.rate_hz);
    const int pad = static_cast<int>(std::lround(1.5 * rec.rate_hz));
    RawRecording out = rec;
    for (long c = 0; c < rec.data.rows(); ++c)
        out.data.row(c) = sosfiltfilt(sections, rec.data.row(c).transpose(), pad).transpose();
    return out;
}

std::vector<Eigen::MatrixXd> epoch_trials(const RawRecording& rec) {
    validate(rec);
    const long pre = std::lround(kPreStimulusSeconds * rec.rate_hz);
    const long post = std::lround(kTrialSeconds * rec.rate_hz);
    std::vector<Eigen::MatrixXd> epochs;
    epochs.reserve(rec.stimulus_onsets.size());
    for (long onset : rec.stimulus_onsets) {
        if (onset - pre < 0)
            throw ValidationError("onset at sample " + std::to_string(onset) +
                                  " has less than " + std::to_string(pre) +
                                  " samples of pre-stimulus data");
        epochs.push_back(rec.data.middleCols(onset - pre, pre + post));
    }
    return epochs;
}

Eigen::MatrixXd resample_and_trim(const Eigen::MatrixXd& epoch, double in_rate_hz,
                                  double out_rate_hz) {
    if (in_rate_hz <= 0 || out_rate_hz <= 0) throw ValidationError("rates must be positive");
    const long in_i = std::lround(in_rate_hz);
    const long out_i = std::lround(out_rate_hz);
    if (std::abs(in_rate_hz - in_i) > 1e-9 || std::abs(out_rate_hz - out_i) > 1e-9)
        throw ValidationError("resampling requires integer rates");
    const long g = std::gcd(in_i, out_i);
    const int up = static_cast<int>(out_i / g);
    const int down = static_cast<int>(in_i / g);

    const long expected_in = std::lround((kPreStimulusSeconds + kTrialSeconds) * in_rate_hz);
    if (epoch.cols() != expected_in)
        throw ValidationError("epoch has " + std::to_string(epoch.cols()) + " samples, expected " +
                              std::to_string(expected_in));

    const long trim = std::lround(kPreStimulusSeconds * out_rate_hz);
    const long want = std::lround(kTrialSeconds * out_rate_hz);
    Eigen::MatrixXd out(epoch.rows(), want);
    for (long c = 0; c < epoch.rows(); ++c) {
        const Eigen::VectorXd y = resample_poly(epoch.row(c).transpose(), up, down);
        if (y.size() < trim + want)
            throw ValidationError("resampled epoch too short: " + std::to_string(y.size()));
        out.row(c) = y.segment(trim, want).transpose();
    }
    return out;
}

std::vector<Eigen::MatrixXd> preprocess_recording(const RawRecording& rec) {
    RawRecording filtered = apply_filter(rec, FilterSpec::notch(50.0));
    filtered = apply_filter(filtered, FilterSpec::bandpass(1.0, 40.0));
    auto epochs = epoch_trials(filtered);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(epochs.size());
    for (const auto& e : epochs) out.push_back(resample_and_trim(e, rec.rate_hz, kEegRateHz));
    return out;
}

}  // namespace cvep
