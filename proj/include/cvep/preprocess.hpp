#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvep/dsp.hpp"

namespace cvep {

constexpr double kAcquisitionRateHz = 512.0;
constexpr double kPreStimulusSeconds = 0.5;

// Continuous multichannel recording with stimulus-onset markers.
struct RawRecording {
    Eigen::MatrixXd data;  // C x N, volts
    double rate_hz = kAcquisitionRateHz;
    std::vector<long> stimulus_onsets;  // sample indices, strictly increasing
    std::vector<std::string> channel_names;

    long channels() const { return data.rows(); }
    long samples() const { return data.cols(); }
};

void validate(const RawRecording& rec);

struct FilterSpec {
    enum class Kind { Notch, Bandpass };
    Kind kind = Kind::Bandpass;
    double center_hz = 0, q = 0;         // notch
    double low_hz = 0, high_hz = 0;      // bandpass
    int order = 4;                       // bandpass only; notch is 2nd order

    static FilterSpec notch(double center_hz, double q = 30.0);
    static FilterSpec bandpass(double low_hz, double high_hz, int order = 4);
};

// All filters are cookbook biquad sections applied forward-backward.
constexpr const char* kFilterFamily = "rbj_biquad_filtfilt";

// Sections realizing `spec` at the given rate. A 4th-order bandpass is a
// 2nd-order Butterworth high-pass cascaded with a 2nd-order Butterworth
// low-pass.
std::vector<Biquad> design_sections(const FilterSpec& spec, double rate_hz);

// Zero-phase per-channel filtering; length preserved.
RawRecording apply_filter(const RawRecording& rec, const FilterSpec& spec);

// One epoch per onset spanning [-kPreStimulusSeconds, +20 s) at the
// recording rate (10496 samples at 512 Hz).
std::vector<Eigen::MatrixXd> epoch_trials(const RawRecording& rec);

// Rational resampling to out_rate (15/64 for 512 -> 120 Hz) followed by
// removal of the pre-stimulus interval; 10496 samples in, 2400 out.
Eigen::MatrixXd resample_and_trim(const Eigen::MatrixXd& epoch, double in_rate_hz = kAcquisitionRateHz,
                                  double out_rate_hz = 120.0);

// Full conditioning chain: 50 Hz notch, 1-40 Hz bandpass, epoch, resample,
// trim. Returns one C x 2400 matrix per stimulus onset.
std::vector<Eigen::MatrixXd> preprocess_recording(const RawRecording& rec);

}  // namespace cvep
