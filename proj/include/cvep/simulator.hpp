#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvep/codes.hpp"
#include "cvep/decoder.hpp"
#include "cvep/preprocess.hpp"
#include "cvep/rng.hpp"
#include "cvep/stimulus.hpp"

namespace cvep {

// Ground-truth generative model: X = gain * a * (r'M) + sigma * noise.
struct ForwardModel {
    Eigen::VectorXd a_true;                             // spatial pattern, length C
    std::array<Eigen::VectorXd, kNumEvents> r_true;     // per-event transients, length L_gen each
    double snr = 1.0;          // amplitude SNR on the peak channel; 0 = pure noise, inf = noise-free
    enum class Noise { White, Pink };
    Noise noise = Noise::White;
    double overt_gain = 1.0;
    double covert_gain = 0.4;
    // Optional (empty or length C): added to a_true on covert-left trials
    // and subtracted on covert-right, shifting the pattern laterally.
    Eigen::VectorXd lateral_profile;
    uint64_t seed = 0;

    int channels() const { return static_cast<int>(a_true.size()); }
    int l_gen() const { return static_cast<int>(r_true[0].size()); }
};

void validate(const ForwardModel& fm);

std::string to_string(ForwardModel::Noise n);
ForwardModel::Noise noise_from_string(const std::string& name);

// Random but seed-deterministic model: each event's transient is a sum of
// 2-3 damped sinusoids (5-15 Hz, decay 0.05-0.15 s) normalized to unit
// peak; a_true concentrates on the rear quarter of the channels with a
// small everywhere-background, and lateral_profile splits that rear subset
// into opposite-sign halves.
ForwardModel default_forward_model(int channels, double l_gen_s, uint64_t seed);

// Unit-variance approximately 1/f noise (three-pole parallel shaping of
// white noise).
Eigen::VectorXd pink_noise(Rng& rng, long n);

// One 20 s trial at 120 Hz. Only the cued side's code drives the signal;
// sigma is set from the un-gained signal so the condition gain scales the
// effective SNR.
Eigen::MatrixXd simulate_trial(const ForwardModel& fm, const TrialSpec& trial, const CodePair& pair,
                               Rng& rng);

// TrialSet plus everything needed to evaluate and reproduce it.
struct Dataset {
    std::vector<Eigen::MatrixXd> trials;  // each C x T at rate_hz
    std::vector<int> labels;              // 0 left, 1 right
    std::vector<Condition> conditions;
    std::vector<std::string> channel_names;
    double rate_hz = kEegRateHz;
    BitSequence left_code, right_code;
    uint64_t seed = 0;  // master simulation seed
    ForwardModel model;

    size_t size() const { return trials.size(); }
    long channels() const { return trials.empty() ? 0 : trials[0].rows(); }
    long samples() const { return trials.empty() ? 0 : trials[0].cols(); }
};

void validate(const Dataset& ds);

Dataset simulate_dataset(const SessionPlan& plan, const ForwardModel& fm, const CodePair& pair,
                         uint64_t seed);

// Trials of one condition, in chronological order, as a TrialSet.
TrialSet condition_subset(const Dataset& ds, Condition cond);

std::vector<std::string> default_channel_names(int channels);

// Continuous 512 Hz session for exercising the preprocessing chain: the
// clean 120 Hz signal of every trial is upsampled and placed into a
// broadband noise background with a 50 Hz line component, with onset
// markers recorded.
struct RawSession {
    RawRecording recording;
    std::vector<int> labels;
    std::vector<Condition> conditions;
    BitSequence left_code, right_code;
    uint64_t seed = 0;
    ForwardModel model;
};

RawSession simulate_raw_session(const SessionPlan& plan, const ForwardModel& fm,
                                const CodePair& pair, uint64_t seed);

// Notch + bandpass + epoch + resample on the raw recording, reassembled
// into a 120 Hz Dataset.
Dataset preprocess_session(const RawSession& raw);

}  // namespace cvep
