#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvep/bitseq.hpp"

namespace cvep {

constexpr double kEegRateHz = 120.0;

constexpr int kEventTrialOnset = 0;
constexpr int kEventShortFlash = 1;
constexpr int kEventLongFlash = 2;
constexpr int kNumEvents = 3;

// Binary event onset time-series at the EEG rate: trial onset, short
// flashes ('010', one frame) and long flashes ('0110', two frames).
struct EventMatrix {
    std::array<std::vector<uint8_t>, kNumEvents> rows;
    double rate_hz = kEegRateHz;
    std::string code_name;

    size_t cols() const { return rows[0].size(); }
};

// Event onsets for `code` tiled cyclically over duration_s seconds and
// sampled at eeg_rate_hz. Each code bit spans eeg_rate_hz/code.rate_hz
// samples (2 for 60 -> 120 Hz); a run of exactly one 1 is a short flash,
// a run of exactly two a long flash, both stamped at the run's first
// sample. Runs are detected on the tiled stream, so a flash crossing the
// cyclic code boundary is classified by its full length.
EventMatrix derive_events(const BitSequence& code, double duration_s, double eeg_rate_hz = kEegRateHz);

// Lag-expanded stack of an EventMatrix: row e*L + l is event row e delayed
// by l samples (zero-filled on the left, truncated at T). For a response
// vector r of length 3L, r'M is the superposition of the per-event
// responses at every event occurrence.
struct StructureMatrix {
    Eigen::MatrixXd data;  // (3*L) x T, entries 0/1
    int L = 0;
    double rate_hz = kEegRateHz;
    std::string code_name;

    long rows() const { return data.rows(); }
    long cols() const { return data.cols(); }
};

StructureMatrix build_structure_matrix(const EventMatrix& events, int L_samples);

// derive_events + build_structure_matrix in one step.
StructureMatrix structure_for_code(const BitSequence& code, double duration_s, int L_samples,
                                   double eeg_rate_hz = kEegRateHz);

}  // namespace cvep
