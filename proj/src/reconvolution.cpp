#include "cvep/reconvolution.hpp"

#include <cmath>

#include "cvep/errors.hpp"

namespace cvep {

EventMatrix derive_events(const BitSequence& code, double duration_s, double eeg_rate_hz) {
    validate_bits(code);
    if (code.rate_hz <= 0) throw ValidationError("code has no presentation rate");
    if (duration_s <= 0) throw ValidationError("duration must be positive");

    const double spb_f = eeg_rate_hz / code.rate_hz;
    const int spb = static_cast<int>(std::lround(spb_f));
    if (spb < 1 || std::abs(spb_f - spb) > 1e-9)
        throw ValidationError("EEG rate must be an integer multiple of the code rate");

    const double cols_f = duration_s * eeg_rate_hz;
    const long T = std::lround(cols_f);
    if (std::abs(cols_f - static_cast<double>(T)) > 1e-6)
        throw ValidationError("duration does not map to a whole number of samples");

    const size_t n = code.size();
    for (size_t i = 0; i < n; ++i)
        if (code.bits[i] && code.bits[(i + 1) % n] && code.bits[(i + 2) % n])
            throw ValidationError("code '" + code.name + "' contains a run of 1s longer than 2");

    EventMatrix ev;
    ev.rate_hz = eeg_rate_hz;
    ev.code_name = code.name;
    for (auto& row : ev.rows) row.assign(static_cast<size_t>(T), 0);
    ev.rows[kEventTrialOnset][0] = 1;

    // tile the code over the trial and stamp each run of ones at its onset
    const long n_bits = (T + spb - 1) / spb;
    long run_start = -1;
    for (long i = 0; i <= n_bits; ++i) {
        const bool bit = i < n_bits && code.bits[static_cast<size_t>(i % static_cast<long>(n))];
        if (bit && run_start < 0) run_start = i;
        if (!bit && run_start >= 0) {
            const long len = i - run_start;
            const long col = run_start * spb;
            if (col < T) {
                const int event = len == 1 ? kEventShortFlash : kEventLongFlash;
                ev.rows[event][static_cast<size_t>(col)] = 1;
            }
            run_start = -1;
        }
    }
    return ev;
}

StructureMatrix build_structure_matrix(const EventMatrix& events, int L_samples) {
    const long T = static_cast<long>(events.cols());
    if (L_samples < 1 || L_samples > T)
        throw ValidationError("response length " + std::to_string(L_samples) +
                              " out of range [1, " + std::to_string(T) + "]");

    StructureMatrix m;
    m.L = L_samples;
    m.rate_hz = events.rate_hz;
    m.code_name = events.code_name;
    m.data = Eigen::MatrixXd::Zero(static_cast<long>(kNumEvents) * L_samples, T);
    for (int e = 0; e < kNumEvents; ++e) {
        const auto& row = events.rows[static_cast<size_t>(e)];
        for (int lag = 0; lag < L_samples; ++lag) {
            const long out_row = static_cast<long>(e) * L_samples + lag;
            for (long t = lag; t < T; ++t)
                if (row[static_cast<size_t>(t - lag)]) m.data(out_row, t) = 1.0;
        }
    }
    return m;
}

StructureMatrix structure_for_code(const BitSequence& code, double duration_s, int L_samples,
                                   double eeg_rate_hz) {
    return build_structure_matrix(derive_events(code, duration_s, eeg_rate_hz), L_samples);
}

}  // namespace cvep
