#include "cvep/simulator.hpp"

#include <cmath>
#include <cstdio>

#include "cvep/errors.hpp"
#include "cvep/reconvolution.hpp"

namespace cvep {

void validate(const ForwardModel& fm) {
    if (fm.a_true.size() < 1 || fm.a_true.norm() == 0.0)
        throw ValidationError("a_true must be non-empty and nonzero");
    const long l = fm.r_true[0].size();
    if (l < 1) throw ValidationError("r_true segments must be non-empty");
    for (const auto& r : fm.r_true)
        if (r.size() != l) throw ValidationError("r_true segments must share one length");
    if (std::isnan(fm.snr) || fm.snr < 0) throw ValidationError("snr must be >= 0");
    if (fm.overt_gain <= 0 || fm.covert_gain <= 0)
        throw ValidationError("condition gains must be positive");
    if (fm.lateral_profile.size() != 0 && fm.lateral_profile.size() != fm.a_true.size())
        throw ValidationError("lateral profile length must match a_true");
}

std::string to_string(ForwardModel::Noise n) {
    return n == ForwardModel::Noise::White ? "white" : "pink";
}

ForwardModel::Noise noise_from_string(const std::string& name) {
    if (name == "white") return ForwardModel::Noise::White;
    if (name == "pink") return ForwardModel::Noise::Pink;
    throw ValidationError("unknown noise model '" + name + "'");
}

ForwardModel default_forward_model(int channels, double l_gen_s, uint64_t seed) {
    if (channels < 2) throw ValidationError("need at least 2 channels");
    const int l = static_cast<int>(std::lround(l_gen_s * kEegRateHz));
    if (l < 2) throw ValidationError("generator response length too short");

    Rng rng(mix_seed(seed, 0x0f0d));
    ForwardModel fm;
    fm.seed = seed;

    for (auto& seg : fm.r_true) {
        seg = Eigen::VectorXd::Zero(l);
        const int n_comp = rng.range_int(2, 3);
        for (int comp = 0; comp < n_comp; ++comp) {
            const double f = rng.uniform(5.0, 15.0);
            const double tau = rng.uniform(0.05, 0.15);
            const double amp = rng.uniform(0.5, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            for (int i = 0; i < l; ++i) {
                const double t = i / kEegRateHz;
                seg[i] += amp * std::sin(2.0 * M_PI * f * t) * std::exp(-t / tau);
            }
        }
        const double peak = seg.cwiseAbs().maxCoeff();
        if (peak > 0) seg /= peak;
    }

    // rear (occipital-like) subset carries the response; covert trials tilt
    // it toward one half of that subset
    const int rear = std::max(2, channels / 4);
    const int rear_start = channels - rear;
    fm.a_true = Eigen::VectorXd::Zero(channels);
    fm.lateral_profile = Eigen::VectorXd::Zero(channels);
    for (int c = 0; c < channels; ++c) fm.a_true[c] = 0.1 * rng.normal();
    for (int c = rear_start; c < channels; ++c) {
        fm.a_true[c] += rng.uniform(0.8, 1.2);
        const int pos = c - rear_start;
        if (pos < rear / 2)
            fm.lateral_profile[c] = 0.25;
        else if (pos >= rear - rear / 2)
            fm.lateral_profile[c] = -0.25;
    }
    return fm;
}

Eigen::VectorXd pink_noise(Rng& rng, long n) {
    // three-pole "economy" pinking filter; gains chosen for a 1/f slope
    // across the audio band, normalized here to unit stationary variance
    static const double kA[3] = {0.99765, 0.96300, 0.57000};
    static const double kC[3] = {0.0990460, 0.2965164, 1.0526913};
    static const double kDirect = 0.1848;
    static const double kStd = [] {
        double var = kDirect * kDirect;
        for (int i = 0; i < 3; ++i) {
            var += 2.0 * kDirect * kC[i];
            for (int j = 0; j < 3; ++j) var += kC[i] * kC[j] / (1.0 - kA[i] * kA[j]);
        }
        return std::sqrt(var);
    }();

    Eigen::VectorXd out(n);
    double b0 = 0, b1 = 0, b2 = 0;
    for (long i = 0; i < n; ++i) {
        const double w = rng.normal();
        b0 = kA[0] * b0 + kC[0] * w;
        b1 = kA[1] * b1 + kC[1] * w;
        b2 = kA[2] * b2 + kC[2] * w;
        out[i] = (b0 + b1 + b2 + kDirect * w) / kStd;
    }
    return out;
}

namespace {

Eigen::MatrixXd clean_signal(const ForwardModel& fm, const TrialSpec& trial, const CodePair& pair,
                             Eigen::VectorXd* a_eff_out, Eigen::VectorXd* s_out) {
    const BitSequence& code = trial.cued_side == Side::Left ? pair.left : pair.right;
    const StructureMatrix m = structure_for_code(code, kTrialSeconds, fm.l_gen());
    Eigen::VectorXd r(static_cast<long>(kNumEvents) * fm.l_gen());
    for (int e = 0; e < kNumEvents; ++e)
        r.segment(static_cast<long>(e) * fm.l_gen(), fm.l_gen()) = fm.r_true[static_cast<size_t>(e)];
    const Eigen::VectorXd s = m.data.transpose() * r;

    Eigen::VectorXd a_eff = fm.a_true;
    if (trial.condition == Condition::Covert && fm.lateral_profile.size() == fm.a_true.size())
        a_eff += (trial.cued_side == Side::Left ? 1.0 : -1.0) * fm.lateral_profile;

    const double gain = trial.condition == Condition::Overt ? fm.overt_gain : fm.covert_gain;
    if (a_eff_out) *a_eff_out = a_eff;
    if (s_out) *s_out = s;
    return gain * (a_eff * s.transpose());
}

}  // namespace

Eigen::MatrixXd simulate_trial(const ForwardModel& fm, const TrialSpec& trial, const CodePair& pair,
                               Rng& rng) {
    validate(fm);
    Eigen::VectorXd a_eff, s;
    Eigen::MatrixXd x = clean_signal(fm, trial, pair, &a_eff, &s);
    if (std::isinf(fm.snr)) return x;

    // sigma references the un-gained signal, so the condition gain scales
    // the effective SNR rather than being cancelled by it
    double sigma = 1.0;
    if (fm.snr > 0) {
        const double peak = a_eff.cwiseAbs().maxCoeff();
        const double rms = std::sqrt(s.squaredNorm() / static_cast<double>(s.size()));
        sigma = peak * rms / fm.snr;
    } else {
        x.setZero();
    }

    const long T = x.cols();
    for (long c = 0; c < x.rows(); ++c) {
        if (fm.noise == ForwardModel::Noise::Pink) {
            x.row(c) += sigma * pink_noise(rng, T).transpose();
        } else {
            for (long t = 0; t < T; ++t) x(c, t) += sigma * rng.normal();
        }
    }
    return x;
}

void validate(const Dataset& ds) {
    if (ds.trials.size() != ds.labels.size() || ds.trials.size() != ds.conditions.size())
        throw ValidationError("dataset trial/label/condition counts differ");
    if (!ds.trials.empty()) {
        const long C = ds.trials[0].rows(), T = ds.trials[0].cols();
        for (const auto& x : ds.trials)
            if (x.rows() != C || x.cols() != T) throw ValidationError("ragged dataset trials");
        if (static_cast<long>(ds.channel_names.size()) != C)
            throw ValidationError("dataset channel names do not match the data");
    }
    for (int y : ds.labels)
        if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    if (ds.left_code.size() == 0 || ds.left_code.size() != ds.right_code.size())
        throw ValidationError("dataset codes missing or mismatched");
}

std::vector<std::string> default_channel_names(int channels) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(channels));
    for (int c = 1; c <= channels; ++c) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "ch%02d", c);
        names.emplace_back(buf);
    }
    return names;
}

Dataset simulate_dataset(const SessionPlan& plan, const ForwardModel& fm, const CodePair& pair,
                         uint64_t seed) {
    validate(plan);
    validate(fm);
    Dataset ds;
    ds.seed = seed;
    ds.model = fm;
    ds.left_code = pair.left;
    ds.right_code = pair.right;
    ds.rate_hz = kEegRateHz;
    ds.channel_names = default_channel_names(fm.channels());

    long idx = 0;
    for (const auto& run : plan.runs) {
        for (const auto& trial : run.trials) {
            Rng rng(mix_seed(seed, 0x7210a1 + static_cast<uint64_t>(idx)));
            ds.trials.push_back(simulate_trial(fm, trial, pair, rng));
            ds.labels.push_back(trial.cued_side == Side::Right ? 1 : 0);
            ds.conditions.push_back(trial.condition);
            ++idx;
        }
    }
    validate(ds);
    return ds;
}

TrialSet condition_subset(const Dataset& ds, Condition cond) {
    validate(ds);
    TrialSet set;
    set.condition = to_string(cond);
    set.channel_names = ds.channel_names;
    set.rate_hz = ds.rate_hz;
    for (size_t j = 0; j < ds.trials.size(); ++j) {
        if (ds.conditions[j] != cond) continue;
        set.trials.push_back(ds.trials[j]);
        set.labels.push_back(ds.labels[j]);
    }
    return set;
}

RawSession simulate_raw_session(const SessionPlan& plan, const ForwardModel& fm,
                                const CodePair& pair, uint64_t seed) {
    validate(plan);
    validate(fm);
    const double raw_rate = kAcquisitionRateHz;
    const long trial_len = std::lround(kTrialSeconds * raw_rate);
    const long gap = std::lround(2.0 * raw_rate);
    const long n_trials = static_cast<long>(plan.n_trials());
    const long total = gap + n_trials * (trial_len + gap);

    RawSession raw;
    raw.seed = seed;
    raw.model = fm;
    raw.left_code = pair.left;
    raw.right_code = pair.right;
    raw.recording.rate_hz = raw_rate;
    raw.recording.channel_names = default_channel_names(fm.channels());
    raw.recording.data = Eigen::MatrixXd::Zero(fm.channels(), total);

    // broadband background noise at the acquisition rate; the 120-referred
    // sigma is inflated so that downsampling to the narrower band lands the
    // trial noise near the forward model's nominal level
    Rng noise_rng(mix_seed(seed, 0xba5e));
    double sigma = 0.0;
    if (!std::isinf(fm.snr)) {
        if (fm.snr > 0) {
            TrialSpec probe = plan.runs[0].trials[0];
            Eigen::VectorXd a_eff, s;
            clean_signal(fm, probe, pair, &a_eff, &s);
            sigma = a_eff.cwiseAbs().maxCoeff() *
                    std::sqrt(s.squaredNorm() / static_cast<double>(s.size())) / fm.snr;
        } else {
            sigma = 1.0;
        }
        sigma *= std::sqrt(raw_rate / kEegRateHz);
        for (long c = 0; c < fm.channels(); ++c) {
            if (fm.noise == ForwardModel::Noise::Pink) {
                raw.recording.data.row(c) = sigma * pink_noise(noise_rng, total).transpose();
            } else {
                for (long t = 0; t < total; ++t) raw.recording.data(c, t) = sigma * noise_rng.normal();
            }
        }
        // mains interference, common phase across channels
        const double line_amp = 3.0 * sigma;
        const double phase = noise_rng.uniform(0.0, 2.0 * M_PI);
        for (long t = 0; t < total; ++t) {
            const double v = line_amp * std::sin(2.0 * M_PI * 50.0 * t / raw_rate + phase);
            raw.recording.data.col(t).array() += v;
        }
    }

    long onset = gap;
    for (const auto& run : plan.runs) {
        for (const auto& trial : run.trials) {
            const Eigen::MatrixXd clean = clean_signal(fm, trial, pair, nullptr, nullptr);
            if (!(fm.snr > 0) && !std::isinf(fm.snr)) {
                // snr == 0: signal suppressed, background noise only
            } else {
                for (long c = 0; c < clean.rows(); ++c) {
                    const Eigen::VectorXd up = resample_poly(clean.row(c).transpose(), 64, 15);
                    raw.recording.data.row(c).segment(onset, trial_len) += up.head(trial_len).transpose();
                }
            }
            raw.recording.stimulus_onsets.push_back(onset);
            raw.labels.push_back(trial.cued_side == Side::Right ? 1 : 0);
            raw.conditions.push_back(trial.condition);
            onset += trial_len + gap;
        }
    }
    validate(raw.recording);
    return raw;
}

Dataset preprocess_session(const RawSession& raw) {
    Dataset ds;
    ds.trials = preprocess_recording(raw.recording);
    ds.labels = raw.labels;
    ds.conditions = raw.conditions;
    ds.channel_names = raw.recording.channel_names;
    ds.rate_hz = kEegRateHz;
    ds.left_code = raw.left_code;
    ds.right_code = raw.right_code;
    ds.seed = raw.seed;
    ds.model = raw.model;
    validate(ds);
    return ds;
}

}  // namespace cvep
