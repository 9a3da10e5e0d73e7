// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cvep/codes.hpp"
#include "cvep/eval.hpp"
#include "cvep/io.hpp"
#include "cvep/pipeline.hpp"
#include "cvep/simulator.hpp"

using namespace cvep;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s  %d. %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ac = a.array() - a.mean();
    Eigen::VectorXd bc = b.array() - b.mean();
    return ac.dot(bc) / (ac.norm() * bc.norm());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

const double kInf = std::numeric_limits<double>::infinity();

// 1: 65 codes of 63 bits; modulated to 126 bits without triple flashes;
// distinct pairs three-valued; all inside 5 s.
void criterion_code_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string why;

    const auto gold = gold_code_set(default_lfsr_a(), default_lfsr_b());
    if (gold.size() != 65) {
        ok = false;
        why = "set has " + std::to_string(gold.size()) + " codes";
    }
    for (const auto& c : gold)
        if (c.size() != 63) ok = false;

    for (const auto& c : gold) {
        const auto m = modulate(c);
        if (m.size() != 126) ok = false;
        for (size_t i = 0; i < m.size() && ok; ++i)
            if (m.bits[i] && m.bits[(i + 1) % 126] && m.bits[(i + 2) % 126]) {
                ok = false;
                why = "'111' in modulated " + m.name;
            }
    }

    for (size_t i = 0; i < gold.size() && ok; ++i)
        for (size_t j = i + 1; j < gold.size() && ok; ++j)
            for (long lag = 0; lag < 63; ++lag) {
                const long c = circular_correlation_sum(gold[i], gold[j], lag);
                if (c != -17 && c != -1 && c != 15) {
                    ok = false;
                    why = "cross-correlation " + std::to_string(c) + " between " + gold[i].name +
                          " and " + gold[j].name;
                    break;
                }
            }

    const double dt = seconds_since(t0);
    if (dt >= 5.0) {
        ok = false;
        why = "took " + format_double(dt) + " s";
    }
    report(1, ok,
           "code correctness: 65x63 Gold set, 126-bit modulation, three-valued "
           "cross-correlations in " +
               format_double(dt) + " s" + (why.empty() ? "" : " [" + why + "]"));
}

// 2: the shift-61 pick is within the 10th percentile of candidate
// autocorrelation magnitudes.
void criterion_pair_selection() {
    const auto set = default_modulated_set();
    const auto pair = select_code_pair(set, kDefaultShiftBits);
    const double rho = std::abs(circular_correlation(pair.left, pair.left, kDefaultShiftBits));

    std::vector<double> mags;
    for (const auto& c : set) mags.push_back(std::abs(circular_correlation(c, c, kDefaultShiftBits)));
    std::sort(mags.begin(), mags.end());
    const size_t rank = static_cast<size_t>(
        std::ceil(0.1 * static_cast<double>(mags.size())));  // nearest-rank percentile
    const double p10 = mags[rank - 1];

    report(2, rho <= p10,
           "pair selection: |rho(61)| = " + format_double(rho) + " <= 10th percentile " +
               format_double(p10));
}

// 3: r'M equals direct per-flash superposition on random instances.
void criterion_reconvolution_identity() {
    Rng rng(77);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int n_bits = rng.range_int(4, 12);
        BitSequence code;
        code.rate_hz = 60.0;
        code.name = "rand";
        for (;;) {
            code.bits.clear();
            bool any_zero = false;
            for (int i = 0; i < n_bits; ++i) {
                code.bits.push_back(static_cast<uint8_t>(rng.below(2)));
                any_zero = any_zero || code.bits.back() == 0;
            }
            if (!any_zero) continue;
            bool triple = false;
            for (int i = 0; i < n_bits && !triple; ++i)
                triple = code.bits[static_cast<size_t>(i)] &&
                         code.bits[static_cast<size_t>((i + 1) % n_bits)] &&
                         code.bits[static_cast<size_t>((i + 2) % n_bits)];
            if (!triple) break;
        }
        const double duration = rng.range_int(2, 5) * static_cast<double>(n_bits) / 60.0;
        const int L = rng.range_int(1, 9);
        const auto ev = derive_events(code, duration);
        const auto sm = build_structure_matrix(ev, L);

        Eigen::VectorXd r(3 * L);
        for (int i = 0; i < r.size(); ++i) r(i) = rng.normal();
        const Eigen::RowVectorXd via = r.transpose() * sm.data;

        Eigen::RowVectorXd direct = Eigen::RowVectorXd::Zero(sm.cols());
        for (int e = 0; e < kNumEvents; ++e)
            for (long t = 0; t < sm.cols(); ++t)
                if (ev.rows[static_cast<size_t>(e)][static_cast<size_t>(t)])
                    for (int lag = 0; lag < L && t + lag < sm.cols(); ++lag)
                        direct(t + lag) += r(e * L + lag);
        worst = std::max(worst, (via - direct).cwiseAbs().maxCoeff());
    }
    report(3, worst <= 1e-10,
           "reconvolution identity: max |r'M - direct| = " + format_double(worst) +
               " over 100 instances");
}

// 4: noise-free recovery of r and a; perfect overt sweep at high SNR; the
// C=64 session within 60 s.
void criterion_decoder_recovery() {
    const auto pair = default_code_pair();

    auto fm8 = default_forward_model(8, 0.3, 2);
    fm8.snr = kInf;
    const auto clean = simulate_dataset(make_session_plan(2), fm8, pair, 3);
    const auto overt8 = condition_subset(clean, Condition::Overt);
    const auto m0 = structure_for_code(clean.left_code, 20.0, 36);
    const auto m1 = structure_for_code(clean.right_code, 20.0, 36);
    const auto model = fit_reconvolution_cca(overt8, m0, m1);

    Eigen::VectorXd r_true(3 * fm8.l_gen());
    for (int e = 0; e < kNumEvents; ++e)
        r_true.segment(e * fm8.l_gen(), fm8.l_gen()) = fm8.r_true[static_cast<size_t>(e)];
    const double corr_r = std::abs(pearson(model.r, r_true));
    const double corr_a = std::abs(pearson(spatial_pattern(model, overt8).a, fm8.a_true));

    const auto t0 = std::chrono::steady_clock::now();
    auto fm64 = default_forward_model(64, 0.3, 2);
    fm64.snr = 50.0;
    const auto ds64 = simulate_dataset(make_session_plan(2), fm64, pair, 4);
    const auto overt64 = condition_subset(ds64, Condition::Overt);
    const auto sweep = sweep_response_length(overt64, ds64.left_code, ds64.right_code,
                                             default_sweep_lengths(), kDefaultRidge, 4, 0);
    bool flat = sweep.size() == 9;
    for (const auto& pt : sweep) flat = flat && pt.result.mean_accuracy == 1.0;
    const double dt = seconds_since(t0);

    const bool ok = corr_r >= 0.99 && corr_a >= 0.99 && flat && dt < 60.0;
    report(4, ok,
           "decoder recovery: |corr(r)| = " + format_double(corr_r) + ", |corr(a)| = " +
               format_double(corr_a) + ", overt sweep " + (flat ? "flat at 1.0" : "NOT flat") +
               ", C=64 session in " + format_double(dt) + " s");
}

// 5: canonical correlation equals exhaustive grid search on toy instances.
void criterion_cca_oracle() {
    Rng rng(665);
    const double pi = std::acos(-1.0);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const long T = rng.range_int(60, 150);
        const int L = rng.range_int(1, 2);
        const long M = 3 * L;
        const auto fill = [&rng](long r, long c) {
            Eigen::MatrixXd m(r, c);
            for (long i = 0; i < r; ++i)
                for (long j = 0; j < c; ++j) m(i, j) = rng.normal();
            return m;
        };
        TrialSet set;
        set.trials = {fill(2, T), fill(2, T)};
        set.labels = {0, 1};
        StructureMatrix m0, m1;
        m0.data = fill(M, T);
        m0.L = L;
        m1.data = fill(M, T);
        m1.L = L;
        const auto model = fit_reconvolution_cca(set, m0, m1, 0.0);

        Eigen::MatrixXd xc(2, 2 * T), dc(M, 2 * T);
        xc << set.trials[0], set.trials[1];
        dc << m0.data, m1.data;
        xc.colwise() -= xc.rowwise().mean().eval();
        dc.colwise() -= dc.rowwise().mean().eval();
        const Eigen::MatrixXd sxx = xc * xc.transpose();
        const Eigen::MatrixXd gain = (xc * dc.transpose()) *
                                     (dc * dc.transpose()).ldlt().solve(dc * xc.transpose());
        double best = 0.0;
        for (int g = 0; g < 100000; ++g) {
            const double t = pi * g / 100000.0;
            const Eigen::Vector2d w(std::cos(t), std::sin(t));
            best = std::max(best, std::sqrt(std::max(0.0, w.dot(gain * w) / w.dot(sxx * w))));
        }
        worst = std::max(worst, std::abs(model.rho_train - best));
    }
    report(5, worst <= 1e-5,
           "cca oracle: max |rho - grid search| = " + format_double(worst) + " over 20 instances");
}

// 6: chance-level behavior at snr 0 and the 1/1001 p-value floor.
void criterion_null_behavior() {
    const auto pair = default_code_pair();
    auto fm = default_forward_model(8, 0.3, 6);
    fm.snr = 0.0;
    const auto null_ds = simulate_dataset(make_session_plan(6), fm, pair, 7);
    const auto null_covert = condition_subset(null_ds, Condition::Covert);
    const auto null_res = cross_validate(null_covert, null_ds.left_code, null_ds.right_code, 36,
                                         kDefaultRidge, 4, 1000, 1);
    const bool in_ci = null_res.mean_accuracy >= 0.3904 && null_res.mean_accuracy <= 0.6096;

    fm.snr = kInf;
    const auto clean = simulate_dataset(make_session_plan(6), fm, pair, 7);
    const auto covert = condition_subset(clean, Condition::Covert);
    const auto perfect = cross_validate(covert, clean.left_code, clean.right_code, 36,
                                        kDefaultRidge, 4, 1000, 1);
    const double expect = 1.0 / 1001.0;
    const bool floor_hit = perfect.mean_accuracy == 1.0 &&
                           std::abs(perfect.p_value - expect) < 1e-12 && perfect.p_value < 0.001;

    report(6, in_ci && null_res.p_value > 0.01 && floor_hit,
           "null behavior: snr-0 accuracy " + format_double(null_res.mean_accuracy) +
               " in [0.3904, 0.6096], p = " + format_double(null_res.p_value) +
               " > 0.01; perfect run p = " + format_double(perfect.p_value) + " < 0.001");
}

// 7: the filter chain passes 10 Hz, kills 50 Hz, and resamples 10496 -> 2400.
void criterion_preprocessing() {
    const double pi = std::acos(-1.0);
    const long n = 16384;
    RawRecording rec;
    rec.data = Eigen::MatrixXd(2, n);
    for (long i = 0; i < n; ++i) {
        rec.data(0, i) = std::sin(2.0 * pi * 10.0 * i / 512.0);
        rec.data(1, i) = std::sin(2.0 * pi * 50.0 * i / 512.0);
    }
    const auto rms = [](const Eigen::VectorXd& x) {
        const long q = x.size() / 4;
        return std::sqrt(x.segment(q, x.size() - 2 * q).squaredNorm() /
                         static_cast<double>(x.size() - 2 * q));
    };

    const auto banded = apply_filter(rec, FilterSpec::bandpass(1.0, 40.0));
    const double gain10 =
        20.0 * std::log10(rms(banded.data.row(0)) / rms(rec.data.row(0)));
    const auto notched = apply_filter(rec, FilterSpec::notch(50.0));
    const double gain50 =
        20.0 * std::log10(rms(notched.data.row(1)) / rms(rec.data.row(1)));

    const Eigen::MatrixXd epoch = Eigen::MatrixXd::Random(2, 10496);
    const auto trimmed = resample_and_trim(epoch);

    const bool ok = std::abs(gain10) <= 1.0 && gain50 <= -20.0 && trimmed.cols() == 2400;
    report(7, ok,
           "preprocessing: 10 Hz gain " + format_double(gain10) + " dB, 50 Hz gain " +
               format_double(gain50) + " dB, epoch -> " + std::to_string(trimmed.cols()) +
               " samples");
}

// 8: 1000 protocol trials satisfy every stated constraint.
void criterion_protocol_constraints() {
    bool ok = true;
    std::string why;
    long trials_seen = 0;
    for (uint64_t seed = 1; seed <= 10 && ok; ++seed) {
        const auto plan = make_session_plan(seed);
        int overt = 0, covert = 0;
        for (const auto& run : plan.runs) {
            int left = 0;
            for (const auto& trial : run.trials) {
                ++trials_seen;
                (trial.condition == Condition::Overt ? overt : covert) += 1;
                left += trial.cued_side == Side::Left;
                for (const auto* tl : {&trial.left_timeline, &trial.right_timeline}) {
                    if (tl->slots.size() != 80) ok = false;
                    int prev = -100;
                    for (int i = 0; i < 80; ++i) {
                        if (tl->slots[static_cast<size_t>(i)] != kTargetShape) continue;
                        if (i - prev < 4) ok = false;
                        prev = i;
                    }
                }
                for (int i = 0; i < 80; ++i)
                    if (trial.left_timeline.slots[static_cast<size_t>(i)] == kTargetShape &&
                        trial.right_timeline.slots[static_cast<size_t>(i)] == kTargetShape)
                        ok = false;
                if (trial.left_timeline.target_count() == trial.right_timeline.target_count())
                    ok = false;
                if (!ok) {
                    why = "timeline constraint violated in seed " + std::to_string(seed);
                    break;
                }
            }
            if (left != 10 && ok) {
                ok = false;
                why = "cue imbalance in seed " + std::to_string(seed);
            }
        }
        if (ok && (overt != 20 || covert != 80)) {
            ok = false;
            why = "condition split " + std::to_string(overt) + "/" + std::to_string(covert);
        }
    }
    report(8, ok && trials_seen == 1000,
           "protocol constraints: " + std::to_string(trials_seen) +
               " trials checked" + (why.empty() ? "" : " [" + why + "]"));
}

// 9: replaying a manifest regenerates the curve files byte for byte.
void criterion_reproducibility() {
    const fs::path dir = fs::temp_directory_path() / "cvep_acceptance_runs";
    fs::remove_all(dir);

    RunConfig cfg;
    cfg.seed = 42;
    cfg.channels = 6;
    cfg.n_perm = 200;
    const auto manifest = run_experiment(cfg, dir / "a", false);

    const auto replay = load_run_config(dir / "a" / "manifest.json");
    const auto manifest2 = run_experiment(replay, dir / "b", false);

    const bool curves_equal =
        slurp(dir / "a" / "curve_overt.csv") == slurp(dir / "b" / "curve_overt.csv") &&
        slurp(dir / "a" / "curve_covert.csv") == slurp(dir / "b" / "curve_covert.csv");
    const bool hashes_equal = manifest.at("config_hash") == manifest2.at("config_hash");
    const bool summaries_equal = manifest.at("summary") == manifest2.at("summary");

    report(9, curves_equal && hashes_equal && summaries_equal,
           std::string("reproducibility: manifest replay curves ") +
               (curves_equal ? "identical" : "DIFFER") + ", summaries " +
               (summaries_equal ? "identical" : "DIFFER"));
    fs::remove_all(dir);
}

}  // namespace

int main() {
    criterion_code_correctness();
    criterion_pair_selection();
    criterion_reconvolution_identity();
    criterion_decoder_recovery();
    criterion_cca_oracle();
    criterion_null_behavior();
    criterion_preprocessing();
    criterion_protocol_constraints();
    criterion_reproducibility();

    if (g_failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
