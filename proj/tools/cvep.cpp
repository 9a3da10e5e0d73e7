#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvep/errors.hpp"
#include "cvep/eval.hpp"
#include "cvep/io.hpp"
#include "cvep/pipeline.hpp"
#include "cvep/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<cvep::BitSequence> load_or_default_codes(const std::string& path) {
    if (path.empty()) return cvep::default_modulated_set();
    return cvep::load_codes_json(path);
}

// Resolves which condition to evaluate: an explicit request, else the only
// condition present in the dataset.
cvep::Condition resolve_condition(const cvep::Dataset& ds, const std::string& requested) {
    if (!requested.empty()) return cvep::condition_from_string(requested);
    bool has_overt = false, has_covert = false;
    for (cvep::Condition c : ds.conditions)
        (c == cvep::Condition::Overt ? has_overt : has_covert) = true;
    if (has_overt && has_covert)
        throw cvep::ValidationError(
            "dataset contains both conditions; pass --condition overt|covert");
    return has_overt ? cvep::Condition::Overt : cvep::Condition::Covert;
}

int samples_for_length(double length_s, double rate_hz) {
    const double f = length_s * rate_hz;
    const long s = std::lround(f);
    if (s < 1 || std::abs(f - static_cast<double>(s)) > 1e-9)
        throw cvep::ValidationError("length " + cvep::format_double(length_s) +
                                    " s does not map to a whole sample count at " +
                                    cvep::format_double(rate_hz) + " Hz");
    return static_cast<int>(s);
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::string out;
    for (long r = 0; r < m.rows(); ++r) {
        for (long c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += cvep::format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void setup_codes(CLI::App& app) {
    auto* codes = app.add_subcommand("codes", "generate or verify modulated Gold codes");
    codes->require_subcommand(1);

    auto gen_opts = std::make_shared<std::pair<int, std::string>>(6, "codes.json");
    auto* gen = codes->add_subcommand("generate", "write the modulated Gold code set");
    gen->add_option("--degree", gen_opts->first, "LFSR degree (only 6 is shipped)")
        ->capture_default_str();
    gen->add_option("--out", gen_opts->second, "output JSON file")->capture_default_str();
    gen->callback([gen_opts] {
        if (gen_opts->first != 6)
            throw cvep::ValidationError("only the degree-6 preferred pair is shipped; got degree " +
                                        std::to_string(gen_opts->first));
        const auto set = cvep::default_modulated_set();
        cvep::save_codes_json(gen_opts->second, set);
        std::printf("wrote %zu codes (%zu bits each) to %s\n", set.size(), set.front().size(),
                    gen_opts->second.c_str());
    });

    auto verify_file = std::make_shared<std::string>();
    auto* ver = codes->add_subcommand("verify", "re-check a stored code set");
    ver->add_option("file", *verify_file, "codes JSON file")->required();
    ver->callback([verify_file] {
        const auto set = cvep::load_codes_json(*verify_file);
        cvep::verify_modulated_set(set);
        std::printf("%s: %zu codes of %zu bits, all checks passed\n", verify_file->c_str(),
                    set.size(), set.front().size());
    });
}

void setup_stim(CLI::App& app) {
    auto* stim = app.add_subcommand("stim", "stimulus protocol tools");
    stim->require_subcommand(1);

    struct PlanOpts {
        uint64_t seed = 1;
        std::string out = "plan.json";
    };
    auto plan_opts = std::make_shared<PlanOpts>();
    auto* plan = stim->add_subcommand("plan", "write a session plan");
    plan->add_option("--seed", plan_opts->seed, "plan seed")->capture_default_str();
    plan->add_option("--out", plan_opts->out, "output JSON file")->capture_default_str();
    plan->callback([plan_opts] {
        const auto p = cvep::make_session_plan(plan_opts->seed);
        cvep::save_plan_json(plan_opts->out, p);
        std::printf("wrote %zu-trial plan to %s\n", p.n_trials(), plan_opts->out.c_str());
    });

    struct EventOpts {
        std::string code_name = "left";
        std::string codes_file;
        int l_samples = 36;
        double duration_s = 20.0;
        std::string out_events = "events.csv";
        std::string out_structure;
    };
    auto ev_opts = std::make_shared<EventOpts>();
    auto* ev = stim->add_subcommand("events", "dump event/structure matrices as CSV");
    ev->add_option("--code", ev_opts->code_name,
                   "code name, or 'left'/'right' for the default stimulation pair")
        ->capture_default_str();
    ev->add_option("--codes", ev_opts->codes_file, "codes JSON file (default: built-in set)");
    ev->add_option("--L", ev_opts->l_samples, "response length in samples")->capture_default_str();
    ev->add_option("--duration", ev_opts->duration_s, "trial duration in seconds")
        ->capture_default_str();
    ev->add_option("--out-events", ev_opts->out_events, "event matrix CSV")->capture_default_str();
    ev->add_option("--out-structure", ev_opts->out_structure, "structure matrix CSV (optional)");
    ev->callback([ev_opts] {
        cvep::BitSequence code;
        if (ev_opts->code_name == "left" || ev_opts->code_name == "right") {
            const auto pair = cvep::select_code_pair(load_or_default_codes(ev_opts->codes_file),
                                                     cvep::kDefaultShiftBits);
            code = ev_opts->code_name == "left" ? pair.left : pair.right;
        } else {
            const auto set = load_or_default_codes(ev_opts->codes_file);
            const auto it = std::find_if(set.begin(), set.end(), [&](const cvep::BitSequence& c) {
                return c.name == ev_opts->code_name;
            });
            if (it == set.end())
                throw cvep::ValidationError("no code named '" + ev_opts->code_name + "'");
            code = *it;
        }
        const auto events = cvep::derive_events(code, ev_opts->duration_s);
        Eigen::MatrixXd em(cvep::kNumEvents, static_cast<long>(events.cols()));
        for (int e = 0; e < cvep::kNumEvents; ++e)
            for (size_t t = 0; t < events.cols(); ++t)
                em(e, static_cast<long>(t)) = events.rows[static_cast<size_t>(e)][t];
        cvep::write_text_file(ev_opts->out_events, matrix_csv(em));
        std::printf("wrote %ldx%ld event matrix to %s\n", em.rows(), em.cols(),
                    ev_opts->out_events.c_str());
        if (!ev_opts->out_structure.empty()) {
            const auto sm = cvep::build_structure_matrix(events, ev_opts->l_samples);
            cvep::write_text_file(ev_opts->out_structure, matrix_csv(sm.data));
            std::printf("wrote %ldx%ld structure matrix to %s\n", sm.rows(), sm.cols(),
                        ev_opts->out_structure.c_str());
        }
    });
}

void setup_simulate(CLI::App& app) {
    struct SimOpts {
        std::string plan_file;
        std::string codes_file;
        std::string out = "dataset";
        uint64_t seed = 1;
        int channels = 8;
        double snr = 0.15;
        double overt_gain = 1.0;
        double covert_gain = 0.4;
        std::string noise = "white";
        double l_gen_s = 0.3;
        bool raw = false;
    };
    auto opts = std::make_shared<SimOpts>();
    auto* sim = app.add_subcommand("simulate", "synthesize a session from the forward model");
    sim->add_option("--plan", opts->plan_file, "plan JSON (default: plan from --seed)");
    sim->add_option("--codes", opts->codes_file, "codes JSON file (default: built-in set)");
    sim->add_option("--out", opts->out, "output dataset directory")->capture_default_str();
    sim->add_option("--seed", opts->seed, "simulation seed")->capture_default_str();
    sim->add_option("--channels", opts->channels, "channel count")->capture_default_str();
    sim->add_option("--snr", opts->snr, "amplitude SNR on the peak channel (0 = pure noise)")
        ->capture_default_str();
    sim->add_option("--overt-gain", opts->overt_gain, "overt condition gain")
        ->capture_default_str();
    sim->add_option("--covert-gain", opts->covert_gain, "covert condition gain")
        ->capture_default_str();
    sim->add_option("--noise", opts->noise, "noise model: white|pink")->capture_default_str();
    sim->add_option("--l-gen", opts->l_gen_s, "generator response length in seconds")
        ->capture_default_str();
    sim->add_flag("--raw", opts->raw, "emit a continuous 512 Hz session instead of 120 Hz trials");
    sim->callback([opts] {
        const auto pair = cvep::select_code_pair(load_or_default_codes(opts->codes_file),
                                                 cvep::kDefaultShiftBits);
        const auto plan = opts->plan_file.empty() ? cvep::make_session_plan(opts->seed)
                                                  : cvep::load_plan_json(opts->plan_file);
        auto fm = cvep::default_forward_model(opts->channels, opts->l_gen_s,
                                              cvep::mix_seed(opts->seed, 0x11));
        fm.snr = opts->snr;
        fm.overt_gain = opts->overt_gain;
        fm.covert_gain = opts->covert_gain;
        fm.noise = cvep::noise_from_string(opts->noise);
        if (opts->raw) {
            const auto raw =
                cvep::simulate_raw_session(plan, fm, pair, cvep::mix_seed(opts->seed, 0x22));
            cvep::save_raw_session(opts->out, raw);
            std::printf("wrote raw %ldx%ld session (%zu onsets) to %s\n",
                        raw.recording.channels(), raw.recording.samples(),
                        raw.recording.stimulus_onsets.size(), opts->out.c_str());
        } else {
            const auto ds =
                cvep::simulate_dataset(plan, fm, pair, cvep::mix_seed(opts->seed, 0x22));
            cvep::save_dataset(opts->out, ds);
            std::printf("wrote %zu trials (%ldx%ld) to %s\n", ds.size(), ds.channels(),
                        ds.samples(), opts->out.c_str());
        }
    });
}

void setup_preprocess(CLI::App& app) {
    struct PreOpts {
        std::string raw_dir;
        std::string out = "dataset";
    };
    auto opts = std::make_shared<PreOpts>();
    auto* pre = app.add_subcommand("preprocess", "condition a raw 512 Hz session into trials");
    pre->add_option("--raw", opts->raw_dir, "raw session directory")->required();
    pre->add_option("--out", opts->out, "output dataset directory")->capture_default_str();
    pre->callback([opts] {
        const auto raw = cvep::load_raw_session(opts->raw_dir);
        const auto ds = cvep::preprocess_session(raw);
        cvep::save_dataset(opts->out, ds);
        std::printf("preprocessed %zu trials (%ldx%ld at %s Hz) to %s\n", ds.size(), ds.channels(),
                    ds.samples(), cvep::format_double(ds.rate_hz).c_str(), opts->out.c_str());
    });
}

void setup_evaluate(CLI::App& app) {
    struct EvalOpts {
        std::string data_dir;
        double length_s = 0.3;
        std::string condition;
        double ridge = cvep::kDefaultRidge;
        int k = 4;
        int n_perm = 1000;
        uint64_t seed = 1;
        std::string out;
        std::string save_model;
    };
    auto opts = std::make_shared<EvalOpts>();
    auto* ev = app.add_subcommand("evaluate", "chronological cross-validation at one length");
    ev->add_option("--data", opts->data_dir, "dataset directory")->required();
    ev->add_option("--L", opts->length_s, "response length in seconds")->capture_default_str();
    ev->add_option("--condition", opts->condition, "overt|covert (default: the only one present)");
    ev->add_option("--ridge", opts->ridge, "ridge regularization")->capture_default_str();
    ev->add_option("--k", opts->k, "fold count")->capture_default_str();
    ev->add_option("--n-perm", opts->n_perm, "label permutations for the p-value")
        ->capture_default_str();
    ev->add_option("--seed", opts->seed, "permutation seed")->capture_default_str();
    ev->add_option("--out", opts->out, "write the result JSON here as well");
    ev->add_option("--save-model", opts->save_model,
                   "fit a model on all trials of the condition and save it");
    ev->callback([opts] {
        const auto ds = cvep::load_dataset(opts->data_dir);
        const auto cond = resolve_condition(ds, opts->condition);
        const auto subset = cvep::condition_subset(ds, cond);
        if (subset.size() == 0)
            throw cvep::ValidationError("dataset has no " + cvep::to_string(cond) + " trials");
        const int l_samples = samples_for_length(opts->length_s, ds.rate_hz);
        const auto res = cvep::cross_validate(subset, ds.left_code, ds.right_code, l_samples,
                                              opts->ridge, opts->k, opts->n_perm, opts->seed);
        const json j = cvep::to_json(res);
        std::printf("%s\n", j.dump(2).c_str());
        if (!opts->out.empty()) cvep::write_text_file(opts->out, j.dump(2) + "\n");
        if (!opts->save_model.empty()) {
            const double duration = static_cast<double>(subset.samples()) / subset.rate_hz;
            const auto model = cvep::fit_reconvolution_cca(
                subset, cvep::structure_for_code(ds.left_code, duration, l_samples, ds.rate_hz),
                cvep::structure_for_code(ds.right_code, duration, l_samples, ds.rate_hz),
                opts->ridge);
            cvep::save_model_json(opts->save_model, model, ds.left_code, ds.right_code);
        }
    });
}

void setup_sweep(CLI::App& app) {
    struct SweepOpts {
        std::string data_dir;
        std::string out = "curve.csv";
        std::string condition;
        std::vector<double> lengths = cvep::default_sweep_lengths();
        double ridge = cvep::kDefaultRidge;
        int k = 4;
        int n_perm = 1000;
        uint64_t seed = 1;
    };
    auto opts = std::make_shared<SweepOpts>();
    auto* sw = app.add_subcommand("sweep", "cross-validate over a response-length grid");
    sw->add_option("--data", opts->data_dir, "dataset directory")->required();
    sw->add_option("--out", opts->out, "output curve CSV")->capture_default_str();
    sw->add_option("--condition", opts->condition, "overt|covert (default: the only one present)");
    sw->add_option("--lengths", opts->lengths, "response lengths in seconds")
        ->delimiter(',')
        ->expected(-1);
    sw->add_option("--ridge", opts->ridge, "ridge regularization")->capture_default_str();
    sw->add_option("--k", opts->k, "fold count")->capture_default_str();
    sw->add_option("--n-perm", opts->n_perm, "label permutations per length")
        ->capture_default_str();
    sw->add_option("--seed", opts->seed, "permutation seed")->capture_default_str();
    sw->callback([opts] {
        const auto ds = cvep::load_dataset(opts->data_dir);
        const auto cond = resolve_condition(ds, opts->condition);
        const auto subset = cvep::condition_subset(ds, cond);
        if (subset.size() == 0)
            throw cvep::ValidationError("dataset has no " + cvep::to_string(cond) + " trials");
        const auto curve =
            cvep::sweep_response_length(subset, ds.left_code, ds.right_code, opts->lengths,
                                        opts->ridge, opts->k, opts->n_perm, opts->seed);
        cvep::write_text_file(opts->out, cvep::curve_to_csv(curve));
        std::printf("wrote %zu-point curve to %s\n", curve.size(), opts->out.c_str());
        for (const auto& pt : curve)
            std::printf("  L=%s s  accuracy=%s  p=%s\n", cvep::format_double(pt.length_s).c_str(),
                        cvep::format_double(pt.result.mean_accuracy).c_str(),
                        cvep::format_double(pt.result.p_value).c_str());
    });
}

void setup_report(CLI::App& app) {
    struct ReportOpts {
        std::string svg = "report.svg";
        std::vector<std::string> curves;
    };
    auto opts = std::make_shared<ReportOpts>();
    auto* rep = app.add_subcommand("report", "render accuracy curves as an SVG plot");
    rep->add_option("--svg", opts->svg, "output SVG file")->capture_default_str();
    rep->add_option("--curve", opts->curves, "curve CSV as file or file:label (repeatable)")
        ->required()
        ->expected(-1);
    rep->callback([opts] {
        std::vector<cvep::NamedCurve> curves;
        for (const std::string& spec : opts->curves) {
            const size_t colon = spec.rfind(':');
            std::string file = spec, label;
            if (colon != std::string::npos && colon > 1) {
                file = spec.substr(0, colon);
                label = spec.substr(colon + 1);
            }
            if (label.empty()) label = fs::path(file).stem().string();
            curves.push_back({label, cvep::curve_from_csv(cvep::read_text_file(file))});
        }
        cvep::write_text_file(opts->svg, cvep::render_sweep_svg(curves));
        std::printf("wrote %s\n", opts->svg.c_str());
    });
}

void setup_run(CLI::App& app) {
    struct RunOpts {
        std::string config_file;
        std::string out = "out";
        std::optional<uint64_t> seed;
    };
    auto opts = std::make_shared<RunOpts>();
    auto* run = app.add_subcommand("run", "full pipeline: codes, plan, simulate, evaluate, report");
    run->add_option("--config", opts->config_file,
                    "run config JSON, or a manifest.json from a previous run");
    run->add_option("--out", opts->out, "output directory")->capture_default_str();
    run->add_option("--seed", opts->seed, "override the config seed");
    run->callback([opts] {
        cvep::RunConfig cfg;
        if (!opts->config_file.empty()) cfg = cvep::load_run_config(opts->config_file);
        if (opts->seed) cfg.seed = *opts->seed;
        const json manifest = cvep::run_experiment(cfg, opts->out);
        std::printf("run complete: %s\n", (fs::path(opts->out) / "manifest.json").c_str());
        std::printf("  overt accuracy:  %s\n",
                    manifest["summary"]["overt_accuracy"].dump().c_str());
        std::printf("  covert accuracy: %s\n",
                    manifest["summary"]["covert_accuracy"].dump().c_str());
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"c-VEP stimulus design, EEG simulation, and decoding pipeline"};
    app.require_subcommand(1);
    setup_codes(app);
    setup_stim(app);
    setup_simulate(app);
    setup_preprocess(app);
    setup_evaluate(app);
    setup_sweep(app);
    setup_report(app);
    setup_run(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const cvep::ValidationError& e) {
        std::fprintf(stderr, "%s\n", json{{"error", e.what()}, {"kind", "validation"}}.dump().c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", json{{"error", e.what()}, {"kind", "runtime"}}.dump().c_str());
        return 1;
    }
    return 0;
}
