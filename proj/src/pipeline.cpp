#include "cvep/pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "cvep/errors.hpp"
#include "cvep/eval.hpp"
#include "cvep/io.hpp"
#include "cvep/simulator.hpp"

namespace cvep {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kVersion = "0.1.0";

void validate(const RunConfig& cfg) {
    if (cfg.channels < 2) throw ValidationError("config: need at least 2 channels");
    if (std::isnan(cfg.snr) || cfg.snr < 0) throw ValidationError("config: snr must be >= 0");
    if (cfg.overt_gain <= 0 || cfg.covert_gain <= 0)
        throw ValidationError("config: condition gains must be positive");
    noise_from_string(cfg.noise);
    if (cfg.sweep_lengths_s.empty()) throw ValidationError("config: sweep length grid is empty");
    for (double len : cfg.sweep_lengths_s)
        if (len <= 0) throw ValidationError("config: sweep lengths must be positive");
    if (cfg.l_eval_s <= 0 || cfg.l_gen_s <= 0)
        throw ValidationError("config: response lengths must be positive");
    if (cfg.ridge < 0) throw ValidationError("config: ridge must be >= 0");
    if (cfg.k < 2) throw ValidationError("config: need at least 2 folds");
    if (cfg.n_perm < 0) throw ValidationError("config: n_perm must be >= 0");
}

json to_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["channels"] = cfg.channels;
    j["snr"] = cfg.snr;
    j["overt_gain"] = cfg.overt_gain;
    j["covert_gain"] = cfg.covert_gain;
    j["noise"] = cfg.noise;
    j["l_gen_s"] = cfg.l_gen_s;
    j["l_eval_s"] = cfg.l_eval_s;
    j["sweep_lengths_s"] = cfg.sweep_lengths_s;
    j["ridge"] = cfg.ridge;
    j["k"] = cfg.k;
    j["n_perm"] = cfg.n_perm;
    return j;
}

RunConfig run_config_from_json(const json& in) {
    const json& j = in.contains("config") ? in.at("config") : in;
    if (!j.is_object()) throw ValidationError("config must be a JSON object");

    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "seed")
            cfg.seed = value.get<uint64_t>();
        else if (key == "channels")
            cfg.channels = value.get<int>();
        else if (key == "snr")
            cfg.snr = value.get<double>();
        else if (key == "overt_gain")
            cfg.overt_gain = value.get<double>();
        else if (key == "covert_gain")
            cfg.covert_gain = value.get<double>();
        else if (key == "noise")
            cfg.noise = value.get<std::string>();
        else if (key == "l_gen_s")
            cfg.l_gen_s = value.get<double>();
        else if (key == "l_eval_s")
            cfg.l_eval_s = value.get<double>();
        else if (key == "sweep_lengths_s")
            cfg.sweep_lengths_s = value.get<std::vector<double>>();
        else if (key == "ridge")
            cfg.ridge = value.get<double>();
        else if (key == "k")
            cfg.k = value.get<int>();
        else if (key == "n_perm")
            cfg.n_perm = value.get<int>();
        else
            throw ValidationError("config: unknown field '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

RunConfig load_run_config(const fs::path& path) {
    const std::string text = read_text_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("invalid JSON in " + path.string());
    try {
        return run_config_from_json(j);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string config_hash(const RunConfig& cfg) {
    return to_hex(fnv1a64(to_json(cfg).dump()));
}

namespace {

void note(bool verbose, const std::string& line) {
    if (verbose) std::printf("%s\n", line.c_str());
}

}  // namespace

json run_experiment(const RunConfig& cfg, const fs::path& out_dir, bool verbose) {
    validate(cfg);
    fs::create_directories(out_dir);
    std::vector<std::string> artifacts;

    note(verbose, "[1/6] codes");
    const std::vector<BitSequence> codes = default_modulated_set();
    save_codes_json(out_dir / "codes.json", codes);
    artifacts.push_back("codes.json");
    const CodePair pair = select_code_pair(codes, kDefaultShiftBits);

    note(verbose, "[2/6] session plan");
    const SessionPlan plan = make_session_plan(cfg.seed);
    save_plan_json(out_dir / "plan.json", plan);
    artifacts.push_back("plan.json");

    note(verbose, "[3/6] simulation");
    ForwardModel fm = default_forward_model(cfg.channels, cfg.l_gen_s, mix_seed(cfg.seed, 0x11));
    fm.snr = cfg.snr;
    fm.overt_gain = cfg.overt_gain;
    fm.covert_gain = cfg.covert_gain;
    fm.noise = noise_from_string(cfg.noise);
    const Dataset sim = simulate_dataset(plan, fm, pair, mix_seed(cfg.seed, 0x22));
    save_dataset(out_dir / "dataset", sim);
    artifacts.push_back("dataset/metadata.json");
    artifacts.push_back("dataset/trials.bin");

    // evaluation always reads the stored float32 dataset so that CLI runs
    // against the same directory reproduce these numbers exactly
    const Dataset ds = load_dataset(out_dir / "dataset");

    const int l_eval = static_cast<int>(std::lround(cfg.l_eval_s * ds.rate_hz));
    json evaluation;
    std::vector<NamedCurve> report_curves;
    const Condition conds[] = {Condition::Overt, Condition::Covert};
    for (int ci = 0; ci < 2; ++ci) {
        const std::string name = to_string(conds[ci]);
        const TrialSet subset = condition_subset(ds, conds[ci]);

        note(verbose, "[4/6] evaluate " + name);
        const EvalResult res =
            cross_validate(subset, ds.left_code, ds.right_code, l_eval, cfg.ridge, cfg.k,
                           cfg.n_perm, mix_seed(cfg.seed, 0x33 + static_cast<uint64_t>(ci)));
        evaluation[name] = to_json(res);

        const DecoderModel model = fit_reconvolution_cca(
            subset, structure_for_code(ds.left_code, kTrialSeconds, l_eval),
            structure_for_code(ds.right_code, kTrialSeconds, l_eval), cfg.ridge);
        const std::string model_file = "model_" + name + ".json";
        save_model_json(out_dir / model_file, model, ds.left_code, ds.right_code);
        artifacts.push_back(model_file);

        note(verbose, "[5/6] sweep " + name);
        const auto curve =
            sweep_response_length(subset, ds.left_code, ds.right_code, cfg.sweep_lengths_s,
                                  cfg.ridge, cfg.k, cfg.n_perm,
                                  mix_seed(cfg.seed, 0x44 + static_cast<uint64_t>(ci)));
        const std::string curve_file = "curve_" + name + ".csv";
        write_text_file(out_dir / curve_file, curve_to_csv(curve));
        artifacts.push_back(curve_file);
        report_curves.push_back({name, curve});
    }
    write_text_file(out_dir / "evaluation.json", evaluation.dump(2) + "\n");
    artifacts.push_back("evaluation.json");

    note(verbose, "[6/6] report");
    write_text_file(out_dir / "report.svg", render_sweep_svg(report_curves));
    artifacts.push_back("report.svg");

    json manifest;
    manifest["format"] = "cvep-manifest";
    manifest["version"] = kVersion;
    manifest["config"] = to_json(cfg);
    manifest["config_hash"] = config_hash(cfg);
    manifest["artifacts"] = artifacts;
    manifest["summary"] = json{
        {"overt_accuracy", evaluation["overt"]["mean_accuracy"]},
        {"covert_accuracy", evaluation["covert"]["mean_accuracy"]},
    };
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

}  // namespace cvep
