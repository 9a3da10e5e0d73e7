#include "cvep/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "cvep/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary trial files are little-endian; big-endian hosts are unsupported");
static_assert(sizeof(float) == 4);

namespace cvep {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

void write_text_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

namespace {

json parse_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("invalid JSON in " + path.string());
    return j;
}

json require(const json& j, const char* key, const fs::path& path) {
    if (!j.contains(key))
        throw ValidationError(path.string() + ": missing field '" + key + "'");
    return j.at(key);
}

std::vector<double> to_doubles(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_doubles(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

json snr_to_json(double snr) {
    if (std::isinf(snr)) return "inf";
    return snr;
}

double snr_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ValidationError("snr must be a number or \"inf\"");
    }
    return j.get<double>();
}

void write_floats(std::ofstream& out, const Eigen::MatrixXd& m) {
    std::vector<float> buf(static_cast<size_t>(m.rows() * m.cols()));
    size_t k = 0;
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c) buf[k++] = static_cast<float>(m(r, c));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

Eigen::MatrixXd read_floats(std::ifstream& in, long rows, long cols, const fs::path& path) {
    std::vector<float> buf(static_cast<size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
        throw ValidationError(path.string() + " is shorter than its metadata promises");
    Eigen::MatrixXd m(rows, cols);
    size_t k = 0;
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) m(r, c) = buf[k++];
    return m;
}

}  // namespace

json to_json(const BitSequence& s) {
    return json{{"name", s.name}, {"rate_hz", s.rate_hz}, {"bits", to_string01(s)}};
}

BitSequence bitseq_from_json(const json& j) {
    BitSequence s = make_bitseq(j.at("bits").get<std::string>(), j.at("rate_hz").get<double>(),
                                j.at("name").get<std::string>());
    return s;
}

json to_json(const ForwardModel& fm) {
    json j;
    j["a_true"] = to_doubles(fm.a_true);
    j["r_true"] = json::array();
    for (const auto& seg : fm.r_true) j["r_true"].push_back(to_doubles(seg));
    j["snr"] = snr_to_json(fm.snr);
    j["noise"] = to_string(fm.noise);
    j["overt_gain"] = fm.overt_gain;
    j["covert_gain"] = fm.covert_gain;
    j["lateral_profile"] = to_doubles(fm.lateral_profile);
    j["seed"] = fm.seed;
    return j;
}

ForwardModel forward_model_from_json(const json& j) {
    ForwardModel fm;
    fm.a_true = from_doubles(j.at("a_true").get<std::vector<double>>());
    const auto segs = j.at("r_true");
    if (!segs.is_array() || segs.size() != fm.r_true.size())
        throw ValidationError("forward model must have exactly 3 response segments");
    for (size_t e = 0; e < fm.r_true.size(); ++e)
        fm.r_true[e] = from_doubles(segs[e].get<std::vector<double>>());
    fm.snr = snr_from_json(j.at("snr"));
    fm.noise = noise_from_string(j.at("noise").get<std::string>());
    fm.overt_gain = j.at("overt_gain").get<double>();
    fm.covert_gain = j.at("covert_gain").get<double>();
    fm.lateral_profile = from_doubles(j.at("lateral_profile").get<std::vector<double>>());
    fm.seed = j.at("seed").get<uint64_t>();
    validate(fm);
    return fm;
}

json to_json(const EvalResult& r) {
    json j;
    j["condition"] = r.condition;
    j["l_samples"] = r.l_samples;
    j["length_s"] = r.length_s;
    j["ridge"] = r.ridge;
    j["k"] = r.k;
    j["fold_accuracies"] = r.fold_accuracies;
    j["mean_accuracy"] = r.mean_accuracy;
    j["p_value"] = r.p_value;
    j["predictions"] = r.predictions;
    json scores = json::array();
    for (const auto& s : r.scores) scores.push_back({s[0], s[1]});
    j["scores"] = scores;
    return j;
}

void save_codes_json(const fs::path& path, const std::vector<BitSequence>& codes) {
    json j;
    j["format"] = "cvep-codes";
    j["codes"] = json::array();
    for (const auto& c : codes) j["codes"].push_back(to_json(c));
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<BitSequence> load_codes_json(const fs::path& path) {
    const json j = parse_json_file(path);
    std::vector<BitSequence> codes;
    for (const auto& cj : require(j, "codes", path)) codes.push_back(bitseq_from_json(cj));
    if (codes.empty()) throw ValidationError(path.string() + " contains no codes");
    return codes;
}

namespace {

json timeline_to_json(const ShapeTimeline& tl) {
    json slots = json::array();
    for (Shape s : tl.slots) slots.push_back(to_string(s));
    return json{{"slot_rate_hz", tl.slot_rate_hz}, {"duration_s", tl.duration_s}, {"slots", slots}};
}

ShapeTimeline timeline_from_json(const json& j) {
    ShapeTimeline tl;
    tl.slot_rate_hz = j.at("slot_rate_hz").get<int>();
    tl.duration_s = j.at("duration_s").get<double>();
    for (const auto& s : j.at("slots")) tl.slots.push_back(shape_from_string(s.get<std::string>()));
    return tl;
}

}  // namespace

void save_plan_json(const fs::path& path, const SessionPlan& plan) {
    json j;
    j["format"] = "cvep-plan";
    j["seed"] = plan.rng_seed;
    j["runs"] = json::array();
    for (const auto& run : plan.runs) {
        json rj;
        rj["condition"] = to_string(run.condition);
        rj["trials"] = json::array();
        for (const auto& t : run.trials) {
            rj["trials"].push_back(json{{"cued_side", to_string(t.cued_side)},
                                        {"condition", to_string(t.condition)},
                                        {"code_name", t.code_name},
                                        {"left_timeline", timeline_to_json(t.left_timeline)},
                                        {"right_timeline", timeline_to_json(t.right_timeline)}});
        }
        j["runs"].push_back(std::move(rj));
    }
    write_text_file(path, j.dump(2) + "\n");
}

SessionPlan load_plan_json(const fs::path& path) {
    const json j = parse_json_file(path);
    SessionPlan plan;
    plan.rng_seed = require(j, "seed", path).get<uint64_t>();
    for (const auto& rj : require(j, "runs", path)) {
        RunPlan run;
        run.condition = condition_from_string(rj.at("condition").get<std::string>());
        for (const auto& tj : rj.at("trials")) {
            TrialSpec t;
            t.cued_side = side_from_string(tj.at("cued_side").get<std::string>());
            t.condition = condition_from_string(tj.at("condition").get<std::string>());
            t.code_name = tj.at("code_name").get<std::string>();
            t.left_timeline = timeline_from_json(tj.at("left_timeline"));
            t.right_timeline = timeline_from_json(tj.at("right_timeline"));
            run.trials.push_back(std::move(t));
        }
        plan.runs.push_back(std::move(run));
    }
    validate(plan);
    return plan;
}

void save_dataset(const fs::path& dir, const Dataset& ds) {
    validate(ds);
    fs::create_directories(dir);
    json j;
    j["format"] = "cvep-dataset";
    j["rate_hz"] = ds.rate_hz;
    j["channels"] = ds.channels();
    j["samples"] = ds.samples();
    j["n_trials"] = ds.size();
    j["channel_names"] = ds.channel_names;
    j["labels"] = ds.labels;
    json conds = json::array();
    for (Condition c : ds.conditions) conds.push_back(to_string(c));
    j["conditions"] = conds;
    j["codes"] = json{{"left", to_json(ds.left_code)}, {"right", to_json(ds.right_code)}};
    j["seed"] = ds.seed;
    j["forward_model"] = to_json(ds.model);
    write_text_file(dir / "metadata.json", j.dump(2) + "\n");

    std::ofstream out(dir / "trials.bin", std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + (dir / "trials.bin").string());
    for (const auto& x : ds.trials) write_floats(out, x);
    if (!out) throw std::runtime_error("short write to " + (dir / "trials.bin").string());
}

Dataset load_dataset(const fs::path& dir) {
    const fs::path meta_path = dir / "metadata.json";
    const json j = parse_json_file(meta_path);
    if (require(j, "format", meta_path) != "cvep-dataset")
        throw ValidationError(meta_path.string() + " is not a dataset metadata file");

    Dataset ds;
    ds.rate_hz = require(j, "rate_hz", meta_path).get<double>();
    const long C = require(j, "channels", meta_path).get<long>();
    const long T = require(j, "samples", meta_path).get<long>();
    const size_t n = require(j, "n_trials", meta_path).get<size_t>();
    ds.channel_names = require(j, "channel_names", meta_path).get<std::vector<std::string>>();
    ds.labels = require(j, "labels", meta_path).get<std::vector<int>>();
    for (const auto& c : require(j, "conditions", meta_path))
        ds.conditions.push_back(condition_from_string(c.get<std::string>()));
    const json codes = require(j, "codes", meta_path);
    ds.left_code = bitseq_from_json(codes.at("left"));
    ds.right_code = bitseq_from_json(codes.at("right"));
    ds.seed = require(j, "seed", meta_path).get<uint64_t>();
    ds.model = forward_model_from_json(require(j, "forward_model", meta_path));

    const fs::path bin_path = dir / "trials.bin";
    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + bin_path.string());
    ds.trials.reserve(n);
    for (size_t t = 0; t < n; ++t) ds.trials.push_back(read_floats(in, C, T, bin_path));
    char extra;
    if (in.read(&extra, 1))
        throw ValidationError(bin_path.string() + " is longer than its metadata promises");
    validate(ds);
    return ds;
}

void save_raw_session(const fs::path& dir, const RawSession& raw) {
    validate(raw.recording);
    fs::create_directories(dir);
    json j;
    j["format"] = "cvep-raw";
    j["rate_hz"] = raw.recording.rate_hz;
    j["channels"] = raw.recording.channels();
    j["samples"] = raw.recording.samples();
    j["channel_names"] = raw.recording.channel_names;
    j["stimulus_onsets"] = raw.recording.stimulus_onsets;
    j["labels"] = raw.labels;
    json conds = json::array();
    for (Condition c : raw.conditions) conds.push_back(to_string(c));
    j["conditions"] = conds;
    j["codes"] = json{{"left", to_json(raw.left_code)}, {"right", to_json(raw.right_code)}};
    j["seed"] = raw.seed;
    j["forward_model"] = to_json(raw.model);
    write_text_file(dir / "raw_meta.json", j.dump(2) + "\n");

    std::ofstream out(dir / "raw.bin", std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + (dir / "raw.bin").string());
    write_floats(out, raw.recording.data);
    if (!out) throw std::runtime_error("short write to " + (dir / "raw.bin").string());
}

RawSession load_raw_session(const fs::path& dir) {
    const fs::path meta_path = dir / "raw_meta.json";
    const json j = parse_json_file(meta_path);
    if (require(j, "format", meta_path) != "cvep-raw")
        throw ValidationError(meta_path.string() + " is not a raw session metadata file");

    RawSession raw;
    raw.recording.rate_hz = require(j, "rate_hz", meta_path).get<double>();
    const long C = require(j, "channels", meta_path).get<long>();
    const long N = require(j, "samples", meta_path).get<long>();
    raw.recording.channel_names =
        require(j, "channel_names", meta_path).get<std::vector<std::string>>();
    raw.recording.stimulus_onsets =
        require(j, "stimulus_onsets", meta_path).get<std::vector<long>>();
    raw.labels = require(j, "labels", meta_path).get<std::vector<int>>();
    for (const auto& c : require(j, "conditions", meta_path))
        raw.conditions.push_back(condition_from_string(c.get<std::string>()));
    const json codes = require(j, "codes", meta_path);
    raw.left_code = bitseq_from_json(codes.at("left"));
    raw.right_code = bitseq_from_json(codes.at("right"));
    raw.seed = require(j, "seed", meta_path).get<uint64_t>();
    raw.model = forward_model_from_json(require(j, "forward_model", meta_path));

    const fs::path bin_path = dir / "raw.bin";
    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + bin_path.string());
    raw.recording.data = read_floats(in, C, N, bin_path);
    validate(raw.recording);
    return raw;
}

void save_model_json(const fs::path& path, const DecoderModel& model,
                     const BitSequence& left_code, const BitSequence& right_code) {
    json j;
    j["format"] = "cvep-model";
    j["w"] = to_doubles(model.w);
    j["r"] = to_doubles(model.r);
    j["l_samples"] = model.L;
    j["ridge"] = model.ridge;
    j["rho_train"] = model.rho_train;
    j["rate_hz"] = model.m0.rate_hz;
    j["duration_s"] = static_cast<double>(model.m0.cols()) / model.m0.rate_hz;
    j["channel_names"] = model.channel_names;
    j["codes"] = json{{"left", to_json(left_code)}, {"right", to_json(right_code)}};
    write_text_file(path, j.dump(2) + "\n");
}

DecoderModel load_model_json(const fs::path& path) {
    const json j = parse_json_file(path);
    if (require(j, "format", path) != "cvep-model")
        throw ValidationError(path.string() + " is not a model file");

    DecoderModel model;
    model.w = from_doubles(j.at("w").get<std::vector<double>>());
    model.r = from_doubles(j.at("r").get<std::vector<double>>());
    model.L = j.at("l_samples").get<int>();
    model.ridge = j.at("ridge").get<double>();
    model.rho_train = j.at("rho_train").get<double>();
    model.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    const double rate = j.at("rate_hz").get<double>();
    const double duration = j.at("duration_s").get<double>();
    const json codes = require(j, "codes", path);
    model.m0 = structure_for_code(bitseq_from_json(codes.at("left")), duration, model.L, rate);
    model.m1 = structure_for_code(bitseq_from_json(codes.at("right")), duration, model.L, rate);
    return model;
}

}  // namespace cvep
