#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#ifndef CVEP_CLI_PATH
#error "CVEP_CLI_PATH must point at the built cvep binary"
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "cvep_cli_scratch";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = "cd '" + scratch().string() + "' && '" + CVEP_CLI_PATH + "' " + args +
                            " >> cli_stdout.log 2>> cli_stderr.log";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("usage errors exit with 2 and help with 0") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("evaluate") == 2);                    // missing --data
    CHECK(run("codes generate --degree 5") == 2);   // unsupported degree
    CHECK(run("evaluate --data does_not_exist --n-perm 0") == 2);
}

TEST_CASE("codes generate and verify") {
    CHECK(run("codes generate --out codes.json") == 0);
    CHECK(run("codes verify codes.json") == 0);

    // corrupt one bit and watch verify fail
    auto j = nlohmann::json::parse(slurp(scratch() / "codes.json"));
    std::string bits = j["codes"][0]["bits"];
    bits[0] = bits[0] == '0' ? '1' : '0';
    j["codes"][0]["bits"] = bits;
    std::ofstream(scratch() / "codes_bad.json") << j.dump();
    CHECK(run("codes verify codes_bad.json") == 2);
}

TEST_CASE("stim plan and events") {
    CHECK(run("stim plan --seed 3 --out plan.json") == 0);
    CHECK(fs::exists(scratch() / "plan.json"));
    CHECK(run("stim events --code left --L 36 --out-events ev.csv --out-structure st.csv") == 0);
    const std::string ev = slurp(scratch() / "ev.csv");
    CHECK(std::count(ev.begin(), ev.end(), '\n') == 3);
    const std::string st = slurp(scratch() / "st.csv");
    CHECK(std::count(st.begin(), st.end(), '\n') == 108);
    CHECK(run("stim events --code nonexistent") == 2);
}

TEST_CASE("simulate, evaluate, sweep, report") {
    CHECK(run("simulate --plan plan.json --out ds --seed 5 --snr 2 --channels 4") == 0);
    CHECK(fs::exists(scratch() / "ds" / "metadata.json"));
    CHECK(fs::exists(scratch() / "ds" / "trials.bin"));

    // both conditions present: --condition is required
    CHECK(run("evaluate --data ds --n-perm 0") == 2);

    CHECK(run("evaluate --data ds --condition overt --n-perm 50 --out eval.json") == 0);
    auto j = nlohmann::json::parse(slurp(scratch() / "eval.json"));
    CHECK(j["condition"] == "overt");
    CHECK(j["mean_accuracy"].is_number());
    CHECK(j["p_value"].is_number());

    CHECK(run("evaluate --data ds --condition overt --n-perm 0 --L 0.11") == 2);
    CHECK(run("evaluate --data ds --condition overt --n-perm 0 --save-model model.json") == 0);
    CHECK(fs::exists(scratch() / "model.json"));

    CHECK(run("sweep --data ds --condition covert --lengths 0.2,0.3 --n-perm 0 --out curve.csv") ==
          0);
    const std::string csv = slurp(scratch() / "curve.csv");
    CHECK(csv.rfind("length_s,fold,accuracy,mean_accuracy,p_value\n", 0) == 0);

    CHECK(run("report --svg report.svg --curve curve.csv:covert") == 0);
    const std::string svg = slurp(scratch() / "report.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("covert") != std::string::npos);
}

TEST_CASE("raw simulation feeds preprocess") {
    CHECK(run("simulate --plan plan.json --out raw --seed 5 --snr 2 --channels 2 --raw") == 0);
    CHECK(fs::exists(scratch() / "raw" / "raw.bin"));
    CHECK(run("preprocess --raw raw --out ds120") == 0);
    CHECK(run("evaluate --data ds120 --condition overt --n-perm 0 --out eval120.json") == 0);
    auto j = nlohmann::json::parse(slurp(scratch() / "eval120.json"));
    CHECK(j["mean_accuracy"].get<double>() >= 0.9);
}

TEST_CASE("run emits a manifest and is reproducible") {
    nlohmann::json cfg{{"seed", 12},         {"channels", 4},   {"snr", 1.0},
                       {"sweep_lengths_s", {0.2, 0.3}},         {"n_perm", 50},
                       {"l_eval_s", 0.3},    {"noise", "white"}};
    std::ofstream(scratch() / "config.json") << cfg.dump(2);

    CHECK(run("run --config config.json --out run1") == 0);
    CHECK(fs::exists(scratch() / "run1" / "manifest.json"));
    CHECK(fs::exists(scratch() / "run1" / "report.svg"));
    auto manifest = nlohmann::json::parse(slurp(scratch() / "run1" / "manifest.json"));
    CHECK(manifest["summary"]["overt_accuracy"].is_number());
    CHECK(manifest["config"]["seed"] == 12);

    // replaying the manifest reproduces the curves byte for byte
    CHECK(run("run --config run1/manifest.json --out run2") == 0);
    CHECK(slurp(scratch() / "run1" / "curve_overt.csv") ==
          slurp(scratch() / "run2" / "curve_overt.csv"));
    CHECK(slurp(scratch() / "run1" / "curve_covert.csv") ==
          slurp(scratch() / "run2" / "curve_covert.csv"));
    CHECK(manifest["config_hash"] ==
          nlohmann::json::parse(slurp(scratch() / "run2" / "manifest.json"))["config_hash"]);

    // unknown config fields are refused
    std::ofstream(scratch() / "bad.json") << R"({"seed": 1, "typo_field": true})";
    CHECK(run("run --config bad.json --out run3") == 2);
}
