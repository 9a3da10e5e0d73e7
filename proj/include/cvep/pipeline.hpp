#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace cvep {

// Everything a full experiment run depends on. Serialized into the output
// manifest so a run can be reproduced exactly.
struct RunConfig {
    uint64_t seed = 1;
    int channels = 8;
    double snr = 0.15;
    double overt_gain = 1.0;
    double covert_gain = 0.4;
    std::string noise = "white";
    double l_gen_s = 0.3;   // simulator response length
    double l_eval_s = 0.3;  // evaluation operating point
    std::vector<double> sweep_lengths_s = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double ridge = 1e-9;
    int k = 4;
    int n_perm = 1000;
};

void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
// Accepts either a bare config object or a manifest wrapping one under
// "config"; missing fields take their defaults, unknown fields are
// rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Stable fingerprint of the resolved configuration.
std::string config_hash(const RunConfig& cfg);

// codes -> plan -> simulate -> evaluate -> sweep -> report, all written
// under out_dir together with manifest.json. Returns the manifest.
nlohmann::json run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir,
                              bool verbose = true);

extern const char* kVersion;

}  // namespace cvep
