#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cvep/codes.hpp"
#include "cvep/decoder.hpp"
#include "cvep/eval.hpp"
#include "cvep/simulator.hpp"
#include "cvep/stimulus.hpp"

#include "json.hpp"

namespace cvep {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

uint64_t fnv1a64(std::string_view data);
std::string to_hex(uint64_t v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

nlohmann::json to_json(const BitSequence& s);
BitSequence bitseq_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ForwardModel& fm);
ForwardModel forward_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvalResult& r);

void save_codes_json(const std::filesystem::path& path, const std::vector<BitSequence>& codes);
std::vector<BitSequence> load_codes_json(const std::filesystem::path& path);

void save_plan_json(const std::filesystem::path& path, const SessionPlan& plan);
SessionPlan load_plan_json(const std::filesystem::path& path);

// Dataset directory: metadata.json + trials.bin (little-endian float32,
// trial-major, then channel-major, then sample).
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& dir);

// Raw session directory: raw_meta.json + raw.bin (little-endian float32,
// channel-major, then sample).
void save_raw_session(const std::filesystem::path& dir, const RawSession& raw);
RawSession load_raw_session(const std::filesystem::path& dir);

// The codes are stored alongside w/r so the class templates can be rebuilt
// exactly on load.
void save_model_json(const std::filesystem::path& path, const DecoderModel& model,
                     const BitSequence& left_code, const BitSequence& right_code);
DecoderModel load_model_json(const std::filesystem::path& path);

}  // namespace cvep
