#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ibprof/assort.hpp"
#include "ibprof/collapse.hpp"
#include "ibprof/genlab.hpp"
#include "ibprof/sis.hpp"
#include "ibprof/spectral.hpp"

namespace ibprof::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "ibprof";

struct InputFile {
  std::string role;
  std::string path;
};

struct Envelope {
  std::string command;
  std::vector<InputFile> inputs;
  Json payload = Json::object();
  std::vector<std::string> warnings;
  bool stamp_now = false;
};

// Deterministic text: two-space indent, insertion-ordered keys, floats with
// 17 significant digits, non-finite numbers as null.
std::string dump(const Json& j);

std::string sha256_file(const std::string& path);

// ISO-8601 UTC of the newest input mtime, or null without inputs.
Json input_timestamp(const std::vector<InputFile>& inputs, bool now);

std::string render(const Envelope& e);

Json real_or_null(std::optional<double> v);
Json to_json(const Coefficient& c);
Json to_json(const AssortProfile& p);
Json to_json(const CollapseReport& r);
Json to_json(const SignConditionsReport& r);
Json to_json(const WalkSpec& w);
Json to_json(const SpectralReport& r);
Json to_json(const SpectralProxy& r);
Json to_json(const EquilibriumResult& r);
Json to_json(const ChainReport& r);
Json to_json(const SweepResult& r);
Json to_json(const SBMSpec& s);

std::string sweep_csv(const SweepResult& r);

}  // namespace ibprof::cli
