#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qsflat/feedback.hpp"
#include "qsflat/structure.hpp"

namespace qsflat {

/// One run's full configuration. Parsed strictly: unknown keys are
/// rejected. See the README for the schema.
struct RunConfig {
  std::string model = "vtol";
  std::map<std::string, double> parameters;
  std::uint64_t seed = 1;

  // probes
  std::vector<std::vector<double>> equilibria;  // empty = model nominal
  int generic_count = 16;
  std::optional<JetBox> box;

  // kappa selection
  std::optional<std::vector<int>> kappa;  // absent = auto
  KappaMode mode = KappaMode::kCanonical;

  NewtonOptions solver;

  // simulation
  std::optional<std::vector<double>> y_start;  // default: model nominal
  std::optional<std::vector<double>> y_end;    // default: y_start
  double duration = 10.0;
  double dt = 1e-3;
  std::optional<std::vector<double>> x0;
  double chain_tol = 1e-5;
  double derivative_tol = 1e-3;
  bool stabilize = false;
  std::vector<double> poles;  // per-channel pole for the optional correction

  std::vector<double> sweep_dts;

  std::string out_dir = "out";
  std::string prefix = "run";

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

RunConfig load_config_file(const std::string& path);

/// Apply a --set override "dotted.path=value" onto a config JSON tree;
/// the value is parsed as JSON when possible, else taken as a string.
void apply_set_override(nlohmann::json& tree, const std::string& assignment);

}  // namespace qsflat
