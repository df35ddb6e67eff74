#include "qsflat/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace qsflat {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!j.is_object()) throw std::invalid_argument("config: '" + ctx + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + ctx);
}

JetBox parse_box(const json& j) {
  JetBox box;
  if (!j.is_array()) throw std::invalid_argument("config: probes.box must be an array of channels");
  for (const auto& ch : j) {
    std::vector<BoxInterval> intervals;
    for (const auto& iv : ch) {
      if (!iv.is_array() || iv.size() != 2)
        throw std::invalid_argument("config: box intervals must be [lo, hi] pairs");
      BoxInterval b{iv[0].get<double>(), iv[1].get<double>()};
      if (!(b.lo < b.hi)) throw std::invalid_argument("config: box interval must have lo < hi");
      intervals.push_back(b);
    }
    if (intervals.empty()) throw std::invalid_argument("config: box channel without intervals");
    box.push_back(std::move(intervals));
  }
  return box;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  check_keys(j, {"model", "parameters", "seed", "probes", "kappa", "kappa_mode", "solver",
                 "simulation", "sweep", "output"},
             "top level");
  if (j.contains("model")) cfg.model = j.at("model").get<std::string>();
  if (j.contains("parameters")) {
    if (!j.at("parameters").is_object())
      throw std::invalid_argument("config: parameters must be an object");
    for (const auto& [key, val] : j.at("parameters").items())
      cfg.parameters[key] = val.get<double>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("probes")) {
    const json& p = j.at("probes");
    check_keys(p, {"equilibria", "generic_count", "box"}, "probes");
    if (p.contains("equilibria"))
      cfg.equilibria = p.at("equilibria").get<std::vector<std::vector<double>>>();
    if (p.contains("generic_count")) {
      cfg.generic_count = p.at("generic_count").get<int>();
      if (cfg.generic_count < 1)
        throw std::invalid_argument("config: probes.generic_count must be positive");
    }
    if (p.contains("box")) cfg.box = parse_box(p.at("box"));
  }

  if (j.contains("kappa")) {
    const json& k = j.at("kappa");
    if (k.is_string()) {
      if (k.get<std::string>() != "auto")
        throw std::invalid_argument("config: kappa must be \"auto\" or an integer array");
    } else {
      cfg.kappa = k.get<std::vector<int>>();
    }
  }
  if (j.contains("kappa_mode")) {
    std::string mode = j.at("kappa_mode").get<std::string>();
    if (mode == "canonical") cfg.mode = KappaMode::kCanonical;
    else if (mode == "exhaustive") cfg.mode = KappaMode::kExhaustive;
    else throw std::invalid_argument("config: kappa_mode must be canonical or exhaustive");
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, {"tolerance", "max_iterations", "rcond_min", "branch_jump"}, "solver");
    if (s.contains("tolerance")) cfg.solver.tol = s.at("tolerance").get<double>();
    if (s.contains("max_iterations")) cfg.solver.max_iterations = s.at("max_iterations").get<int>();
    if (s.contains("rcond_min")) cfg.solver.rcond_min = s.at("rcond_min").get<double>();
    if (s.contains("branch_jump")) cfg.solver.branch_jump = s.at("branch_jump").get<double>();
  }

  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    check_keys(s, {"y_start", "y_end", "duration", "dt", "x0", "tolerances", "stabilization"},
               "simulation");
    if (s.contains("y_start")) cfg.y_start = s.at("y_start").get<std::vector<double>>();
    if (s.contains("y_end")) cfg.y_end = s.at("y_end").get<std::vector<double>>();
    if (s.contains("duration")) cfg.duration = s.at("duration").get<double>();
    if (s.contains("dt")) cfg.dt = s.at("dt").get<double>();
    if (s.contains("x0") && !s.at("x0").is_null())
      cfg.x0 = s.at("x0").get<std::vector<double>>();
    if (s.contains("tolerances")) {
      const json& t = s.at("tolerances");
      check_keys(t, {"chain", "derivative"}, "simulation.tolerances");
      if (t.contains("chain")) cfg.chain_tol = t.at("chain").get<double>();
      if (t.contains("derivative")) cfg.derivative_tol = t.at("derivative").get<double>();
    }
    if (s.contains("stabilization")) {
      const json& st = s.at("stabilization");
      check_keys(st, {"enabled", "poles"}, "simulation.stabilization");
      if (st.contains("enabled")) cfg.stabilize = st.at("enabled").get<bool>();
      if (st.contains("poles")) cfg.poles = st.at("poles").get<std::vector<double>>();
    }
    if (cfg.duration <= 0.0) throw std::invalid_argument("config: duration must be positive");
    if (cfg.dt <= 0.0) throw std::invalid_argument("config: dt must be positive");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, {"dts"}, "sweep");
    if (s.contains("dts")) cfg.sweep_dts = s.at("dts").get<std::vector<double>>();
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dir", "prefix"}, "output");
    if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
    if (o.contains("prefix")) cfg.prefix = o.at("prefix").get<std::string>();
  }
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["model"] = model;
  j["parameters"] = parameters;
  j["seed"] = seed;
  json probes;
  probes["equilibria"] = equilibria;
  probes["generic_count"] = generic_count;
  if (box) {
    json b = json::array();
    for (const auto& ch : *box) {
      json c = json::array();
      for (const auto& iv : ch) c.push_back({iv.lo, iv.hi});
      b.push_back(c);
    }
    probes["box"] = b;
  }
  j["probes"] = probes;
  if (kappa) j["kappa"] = *kappa;
  else j["kappa"] = "auto";
  j["kappa_mode"] = mode == KappaMode::kCanonical ? "canonical" : "exhaustive";
  j["solver"] = {{"tolerance", solver.tol},
                 {"max_iterations", solver.max_iterations},
                 {"rcond_min", solver.rcond_min},
                 {"branch_jump", solver.branch_jump}};
  json sim;
  if (y_start) sim["y_start"] = *y_start;
  if (y_end) sim["y_end"] = *y_end;
  sim["duration"] = duration;
  sim["dt"] = dt;
  if (x0) sim["x0"] = *x0;
  sim["tolerances"] = {{"chain", chain_tol}, {"derivative", derivative_tol}};
  sim["stabilization"] = {{"enabled", stabilize}, {"poles", poles}};
  j["simulation"] = sim;
  if (!sweep_dts.empty()) j["sweep"] = {{"dts", sweep_dts}};
  j["output"] = {{"dir", out_dir}, {"prefix", prefix}};
  return j;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

void apply_set_override(nlohmann::json& tree, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--set expects key.path=value, got '" + assignment + "'");
  std::string path = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw std::invalid_argument("--set has an empty path segment");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace qsflat
