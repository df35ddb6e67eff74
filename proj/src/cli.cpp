#include "qsflat/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "qsflat/errors.hpp"
#include "qsflat/models.hpp"
#include "qsflat/simulate.hpp"
#include "qsflat/trace_io.hpp"

namespace qsflat::cli {

namespace {

using nlohmann::json;

struct Analysis {
  FlatSystem sys;
  ParameterizingMap map;
  TransformedMap tmap;
  ProbeSet probes;
  StructureReport report;
};

Analysis analyze(const RunConfig& cfg) {
  Analysis a{make_model(cfg.model, cfg.parameters), {}, {}, {}, {}};
  a.map = build_parameterizing_map(a.sys, OrderProbeOptions{1000, 1e-9, cfg.seed});
  a.tmap = transform_map(a.sys, a.map);
  ProbeOptions popts;
  for (const auto& ys : cfg.equilibria)
    popts.equilibria.push_back(Eigen::Map<const Eigen::VectorXd>(
        ys.data(), static_cast<Eigen::Index>(ys.size())));
  popts.generic_count = cfg.generic_count;
  popts.seed = cfg.seed;
  popts.box = cfg.box;
  a.probes = make_probes(a.sys, a.map.orders, popts);
  StructureOptions sopts;
  sopts.mode = cfg.mode;
  a.report = verify_structure(a.sys, a.map, a.tmap, a.probes, sopts);
  return a;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& suffix) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / (cfg.prefix + suffix);
}

MultiIndex choose_kappa(const RunConfig& cfg, const Analysis& a) {
  if (cfg.kappa) {
    MultiIndex k(*cfg.kappa);
    if (k.size() != a.sys.m)
      throw std::invalid_argument("kappa must have " + std::to_string(a.sys.m) + " entries");
    return k;
  }
  auto regular = a.report.equilibrium_regular_kappas();
  if (regular.empty())
    throw ModelError("no chain orders regular at the equilibrium probes; "
                     "pass kappa explicitly to override");
  return regular.front();  // candidates are in ascending lexicographic order
}

Eigen::VectorXd resolve_y(const std::optional<std::vector<double>>& v,
                          const Eigen::VectorXd& fallback) {
  if (!v) return fallback;
  return Eigen::Map<const Eigen::VectorXd>(v->data(), static_cast<Eigen::Index>(v->size()));
}

struct SimResult {
  Trace trace;
  IOCertificate cert;
};

SimResult run_one_simulation(const RunConfig& cfg, const Analysis& a, const MultiIndex& kappa,
                             double dt) {
  QuasiStaticFeedback fb(a.sys, a.map, kappa, cfg.solver);
  Eigen::VectorXd ys = resolve_y(cfg.y_start, a.sys.nominal_ys);
  Eigen::VectorXd ye = resolve_y(cfg.y_end, ys);
  if (ys.size() != a.sys.m || ye.size() != a.sys.m)
    throw std::invalid_argument("rest-to-rest endpoints must have m entries");
  ReferenceSignal ref = plan_rest_to_rest(ys, ye, cfg.duration);

  SimulateOptions sopts;
  sopts.duration = cfg.duration;
  sopts.dt = dt;
  if (cfg.x0)
    sopts.x0 = Eigen::Map<const Eigen::VectorXd>(cfg.x0->data(),
                                                 static_cast<Eigen::Index>(cfg.x0->size()));
  sopts.stabilize = cfg.stabilize;
  if (cfg.stabilize) {
    if (static_cast<int>(cfg.poles.size()) != a.sys.m)
      throw std::invalid_argument("stabilization poles must have m entries");
    for (int j = 0; j < a.sys.m; ++j) {
      const int k = kappa[j];
      const double lam = cfg.poles[static_cast<std::size_t>(j)];
      Eigen::VectorXd g(k);
      for (int o = 0; o < k; ++o) {
        double binom = 1.0;
        for (int i = 0; i < k - o; ++i) binom = binom * static_cast<double>(k - i) / (i + 1);
        g[o] = binom * std::pow(lam, k - o);
      }
      sopts.gains.push_back(g);
    }
  }

  // Oracle seeds: the solved jets at the initial state (equal to the
  // reference jets when the start is exact).
  Eigen::VectorXd x0(2 * a.sys.n);
  if (sopts.x0) {
    x0 = *sopts.x0;
  } else {
    JetPoint jets0 = reference_jets(ref, 0.0, a.map.orders);
    x0.head(a.sys.n) = a.map.eval_config(jets0);
    x0.tail(a.sys.n) = a.map.eval_velocity(jets0);
  }
  QuasiStaticFeedback seed_fb = fb;
  WJets w0(fb.w_shape());
  for (int j = 0; j < a.sys.m; ++j)
    for (int i = 0; i <= fb.w_shape()[j]; ++i) w0.set(j, i, ref.eval(j, 0.0, kappa[j] + i));
  JetPoint seeds = seed_fb.solve_jets(x0.head(a.sys.n), x0.tail(a.sys.n), w0);

  SimResult res;
  res.trace = simulate_closed_loop(a.sys, fb, ref, sopts);
  auto wfn = [&ref, &kappa](int j, double t) { return ref.eval(j, t, kappa[j]); };
  auto oracle = chain_oracle(kappa, seeds, wfn, cfg.duration, dt);
  res.cert = certify_io(res.trace, kappa, oracle, cfg.chain_tol, cfg.derivative_tol);
  return res;
}

}  // namespace

int cmd_analyze(const RunConfig& cfg) {
  Analysis a = analyze(cfg);
  json out = a.report.to_json();
  out["model"] = cfg.model;
  out["seed"] = cfg.seed;
  std::cout << out.dump(2) << "\n";
  write_json(out_path(cfg, "_structure.json").string(), out);
  if (!a.report.valid()) {
    std::cerr << "structure checks failed\n";
    return kStructureWarning;
  }
  if (a.report.equilibrium_regular_kappas().empty()) {
    std::cerr << "no candidate is regular at the equilibrium probes\n";
    return kStructureWarning;
  }
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, int halvings) {
  Analysis a = analyze(cfg);
  write_json(out_path(cfg, "_structure.json").string(), a.report.to_json());
  if (!a.report.valid()) {
    std::cerr << "structure checks failed; not simulating\n";
    return kStructureWarning;
  }
  MultiIndex kappa;
  try {
    kappa = choose_kappa(cfg, a);
  } catch (const ModelError& e) {
    std::cerr << e.what() << "\n";
    return kStructureWarning;
  }

  json sidecar;
  sidecar["config"] = cfg.to_json();
  sidecar["kappa"] = kappa.orders();

  try {
    SimResult res = run_one_simulation(cfg, a, kappa, cfg.dt);
    write_trace_csv(out_path(cfg, "_trace.csv").string(), res.trace);
    sidecar["diagnostics"] = diagnostics_json(res.trace);
    sidecar["certificate"] = res.cert.to_json();

    bool all_pass = res.cert.pass;
    if (halvings > 0) {
      json order;
      order["dts"] = json::array();
      order["max_chain_deviations"] = json::array();
      order["ratios"] = json::array();
      double prev_dev = 0.0;
      for (int i = 0; i <= halvings; ++i) {
        double dt = cfg.dt / std::pow(2.0, i);
        SimResult r = i == 0 ? std::move(res) : run_one_simulation(cfg, a, kappa, dt);
        double dev = 0.0;
        for (const auto& c : r.cert.channels) dev = std::max(dev, c.max_chain_deviation);
        order["dts"].push_back(dt);
        order["max_chain_deviations"].push_back(dev);
        if (i > 0) order["ratios"].push_back(prev_dev / std::max(dev, 1e-300));
        prev_dev = dev;
        if (i > 0) all_pass = all_pass && r.cert.pass;
      }
      sidecar["order_check"] = order;
    }
    write_json(out_path(cfg, "_certificate.json").string(), sidecar);
    std::cout << sidecar["certificate"].dump(2) << "\n";
    if (sidecar.contains("order_check"))
      std::cout << "order check: " << sidecar["order_check"].dump() << "\n";
    return all_pass ? kOk : kCertificateFailure;
  } catch (const SimulationAborted& e) {
    sidecar["aborted"] = {{"time", e.time()}, {"reason", e.what()}};
    write_json(out_path(cfg, "_certificate.json").string(), sidecar);
    std::cerr << e.what() << "\n";
    return kRuntimeSingularity;
  }
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep_dts.empty()) {
    std::cerr << "sweep needs sweep.dts in the config\n";
    return kUsage;
  }
  Analysis a = analyze(cfg);
  if (!a.report.valid()) {
    std::cerr << "structure checks failed; not sweeping\n";
    return kStructureWarning;
  }
  MultiIndex kappa;
  try {
    kappa = choose_kappa(cfg, a);
  } catch (const ModelError& e) {
    std::cerr << e.what() << "\n";
    return kStructureWarning;
  }

  json summary;
  summary["config"] = cfg.to_json();
  summary["kappa"] = kappa.orders();
  summary["runs"] = json::array();
  int exit_code = kOk;
  double prev_dev = -1.0;
  for (std::size_t i = 0; i < cfg.sweep_dts.size(); ++i) {
    double dt = cfg.sweep_dts[i];
    json row;
    row["dt"] = dt;
    try {
      SimResult res = run_one_simulation(cfg, a, kappa, dt);
      RunConfig sub = cfg;
      sub.prefix = cfg.prefix + "_dt" + std::to_string(i);
      write_trace_csv(out_path(sub, "_trace.csv").string(), res.trace);
      row["certificate"] = res.cert.to_json();
      double dev = 0.0;
      for (const auto& c : res.cert.channels) dev = std::max(dev, c.max_chain_deviation);
      row["max_chain_deviation"] = dev;
      if (prev_dev >= 0.0) row["ratio_vs_previous"] = prev_dev / std::max(dev, 1e-300);
      prev_dev = dev;
      if (!res.cert.pass && exit_code == kOk) exit_code = kCertificateFailure;
    } catch (const SimulationAborted& e) {
      row["aborted"] = {{"time", e.time()}, {"reason", e.what()}};
      exit_code = kRuntimeSingularity;
    }
    summary["runs"].push_back(row);
    std::cout << row.dump() << "\n";
  }
  write_json(out_path(cfg, "_sweep.json").string(), summary);
  return exit_code;
}

int cmd_list_models() {
  for (const auto& name : model_names()) {
    std::cout << name << ":";
    for (const auto& [key, val] : model_defaults(name)) std::cout << " " << key << "=" << val;
    std::cout << "\n";
  }
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"exact linearization of minimally underactuated configuration flat "
               "systems by quasi-static state feedback"};
  app.require_subcommand(1);

  std::string config_path, model, out_dir, kappa_str;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  double dt = 0.0;
  int halvings = 0;
  bool have_seed = false, have_dt = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--model", model, "model name (see list-models)");
    sub->add_option("--set", sets, "override a config entry, e.g. --set simulation.dt=5e-4");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "probe sampling seed")->each([&](const std::string&) {
      have_seed = true;
    });
    sub->add_option("--dt", dt, "integration step")->each([&](const std::string&) {
      have_dt = true;
    });
    sub->add_option("--kappa", kappa_str, "chain orders, e.g. \"4,2\"");
  };

  CLI::App* an = app.add_subcommand("analyze", "derive the parameterization and classify "
                                               "the chain-order candidates");
  add_common(an);
  CLI::App* sim = app.add_subcommand("simulate", "closed-loop run with the certificate");
  add_common(sim);
  sim->add_option("--halve-dt", halvings, "rerun with halved steps and report ratios");
  CLI::App* sw = app.add_subcommand("sweep", "independent runs over sweep.dts");
  add_common(sw);
  app.add_subcommand("list-models", "print built-in models and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (app.get_subcommand("list-models")->parsed()) return cmd_list_models();

    json tree = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
      in >> tree;
    }
    for (const auto& s : sets) apply_set_override(tree, s);
    if (!model.empty()) tree["model"] = model;
    if (have_seed) tree["seed"] = seed;
    if (have_dt) tree["simulation"]["dt"] = dt;
    if (!out_dir.empty()) tree["output"]["dir"] = out_dir;
    if (!kappa_str.empty()) {
      std::vector<int> k;
      std::size_t pos = 0;
      while (pos < kappa_str.size()) {
        std::size_t comma = kappa_str.find(',', pos);
        k.push_back(std::stoi(kappa_str.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      tree["kappa"] = k;
    }
    RunConfig cfg = RunConfig::from_json(tree);

    if (an->parsed()) return cmd_analyze(cfg);
    if (sim->parsed()) return cmd_simulate(cfg, halvings);
    if (sw->parsed()) return cmd_sweep(cfg);
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace qsflat::cli
