#include "qsflat/structure.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "qsflat/errors.hpp"

namespace qsflat {

namespace {

JetFunction projection(int channels, int channel) {
  MultiIndex arity = MultiIndex::constant(channels, 0);
  return JetFunction::make(arity, [channel](const auto& a) { return a.y(channel, 0); });
}

JetFunction compose_completion(const SmoothMap& gn, const std::vector<JetFunction>& Fq) {
  MultiIndex arity = Fq.front().arity();
  for (std::size_t i = 1; i < Fq.size(); ++i) arity = componentwise_max(arity, Fq[i].arity());
  int level = Fq.front().max_level();
  for (const auto& f : Fq) level = std::min(level, f.max_level());
  const int n = static_cast<int>(Fq.size());
  auto body = [gn, Fq, n](const auto& a) {
    using T = typename std::decay_t<decltype(a)>::scalar_type;
    std::vector<T> qs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) qs[static_cast<std::size_t>(i)] = Fq[static_cast<std::size_t>(i)].eval(a);
    std::vector<T> out(1);
    gn.eval<T>(std::span<const T>(qs), std::span<T>(out));
    return out[0];
  };
  return JetFunction::make(arity, std::move(body), level);
}

bool all_kappa_nonneg(const std::vector<int>& k) {
  return std::all_of(k.begin(), k.end(), [](int v) { return v >= 0; });
}

}  // namespace

TransformedMap transform_map(const FlatSystem& sys, const ParameterizingMap& map) {
  sys.check();
  TransformedMap tmap;
  for (int j = 0; j < sys.m; ++j) tmap.config.push_back(projection(sys.m, j));
  tmap.config.push_back(compose_completion(sys.completion, map.config));
  for (const auto& f : tmap.config) tmap.velocity.push_back(prolong(f));
  return tmap;
}

std::vector<std::pair<int, int>> kappa_columns(const MultiIndex& kappa) {
  std::vector<std::pair<int, int>> cols;
  for (int k = 0; k < kappa.max_order(); ++k)
    for (int j = 0; j < kappa.size(); ++j)
      if (k < kappa[j]) cols.emplace_back(j, k);
  return cols;
}

Eigen::MatrixXd jet_jacobian(const std::vector<JetFunction>& rows,
                             const std::vector<std::pair<int, int>>& cols, const JetPoint& p) {
  Eigen::MatrixXd J(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r].partial(p, cols[c].first, cols[c].second);
  return J;
}

Eigen::MatrixXd full_jacobian(const TransformedMap& tmap, const JetPoint& p) {
  const int m = tmap.config.front().arity().size();
  std::vector<std::pair<int, int>> cols;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < m; ++j) cols.emplace_back(j, k);
  std::vector<JetFunction> rows = tmap.config;
  rows.insert(rows.end(), tmap.velocity.begin(), tmap.velocity.end());
  return jet_jacobian(rows, cols, p);
}

Eigen::MatrixXd kappa_jacobian(const TransformedMap& tmap, const MultiIndex& kappa,
                               const JetPoint& p) {
  const int n = static_cast<int>(tmap.config.size());
  if (kappa.weight() != 2 * n)
    throw std::invalid_argument("kappa weight must be 2n, got " +
                                std::to_string(kappa.weight()) + " for " + kappa.str());
  std::vector<JetFunction> rows = tmap.config;
  rows.insert(rows.end(), tmap.velocity.begin(), tmap.velocity.end());
  return jet_jacobian(rows, kappa_columns(kappa), p);
}

double reciprocal_condition(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smax <= 0.0) return 0.0;
  return smin / smax;
}

std::vector<KappaReport> enumerate_kappa(const TransformedMap& tmap, const MultiIndex& R,
                                         KappaMode mode, const ProbeSet& probes,
                                         double rcond_min) {
  const int n = static_cast<int>(tmap.config.size());
  const int m = R.size();
  if (probes.equilibrium.empty())
    throw std::invalid_argument("kappa classification needs at least one equilibrium probe");

  std::vector<MultiIndex> kappas;
  if (mode == KappaMode::kCanonical) {
    for (int j = 0; j < m; ++j) {
      if (R[j] != 4) continue;
      std::vector<int> k(static_cast<std::size_t>(m), 2);
      k[static_cast<std::size_t>(j)] = 4;
      kappas.emplace_back(k);
    }
    if (kappas.empty())
      throw ModelError("no channel with minimal order 4; the configuration "
                       "parameterization cannot support the canonical chain orders");
  } else {
    // every kappa <= R with weight 2n
    std::vector<int> k(static_cast<std::size_t>(m), 0);
    while (true) {
      MultiIndex cand(k);
      if (cand.weight() == 2 * n) kappas.push_back(cand);
      int j = m - 1;
      while (j >= 0 && k[static_cast<std::size_t>(j)] == R[j]) {
        k[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
      ++k[static_cast<std::size_t>(j)];
    }
  }
  std::sort(kappas.begin(), kappas.end(), lex_less);

  std::vector<KappaReport> reports;
  for (const auto& kappa : kappas) {
    KappaReport rep;
    rep.kappa = kappa;
    rep.weight_ok = kappa.weight() == 2 * n && all_kappa_nonneg(kappa.orders());
    rep.generic_regular = false;
    for (const auto& p : probes.generic) {
      if (reciprocal_condition(kappa_jacobian(tmap, kappa, p)) > rcond_min) {
        rep.generic_regular = true;
        break;
      }
    }
    rep.equilibrium_regular = true;
    for (const auto& p : probes.equilibrium) {
      if (reciprocal_condition(kappa_jacobian(tmap, kappa, p)) <= rcond_min) {
        rep.equilibrium_regular = false;
        break;
      }
    }
    double rc = reciprocal_condition(kappa_jacobian(tmap, kappa, probes.equilibrium.front()));
    rep.condition_number = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    reports.push_back(std::move(rep));
  }
  return reports;
}

StructureReport verify_structure(const FlatSystem& sys, const ParameterizingMap& map,
                                 const TransformedMap& tmap, const ProbeSet& probes,
                                 const StructureOptions& opts) {
  StructureReport rep;
  rep.orders = map.orders;

  rep.bounds_ok = true;
  for (int j = 0; j < map.orders.size(); ++j) {
    if (map.orders[j] < 2 || map.orders[j] > 4) {
      rep.bounds_ok = false;
      rep.failures.push_back("minimal order r" + std::to_string(j + 1) + " = " +
                             std::to_string(map.orders[j]) + " outside the bound [2, 4]");
    }
  }

  std::vector<JetPoint> all_probes = probes.generic;
  all_probes.insert(all_probes.end(), probes.equilibrium.begin(), probes.equilibrium.end());
  if (all_probes.empty())
    throw std::invalid_argument("structure verification needs probe points");

  // Second-order dependence of the completion configuration row.
  const JetFunction& cq = tmap.completion_config();
  for (int j = 0; j < sys.m; ++j) {
    double dep = 0.0;
    for (const auto& p : all_probes) dep = std::max(dep, std::abs(cq.partial(p, j, 2)));
    if (dep > opts.dependence_threshold) rep.second_order_channels.push_back(j + 1);
  }
  if (rep.second_order_channels.empty())
    rep.failures.push_back("completion configuration row shows no second-order "
                           "dependence on any flat-output channel");

  // Those channels' third derivatives must enter the velocity map and
  // their fourth derivatives the input map.
  rep.higher_order_ok = true;
  for (int ch : rep.second_order_channels) {
    const int j = ch - 1;
    double dep_v = 0.0, dep_u = 0.0;
    try {
      for (const auto& p : all_probes) {
        for (const auto& f : map.velocity) dep_v = std::max(dep_v, std::abs(f.partial(p, j, 3)));
        for (const auto& f : map.input) dep_u = std::max(dep_u, std::abs(f.partial(p, j, 4)));
      }
    } catch (const std::exception& e) {
      rep.higher_order_ok = false;
      rep.failures.push_back(std::string("higher-order dependence check failed: ") + e.what());
      continue;
    }
    if (dep_v <= opts.dependence_threshold) {
      rep.higher_order_ok = false;
      rep.failures.push_back("velocity map does not see order 3 of channel " +
                             std::to_string(ch));
    }
    if (dep_u <= opts.dependence_threshold) {
      rep.higher_order_ok = false;
      rep.failures.push_back("input map does not see order 4 of channel " +
                             std::to_string(ch));
    }
  }

  // The completion velocity row's order-2 partials vanish at rest.
  rep.equilibrium_vanishing_ok = true;
  const JetFunction& cv = tmap.completion_velocity();
  for (const auto& p : probes.equilibrium) {
    for (int j = 0; j < sys.m; ++j) {
      double d = std::abs(cv.partial(p, j, 2));
      if (d > opts.vanish_threshold) {
        rep.equilibrium_vanishing_ok = false;
        rep.failures.push_back("completion velocity order-2 partial of channel " +
                               std::to_string(j + 1) + " is " + std::to_string(d) +
                               " at an equilibrium probe (expected 0)");
      }
    }
  }

  try {
    rep.candidates = enumerate_kappa(tmap, map.orders, opts.mode, probes, opts.rcond_min);
  } catch (const std::exception& e) {
    rep.failures.push_back(std::string("kappa enumeration failed: ") + e.what());
  }
  return rep;
}

std::vector<MultiIndex> StructureReport::equilibrium_regular_kappas() const {
  std::vector<MultiIndex> out;
  for (const auto& c : candidates)
    if (c.equilibrium_regular) out.push_back(c.kappa);
  return out;
}

std::vector<MultiIndex> StructureReport::generic_regular_kappas() const {
  std::vector<MultiIndex> out;
  for (const auto& c : candidates)
    if (c.generic_regular) out.push_back(c.kappa);
  return out;
}

nlohmann::json StructureReport::to_json() const {
  nlohmann::json j;
  j["orders"] = orders.orders();
  j["bounds_ok"] = bounds_ok;
  j["second_order_channels"] = second_order_channels;
  j["higher_order_ok"] = higher_order_ok;
  j["equilibrium_vanishing_ok"] = equilibrium_vanishing_ok;
  j["valid"] = valid();
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : candidates) {
    nlohmann::json cj;
    cj["kappa"] = c.kappa.orders();
    cj["weight_ok"] = c.weight_ok;
    cj["generic_regular"] = c.generic_regular;
    cj["equilibrium_regular"] = c.equilibrium_regular;
    if (std::isfinite(c.condition_number))
      cj["condition_number"] = c.condition_number;
    else
      cj["condition_number"] = "inf";
    j["candidates"].push_back(cj);
  }
  j["failures"] = failures;
  return j;
}

}  // namespace qsflat
