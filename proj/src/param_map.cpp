#include "qsflat/param_map.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "qsflat/errors.hpp"
#include "qsflat/probes.hpp"
#include "qsflat/small_linalg.hpp"

namespace qsflat {

namespace {

Eigen::VectorXd eval_stack(const std::vector<JetFunction>& fns, const JetPoint& p) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(fns.size()));
  for (std::size_t i = 0; i < fns.size(); ++i) out[static_cast<Eigen::Index>(i)] = fns[i](p);
  return out;
}

MultiIndex stack_arity(const std::vector<JetFunction>& fns) {
  MultiIndex a = fns.front().arity();
  for (std::size_t i = 1; i < fns.size(); ++i) a = componentwise_max(a, fns[i].arity());
  return a;
}

// Shared state of the input parameterization: configuration, velocity
// and acceleration parameterizations plus the affine dynamics pieces.
struct InputKernel {
  FlatSystem sys;
  std::vector<JetFunction> Fq, Fv, Fa;
  double tol;

  template <class Arg>
  auto solve(const Arg& a, int want) const {
    using T = typename std::decay_t<Arg>::scalar_type;
    const int n = sys.n, m = sys.m;
    std::vector<T> qv(static_cast<std::size_t>(2 * n));
    std::vector<T> accel(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      qv[static_cast<std::size_t>(i)] = Fq[static_cast<std::size_t>(i)].eval(a);
      qv[static_cast<std::size_t>(n + i)] = Fv[static_cast<std::size_t>(i)].eval(a);
      accel[static_cast<std::size_t>(i)] = Fa[static_cast<std::size_t>(i)].eval(a);
    }
    std::vector<T> adrift(static_cast<std::size_t>(n));
    sys.drift.eval<T>(std::span<const T>(qv.data(), static_cast<std::size_t>(2 * n)),
                      std::span<T>(adrift));
    std::vector<T> B(static_cast<std::size_t>(n * m));
    sys.input_matrix.eval<T>(std::span<const T>(qv.data(), static_cast<std::size_t>(n)),
                             std::span<T>(B));
    std::vector<T> rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      rhs[static_cast<std::size_t>(i)] =
          accel[static_cast<std::size_t>(i)] - adrift[static_cast<std::size_t>(i)];
    std::vector<T> u = least_squares(B, rhs, n, m);

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double ri = value_of(rhs[static_cast<std::size_t>(i)]);
      for (int j = 0; j < m; ++j)
        ri -= value_of(B[static_cast<std::size_t>(i * m + j)]) *
              value_of(u[static_cast<std::size_t>(j)]);
      worst = std::max(worst, std::abs(ri));
    }
    if (worst > tol)
      throw ModelError("input map: dynamics inconsistent with the configuration "
                       "parameterization (residual " + std::to_string(worst) + ")");
    return u[static_cast<std::size_t>(want)];
  }
};

}  // namespace

Eigen::VectorXd ParameterizingMap::eval_config(const JetPoint& p) const {
  return eval_stack(config, p);
}
Eigen::VectorXd ParameterizingMap::eval_velocity(const JetPoint& p) const {
  return eval_stack(velocity, p);
}
Eigen::VectorXd ParameterizingMap::eval_input(const JetPoint& p) const {
  return eval_stack(input, p);
}

std::vector<JetFunction> derive_velocity_map(const FlatSystem& sys) {
  std::vector<JetFunction> out;
  out.reserve(sys.Fq.size());
  for (const auto& f : sys.Fq) out.push_back(prolong(f));
  return out;
}

std::vector<JetFunction> derive_input_map(const FlatSystem& sys, double consistency_tol) {
  sys.check();
  if (!sys.has_input_matrix())
    throw ModelError("input map derivation needs the input-affine form (drift and "
                     "input matrix)");
  InputKernel k{sys, sys.Fq, derive_velocity_map(sys), {}, consistency_tol};
  k.Fa.reserve(k.Fv.size());
  for (const auto& f : k.Fv) k.Fa.push_back(prolong(f));
  auto kernel = std::make_shared<const InputKernel>(std::move(k));
  MultiIndex arity = stack_arity(kernel->Fa);
  int level = kernel->Fa.front().max_level();
  std::vector<JetFunction> out;
  out.reserve(static_cast<std::size_t>(sys.m));
  for (int j = 0; j < sys.m; ++j)
    out.push_back(JetFunction::make(
        arity, [kernel, j](const auto& a) { return kernel->solve(a, j); }, level));
  return out;
}

MultiIndex minimal_orders(const std::vector<JetFunction>& Fq, const JetBox& box,
                          const OrderProbeOptions& opts) {
  if (Fq.empty()) throw std::invalid_argument("minimal orders need a parameterization");
  const int m = Fq.front().arity().size();
  MultiIndex arity = stack_arity(Fq);
  std::mt19937_64 rng(opts.seed);
  std::vector<int> top(static_cast<std::size_t>(m), -1);
  int sampled = 0;
  int rejected = 0;
  while (sampled < opts.samples) {
    JetPoint p = sample_jet(box, arity, rng);
    try {
      for (const auto& f : Fq) {
        JetGradient g = jet_partials(f, p);
        for (int j = 0; j < m; ++j)
          for (int k = 0; k <= f.arity()[j]; ++k)
            if (std::abs(g(j, k)) > opts.threshold)
              top[static_cast<std::size_t>(j)] = std::max(top[static_cast<std::size_t>(j)], k);
      }
    } catch (const SingularityError&) {
      if (++rejected > 100 * opts.samples)
        throw SingularityError("minimal orders: sampling box barely intersects the chart");
      continue;
    }
    ++sampled;
  }
  std::vector<int> orders(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    if (top[static_cast<std::size_t>(j)] < 0)
      throw ModelError("configuration parameterization never uses flat-output channel " +
                       std::to_string(j + 1) + "; inconsistent model");
    orders[static_cast<std::size_t>(j)] = 2 + top[static_cast<std::size_t>(j)];
  }
  return MultiIndex(orders);
}

MultiIndex minimal_orders(const FlatSystem& sys, const OrderProbeOptions& opts) {
  sys.check();
  return minimal_orders(sys.Fq, sys.probe_box, opts);
}

ParameterizingMap build_parameterizing_map(const FlatSystem& sys,
                                           const OrderProbeOptions& opts) {
  ParameterizingMap map;
  map.config = sys.Fq;
  map.velocity = derive_velocity_map(sys);
  map.input = derive_input_map(sys);
  map.orders = minimal_orders(sys, opts);
  return map;
}

Equilibrium find_equilibrium(const FlatSystem& sys, const ParameterizingMap& map,
                             const Eigen::VectorXd& y_s, double tol) {
  if (y_s.size() != sys.m)
    throw std::invalid_argument("equilibrium flat-output value must have m entries");
  JetPoint jet = JetPoint::constant(
      map.orders, std::span<const double>(y_s.data(), static_cast<std::size_t>(y_s.size())));
  Equilibrium eq;
  eq.y_s = y_s;
  eq.q_s = map.eval_config(jet);
  eq.u_s = map.eval_input(jet);
  Eigen::VectorXd resid =
      eval_dynamics(sys, eq.q_s, Eigen::VectorXd::Zero(sys.n), eq.u_s);
  if (resid.lpNorm<Eigen::Infinity>() > tol)
    throw ModelError("equilibrium residual " + std::to_string(resid.lpNorm<Eigen::Infinity>()) +
                     " above tolerance; point is not a rest configuration");
  return eq;
}

}  // namespace qsflat
