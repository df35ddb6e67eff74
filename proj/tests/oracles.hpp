#pragma once

// Test-side oracles: 4th-order central finite differences and smooth
// chart-safe test trajectories. Kept independent of the differentiation
// machinery they check.

#include <Eigen/Dense>
#include <random>

#include "qsflat/flat_system.hpp"
#include "qsflat/jet_function.hpp"
#include "qsflat/reference.hpp"

namespace qsflat::testing {

// dF/dy^j_[k] by a 4th-order central stencil, step h.
inline double fd_jet_partial(const JetFunction& F, const JetPoint& p, int j, int k,
                             double h = 1e-5) {
  auto at = [&](double d) {
    JetPoint q = p;
    q.set(j, k, p.value(j, k) + d);
    return F(q);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

// d/dt f(t) by a 4th-order central stencil.
template <class Fn>
double fd_time_derivative(Fn&& f, double t, double h = 1e-4) {
  return (-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) / (12.0 * h);
}

// Gentle polynomial flat-output trajectory that keeps the VTOL chart
// guard (thrust vector away from zero) on t in [0, 1].
inline ReferenceSignal vtol_smooth_trajectory(double epsilon = 0.3) {
  Eigen::VectorXd c1(6), c2(6);
  c1 << 0.10, 0.30, -0.20, 0.05, 0.02, -0.01;
  c2 << epsilon + 0.1, -0.10, 0.15, -0.03, 0.01, 0.005;
  std::vector<std::shared_ptr<const Signal>> ch = {
      std::make_shared<PolynomialSignal>(c1, 1.0),
      std::make_shared<PolynomialSignal>(c2, 1.0)};
  return ReferenceSignal(std::move(ch), 1.0);
}

// Same idea for the gantry crane: positive cable length and load
// acceleration well below free fall.
inline ReferenceSignal crane_smooth_trajectory() {
  Eigen::VectorXd c1(6), c2(6);
  c1 << 0.20, 0.40, -0.30, 0.08, 0.02, -0.01;
  c2 << 1.20, -0.15, 0.20, -0.05, 0.02, 0.01;
  std::vector<std::shared_ptr<const Signal>> ch = {
      std::make_shared<PolynomialSignal>(c1, 1.0),
      std::make_shared<PolynomialSignal>(c2, 1.0)};
  return ReferenceSignal(std::move(ch), 1.0);
}

inline JetPoint random_jet(const JetBox& box, const MultiIndex& shape, std::mt19937_64& rng) {
  JetPoint p(shape);
  for (int j = 0; j < shape.size(); ++j) {
    const auto& iv = box[static_cast<std::size_t>(j)];
    for (int k = 0; k <= shape[j]; ++k) {
      const auto& b = iv[std::min(static_cast<std::size_t>(k), iv.size() - 1)];
      std::uniform_real_distribution<double> d(b.lo, b.hi);
      p.set(j, k, d(rng));
    }
  }
  return p;
}

}  // namespace qsflat::testing
