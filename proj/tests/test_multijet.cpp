#include <doctest.h>

#include <cmath>
#include <random>

#include "qsflat/jet_function.hpp"
#include "qsflat/models.hpp"
#include "oracles.hpp"

using namespace qsflat;
using qsflat::testing::fd_jet_partial;
using qsflat::testing::fd_time_derivative;

namespace {

JetFunction projection(int channels, int j, int k = 0) {
  std::vector<int> arity(static_cast<std::size_t>(channels), 0);
  arity[static_cast<std::size_t>(j)] = k;
  return JetFunction::make(MultiIndex(arity), [j, k](const auto& a) { return a.y(j, k); });
}

JetPoint random_point(const MultiIndex& shape, std::mt19937_64& rng, double lo = -2.0,
                      double hi = 2.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  JetPoint p(shape);
  for (int j = 0; j < shape.size(); ++j)
    for (int k = 0; k <= shape[j]; ++k) p.set(j, k, d(rng));
  return p;
}

}  // namespace

TEST_CASE("multi-index comparison is component-wise") {
  CHECK(mi_leq(MultiIndex({2, 2}), MultiIndex({4, 4})));
  CHECK_FALSE(mi_leq(MultiIndex({4, 2}), MultiIndex({2, 4})));
  CHECK(mi_leq(MultiIndex({4, 4}), MultiIndex({4, 4})));
  CHECK_THROWS_AS(mi_leq(MultiIndex({1, 2}), MultiIndex({1, 2, 3})), std::invalid_argument);
  CHECK_THROWS_AS(MultiIndex({-1, 2}), std::invalid_argument);
}

TEST_CASE("multi-index weight sums the entries") {
  CHECK(mi_weight(MultiIndex({4, 2})) == 6);
  CHECK(mi_weight(MultiIndex({0, 0})) == 0);
  CHECK(mi_weight(MultiIndex({2, 2, 2})) == 6);
}

TEST_CASE("jet point lookup above the stored order is an error") {
  JetPoint p(MultiIndex({2, 1}));
  p.set(0, 2, 1.5);
  CHECK(p.value(0, 2) == 1.5);
  CHECK_THROWS_AS(p.value(0, 3), JetRangeError);
  CHECK_THROWS_AS(p.value(1, 2), JetRangeError);
  CHECK_THROWS_AS(p.value(2, 0), JetRangeError);
}

TEST_CASE("prolongation of a projection is the next derivative") {
  JetFunction f = projection(2, 0);
  JetFunction df = prolong(f);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    JetPoint p = random_point(MultiIndex({1, 1}), rng);
    CHECK(df(p) == p.value(0, 1));
  }
}

TEST_CASE("prolongation obeys the product rule") {
  // F = y1 * y1_[1]  ->  DF = y1_[1]^2 + y1 * y1_[2]
  JetFunction f = JetFunction::make(MultiIndex({1, 0}),
                                    [](const auto& a) { return a.y(0, 0) * a.y(0, 1); });
  JetFunction df = prolong(f);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    JetPoint p = random_point(MultiIndex({2, 1}), rng);
    double expect = p.value(0, 1) * p.value(0, 1) + p.value(0, 0) * p.value(0, 2);
    CHECK(std::abs(df(p) - expect) < 1e-12);
  }
}

TEST_CASE("prolongation through the vtol configuration map matches finite differences") {
  const double eps = 0.3;
  FlatSystem sys = make_vtol(eps);
  // x - eps*sin(theta) composed through the configuration map collapses
  // to the first flat-output channel; its total derivative must match a
  // time derivative along any smooth trajectory.
  JetFunction composed = JetFunction::make(MultiIndex({2, 2}), [sys, eps](const auto& a) {
    auto x = sys.Fq[0].eval(a);
    auto th = sys.Fq[2].eval(a);
    return x - eps * sin(th);
  });
  JetFunction dcomposed = prolong(composed);
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(eps);
  for (double t : {0.2, 0.45, 0.7}) {
    JetPoint p = reference_jets(traj, t, MultiIndex({3, 3}));
    double fd = fd_time_derivative(
        [&](double tt) { return composed(reference_jets(traj, tt, MultiIndex({2, 2}))); }, t);
    double got = dcomposed(p);
    CHECK(std::abs(got - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    // and it equals the first derivative of channel 1 on the nose
    CHECK(std::abs(got - p.value(0, 1)) < 1e-12);
  }
}

TEST_CASE("jet partials of simple functions") {
  JetFunction f = projection(2, 0);
  std::mt19937_64 rng(9);
  JetPoint p = random_point(MultiIndex({1, 1}), rng);
  JetGradient g = jet_partials(f, p);
  CHECK(g(0, 0) == 1.0);

  // bilinear: F = y1 * y2_[1]
  JetFunction b = JetFunction::make(MultiIndex({0, 1}),
                                    [](const auto& a) { return a.y(0, 0) * a.y(1, 1); });
  JetPoint q(MultiIndex({0, 1}));
  q.set(0, 0, 2.0);
  q.set(1, 1, 3.0);
  JetGradient gb = jet_partials(b, q);
  CHECK(gb(0, 0) == 3.0);
  CHECK(gb(1, 1) == 2.0);
  CHECK(gb(1, 0) == 0.0);
}

TEST_CASE("vtol configuration-map partials match finite differences") {
  FlatSystem sys = make_vtol(0.3);
  std::mt19937_64 rng(10);
  for (int i = 0; i < 10; ++i) {
    JetPoint p = qsflat::testing::random_jet(sys.probe_box, MultiIndex({2, 2}), rng);
    for (const auto& f : sys.Fq) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k <= 2; ++k) {
          double exact = f.partial(p, j, k);
          double fd = fd_jet_partial(f, p, j, k);
          CHECK(std::abs(exact - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("prolongation is linear") {
  JetFunction f = JetFunction::make(MultiIndex({1, 1}), [](const auto& a) {
    return a.y(0, 0) * a.y(1, 1) + sin(a.y(0, 1));
  });
  JetFunction g = JetFunction::make(MultiIndex({1, 1}), [](const auto& a) {
    return cos(a.y(1, 0)) * a.y(0, 1);
  });
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    double a = coeff(rng), b = coeff(rng);
    JetFunction combo = JetFunction::make(MultiIndex({1, 1}), [a, b, f, g](const auto& arg) {
      return a * f.eval(arg) + b * g.eval(arg);
    });
    JetFunction dcombo = prolong(combo);
    JetFunction df = prolong(f), dg = prolong(g);
    for (int s = 0; s < 5; ++s) {
      JetPoint p = random_point(MultiIndex({2, 2}), rng);
      CHECK(std::abs(dcombo(p) - (a * df(p) + b * dg(p))) < 1e-12);
    }
  }
}

TEST_CASE("highest-order partial of a prolongation equals the base partial") {
  // d(DF)/dy^j_[b+1] == dF/dy^j_[b], the cancellation behind the
  // Jacobian block structure.
  std::vector<JetFunction> pool = {
      JetFunction::make(MultiIndex({1, 1}),
                        [](const auto& a) { return a.y(0, 0) * a.y(1, 1) + sin(a.y(0, 1)); }),
      JetFunction::make(MultiIndex({2, 2}), [](const auto& a) {
        return atan2(-a.y(0, 2), a.y(1, 2) + 1.0) * a.y(1, 0);
      })};
  std::mt19937_64 rng(12);
  for (const auto& f : pool) {
    JetFunction df = prolong(f);
    for (int s = 0; s < 10; ++s) {
      JetPoint p = random_point(df.arity(), rng, -0.6, 0.6);
      for (int j = 0; j < 2; ++j) {
        int b = f.arity()[j];
        CHECK(std::abs(df.partial(p, j, b + 1) - f.partial(p, j, b)) < 1e-12);
      }
    }
  }
}

TEST_CASE("evaluating on a jet point missing declared variables always throws") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> ord(0, 3);
  int failures = 0;
  const int trials = 100;
  for (int i = 0; i < trials; ++i) {
    std::vector<int> arity = {ord(rng) + 1, ord(rng) + 1};
    std::vector<int> shape = arity;
    // knock one channel below the declared arity
    std::size_t which = static_cast<std::size_t>(i % 2);
    shape[which] = arity[which] - 1;
    MultiIndex am(arity);
    JetFunction f = JetFunction::make(am, [am](const auto& a) {
      using T = typename std::decay_t<decltype(a)>::scalar_type;
      T acc(0.0);
      for (int j = 0; j < am.size(); ++j)
        for (int k = 0; k <= am[j]; ++k) acc += a.y(j, k);
      return acc;
    });
    JetPoint p = random_point(MultiIndex(shape), rng);
    try {
      (void)f(p);
    } catch (const JetRangeError&) {
      ++failures;
    }
  }
  CHECK(failures == trials);
}

TEST_CASE("derivative depth is bounded and prolongation consumes it") {
  JetFunction f = JetFunction::make(MultiIndex({0, 0}),
                                    [](const auto& a) { return a.y(0, 0) * a.y(1, 0); });
  JetFunction d4 = prolong(prolong(prolong(prolong(f))));
  CHECK(d4.max_level() == 0);
  CHECK_THROWS_AS(prolong(d4), std::logic_error);
  std::mt19937_64 rng(14);
  JetPoint p = random_point(MultiIndex({4, 4}), rng);
  CHECK_THROWS_AS(d4.partial(p, 0, 0), std::logic_error);  // needs one more level
  CHECK(std::isfinite(d4(p)));                             // plain evaluation still works
}
