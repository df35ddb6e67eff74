#include <doctest.h>

#include <cmath>
#include <random>

#include "qsflat/models.hpp"
#include "qsflat/param_map.hpp"
#include "qsflat/probes.hpp"
#include "oracles.hpp"

using namespace qsflat;
using qsflat::testing::fd_time_derivative;

namespace {

// The six state equations written out once more by hand, kept separate
// from the model definition on purpose.
Eigen::VectorXd vtol_dynamics_by_hand(double eps, const Eigen::VectorXd& q,
                                      const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
  (void)v;
  double th = q[2];
  Eigen::VectorXd a(3);
  a[0] = eps * std::cos(th) * u[1] - std::sin(th) * u[0];
  a[1] = std::cos(th) * u[0] + eps * std::sin(th) * u[1] - 1.0;
  a[2] = u[1];
  return a;
}

}  // namespace

TEST_CASE("velocity map is the time derivative of the configuration map") {
  FlatSystem sys = make_vtol(0.3);
  auto Fv = derive_velocity_map(sys);
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(0.3);
  for (double t : {0.25, 0.5, 0.75}) {
    JetPoint p = reference_jets(traj, t, MultiIndex({3, 3}));
    for (int i = 0; i < sys.n; ++i) {
      double fd = fd_time_derivative(
          [&](double tt) { return sys.Fq[static_cast<std::size_t>(i)](
              reference_jets(traj, tt, MultiIndex({2, 2}))); }, t);
      double got = Fv[static_cast<std::size_t>(i)](p);
      CHECK(std::abs(got - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("a constant configuration component has zero velocity") {
  JetFunction c = JetFunction::make(MultiIndex({1, 1}), [](const auto& a) {
    using T = typename std::decay_t<decltype(a)>::scalar_type;
    (void)a;
    return T(3.7);
  });
  JetFunction dc = prolong(c);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  JetPoint p(MultiIndex({2, 2}));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k <= 2; ++k) p.set(j, k, d(rng));
  CHECK(dc(p) == 0.0);
}

TEST_CASE("vtol input map at the hover jet gives unit thrust and zero torque") {
  FlatSystem sys = make_vtol(0.3);
  auto Fu = derive_input_map(sys);
  std::vector<double> ys = {0.0, 0.3};
  JetPoint hover = JetPoint::constant(MultiIndex({4, 4}), ys);
  CHECK(std::abs(Fu[0](hover) - 1.0) < 1e-12);
  CHECK(std::abs(Fu[1](hover) - 0.0) < 1e-12);
}

TEST_CASE("vtol input map reads only derivative orders two and above") {
  FlatSystem sys = make_vtol(0.3);
  auto Fu = derive_input_map(sys);
  std::mt19937_64 rng(3);
  for (int s = 0; s < 5; ++s) {
    JetPoint p = qsflat::testing::random_jet(sys.probe_box, MultiIndex({4, 4}), rng);
    double low = 0.0, high = 0.0;
    for (const auto& f : Fu) {
      for (int j = 0; j < 2; ++j) {
        low = std::max({low, std::abs(f.partial(p, j, 0)), std::abs(f.partial(p, j, 1))});
        high = std::max(high, std::abs(f.partial(p, j, 4)));
      }
    }
    CHECK(low < 1e-9);
    CHECK(high > 1e-6);
  }
}

TEST_CASE("fully actuated or scalar systems are rejected") {
  FlatSystem sys = make_vtol(0.3);
  sys.n = 1;
  sys.m = 0;
  CHECK_THROWS_AS(sys.check(), ModelError);
  FlatSystem sys2 = make_vtol(0.3);
  sys2.m = 3;  // as many inputs as degrees of freedom
  CHECK_THROWS_AS(sys2.check(), ModelError);
}

TEST_CASE("minimal orders of the built-in models") {
  CHECK(minimal_orders(make_vtol(0.3)) == MultiIndex({4, 4}));
  // regression fixture for the crane
  CHECK(minimal_orders(make_gantry_crane()) == MultiIndex({4, 4}));
}

TEST_CASE("minimal orders detect a channel without second-order dependence") {
  // synthetic parameterization: channel 1 enters at order 2, channel 2
  // only through its value
  std::vector<JetFunction> Fq;
  Fq.push_back(JetFunction::make(MultiIndex({2, 0}),
                                 [](const auto& a) { return a.y(0, 0) + a.y(0, 2); }));
  Fq.push_back(JetFunction::make(MultiIndex({0, 0}), [](const auto& a) { return a.y(1, 0); }));
  Fq.push_back(JetFunction::make(MultiIndex({2, 0}),
                                 [](const auto& a) { return a.y(0, 2) * a.y(1, 0); }));
  JetBox box = {{{-1.0, 1.0}}, {{-1.0, 1.0}}};
  CHECK(minimal_orders(Fq, box) == MultiIndex({4, 2}));
}

TEST_CASE("equilibria from constant jets") {
  FlatSystem sys = make_vtol(0.3);
  ParameterizingMap map = build_parameterizing_map(sys);
  Equilibrium eq = find_equilibrium(sys, map, Eigen::Vector2d(0.0, 0.3));
  CHECK(eq.q_s.isZero(1e-12));
  CHECK(std::abs(eq.u_s[0] - 1.0) < 1e-12);
  CHECK(std::abs(eq.u_s[1]) < 1e-12);

  // translation invariance along the horizontal axis
  Equilibrium eq5 = find_equilibrium(sys, map, Eigen::Vector2d(5.0, 0.3));
  CHECK(std::abs(eq5.q_s[0] - 5.0) < 1e-12);
  CHECK(std::abs(eq5.q_s[1]) < 1e-12);
  CHECK(std::abs(eq5.q_s[2]) < 1e-12);
  CHECK(std::abs(eq5.u_s[0] - 1.0) < 1e-12);

  FlatSystem crane = make_gantry_crane();
  ParameterizingMap cmap = build_parameterizing_map(crane);
  Equilibrium ceq = find_equilibrium(crane, cmap, Eigen::Vector2d(0.0, 1.0));
  CHECK(std::abs(ceq.q_s[1] - 1.0) < 1e-12);           // cable length
  CHECK(std::abs(ceq.u_s[0]) < 1e-12);                 // no trolley force
  CHECK(std::abs(ceq.u_s[1] - (-9.81)) < 1e-12);       // winch holds the load

  // negative cable length is outside the chart
  CHECK_THROWS_AS(find_equilibrium(crane, cmap, Eigen::Vector2d(0.0, -1.0)),
                  SingularityError);
}

TEST_CASE("flat-output round trip on random jets") {
  for (const char* name : {"vtol", "gantry-crane"}) {
    FlatSystem sys = make_model(name);
    std::mt19937_64 rng(4);
    for (int s = 0; s < 200; ++s) {
      JetPoint p = qsflat::testing::random_jet(sys.probe_box, MultiIndex({2, 2}), rng);
      Eigen::VectorXd q(sys.n);
      for (int i = 0; i < sys.n; ++i) q[i] = sys.Fq[static_cast<std::size_t>(i)](p);
      Eigen::VectorXd y = eval_flat_output(sys, q);
      for (int j = 0; j < sys.m; ++j) CHECK(std::abs(y[j] - p.value(j, 0)) < 1e-10);
    }
  }
}

TEST_CASE("parameterizing map satisfies the dynamics on random jets") {
  for (const char* name : {"vtol", "gantry-crane"}) {
    FlatSystem sys = make_model(name);
    ParameterizingMap map = build_parameterizing_map(sys);
    std::vector<JetFunction> accel;
    for (const auto& f : map.velocity) accel.push_back(prolong(f));
    std::mt19937_64 rng(5);
    for (int s = 0; s < 200; ++s) {
      JetPoint p = qsflat::testing::random_jet(sys.probe_box, MultiIndex({4, 4}), rng);
      Eigen::VectorXd q = map.eval_config(p), v = map.eval_velocity(p), u = map.eval_input(p);
      Eigen::VectorXd lhs = eval_dynamics(sys, q, v, u);
      for (int i = 0; i < sys.n; ++i)
        CHECK(std::abs(lhs[i] - accel[static_cast<std::size_t>(i)](p)) < 1e-8);
    }
  }
}

TEST_CASE("declared input-affine structure matches the dynamics") {
  for (const char* name : {"vtol", "gantry-crane"}) {
    FlatSystem sys = make_model(name);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int s = 0; s < 50; ++s) {
      Eigen::VectorXd q(sys.n), v(sys.n), u(sys.m);
      for (int i = 0; i < sys.n; ++i) q[i] = d(rng);
      if (sys.name == "gantry-crane") q[1] = 1.0 + 0.5 * d(rng);  // keep the cable real
      for (int i = 0; i < sys.n; ++i) v[i] = d(rng);
      for (int i = 0; i < sys.m; ++i) u[i] = d(rng);
      Eigen::VectorXd direct = eval_dynamics(sys, q, v, u);
      Eigen::VectorXd affine = eval_drift(sys, q, v) + eval_input_matrix(sys, q) * u;
      CHECK((direct - affine).lpNorm<Eigen::Infinity>() < 1e-12);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(eval_input_matrix(sys, q));
      CHECK(svd.singularValues()(sys.m - 1) > 1e-6);  // full column rank
    }
  }
}

TEST_CASE("built-in vtol dynamics agree with an independent hand coding") {
  const double eps = 0.37;
  FlatSystem sys = make_vtol(eps);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int s = 0; s < 100; ++s) {
    Eigen::VectorXd q(3), v(3), u(2);
    for (int i = 0; i < 3; ++i) q[i] = d(rng);
    for (int i = 0; i < 3; ++i) v[i] = d(rng);
    for (int i = 0; i < 2; ++i) u[i] = d(rng);
    Eigen::VectorXd got = eval_dynamics(sys, q, v, u);
    Eigen::VectorXd want = vtol_dynamics_by_hand(eps, q, v, u);
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-14);
  }
}

TEST_CASE("unknown models and parameters are rejected") {
  CHECK_THROWS_AS(make_model("votl"), ModelError);
  CHECK_THROWS_AS(make_model("vtol", {{"mass", 2.0}}), ModelError);
  FlatSystem sys = make_model("vtol", {{"epsilon", 0.5}});
  CHECK(sys.parameters.at("epsilon") == 0.5);
}
