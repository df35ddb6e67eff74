#include <doctest.h>

#include <cmath>
#include <random>

#include "qsflat/feedback.hpp"
#include "qsflat/models.hpp"
#include "oracles.hpp"

using namespace qsflat;

namespace {

struct Rig {
  FlatSystem sys;
  ParameterizingMap map;
  QuasiStaticFeedback fb;
};

Rig make_rig(const MultiIndex& kappa = MultiIndex({4, 2}), NewtonOptions opts = {}) {
  FlatSystem sys = make_vtol(0.3);
  ParameterizingMap map = build_parameterizing_map(sys);
  QuasiStaticFeedback fb(sys, map, kappa, opts);
  return Rig{std::move(sys), std::move(map), std::move(fb)};
}

// low-order jets and new-input jets read off a reference trajectory
struct TrajPoint {
  JetPoint low;
  WJets w;
  Eigen::VectorXd q, v;
};

TrajPoint trajectory_point(const Rig& rig, const ReferenceSignal& traj, double t) {
  const MultiIndex& kappa = rig.fb.kappa();
  JetPoint full = reference_jets(traj, t, rig.map.orders);
  JetPoint low(rig.fb.solved_shape());
  for (int j = 0; j < kappa.size(); ++j)
    for (int k = 0; k < kappa[j]; ++k) low.set(j, k, full.value(j, k));
  WJets w(rig.fb.w_shape());
  for (int j = 0; j < kappa.size(); ++j)
    for (int i = 0; i <= rig.fb.w_shape()[j]; ++i) w.set(j, i, full.value(j, kappa[j] + i));
  return TrajPoint{low, w, rig.map.eval_config(full), rig.map.eval_velocity(full)};
}

}  // namespace

TEST_CASE("kappa validation") {
  FlatSystem sys = make_vtol(0.3);
  ParameterizingMap map = build_parameterizing_map(sys);
  CHECK_THROWS_AS(QuasiStaticFeedback(sys, map, MultiIndex({3, 2})), std::invalid_argument);
  CHECK_THROWS_AS(QuasiStaticFeedback(sys, map, MultiIndex({5, 1})), std::invalid_argument);
  CHECK_THROWS_AS(QuasiStaticFeedback(sys, map, MultiIndex({4, 2, 0})), std::invalid_argument);
  CHECK_THROWS_AS(QuasiStaticFeedback(sys, map, MultiIndex({6, 0})), std::invalid_argument);
  CHECK_NOTHROW(QuasiStaticFeedback(sys, map, MultiIndex({2, 4})));
}

TEST_CASE("residual vanishes on consistent trajectory data and reacts to perturbation") {
  Rig rig = make_rig();
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(0.3);
  for (double t : {0.2, 0.6}) {
    TrajPoint tp = trajectory_point(rig, traj, t);
    Eigen::VectorXd r = rig.fb.residual(tp.low, tp.q, tp.v, tp.w);
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-12);
    JetPoint bent = tp.low;
    bent.set(0, 2, bent.value(0, 2) + 1e-3);
    CHECK(rig.fb.residual(bent, tp.q, tp.v, tp.w).lpNorm<Eigen::Infinity>() > 1e-6);
  }
}

TEST_CASE("residual jacobian matches finite differences") {
  Rig rig = make_rig();
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(0.3);
  TrajPoint tp = trajectory_point(rig, traj, 0.4);
  Eigen::MatrixXd J = rig.fb.residual_jacobian(tp.low, tp.w);
  const double h = 1e-5;
  int c = 0;
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 2; ++j) {
      if (k >= rig.fb.kappa()[j]) continue;
      JetPoint lo = tp.low, hi = tp.low;
      JetPoint lo2 = tp.low, hi2 = tp.low;
      hi.set(j, k, tp.low.value(j, k) + h);
      lo.set(j, k, tp.low.value(j, k) - h);
      hi2.set(j, k, tp.low.value(j, k) + 2 * h);
      lo2.set(j, k, tp.low.value(j, k) - 2 * h);
      Eigen::VectorXd col =
          (-rig.fb.residual(hi2, tp.q, tp.v, tp.w) + 8.0 * rig.fb.residual(hi, tp.q, tp.v, tp.w) -
           8.0 * rig.fb.residual(lo, tp.q, tp.v, tp.w) + rig.fb.residual(lo2, tp.q, tp.v, tp.w)) /
          (12.0 * h);
      for (int rrow = 0; rrow < 6; ++rrow)
        CHECK(std::abs(J(rrow, c) - col[rrow]) < 1e-6 * std::max(1.0, std::abs(col[rrow])));
      ++c;
    }
  }
  CHECK(c == 6);
}

TEST_CASE("hover state solves to the constant jet") {
  Rig rig = make_rig();
  Eigen::Vector3d q(0.0, 0.0, 0.0), v(0.0, 0.0, 0.0);
  WJets w = WJets::zero(rig.fb.w_shape());
  JetPoint psi = rig.fb.solve_jets(q, v, w);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(psi.value(0, k)) < 1e-10);
  CHECK(std::abs(psi.value(1, 0) - 0.3) < 1e-10);  // flat output sits at the rotor offset
  CHECK(std::abs(psi.value(1, 1)) < 1e-10);
  CHECK(rig.fb.last_stats().iterations <= 1);
}

TEST_CASE("solved jets recover the trajectory jets from the classical state") {
  Rig rig = make_rig();
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(0.3);
  for (double t = 0.1; t < 0.9; t += 0.05) {
    TrajPoint tp = trajectory_point(rig, traj, t);
    JetPoint psi = rig.fb.solve_jets(tp.q, tp.v, tp.w);  // warm start across calls
    CHECK(psi.max_abs_diff(tp.low) < 1e-8);
    Eigen::VectorXd r = rig.fb.residual(psi, tp.q, tp.v, tp.w);
    CHECK(r.lpNorm<Eigen::Infinity>() < 1e-9);  // round trip
  }
}

TEST_CASE("thrust collapse is reported as a singularity") {
  Rig rig = make_rig();
  Eigen::Vector3d q(0.0, 0.0, 0.0), v(0.0, 0.0, 0.0);
  WJets w = WJets::zero(rig.fb.w_shape());
  w.set(1, 0, -1.0);  // commanded vertical acceleration cancels gravity exactly
  CHECK_THROWS_AS(rig.fb.solve_jets(q, v, w), SingularityError);
}

TEST_CASE("chain orders singular at rest fail when leaving the equilibrium") {
  Rig rig = make_rig(MultiIndex({2, 4}));
  Eigen::Vector3d q(0.1, 0.05, 0.0), v(0.02, 0.0, 0.01);
  WJets w = WJets::zero(rig.fb.w_shape());
  CHECK_THROWS_AS(rig.fb.solve_jets(q, v, w), SingularityError);
}

TEST_CASE("hover control reproduces the holding input") {
  Rig rig = make_rig();
  Eigen::VectorXd u = rig.fb.control(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 0),
                                     WJets::zero(rig.fb.w_shape()));
  CHECK(std::abs(u[0] - 1.0) < 1e-9);
  CHECK(std::abs(u[1]) < 1e-9);
}

TEST_CASE("first input depends only on pitch, pitch rate and the second new input") {
  Rig rig = make_rig();
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(0.3);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> size(0.02, 0.1);
  for (double t : {0.3, 0.7}) {
    TrajPoint tp = trajectory_point(rig, traj, t);
    QuasiStaticFeedback base = rig.fb;
    base.reset_warm_start();
    Eigen::VectorXd u0 = base.control(tp.q, tp.v, tp.w);

    // x, z, vx, vz and the first new input leave u1 untouched
    for (int which = 0; which < 5; ++which) {
      QuasiStaticFeedback fb = rig.fb;
      fb.reset_warm_start();
      Eigen::VectorXd q = tp.q, v = tp.v;
      WJets w = tp.w;
      double d = size(rng);
      if (which == 0) q[0] += d;
      if (which == 1) q[1] += d;
      if (which == 2) v[0] += d;
      if (which == 3) v[1] += d;
      if (which == 4) w.set(0, 0, w.value(0, 0) + d);
      Eigen::VectorXd u = fb.control(q, v, w);
      CHECK(std::abs(u[0] - u0[0]) < 1e-9);
    }
    // pitch, pitch rate and the second new input move it
    for (int which = 0; which < 3; ++which) {
      QuasiStaticFeedback fb = rig.fb;
      fb.reset_warm_start();
      Eigen::VectorXd q = tp.q, v = tp.v;
      WJets w = tp.w;
      double d = size(rng);
      if (which == 0) q[2] += d;
      if (which == 1) v[2] += d;
      if (which == 2) w.set(1, 0, w.value(1, 0) + d);
      Eigen::VectorXd u = fb.control(q, v, w);
      CHECK(std::abs(u[0] - u0[0]) > 1e-7);
    }
    // the torque input sees the second derivative of the second new input
    {
      QuasiStaticFeedback fb = rig.fb;
      fb.reset_warm_start();
      WJets w = tp.w;
      w.set(1, 2, w.value(1, 2) + size(rng));
      Eigen::VectorXd u = fb.control(tp.q, tp.v, w);
      CHECK(std::abs(u[1] - u0[1]) > 1e-7);
      CHECK(std::abs(u[0] - u0[0]) < 1e-9);
    }
  }
}

TEST_CASE("warm start and cold start agree when both converge") {
  Rig rig = make_rig();
  ReferenceSignal traj = qsflat::testing::vtol_smooth_trajectory(0.3);
  TrajPoint a = trajectory_point(rig, traj, 0.3);
  TrajPoint b = trajectory_point(rig, traj, 0.35);
  JetPoint warm_path = [&] {
    QuasiStaticFeedback fb = rig.fb;
    fb.solve_jets(a.q, a.v, a.w);
    return fb.solve_jets(b.q, b.v, b.w);  // warm from the previous point
  }();
  JetPoint cold_path = [&] {
    QuasiStaticFeedback fb = rig.fb;
    return fb.solve_jets(b.q, b.v, b.w);  // cold from the flat output
  }();
  CHECK(warm_path.max_abs_diff(cold_path) < 1e-9);
}

TEST_CASE("a jump between consecutive solutions trips the branch guard") {
  NewtonOptions opts;
  opts.branch_jump = 1e-3;
  Rig rig = make_rig(MultiIndex({4, 2}), opts);
  WJets w = WJets::zero(rig.fb.w_shape());
  rig.fb.solve_jets(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 0), w);
  CHECK_THROWS_AS(
      rig.fb.solve_jets(Eigen::Vector3d(10.0, 0, 0), Eigen::Vector3d(0, 0, 0), w),
      SingularityError);
  // an explicit guess pins the branch instead
  JetPoint guess(rig.fb.solved_shape());
  guess.set(0, 0, 10.0);
  guess.set(1, 0, 0.3);
  CHECK_NOTHROW(
      rig.fb.solve_jets(Eigen::Vector3d(10.0, 0, 0), Eigen::Vector3d(0, 0, 0), w, guess));
}
