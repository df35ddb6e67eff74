#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <vector>

#include "qsflat/feedback.hpp"
#include "qsflat/reference.hpp"

namespace qsflat {

struct SimulateOptions {
  double duration = 10.0;
  double dt = 1e-3;
  /// Initial classical state (q, v); defaults to the exact state on the
  /// reference at t = 0.
  std::optional<Eigen::VectorXd> x0;
  /// Optional tracking correction on the new input (off by default:
  /// the plain exactly-linearizing feedback).
  bool stabilize = false;
  /// Per-channel correction gains, entry o multiplies the order-o
  /// flat-output deviation; sized kappa[j] when stabilize is on.
  std::vector<Eigen::VectorXd> gains;
};

struct StepDiagnostics {
  int newton_iterations = 0;
  double residual = 0.0;
};

/// Closed-loop record on a uniform grid.
struct Trace {
  int n = 0, m = 0;
  MultiIndex kappa;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> q, v, u, y, w;  // y = flat output of q(t); w applied
  std::vector<StepDiagnostics> diag;
  int samples() const { return static_cast<int>(t.size()); }
};

/// Thrown when the feedback fails mid-run; carries the failure time.
class SimulationAborted : public std::runtime_error {
 public:
  SimulationAborted(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Integrated state dimension of the closed loop: the classical state
/// only, nothing added by the quasi-static feedback.
inline int closed_loop_state_dimension(const FlatSystem& sys) { return 2 * sys.n; }

/// Classic fixed-step 4th-order Runge-Kutta integration of the closed
/// loop, feedback evaluated at every stage with the new input's
/// derivatives read analytically from the reference.
Trace simulate_closed_loop(const FlatSystem& sys, QuasiStaticFeedback& fb,
                           const ReferenceSignal& ref, const SimulateOptions& opts);

/// Independent oracle: decoupled integrator chains of lengths kappa[j]
/// driven by w, seeded from initial_jets (shape kappa - 1). Integrates
/// at a tenfold finer step than dt; returns channel outputs on the
/// dt-grid. Shares no code with the feedback path.
std::vector<std::vector<double>> chain_oracle(const MultiIndex& kappa,
                                              const JetPoint& initial_jets,
                                              const std::function<double(int, double)>& w,
                                              double duration, double dt);

struct ChannelCertificate {
  double max_chain_deviation = 0.0;       // |flat output - chain oracle|
  double max_derivative_deviation = 0.0;  // |finite-difference y_[kappa] - w|
  bool pass = false;
};

struct IOCertificate {
  std::vector<ChannelCertificate> channels;
  double chain_tol = 0.0;
  double derivative_tol = 0.0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Certify the decoupled integrator-chain behavior of a trace: the
/// flat output must follow the chain oracle, and its kappa[j]-th
/// finite-difference derivative must reproduce the applied w away from
/// the grid boundary (two stencil widths are excluded at each end).
/// The stencils act on a strided subgrid whose effective step balances
/// truncation against roundoff for high derivative orders; stride 0
/// selects it automatically.
IOCertificate certify_io(const Trace& trace, const MultiIndex& kappa,
                         const std::vector<std::vector<double>>& oracle, double chain_tol,
                         double derivative_tol, int stride = 0);

}  // namespace qsflat
