#include "qsflat/simulate.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "qsflat/errors.hpp"

namespace qsflat {

namespace {

long step_count(double duration, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step size must be positive");
  if (duration <= 0.0) throw std::invalid_argument("duration must be positive");
  long n = std::lround(duration / dt);
  if (n < 1) n = 1;
  return n;
}

// Central finite-difference stencils of 4th-order accuracy for
// derivative orders 1..4; offsets -hw..hw.
struct Stencil {
  int halfwidth;
  std::vector<double> coeffs;
};

Stencil derivative_stencil(int order) {
  switch (order) {
    case 1: return {2, {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12}};
    case 2: return {2, {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12}};
    case 3: return {3, {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8}};
    case 4: return {3, {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6}};
    default:
      throw std::invalid_argument("no finite-difference stencil for derivative order " +
                                  std::to_string(order));
  }
}

}  // namespace

Trace simulate_closed_loop(const FlatSystem& sys, QuasiStaticFeedback& fb,
                           const ReferenceSignal& ref, const SimulateOptions& opts) {
  sys.check();
  const int n = sys.n, m = sys.m;
  const MultiIndex& kappa = fb.kappa();
  const MultiIndex& wsh = fb.w_shape();
  if (ref.channels() != m)
    throw std::invalid_argument("reference channel count does not match the model");
  if (opts.stabilize && static_cast<int>(opts.gains.size()) != m)
    throw std::invalid_argument("stabilization needs one gain vector per channel");

  // New-input jets at time t: derivatives of the reference from order
  // kappa[j] upward, optionally with a tracking correction on order 0
  // fed by the last solved jets.
  auto w_at = [&](double t) {
    WJets w(wsh);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i <= wsh[j]; ++i) w.set(j, i, ref.eval(j, t, kappa[j] + i));
      if (opts.stabilize) {
        const auto& est = fb.warm_start();
        if (est) {
          double corr = 0.0;
          for (int o = 0; o < kappa[j]; ++o)
            corr += opts.gains[static_cast<std::size_t>(j)][o] *
                    (ref.eval(j, t, o) - est->value(j, o));
          w.set(j, 0, w.value(j, 0) + corr);
        }
      }
    }
    return w;
  };

  // The integrated state is the classical state alone.
  const int dim = closed_loop_state_dimension(sys);
  Eigen::VectorXd x(dim);
  if (opts.x0) {
    if (opts.x0->size() != dim)
      throw std::invalid_argument("initial state must have dimension 2n");
    x = *opts.x0;
  } else {
    JetPoint jets0 = reference_jets(ref, 0.0, fb.map().orders);
    x.head(n) = fb.map().eval_config(jets0);
    x.tail(n) = fb.map().eval_velocity(jets0);
  }

  auto rhs = [&](double t, const Eigen::VectorXd& state) {
    Eigen::VectorXd q = state.head(n), v = state.tail(n);
    Eigen::VectorXd u = fb.control(q, v, w_at(t));
    Eigen::VectorXd dx(dim);
    dx.head(n) = v;
    dx.tail(n) = eval_dynamics(sys, q, v, u);
    return dx;
  };

  const long steps = step_count(opts.duration, opts.dt);
  const double dt = opts.dt;

  Trace trace;
  trace.n = n;
  trace.m = m;
  trace.kappa = kappa;
  trace.dt = dt;
  trace.t.reserve(static_cast<std::size_t>(steps + 1));

  auto record = [&](double t, const Eigen::VectorXd& state) {
    Eigen::VectorXd q = state.head(n), v = state.tail(n);
    WJets w = w_at(t);
    Eigen::VectorXd u = fb.control(q, v, w);
    trace.t.push_back(t);
    trace.q.push_back(q);
    trace.v.push_back(v);
    trace.u.push_back(u);
    trace.y.push_back(eval_flat_output(sys, q));
    Eigen::VectorXd w0(m);
    for (int j = 0; j < m; ++j) w0[j] = w.value(j, 0);
    trace.w.push_back(w0);
    trace.diag.push_back(
        StepDiagnostics{fb.last_stats().iterations, fb.last_stats().residual});
  };

  double t = 0.0;
  try {
    for (long i = 0; i < steps; ++i) {
      t = static_cast<double>(i) * dt;
      record(t, x);
      Eigen::VectorXd k1 = rhs(t, x);
      Eigen::VectorXd k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
      Eigen::VectorXd k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
      Eigen::VectorXd k4 = rhs(t + dt, x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = static_cast<double>(steps) * dt;
    record(t, x);
  } catch (const SingularityError& e) {
    throw SimulationAborted(std::string("feedback singular at t = ") + std::to_string(t) +
                            ": " + e.what(), t);
  } catch (const ConvergenceError& e) {
    throw SimulationAborted(std::string("feedback solve failed at t = ") + std::to_string(t) +
                            ": " + e.what(), t);
  }
  return trace;
}

std::vector<std::vector<double>> chain_oracle(const MultiIndex& kappa,
                                              const JetPoint& initial_jets,
                                              const std::function<double(int, double)>& w,
                                              double duration, double dt) {
  const int m = kappa.size();
  if (!(initial_jets.shape() == kappa.shifted(-1)))
    throw std::invalid_argument("oracle seed jets must have shape kappa - 1");
  const long steps = step_count(duration, dt);
  const int refine = 10;
  const double h = dt / refine;

  std::vector<std::vector<double>> out(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const int len = kappa[j];
    std::vector<double> s(static_cast<std::size_t>(len));
    for (int k = 0; k < len; ++k) s[static_cast<std::size_t>(k)] = initial_jets.value(j, k);

    auto deriv = [&](double t, const std::vector<double>& state) {
      std::vector<double> d(static_cast<std::size_t>(len));
      for (int k = 0; k + 1 < len; ++k) d[static_cast<std::size_t>(k)] = state[static_cast<std::size_t>(k) + 1];
      d[static_cast<std::size_t>(len - 1)] = w(j, t);
      return d;
    };
    auto axpy = [len](const std::vector<double>& a, double c, const std::vector<double>& b) {
      std::vector<double> r(static_cast<std::size_t>(len));
      for (int k = 0; k < len; ++k)
        r[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] + c * b[static_cast<std::size_t>(k)];
      return r;
    };

    auto& series = out[static_cast<std::size_t>(j)];
    series.reserve(static_cast<std::size_t>(steps + 1));
    series.push_back(s[0]);
    for (long i = 0; i < steps; ++i) {
      for (int f = 0; f < refine; ++f) {
        double t = static_cast<double>(i) * dt + static_cast<double>(f) * h;
        auto k1 = deriv(t, s);
        auto k2 = deriv(t + 0.5 * h, axpy(s, 0.5 * h, k1));
        auto k3 = deriv(t + 0.5 * h, axpy(s, 0.5 * h, k2));
        auto k4 = deriv(t + h, axpy(s, h, k3));
        for (int k = 0; k < len; ++k)
          s[static_cast<std::size_t>(k)] +=
              (h / 6.0) * (k1[static_cast<std::size_t>(k)] + 2.0 * k2[static_cast<std::size_t>(k)] +
                           2.0 * k3[static_cast<std::size_t>(k)] + k4[static_cast<std::size_t>(k)]);
      }
      series.push_back(s[0]);
    }
  }
  return out;
}

IOCertificate certify_io(const Trace& trace, const MultiIndex& kappa,
                         const std::vector<std::vector<double>>& oracle, double chain_tol,
                         double derivative_tol, int stride) {
  const int m = trace.m;
  if (kappa.size() != m) throw std::invalid_argument("kappa channel count mismatch");
  if (static_cast<int>(oracle.size()) != m)
    throw std::invalid_argument("oracle channel count mismatch");
  const int N = trace.samples();

  IOCertificate cert;
  cert.chain_tol = chain_tol;
  cert.derivative_tol = derivative_tol;
  cert.pass = true;

  for (int j = 0; j < m; ++j) {
    ChannelCertificate ch;
    const auto& yj = oracle[static_cast<std::size_t>(j)];
    if (static_cast<int>(yj.size()) != N)
      throw std::invalid_argument("oracle length does not match the trace");
    for (int i = 0; i < N; ++i)
      ch.max_chain_deviation =
          std::max(ch.max_chain_deviation, std::abs(trace.y[static_cast<std::size_t>(i)][j] - yj[static_cast<std::size_t>(i)]));

    Stencil st = derivative_stencil(kappa[j]);
    const int width = 2 * st.halfwidth + 1;
    // Effective step around 1e-2 keeps the high-order difference
    // quotient above the roundoff floor without visible truncation.
    int str = stride;
    if (str <= 0) str = std::max(1, static_cast<int>(std::lround(1e-2 / trace.dt)));
    while (str > 1 && N < 4 * str * width + 1) --str;
    const int margin = 2 * str * width;
    if (N < 2 * margin + 1)
      throw std::invalid_argument("trace too short for the derivative stencil");
    double hk = 1.0;
    for (int p = 0; p < kappa[j]; ++p) hk *= trace.dt * static_cast<double>(str);
    for (int i = margin; i < N - margin; ++i) {
      double fd = 0.0;
      for (int o = -st.halfwidth; o <= st.halfwidth; ++o)
        fd += st.coeffs[static_cast<std::size_t>(o + st.halfwidth)] *
              trace.y[static_cast<std::size_t>(i + o * str)][j];
      fd /= hk;
      ch.max_derivative_deviation =
          std::max(ch.max_derivative_deviation, std::abs(fd - trace.w[static_cast<std::size_t>(i)][j]));
    }
    ch.pass = ch.max_chain_deviation < chain_tol && ch.max_derivative_deviation < derivative_tol;
    cert.pass = cert.pass && ch.pass;
    cert.channels.push_back(ch);
  }
  return cert;
}

nlohmann::json IOCertificate::to_json() const {
  nlohmann::json j;
  j["chain_tolerance"] = chain_tol;
  j["derivative_tolerance"] = derivative_tol;
  j["pass"] = pass;
  j["channels"] = nlohmann::json::array();
  for (const auto& c : channels) {
    j["channels"].push_back({{"max_chain_deviation", c.max_chain_deviation},
                             {"max_derivative_deviation", c.max_derivative_deviation},
                             {"pass", c.pass}});
  }
  return j;
}

}  // namespace qsflat
