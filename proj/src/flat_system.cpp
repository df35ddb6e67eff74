#include "qsflat/flat_system.hpp"

#include "qsflat/errors.hpp"

namespace qsflat {

void FlatSystem::check() const {
  if (n < 2 || m != n - 1)
    throw ModelError("system must be minimally underactuated: need n >= 2 degrees of "
                     "freedom and exactly n-1 inputs, got n=" +
                     std::to_string(n) + ", m=" + std::to_string(m));
  if (!dynamics.valid() || dynamics.in_dim() != 2 * n + m || dynamics.out_dim() != n)
    throw ModelError("dynamics map must take (q, v, u) and return n accelerations");
  if (!flat_output.valid() || flat_output.in_dim() != n || flat_output.out_dim() != m)
    throw ModelError("flat output must map the configuration to m = n-1 values");
  if (!completion.valid() || completion.in_dim() != n || completion.out_dim() != 1)
    throw ModelError("completion coordinate must map the configuration to a scalar");
  if (static_cast<int>(Fq.size()) != n)
    throw ModelError("configuration parameterization must have n components");
  for (const auto& f : Fq) {
    if (!f.valid()) throw ModelError("configuration parameterization has an empty component");
    if (f.arity().size() != m)
      throw ModelError("configuration parameterization arity must have m channels");
  }
  if (input_matrix.valid() != drift.valid())
    throw ModelError("input-affine form needs both the input matrix and the drift");
  if (input_matrix.valid() &&
      (input_matrix.in_dim() != n || input_matrix.out_dim() != n * m))
    throw ModelError("input matrix must map q to an n x m matrix");
  if (drift.valid() && (drift.in_dim() != 2 * n || drift.out_dim() != n))
    throw ModelError("drift must map (q, v) to n accelerations");
  if (nominal_ys.size() != m) throw ModelError("nominal equilibrium must have m entries");
}

namespace {
Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

Eigen::VectorXd eval_dynamics(const FlatSystem& sys, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
  std::vector<double> x(static_cast<std::size_t>(2 * sys.n + sys.m));
  for (int i = 0; i < sys.n; ++i) x[static_cast<std::size_t>(i)] = q[i];
  for (int i = 0; i < sys.n; ++i) x[static_cast<std::size_t>(sys.n + i)] = v[i];
  for (int i = 0; i < sys.m; ++i) x[static_cast<std::size_t>(2 * sys.n + i)] = u[i];
  return to_eigen(sys.dynamics(std::span<const double>(x)));
}

Eigen::VectorXd eval_flat_output(const FlatSystem& sys, const Eigen::VectorXd& q) {
  std::vector<double> x(q.data(), q.data() + q.size());
  return to_eigen(sys.flat_output(std::span<const double>(x)));
}

Eigen::VectorXd eval_drift(const FlatSystem& sys, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& v) {
  std::vector<double> x(static_cast<std::size_t>(2 * sys.n));
  for (int i = 0; i < sys.n; ++i) x[static_cast<std::size_t>(i)] = q[i];
  for (int i = 0; i < sys.n; ++i) x[static_cast<std::size_t>(sys.n + i)] = v[i];
  return to_eigen(sys.drift(std::span<const double>(x)));
}

Eigen::MatrixXd eval_input_matrix(const FlatSystem& sys, const Eigen::VectorXd& q) {
  std::vector<double> x(q.data(), q.data() + q.size());
  std::vector<double> flat = sys.input_matrix(std::span<const double>(x));
  Eigen::MatrixXd B(sys.n, sys.m);
  for (int i = 0; i < sys.n; ++i)
    for (int j = 0; j < sys.m; ++j) B(i, j) = flat[static_cast<std::size_t>(i * sys.m + j)];
  return B;
}

}  // namespace qsflat
