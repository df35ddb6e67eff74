#include "qsflat/reference.hpp"

#include <stdexcept>

namespace qsflat {

PolynomialSignal::PolynomialSignal(Eigen::VectorXd coeffs, double scale)
    : coeffs_(std::move(coeffs)), scale_(scale) {
  if (scale_ <= 0.0) throw std::invalid_argument("polynomial signal needs a positive scale");
}

double PolynomialSignal::eval(double t, int order) const {
  const double s = t / scale_;
  double acc = 0.0;
  // d^k/dt^k sum c_i s^i = scale^{-k} sum_{i>=k} c_i i!/(i-k)! s^{i-k}
  for (Eigen::Index i = coeffs_.size() - 1; i >= order; --i) {
    double fall = 1.0;
    for (int f = 0; f < order; ++f) fall *= static_cast<double>(i - f);
    acc = acc * s + coeffs_[i] * fall;
  }
  double sk = 1.0;
  for (int f = 0; f < order; ++f) sk *= scale_;
  return acc / sk;
}

ReferenceSignal::ReferenceSignal(std::vector<std::shared_ptr<const Signal>> channels,
                                 double duration)
    : channels_(std::move(channels)), duration_(duration) {
  if (channels_.empty()) throw std::invalid_argument("reference needs at least one channel");
  if (duration_ <= 0.0) throw std::invalid_argument("reference duration must be positive");
}

double ReferenceSignal::eval(int channel, double t, int order) const {
  if (channel < 0 || channel >= channels())
    throw std::out_of_range("reference channel out of range");
  return channels_[static_cast<std::size_t>(channel)]->eval(t, order);
}

ReferenceSignal plan_rest_to_rest(const Eigen::VectorXd& y_start, const Eigen::VectorXd& y_end,
                                  double T) {
  if (T <= 0.0) throw std::invalid_argument("transition time must be positive");
  if (y_start.size() != y_end.size())
    throw std::invalid_argument("endpoint dimension mismatch");
  std::vector<std::shared_ptr<const Signal>> channels;
  for (Eigen::Index j = 0; j < y_start.size(); ++j) {
    const double a = y_start[j], b = y_end[j];
    if (a == b) {
      channels.push_back(std::make_shared<ConstantSignal>(a));
      continue;
    }
    // unique degree-9 interpolant with derivatives 1..4 zero at s = 0, 1
    Eigen::VectorXd c = Eigen::VectorXd::Zero(10);
    c[0] = a;
    const double d = b - a;
    c[5] = 126.0 * d;
    c[6] = -420.0 * d;
    c[7] = 540.0 * d;
    c[8] = -315.0 * d;
    c[9] = 70.0 * d;
    channels.push_back(std::make_shared<PolynomialSignal>(c, T));
  }
  return ReferenceSignal(std::move(channels), T);
}

JetPoint reference_jets(const ReferenceSignal& ref, double t, const MultiIndex& shape) {
  if (shape.size() != ref.channels())
    throw std::invalid_argument("jet shape channel count does not match the reference");
  JetPoint p(shape);
  for (int j = 0; j < shape.size(); ++j)
    for (int k = 0; k <= shape[j]; ++k) p.set(j, k, ref.eval(j, t, k));
  return p;
}

}  // namespace qsflat
