#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "qsflat/jet.hpp"

namespace qsflat {

/// Smooth scalar signal with analytic time derivatives of any order.
class Signal {
 public:
  virtual ~Signal() = default;
  virtual double eval(double t, int order) const = 0;
};

class ConstantSignal final : public Signal {
 public:
  explicit ConstantSignal(double value) : value_(value) {}
  double eval(double, int order) const override { return order == 0 ? value_ : 0.0; }

 private:
  double value_;
};

/// Polynomial in s = t / scale, power basis.
class PolynomialSignal final : public Signal {
 public:
  explicit PolynomialSignal(Eigen::VectorXd coeffs, double scale = 1.0);
  double eval(double t, int order) const override;

 private:
  Eigen::VectorXd coeffs_;
  double scale_;
};

/// Per-channel reference for the flat output over a finite horizon.
class ReferenceSignal {
 public:
  ReferenceSignal(std::vector<std::shared_ptr<const Signal>> channels, double duration);
  int channels() const { return static_cast<int>(channels_.size()); }
  double duration() const { return duration_; }
  double eval(int channel, double t, int order) const;

 private:
  std::vector<std::shared_ptr<const Signal>> channels_;
  double duration_;
};

/// Rest-to-rest transition: per channel a degree-9 polynomial with the
/// endpoint values and vanishing derivatives of orders 1..4 at both
/// ends. Constant when start equals end.
ReferenceSignal plan_rest_to_rest(const Eigen::VectorXd& y_start, const Eigen::VectorXd& y_end,
                                  double T);

/// The reference's jets at time t in the requested shape.
JetPoint reference_jets(const ReferenceSignal& ref, double t, const MultiIndex& shape);

}  // namespace qsflat
