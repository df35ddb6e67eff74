#pragma once

#include <span>
#include <string>
#include <vector>

#include "qsflat/dual.hpp"
#include "qsflat/errors.hpp"
#include "qsflat/multi_index.hpp"

namespace qsflat {

/// Dense per-channel jet storage: channel j holds the values of
/// y^j and its derivatives of orders 0..shape[j].
template <class T>
class JetVals {
 public:
  JetVals() = default;
  explicit JetVals(const MultiIndex& shape)
      : shape_(shape), offset_(static_cast<std::size_t>(shape.size()) + 1, 0) {
    for (int j = 0; j < shape.size(); ++j)
      offset_[static_cast<std::size_t>(j) + 1] =
          offset_[static_cast<std::size_t>(j)] + shape[j] + 1;
    data_.resize(static_cast<std::size_t>(offset_.back()));
  }

  const MultiIndex& shape() const { return shape_; }
  int channels() const { return shape_.size(); }

  T& at(int j, int k) { return data_[static_cast<std::size_t>(offset_[static_cast<std::size_t>(j)] + k)]; }
  const T& at(int j, int k) const {
    return data_[static_cast<std::size_t>(offset_[static_cast<std::size_t>(j)] + k)];
  }

  bool covers(int j, int k) const {
    return j >= 0 && j < channels() && k >= 0 && k <= shape_[j];
  }

 private:
  MultiIndex shape_;
  std::vector<int> offset_;
  std::vector<T> data_;
};

/// A point in jet space: flat-output values and their time derivatives,
/// channel j up to order shape[j]. Lookup beyond the stored order is an
/// error, never an implicit zero.
class JetPoint {
 public:
  JetPoint() = default;
  explicit JetPoint(const MultiIndex& shape) : vals_(shape) {}

  /// Constant jet (y_s, 0, ..., 0): order 0 set per channel, all
  /// higher derivatives zero.
  static JetPoint constant(const MultiIndex& shape, std::span<const double> y0);

  double value(int j, int k) const {
    if (!vals_.covers(j, k))
      throw JetRangeError("jet value y(" + std::to_string(j) + ")[" + std::to_string(k) +
                          "] not stored (shape " + vals_.shape().str() + ")");
    return vals_.at(j, k);
  }

  void set(int j, int k, double v) {
    if (!vals_.covers(j, k))
      throw JetRangeError("jet slot y(" + std::to_string(j) + ")[" + std::to_string(k) +
                          "] outside shape " + vals_.shape().str());
    vals_.at(j, k) = v;
  }

  const MultiIndex& shape() const { return vals_.shape(); }
  int channels() const { return vals_.channels(); }
  const JetVals<double>& vals() const { return vals_; }

  bool covers(const MultiIndex& arity) const {
    return arity.size() == shape().size() && mi_leq(arity, shape());
  }

  /// Max |difference| over slots common to both points.
  double max_abs_diff(const JetPoint& other) const;

 private:
  JetVals<double> vals_;
};

}  // namespace qsflat
