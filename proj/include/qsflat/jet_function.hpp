#pragma once

#include <memory>
#include <string>
#include <type_traits>
#include <utility>

#include "qsflat/jet.hpp"

namespace qsflat {

// Derivative tower depth supported by every evaluator. Prolongation
// consumes one level per application.
inline constexpr int kMaxDualLevel = 4;

/// Evaluator-facing view of jet values. Reads are checked against the
/// function's declared arity and against what the point actually stores.
template <class T>
class JetArg {
 public:
  using scalar_type = T;

  JetArg(const JetVals<T>* vals, const MultiIndex* arity) : vals_(vals), arity_(arity) {}

  int channels() const { return vals_->channels(); }

  const T& y(int j, int k) const {
    if (j < 0 || j >= arity_->size() || k < 0 || k > (*arity_)[j])
      throw JetRangeError("jet read y(" + std::to_string(j) + ")[" + std::to_string(k) +
                          "] outside declared arity " + arity_->str());
    if (!vals_->covers(j, k))
      throw JetRangeError("jet point of shape " + vals_->shape().str() +
                          " does not provide y(" + std::to_string(j) + ")[" +
                          std::to_string(k) + "]");
    return vals_->at(j, k);
  }

  JetArg with_arity(const MultiIndex* arity) const { return JetArg(vals_, arity); }

 private:
  const JetVals<T>* vals_;
  const MultiIndex* arity_;
};

namespace detail {

struct JetFnConcept {
  virtual ~JetFnConcept() = default;
  virtual D0 e0(const JetArg<D0>&) const = 0;
  virtual D1 e1(const JetArg<D1>&) const = 0;
  virtual D2 e2(const JetArg<D2>&) const = 0;
  virtual D3 e3(const JetArg<D3>&) const = 0;
  virtual D4 e4(const JetArg<D4>&) const = 0;
};

template <class F>
struct JetFnModel final : JetFnConcept {
  F f;
  explicit JetFnModel(F fn) : f(std::move(fn)) {}
  D0 e0(const JetArg<D0>& a) const override { return f(a); }
  D1 e1(const JetArg<D1>& a) const override { return f(a); }
  D2 e2(const JetArg<D2>& a) const override { return f(a); }
  D3 e3(const JetArg<D3>& a) const override { return f(a); }
  D4 e4(const JetArg<D4>& a) const override { return f(a); }
};

template <class T>
T dispatch(const JetFnConcept& c, const JetArg<T>& a) {
  if constexpr (std::is_same_v<T, D0>) return c.e0(a);
  else if constexpr (std::is_same_v<T, D1>) return c.e1(a);
  else if constexpr (std::is_same_v<T, D2>) return c.e2(a);
  else if constexpr (std::is_same_v<T, D3>) return c.e3(a);
  else return c.e4(a);
}

}  // namespace detail

/// Partial derivatives of a jet function with respect to every stored
/// jet variable, laid out like the function's arity.
class JetGradient {
 public:
  JetGradient() = default;
  explicit JetGradient(const MultiIndex& shape) : g_(shape) {}

  const MultiIndex& shape() const { return g_.shape(); }

  double operator()(int j, int k) const {
    if (!g_.covers(j, k))
      throw JetRangeError("gradient entry (" + std::to_string(j) + "," + std::to_string(k) +
                          ") outside shape " + g_.shape().str());
    return g_.at(j, k);
  }

  void set(int j, int k, double v) { g_.at(j, k) = v; }

 private:
  JetVals<double> g_;
};

/// Smooth scalar function of finitely many jet variables with exact
/// forward-mode partial derivatives. Immutable value type; evaluation
/// never reads above the declared arity.
class JetFunction {
 public:
  JetFunction() = default;

  template <class F>
  static JetFunction make(MultiIndex arity, F f, int max_level = kMaxDualLevel) {
    JetFunction out;
    out.arity_ = std::make_shared<const MultiIndex>(std::move(arity));
    out.max_level_ = max_level;
    out.impl_ = std::make_shared<const detail::JetFnModel<F>>(std::move(f));
    return out;
  }

  bool valid() const { return impl_ != nullptr; }
  const MultiIndex& arity() const { return *arity_; }

  /// Remaining derivative depth (number of times this function can
  /// still be differentiated or prolonged).
  int max_level() const { return max_level_; }

  double operator()(const JetPoint& p) const {
    require_cover(p);
    return eval(p.vals());
  }

  /// Exact partial dF/dy^j_[k] at p. Orders above the declared arity
  /// are structural zeros.
  double partial(const JetPoint& p, int j, int k) const;

  template <class T>
  T eval(const JetVals<T>& vals) const {
    static_assert(dual_level_v<T> <= kMaxDualLevel, "derivative tower exhausted");
    check_level(dual_level_v<T>);
    JetArg<T> arg(&vals, arity_.get());
    return detail::dispatch<T>(*impl_, arg);
  }

  /// Composition path: evaluate against another function's argument
  /// view, re-scoped to this function's arity.
  template <class T>
  T eval(const JetArg<T>& outer) const {
    static_assert(dual_level_v<T> <= kMaxDualLevel, "derivative tower exhausted");
    check_level(dual_level_v<T>);
    JetArg<T> arg = outer.with_arity(arity_.get());
    return detail::dispatch<T>(*impl_, arg);
  }

 private:
  void check_level(int level) const {
    if (!impl_) throw std::logic_error("empty JetFunction");
    if (level > max_level_)
      throw std::logic_error("JetFunction derivative depth exceeded (level " +
                             std::to_string(level) + " > " + std::to_string(max_level_) + ")");
  }
  void require_cover(const JetPoint& p) const {
    if (!p.covers(arity()))
      throw JetRangeError("jet point of shape " + p.shape().str() +
                          " does not cover arity " + arity().str());
  }

  std::shared_ptr<const MultiIndex> arity_;
  int max_level_ = kMaxDualLevel;
  std::shared_ptr<const detail::JetFnConcept> impl_;
};

/// Total time derivative along jet coordinates: (DF)(jet) =
/// sum_j sum_k dF/dy^j_[k] * y^j_[k+1]. Arity rises by one per channel.
JetFunction prolong(const JetFunction& f);

/// Every partial derivative of f at p, exact to machine precision.
JetGradient jet_partials(const JetFunction& f, const JetPoint& p);

}  // namespace qsflat
