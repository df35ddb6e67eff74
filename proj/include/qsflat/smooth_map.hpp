#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsflat/dual.hpp"

namespace qsflat {

namespace detail {

struct SmoothMapConcept {
  virtual ~SmoothMapConcept() = default;
  virtual void e0(std::span<const D0>, std::span<D0>) const = 0;
  virtual void e1(std::span<const D1>, std::span<D1>) const = 0;
  virtual void e2(std::span<const D2>, std::span<D2>) const = 0;
  virtual void e3(std::span<const D3>, std::span<D3>) const = 0;
  virtual void e4(std::span<const D4>, std::span<D4>) const = 0;
};

template <class F>
struct SmoothMapModel final : SmoothMapConcept {
  F f;
  explicit SmoothMapModel(F fn) : f(std::move(fn)) {}
  void e0(std::span<const D0> x, std::span<D0> y) const override { f(x, y); }
  void e1(std::span<const D1> x, std::span<D1> y) const override { f(x, y); }
  void e2(std::span<const D2> x, std::span<D2> y) const override { f(x, y); }
  void e3(std::span<const D3> x, std::span<D3> y) const override { f(x, y); }
  void e4(std::span<const D4> x, std::span<D4> y) const override { f(x, y); }
};

}  // namespace detail

/// Type-erased smooth map R^in -> R^out evaluable over the dual tower.
/// Construct from a generic callable f(span<const T> x, span<T> y).
class SmoothMap {
 public:
  SmoothMap() = default;

  template <class F>
  static SmoothMap make(int in_dim, int out_dim, F f) {
    SmoothMap m;
    m.in_ = in_dim;
    m.out_ = out_dim;
    m.impl_ = std::make_shared<const detail::SmoothMapModel<F>>(std::move(f));
    return m;
  }

  bool valid() const { return impl_ != nullptr; }
  int in_dim() const { return in_; }
  int out_dim() const { return out_; }

  template <class T>
  void eval(std::span<const T> x, std::span<T> y) const {
    if (!impl_) throw std::logic_error("empty SmoothMap");
    if (static_cast<int>(x.size()) != in_ || static_cast<int>(y.size()) != out_)
      throw std::invalid_argument("SmoothMap: dimension mismatch (" +
                                  std::to_string(x.size()) + " -> " + std::to_string(y.size()) +
                                  ", expected " + std::to_string(in_) + " -> " +
                                  std::to_string(out_) + ")");
    if constexpr (std::is_same_v<T, D0>) impl_->e0(x, y);
    else if constexpr (std::is_same_v<T, D1>) impl_->e1(x, y);
    else if constexpr (std::is_same_v<T, D2>) impl_->e2(x, y);
    else if constexpr (std::is_same_v<T, D3>) impl_->e3(x, y);
    else impl_->e4(x, y);
  }

  template <class T>
  std::vector<T> operator()(std::span<const T> x) const {
    std::vector<T> y(static_cast<std::size_t>(out_));
    eval<T>(x, y);
    return y;
  }

 private:
  int in_ = 0;
  int out_ = 0;
  std::shared_ptr<const detail::SmoothMapConcept> impl_;
};

}  // namespace qsflat
