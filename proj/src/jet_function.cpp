#include "qsflat/jet_function.hpp"

namespace qsflat {

double JetFunction::partial(const JetPoint& p, int j, int k) const {
  if (j < 0 || j >= arity().size()) throw JetRangeError("partial: channel out of range");
  if (k > arity()[j]) return 0.0;  // structural zero above the arity
  require_cover(p);
  const MultiIndex& shape = p.shape();
  JetVals<D1> lifted(shape);
  for (int c = 0; c < shape.size(); ++c)
    for (int o = 0; o <= shape[c]; ++o) lifted.at(c, o) = D1(p.value(c, o), 0.0);
  lifted.at(j, k).du = 1.0;
  return eval(lifted).du;
}

JetFunction prolong(const JetFunction& f) {
  if (!f.valid()) throw std::invalid_argument("prolong: empty function");
  if (f.max_level() < 1)
    throw std::logic_error("prolong: derivative depth exhausted");
  const MultiIndex base = f.arity();
  auto df = [f, base](const auto& a) {
    using T = typename std::decay_t<decltype(a)>::scalar_type;
    if constexpr (dual_level_v<T> >= kMaxDualLevel) {
      (void)a;
      throw std::logic_error("prolonged function evaluated above its derivative depth");
      return T{};
    } else {
      // Directional derivative with direction (y_[1], ..., y_[B+1]):
      // exactly the total time derivative along the jet flow.
      JetVals<Dual<T>> lifted(base);
      for (int j = 0; j < base.size(); ++j)
        for (int k = 0; k <= base[j]; ++k)
          lifted.at(j, k) = Dual<T>(a.y(j, k), a.y(j, k + 1));
      return f.eval(lifted).du;
    }
  };
  return JetFunction::make(base.shifted(1), std::move(df), f.max_level() - 1);
}

JetGradient jet_partials(const JetFunction& f, const JetPoint& p) {
  if (!p.covers(f.arity()))
    throw JetRangeError("jet_partials: point of shape " + p.shape().str() +
                        " does not cover arity " + f.arity().str());
  const MultiIndex& shape = p.shape();
  JetVals<D1> lifted(shape);
  for (int c = 0; c < shape.size(); ++c)
    for (int o = 0; o <= shape[c]; ++o) lifted.at(c, o) = D1(p.value(c, o), 0.0);

  JetGradient g(f.arity());
  for (int j = 0; j < f.arity().size(); ++j) {
    for (int k = 0; k <= f.arity()[j]; ++k) {
      lifted.at(j, k).du = 1.0;
      g.set(j, k, f.eval(lifted).du);
      lifted.at(j, k).du = 0.0;
    }
  }
  return g;
}

}  // namespace qsflat
