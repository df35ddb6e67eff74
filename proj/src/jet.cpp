#include "qsflat/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsflat {

JetPoint JetPoint::constant(const MultiIndex& shape, std::span<const double> y0) {
  if (static_cast<int>(y0.size()) != shape.size())
    throw std::invalid_argument("constant jet: value count does not match channel count");
  JetPoint p(shape);
  for (int j = 0; j < shape.size(); ++j) p.set(j, 0, y0[static_cast<std::size_t>(j)]);
  return p;
}

double JetPoint::max_abs_diff(const JetPoint& other) const {
  double m = 0.0;
  int nch = std::min(channels(), other.channels());
  for (int j = 0; j < nch; ++j) {
    int top = std::min(shape()[j], other.shape()[j]);
    for (int k = 0; k <= top; ++k)
      m = std::max(m, std::abs(vals_.at(j, k) - other.vals_.at(j, k)));
  }
  return m;
}

}  // namespace qsflat
