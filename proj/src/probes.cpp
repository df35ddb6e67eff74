#include "qsflat/probes.hpp"

#include "qsflat/errors.hpp"

namespace qsflat {

JetPoint sample_jet(const JetBox& box, const MultiIndex& shape, std::mt19937_64& rng) {
  if (box.size() != static_cast<std::size_t>(shape.size()))
    throw std::invalid_argument("sampling box channel count does not match jet shape");
  JetPoint p(shape);
  for (int j = 0; j < shape.size(); ++j) {
    const auto& intervals = box[static_cast<std::size_t>(j)];
    if (intervals.empty()) throw std::invalid_argument("sampling box has an empty channel");
    for (int k = 0; k <= shape[j]; ++k) {
      const BoxInterval& iv =
          intervals[std::min(static_cast<std::size_t>(k), intervals.size() - 1)];
      std::uniform_real_distribution<double> dist(iv.lo, iv.hi);
      p.set(j, k, dist(rng));
    }
  }
  return p;
}

JetPoint sample_chart_jet(const FlatSystem& sys, const JetBox& box, const MultiIndex& shape,
                          std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    JetPoint p = sample_jet(box, shape, rng);
    try {
      for (const auto& f : sys.Fq) (void)f(p);
      return p;
    } catch (const SingularityError&) {
      // outside the chart, draw again
    }
  }
  throw SingularityError("probe sampling: could not find a chart point in 1000 draws; "
                         "the sampling box likely leaves the chart");
}

ProbeSet make_probes(const FlatSystem& sys, const MultiIndex& shape, const ProbeOptions& opts) {
  const JetBox& box = opts.box ? *opts.box : sys.probe_box;
  ProbeSet out;
  std::vector<Eigen::VectorXd> eq = opts.equilibria;
  if (eq.empty()) eq.push_back(sys.nominal_ys);
  for (const auto& ys : eq) {
    if (ys.size() != sys.m)
      throw std::invalid_argument("equilibrium flat-output value must have m entries");
    out.equilibrium.push_back(
        JetPoint::constant(shape, std::span<const double>(ys.data(), static_cast<std::size_t>(ys.size()))));
  }
  std::mt19937_64 rng(opts.seed);
  out.generic.reserve(static_cast<std::size_t>(opts.generic_count));
  for (int i = 0; i < opts.generic_count; ++i)
    out.generic.push_back(sample_chart_jet(sys, box, shape, rng));
  return out;
}

}  // namespace qsflat
