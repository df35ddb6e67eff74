#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qsflat/flat_system.hpp"

namespace qsflat {

struct ProbeOptions {
  /// Flat-output values for equilibrium jets; empty uses the model's
  /// nominal equilibrium.
  std::vector<Eigen::VectorXd> equilibria;
  int generic_count = 16;
  std::uint64_t seed = 1;
  std::optional<JetBox> box;  // overrides the model's sampling region
};

/// Probe jets used by the structure analysis: constant equilibrium jets
/// (y_s, 0, ..., 0) plus generic jets sampled uniformly from a box.
struct ProbeSet {
  std::vector<JetPoint> equilibrium;
  std::vector<JetPoint> generic;
};

/// Uniform sample from the box; orders beyond the box list reuse its
/// last interval.
JetPoint sample_jet(const JetBox& box, const MultiIndex& shape, std::mt19937_64& rng);

/// Sample a jet that lies in the system's chart (bounded rejection
/// against the configuration parameterization's chart guards).
JetPoint sample_chart_jet(const FlatSystem& sys, const JetBox& box, const MultiIndex& shape,
                          std::mt19937_64& rng);

ProbeSet make_probes(const FlatSystem& sys, const MultiIndex& shape, const ProbeOptions& opts);

}  // namespace qsflat
