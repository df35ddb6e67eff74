#pragma once

#include <map>
#include <string>
#include <vector>

#include "qsflat/flat_system.hpp"

namespace qsflat {

/// Planar vertical take-off and landing aircraft: configuration
/// (x, z, theta), rotor offset epsilon, gravity normalized to one.
/// Flat output is the Huygens oscillation center.
FlatSystem make_vtol(double epsilon = 0.3);

/// Two-dimensional gantry crane: trolley position s, cable length l,
/// load angle phi (measured from the downward vertical; the vertical
/// axis points down). Inputs: trolley force and winch force.
/// Flat output is the load position.
FlatSystem make_gantry_crane(double trolley_mass = 1.0, double load_mass = 1.0,
                             double gravity = 9.81);

/// Registry keyed by model name ("vtol", "gantry-crane") with optional
/// parameter overrides. Throws ModelError for unknown names/parameters.
FlatSystem make_model(const std::string& name,
                      const std::map<std::string, double>& overrides = {});

std::vector<std::string> model_names();
std::map<std::string, double> model_defaults(const std::string& name);

}  // namespace qsflat
