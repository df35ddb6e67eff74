#include "qsflat/models.hpp"

#include "qsflat/errors.hpp"
#include "qsflat/small_linalg.hpp"

namespace qsflat {

namespace {

template <class Arg>
using scalar_of = typename std::decay_t<Arg>::scalar_type;

// Thrust direction of the VTOL as a function of the flat-output
// accelerations. The chart requires a nonvanishing thrust vector
// (ay1, ay2 + 1); the branch with ay2 + 1 > 0 contains hover.
template <class T>
T vtol_theta(const T& ay1, const T& ay2) {
  double tx = value_of(ay1);
  double tz = value_of(ay2) + 1.0;
  if (tx * tx + tz * tz < 1e-12)
    throw SingularityError("vtol: thrust vector vanished (chart boundary)");
  return atan2(-ay1, ay2 + 1.0);
}

}  // namespace

FlatSystem make_vtol(double epsilon) {
  FlatSystem sys;
  sys.name = "vtol";
  sys.n = 3;
  sys.m = 2;
  sys.parameters = {{"epsilon", epsilon}};
  const double eps = epsilon;

  // state x = (x, z, theta, vx, vz, omega, u1, u2)
  sys.dynamics = SmoothMap::make(8, 3, [eps](auto x, auto out) {
    auto st = sin(x[2]);
    auto ct = cos(x[2]);
    out[0] = eps * ct * x[7] - st * x[6];
    out[1] = ct * x[6] + eps * st * x[7] - 1.0;
    out[2] = x[7];
  });
  sys.drift = SmoothMap::make(6, 3, [](auto x, auto out) {
    using T = typename decltype(out)::value_type;
    out[0] = T(0.0);
    out[1] = T(-1.0);
    out[2] = T(0.0);
  });
  sys.input_matrix = SmoothMap::make(3, 6, [eps](auto x, auto out) {
    using T = typename decltype(out)::value_type;
    auto st = sin(x[2]);
    auto ct = cos(x[2]);
    out[0] = -st;     out[1] = eps * ct;
    out[2] = ct;      out[3] = eps * st;
    out[4] = T(0.0);  out[5] = T(1.0);
  });
  sys.flat_output = SmoothMap::make(3, 2, [eps](auto x, auto out) {
    out[0] = x[0] - eps * sin(x[2]);
    out[1] = x[1] + eps * cos(x[2]);
  });
  sys.completion = SmoothMap::make(3, 1, [](auto x, auto out) { out[0] = x[2]; });

  const MultiIndex arity({2, 2});
  sys.Fq.push_back(JetFunction::make(arity, [eps](const auto& a) {
    auto theta = vtol_theta(a.y(0, 2), a.y(1, 2));
    return a.y(0, 0) + eps * sin(theta);
  }));
  sys.Fq.push_back(JetFunction::make(arity, [eps](const auto& a) {
    auto theta = vtol_theta(a.y(0, 2), a.y(1, 2));
    return a.y(1, 0) - eps * cos(theta);
  }));
  sys.Fq.push_back(JetFunction::make(arity, [](const auto& a) {
    return vtol_theta(a.y(0, 2), a.y(1, 2));
  }));

  sys.nominal_ys = Eigen::Vector2d(0.0, eps);
  sys.probe_box = {
      {{-2.0, 2.0}, {-1.0, 1.0}, {-0.8, 0.8}, {-1.0, 1.0}, {-1.0, 1.0}},
      {{eps - 1.5, eps + 1.5}, {-1.0, 1.0}, {-0.8, 0.8}, {-1.0, 1.0}, {-1.0, 1.0}}};
  sys.check();
  return sys;
}

namespace {

// Crane mass matrix, bias forces and input directions. Generalized
// coordinates (s, l, phi); vertical axis points down, so gravity enters
// with a positive sign on the load depth l*cos(phi).
template <class T>
void crane_terms(const T* q, const T* v, double mt, double ml, double g,
                 std::vector<T>& M, std::vector<T>& h) {
  const T& l = q[1];
  auto sp = sin(q[2]);
  auto cp = cos(q[2]);
  const T& ld = v[1];
  const T& pd = v[2];
  M = {mt + ml,    ml * sp, ml * l * cp,
       ml * sp,    T(ml),   T(0.0),
       ml * l * cp, T(0.0), ml * l * l};
  h = {ml * (2.0 * ld * pd * cp - l * pd * pd * sp),
       ml * (-(l * pd * pd) - g * cp),
       ml * (2.0 * l * ld * pd + g * l * sp)};
}

// Load angle from the flat-output accelerations; the cable stays taut
// with the load hanging below the rail (g - ay2 > 0).
template <class T>
T crane_phi(const T& ay1, const T& ay2, double g) {
  if (g - value_of(ay2) < 1e-9)
    throw SingularityError("gantry-crane: load acceleration reached free fall (chart boundary)");
  return atan2(-ay1, g - ay2);
}

}  // namespace

FlatSystem make_gantry_crane(double trolley_mass, double load_mass, double gravity) {
  if (trolley_mass <= 0.0 || load_mass <= 0.0 || gravity <= 0.0)
    throw ModelError("gantry-crane: masses and gravity must be positive");
  FlatSystem sys;
  sys.name = "gantry-crane";
  sys.n = 3;
  sys.m = 2;
  sys.parameters = {{"trolley_mass", trolley_mass},
                    {"load_mass", load_mass},
                    {"gravity", gravity}};
  const double mt = trolley_mass, ml = load_mass, g = gravity;

  // state x = (s, l, phi, sdot, ldot, phidot, u1, u2)
  sys.dynamics = SmoothMap::make(8, 3, [mt, ml, g](auto x, auto out) {
    using T = typename decltype(out)::value_type;
    std::vector<T> M, h;
    crane_terms(&x[0], &x[3], mt, ml, g, M, h);
    std::vector<T> rhs = {x[6] - h[0], x[7] - h[1], -h[2]};
    solve_dense_inplace(M, rhs, 3);
    out[0] = rhs[0];
    out[1] = rhs[1];
    out[2] = rhs[2];
  });
  sys.drift = SmoothMap::make(6, 3, [mt, ml, g](auto x, auto out) {
    using T = typename decltype(out)::value_type;
    std::vector<T> M, h;
    crane_terms(&x[0], &x[3], mt, ml, g, M, h);
    std::vector<T> rhs = {-h[0], -h[1], -h[2]};
    solve_dense_inplace(M, rhs, 3);
    out[0] = rhs[0];
    out[1] = rhs[1];
    out[2] = rhs[2];
  });
  sys.input_matrix = SmoothMap::make(3, 6, [mt, ml, g](auto x, auto out) {
    using T = typename decltype(out)::value_type;
    std::vector<T> M, h;
    T zero(0.0);
    std::vector<T> vzero = {zero, zero, zero};
    crane_terms(&x[0], vzero.data(), mt, ml, g, M, h);
    // two columns of M^{-1} G, G = ((1,0),(0,1),(0,0))
    std::vector<T> c1 = {T(1.0), T(0.0), T(0.0)};
    std::vector<T> c2 = {T(0.0), T(1.0), T(0.0)};
    std::vector<T> M2 = M;
    solve_dense_inplace(M, c1, 3);
    solve_dense_inplace(M2, c2, 3);
    for (int i = 0; i < 3; ++i) {
      out[2 * i] = c1[static_cast<std::size_t>(i)];
      out[2 * i + 1] = c2[static_cast<std::size_t>(i)];
    }
  });
  sys.flat_output = SmoothMap::make(3, 2, [](auto x, auto out) {
    out[0] = x[0] + x[1] * sin(x[2]);
    out[1] = x[1] * cos(x[2]);
  });
  sys.completion = SmoothMap::make(3, 1, [](auto x, auto out) { out[0] = x[2]; });

  const MultiIndex arity({2, 2});
  auto length = [g](const auto& a) {
    using T = scalar_of<decltype(a)>;
    if (value_of(a.y(1, 0)) < 1e-9)
      throw SingularityError("gantry-crane: cable length must stay positive (chart boundary)");
    T phi = crane_phi(a.y(0, 2), a.y(1, 2), g);
    return a.y(1, 0) / cos(phi);
  };
  sys.Fq.push_back(JetFunction::make(arity, [g, length](const auto& a) {
    auto phi = crane_phi(a.y(0, 2), a.y(1, 2), g);
    return a.y(0, 0) - length(a) * sin(phi);
  }));
  sys.Fq.push_back(JetFunction::make(arity, length));
  sys.Fq.push_back(JetFunction::make(arity, [g](const auto& a) {
    return crane_phi(a.y(0, 2), a.y(1, 2), g);
  }));

  sys.nominal_ys = Eigen::Vector2d(0.0, 1.0);
  sys.probe_box = {
      {{-2.0, 2.0}, {-1.0, 1.0}, {-0.3 * g, 0.3 * g}, {-3.0, 3.0}, {-3.0, 3.0}},
      {{0.4, 2.5}, {-1.0, 1.0}, {-0.4 * g, 0.4 * g}, {-3.0, 3.0}, {-3.0, 3.0}}};
  sys.check();
  return sys;
}

FlatSystem make_model(const std::string& name, const std::map<std::string, double>& overrides) {
  std::map<std::string, double> params = model_defaults(name);
  for (const auto& [key, val] : overrides) {
    auto it = params.find(key);
    if (it == params.end())
      throw ModelError("model '" + name + "' has no parameter '" + key + "'");
    it->second = val;
  }
  if (name == "vtol") return make_vtol(params.at("epsilon"));
  return make_gantry_crane(params.at("trolley_mass"), params.at("load_mass"),
                           params.at("gravity"));
}

std::vector<std::string> model_names() { return {"vtol", "gantry-crane"}; }

std::map<std::string, double> model_defaults(const std::string& name) {
  if (name == "vtol") return {{"epsilon", 0.3}};
  if (name == "gantry-crane")
    return {{"trolley_mass", 1.0}, {"load_mass", 1.0}, {"gravity", 9.81}};
  throw ModelError("unknown model '" + name + "' (known: vtol, gantry-crane)");
}

}  // namespace qsflat
