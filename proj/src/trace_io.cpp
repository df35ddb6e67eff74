#include "qsflat/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace qsflat {

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open trace file for writing: " + path);
  std::fputs("t", f);
  for (int i = 1; i <= trace.n; ++i) std::fprintf(f, ",q%d", i);
  for (int i = 1; i <= trace.n; ++i) std::fprintf(f, ",v%d", i);
  for (int i = 1; i <= trace.m; ++i) std::fprintf(f, ",u%d", i);
  for (int i = 1; i <= trace.m; ++i) std::fprintf(f, ",y%d", i);
  for (int i = 1; i <= trace.m; ++i) std::fprintf(f, ",w%d", i);
  std::fputc('\n', f);
  for (int s = 0; s < trace.samples(); ++s) {
    const auto idx = static_cast<std::size_t>(s);
    std::fprintf(f, "%.17g", trace.t[idx]);
    for (int i = 0; i < trace.n; ++i) std::fprintf(f, ",%.17g", trace.q[idx][i]);
    for (int i = 0; i < trace.n; ++i) std::fprintf(f, ",%.17g", trace.v[idx][i]);
    for (int i = 0; i < trace.m; ++i) std::fprintf(f, ",%.17g", trace.u[idx][i]);
    for (int i = 0; i < trace.m; ++i) std::fprintf(f, ",%.17g", trace.y[idx][i]);
    for (int i = 0; i < trace.m; ++i) std::fprintf(f, ",%.17g", trace.w[idx][i]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

nlohmann::json diagnostics_json(const Trace& trace) {
  int max_iters = 0;
  double max_resid = 0.0, mean_iters = 0.0;
  for (const auto& d : trace.diag) {
    max_iters = std::max(max_iters, d.newton_iterations);
    max_resid = std::max(max_resid, d.residual);
    mean_iters += d.newton_iterations;
  }
  if (!trace.diag.empty()) mean_iters /= static_cast<double>(trace.diag.size());
  return nlohmann::json{{"samples", trace.samples()},
                        {"dt", trace.dt},
                        {"kappa", trace.kappa.orders()},
                        {"newton_max_iterations", max_iters},
                        {"newton_mean_iterations", mean_iters},
                        {"newton_max_residual", max_resid}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace qsflat
