#pragma once

#include "qsflat/config.hpp"

namespace qsflat::cli {

// Exit codes: 0 ok, 1 usage or model error, 2 structure warning,
// 3 runtime singularity, 4 certificate failure.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kStructureWarning = 2;
inline constexpr int kRuntimeSingularity = 3;
inline constexpr int kCertificateFailure = 4;

int cmd_analyze(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg, int halvings = 0);
int cmd_sweep(const RunConfig& cfg);
int cmd_list_models();

int run(int argc, char** argv);

}  // namespace qsflat::cli
