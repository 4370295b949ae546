#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace gvnr::cli {

/// Exit statuses shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;  // bad flags or unreadable/unwritable paths

int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_infer(const RunConfig& cfg, std::ostream& log);
int cmd_evaluate(const RunConfig& cfg, std::ostream& log);
int cmd_attend(const RunConfig& cfg, std::ostream& log);

/// Full command-line entry point (argv[0] included). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gvnr::cli
