#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "geoaug/cli/config.hpp"

namespace geoaug::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

struct Command {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;  // `seed` is added to every command
  std::function<void(const Config&, const std::filesystem::path& out_dir, std::ostream& log)> run;
};

Command theorem1_command();
Command curve_command();
Command augment_command();
Command dro_check_command();
Command oracle_suite_command();
Command train_command();
Command eval_command();

const std::vector<Command>& all_commands();

// Parses argv, runs the selected command and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoaug::cli
