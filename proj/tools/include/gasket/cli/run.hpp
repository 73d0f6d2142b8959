#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gasket/cli/config.hpp"

namespace gasket::cli {

struct Artifact {
  std::string path;
  std::string content;
};

struct Outcome {
  /// 0 on success, 1 when a verify check failed.
  int exit_code = 0;
  std::vector<Artifact> artifacts;
  /// Human-readable lines for stdout.
  std::vector<std::string> summary;
};

/// Runs a resolved config without touching the filesystem. Artifacts are
/// produced only for the paths set in the config. Library exceptions
/// propagate.
[[nodiscard]] Outcome execute(const RunConfig& cfg);

/// execute() plus file output and exit-code mapping: invalid configuration
/// 2, solver failure 3.
int run(RunConfig cfg, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand, optional config file, flags) and calls run().
int main_entry(int argc, char** argv);

}  // namespace gasket::cli
