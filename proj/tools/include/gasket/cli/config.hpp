#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace gasket::cli {

enum class Command { Build, Eigs, Kernel, Sample, Verify };

[[nodiscard]] std::string to_string(Command c);
[[nodiscard]] Command parse_command(const std::string& name);

/// Every option of every subcommand. Unset optionals fall back to defaults
/// chosen per command in resolve().
struct RunConfig {
  Command command = Command::Build;
  int level = 6;
  std::optional<double> s;
  std::optional<double> hurst;
  /// Eigenpairs to compute (mode 0 excluded). Unset: all of them on the
  /// dense path, 1000 on the iterative path.
  std::optional<int> count;
  /// Truncation J. Unset: smallest cluster-closed J whose tail variance is
  /// at most `tail_budget` of the computed total.
  std::optional<int> modes;
  double tail_budget = 0.01;
  double tolerance = 1e-8;
  std::uint64_t seed = 42;
  std::size_t replications = 10000;
  /// kernel: "riesz" (order s) or "heat" (time t).
  std::string kernel = "riesz";
  double time = 0.1;
  std::string out;
  std::string report;
  std::string vectors;
  std::string matrix;
  std::string pgm;
  std::string suite = "all";
  /// 0 means hardware concurrency.
  unsigned threads = 0;

  /// Fills the derived member of {s, H} and checks every invariant; throws
  /// ParameterError naming the violated one.
  void resolve();
  [[nodiscard]] bool needs_order() const;

  /// Resolved settings as recorded in artifacts. Paths and the thread count
  /// are excluded so that outputs depend only on the computation.
  [[nodiscard]] nlohmann::ordered_json echo() const;
};

/// Applies the keys of a JSON object to `cfg`. Unknown keys are a
/// ParameterError.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Thread cap from GASKET_FGF_THREADS, if set and valid.
[[nodiscard]] std::optional<unsigned> threads_from_env();

}  // namespace gasket::cli
