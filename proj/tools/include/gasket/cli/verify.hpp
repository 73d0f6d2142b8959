#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gasket/dirichlet.hpp"
#include "gasket/geometry.hpp"
#include "gasket/spectral.hpp"

namespace gasket::cli {

struct VerifyOptions {
  int level = 6;
  double s = 0.5;
  std::uint64_t seed = 7;
  std::size_t replications = 10000;
  double tail_budget = 0.01;
  double tolerance = 1e-8;
};

/// Lazily built, cached inputs shared by the checks: V_L, its matrices and
/// the full spectrum at level L.
class VerifyContext {
 public:
  explicit VerifyContext(VerifyOptions opts);

  [[nodiscard]] const VerifyOptions& options() const noexcept { return opts_; }
  [[nodiscard]] const LevelGraph& graph();
  [[nodiscard]] const StiffnessMatrix& stiffness();
  [[nodiscard]] const MassMatrix& mass();
  [[nodiscard]] const SpectralBasis& basis();

 private:
  VerifyOptions opts_;
  std::unique_ptr<LevelGraph> graph_;
  std::unique_ptr<StiffnessMatrix> stiffness_;
  std::unique_ptr<MassMatrix> mass_;
  std::unique_ptr<SpectralBasis> basis_;
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  /// Measured values against thresholds, one clause per sub-check.
  std::string summary;
  nlohmann::ordered_json details;
};

/// Suite names in criterion order (criterion k is suite_names()[k-1]).
[[nodiscard]] const std::vector<std::string>& suite_names();

/// Runs one named suite; ParameterError for an unknown name.
[[nodiscard]] CheckResult run_check(const std::string& suite, VerifyContext& ctx);

/// "all" or a single suite name.
[[nodiscard]] std::vector<CheckResult> run_suites(const std::string& selection, VerifyContext& ctx);

/// "PASS [k] name: summary" or "FAIL [k] name: summary".
[[nodiscard]] std::string format_line(const CheckResult& r);

}  // namespace gasket::cli
