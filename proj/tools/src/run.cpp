#include "gasket/cli/run.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gasket/cli/io.hpp"
#include "gasket/cli/verify.hpp"
#include "gasket/constants.hpp"
#include "gasket/dirichlet.hpp"
#include "gasket/errors.hpp"
#include "gasket/field.hpp"
#include "gasket/kernels.hpp"
#include "gasket/parallel.hpp"
#include "gasket/spectral.hpp"

namespace gasket::cli {

namespace {

constexpr Eigen::Index kDenseLimit = EigenOptions{}.dense_limit;
constexpr int kIterativeDefaultCount = 1000;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

SpectralBasis solve_basis(const RunConfig& cfg, const StiffnessMatrix& s, const MassMatrix& m) {
  const auto available = static_cast<int>(s.dim()) - 1;
  const int fallback = s.dim() <= kDenseLimit ? available : std::min(available, kIterativeDefaultCount);
  return solve_eigen(s, m, cfg.count.value_or(fallback), cfg.tolerance);
}

struct Truncation {
  /// Smallest J meeting the tail budget; -1 when J was given.
  int tail = -1;
  /// Used truncation, extended to the end of its degenerate cluster.
  int modes = 0;
};

Truncation resolve_modes(const RunConfig& cfg, const SpectralBasis& b) {
  if (cfg.modes) {
    b.check_truncation(*cfg.modes);
    return {-1, *cfg.modes};
  }
  const int tail = truncation_for_tail(b, *cfg.s, cfg.tail_budget);
  return {tail, b.cluster_end(tail)};
}

json echo_with_modes(const RunConfig& cfg, const Truncation& t) {
  json e = cfg.echo();
  if (t.tail >= 0) e["J_tail"] = t.tail;
  e["J"] = t.modes;
  return e;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void run_build(const RunConfig& cfg, Outcome& o) {
  const LevelGraph g = build_level(cfg.level);
  o.summary.push_back("level " + std::to_string(g.level()) + ": " + std::to_string(g.dim()) + " vertices, " +
                      std::to_string(g.edges().size()) + " edges, " + std::to_string(g.cells().size()) + " cells");
  if (!cfg.out.empty()) {
    json j;
    j["config"] = cfg.echo();
    j["graph"] = graph_json(g);
    o.artifacts.push_back({cfg.out, j.dump() + "\n"});
  }
  if (!cfg.matrix.empty()) {
    std::ostringstream os;
    write_matrix_coo(os, assemble_energy(g), cfg.echo());
    o.artifacts.push_back({cfg.matrix, os.str()});
  }
}

void run_eigs(const RunConfig& cfg, Outcome& o) {
  const LevelGraph g = build_level(cfg.level);
  const SpectralBasis b = solve_basis(cfg, assemble_energy(g), assemble_mass(g));
  o.summary.push_back(std::to_string(b.count()) + " eigenpairs (" + b.diagnostics().solver +
                      "), lambda_1 = " + fmt("%.10g", b.lambda(1)) +
                      ", residual = " + fmt("%.3g", b.diagnostics().residual_norm));
  if (!cfg.out.empty()) {
    json j;
    j["config"] = cfg.echo();
    j.update(eigen_json(b));
    o.artifacts.push_back({cfg.out, dump(j)});
  }
  if (!cfg.vectors.empty()) {
    std::ostringstream os;
    os << "# config: " << cfg.echo().dump() << '\n';
    write_eigenvector_csv(os, b);
    o.artifacts.push_back({cfg.vectors, os.str()});
  }
}

void run_kernel(const RunConfig& cfg, Outcome& o) {
  const LevelGraph g = build_level(cfg.level);
  const SpectralBasis b = solve_basis(cfg, assemble_energy(g), assemble_mass(g));
  const bool riesz = cfg.kernel == "riesz";
  // Kernels use every computed mode unless told otherwise.
  const int J = cfg.modes.value_or(b.count());
  b.check_truncation(J);
  json echo = cfg.echo();
  echo["J"] = J;

  if (!cfg.out.empty()) {
    const Matrix k = riesz ? RieszKernel(b, *cfg.s, J).dense() : HeatKernel(b, J).matrix(cfg.time);
    std::ostringstream os;
    write_kernel_csv(os, k, echo);
    o.artifacts.push_back({cfg.out, os.str()});
  }

  json report;
  if (riesz) {
    const KernelEstimateReport r = estimate_bound_fit(g, b, *cfg.s, J);
    o.summary.push_back("riesz s = " + fmt("%.5f", *cfg.s) + " (" + to_string(r.regime) + "): fitted exponent " +
                        fmt("%.4f", r.fitted_exponent) + ", bound exponent " + fmt("%.4f", r.bound_exponent));
    report = to_json(r);
  } else {
    const HeatDiagonalFit f = fit_heat_diagonal(HeatKernel(b, J), std::exp2(-10.0), std::exp2(-2.0));
    o.summary.push_back("heat diagonal slope " + fmt("%.4f", f.slope) + " over [2^-10, 2^-2]");
    report = to_json(f);
  }
  if (!cfg.report.empty()) {
    json j;
    j["config"] = echo;
    j["report"] = report;
    o.artifacts.push_back({cfg.report, dump(j)});
  }
}

void run_sample(const RunConfig& cfg, Outcome& o) {
  const LevelGraph g = build_level(cfg.level);
  const SpectralBasis b = solve_basis(cfg, assemble_energy(g), assemble_mass(g));
  const Truncation trunc = resolve_modes(cfg, b);
  const int J = trunc.modes;
  const FieldSample x = sample_field(b, *cfg.s, cfg.seed, J);
  const json echo = echo_with_modes(cfg, trunc);
  o.summary.push_back("field s = " + fmt("%.5f", *cfg.s) + ", H = " + fmt("%.5f", *cfg.hurst) + ", J = " +
                      std::to_string(J) + ", seed = " + std::to_string(cfg.seed) + ", " + std::to_string(g.dim()) +
                      " vertices");
  if (!cfg.out.empty()) {
    std::ostringstream os;
    write_field_csv(os, g, x, echo);
    o.artifacts.push_back({cfg.out, os.str()});
  }
  if (!cfg.pgm.empty()) {
    std::ostringstream os;
    write_field_pgm(os, g, x.values, 512, echo.dump());
    o.artifacts.push_back({cfg.pgm, os.str()});
  }
  if (!cfg.report.empty()) {
    json j;
    j["config"] = echo;
    j["tail_variance"] = tail_variance(b, *cfg.s, J);
    j["mean"] = b.mass().dot(x.values);
    j["generator"] = kGaussianGenerator;
    o.artifacts.push_back({cfg.report, dump(j)});
  }
}

void run_verify(const RunConfig& cfg, Outcome& o) {
  VerifyOptions opts;
  opts.level = cfg.level;
  opts.s = *cfg.s;
  opts.seed = cfg.seed;
  opts.replications = cfg.replications;
  opts.tail_budget = cfg.tail_budget;
  opts.tolerance = cfg.tolerance;
  VerifyContext ctx(opts);
  const std::vector<CheckResult> results = run_suites(cfg.suite, ctx);

  json checks = json::array();
  for (const auto& r : results) {
    o.summary.push_back(format_line(r));
    if (!r.pass) o.exit_code = 1;
    checks.push_back({{"criterion", r.criterion}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
  }
  if (!cfg.out.empty()) {
    json j;
    j["config"] = cfg.echo();
    j["checks"] = std::move(checks);
    o.artifacts.push_back({cfg.out, dump(j)});
  }
}

}  // namespace

Outcome execute(const RunConfig& cfg) {
  Outcome o;
  switch (cfg.command) {
    case Command::Build: run_build(cfg, o); break;
    case Command::Eigs: run_eigs(cfg, o); break;
    case Command::Kernel: run_kernel(cfg, o); break;
    case Command::Sample: run_sample(cfg, o); break;
    case Command::Verify: run_verify(cfg, o); break;
  }
  return o;
}

int run(RunConfig cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.resolve();
    set_max_threads(cfg.threads);
    const Outcome o = execute(cfg);
    for (const auto& a : o.artifacts) write_text_file(a.path, a.content);
    for (const auto& line : o.summary) out << line << '\n';
    return o.exit_code;
  } catch (const ParameterError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const BoundsError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (achieved residual " << e.achieved_residual() << ")\n";
    return 3;
  } catch (const ConsistencyError& e) {
    err << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Fractional Gaussian fields on the Sierpinski gasket"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::optional<int> level, count, modes;
    std::optional<double> s, hurst, tail_budget, tolerance, time;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::optional<std::string> kernel, out, report, vectors, matrix, pgm;
    std::optional<unsigned> threads;
    std::string suite;
  } f;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    sub->add_option("--level", f.level, "Graph level m");
    sub->add_option("--threads", f.threads, "Worker thread cap (default: GASKET_FGF_THREADS or all cores)");
    sub->add_option("--out", f.out, "Primary output file");
  };
  const auto spectral = [&](CLI::App* sub) {
    sub->add_option("--count", f.count, "Eigenpairs to compute");
    sub->add_option("--tol", f.tolerance, "Eigen residual tolerance");
  };
  const auto order = [&](CLI::App* sub) {
    auto* s_opt = sub->add_option("--s", f.s, "Riesz order s");
    auto* h_opt = sub->add_option("--H", f.hurst, "Hurst index H (s derived)");
    s_opt->excludes(h_opt);
    sub->add_option("--modes", f.modes, "Truncation J");
    sub->add_option("--tail", f.tail_budget, "Tail variance budget when --modes is absent");
    sub->add_option("--seed", f.seed, "Random seed");
  };

  CLI::App* build = app.add_subcommand("build", "Build V_m and write the graph and stiffness matrix");
  common(build);
  build->add_option("--matrix", f.matrix, "Stiffness matrix output (COO text)");

  CLI::App* eigs = app.add_subcommand("eigs", "Solve the generalized eigenproblem");
  common(eigs);
  spectral(eigs);
  eigs->add_option("--vectors", f.vectors, "Eigenvector CSV output");

  CLI::App* kernel = app.add_subcommand("kernel", "Evaluate a Riesz or heat kernel");
  common(kernel);
  spectral(kernel);
  order(kernel);
  kernel->add_option("--kind", f.kernel, "riesz or heat");
  kernel->add_option("--t", f.time, "Heat kernel time");
  kernel->add_option("--report", f.report, "Report JSON output");

  CLI::App* sample = app.add_subcommand("sample", "Sample a fractional Gaussian field");
  common(sample);
  spectral(sample);
  order(sample);
  sample->add_option("--pgm", f.pgm, "512x512 grayscale raster output");
  sample->add_option("--report", f.report, "Sample report JSON output");

  CLI::App* verify = app.add_subcommand("verify", "Run acceptance checks");
  common(verify);
  spectral(verify);
  order(verify);
  verify->add_option("suite", f.suite, "all, or one of: " + [] {
    std::string names;
    for (const auto& n : suite_names()) names += (names.empty() ? "" : ", ") + n;
    return names;
  }());
  verify->add_option("--replications", f.replications, "Monte Carlo replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  const CLI::App* chosen = app.get_subcommands().front();
  try {
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      apply_json(cfg, nlohmann::json::parse(in));
    }
    cfg.command = parse_command(chosen->get_name());
    if (!cfg.threads) {
      if (auto env = threads_from_env()) cfg.threads = *env;
    }
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  }

  // Flags win over the config file; s and H replace each other.
  if (f.level) cfg.level = *f.level;
  if (f.s) {
    cfg.s = f.s;
    cfg.hurst.reset();
  }
  if (f.hurst) {
    cfg.hurst = f.hurst;
    cfg.s.reset();
  }
  if (f.count) cfg.count = f.count;
  if (f.modes) cfg.modes = f.modes;
  if (f.tail_budget) cfg.tail_budget = *f.tail_budget;
  if (f.tolerance) cfg.tolerance = *f.tolerance;
  if (f.time) cfg.time = *f.time;
  if (f.seed) cfg.seed = *f.seed;
  if (f.replications) cfg.replications = *f.replications;
  if (f.kernel) cfg.kernel = *f.kernel;
  if (f.out) cfg.out = *f.out;
  if (f.report) cfg.report = *f.report;
  if (f.vectors) cfg.vectors = *f.vectors;
  if (f.matrix) cfg.matrix = *f.matrix;
  if (f.pgm) cfg.pgm = *f.pgm;
  if (f.threads) cfg.threads = *f.threads;
  if (!f.suite.empty()) cfg.suite = f.suite;

  return run(cfg, std::cout, std::cerr);
}

}  // namespace gasket::cli
