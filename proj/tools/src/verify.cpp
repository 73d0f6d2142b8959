#include "gasket/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "gasket/cli/run.hpp"
#include "gasket/constants.hpp"
#include "gasket/errors.hpp"
#include "gasket/field.hpp"
#include "gasket/kernels.hpp"
#include "gasket/parallel.hpp"
#include "gasket/summation.hpp"

namespace gasket::cli {

using json = nlohmann::ordered_json;

VerifyContext::VerifyContext(VerifyOptions opts) : opts_(opts) {
  if (opts_.level < 4 || opts_.level > kMaxLevel)
    throw ParameterError("verify needs level in [4, " + std::to_string(kMaxLevel) + "], got " +
                         std::to_string(opts_.level));
  require_admissible_order(opts_.s);
}

const LevelGraph& VerifyContext::graph() {
  if (!graph_) graph_ = std::make_unique<LevelGraph>(build_level(opts_.level));
  return *graph_;
}

const StiffnessMatrix& VerifyContext::stiffness() {
  if (!stiffness_) stiffness_ = std::make_unique<StiffnessMatrix>(assemble_energy(graph()));
  return *stiffness_;
}

const MassMatrix& VerifyContext::mass() {
  if (!mass_) mass_ = std::make_unique<MassMatrix>(assemble_mass(graph()));
  return *mass_;
}

const SpectralBasis& VerifyContext::basis() {
  if (!basis_) {
    const auto n = static_cast<int>(stiffness().dim());
    const int count = n <= EigenOptions{}.dense_limit ? n - 1 : std::min(n - 1, 1000);
    basis_ = std::make_unique<SpectralBasis>(solve_eigen(stiffness(), mass(), count, opts_.tolerance));
  }
  return *basis_;
}

namespace {

std::string num(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Accumulates sub-checks into one criterion result.
class Builder {
 public:
  Builder(int criterion, std::string name) {
    r_.criterion = criterion;
    r_.name = std::move(name);
    r_.pass = true;
    r_.details = json::object();
  }

  void check(const std::string& key, bool ok, const std::string& clause, json detail = {}) {
    r_.pass = r_.pass && ok;
    if (!r_.summary.empty()) r_.summary += "; ";
    r_.summary += clause + (ok ? "" : " [fail]");
    if (detail.is_null()) detail = json::object();
    detail["pass"] = ok;
    r_.details[key] = std::move(detail);
  }

  void note(const std::string& key, json detail) { r_.details[key] = std::move(detail); }

  CheckResult done() { return std::move(r_); }

 private:
  CheckResult r_;
};

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Vector random_span_vector(const SpectralBasis& b, int J, std::uint64_t seed) {
  Vector c = gaussian_coefficients(seed, J);
  c /= c.norm();
  return b.synthesize(c);
}

// ---------------------------------------------------------------- 1
CheckResult check_structure(VerifyContext& ctx) {
  Builder out(1, "structure");
  const int L = ctx.options().level;

  bool counts = true;
  double mass_dev = 0.0;
  for (int m = 0; m <= L; ++m) {
    const LevelGraph g = build_level(m);
    const auto p3 = static_cast<std::size_t>(std::llround(std::pow(3.0, m)));
    counts = counts && g.dim() == (3 * p3 + 3) / 2 && g.edges().size() == 3 * p3 && g.cells().size() == p3;
    mass_dev = std::max(mass_dev, std::abs(compensated_sum(g.measure()) - 1.0));
  }
  out.check("vertex_counts", counts, "|V_m| = (3^{m+1}+3)/2 for m <= " + std::to_string(L),
            {{"levels", L}, {"dim", ctx.graph().dim()}});
  const auto t0 = std::chrono::steady_clock::now();
  const LevelGraph g = build_level(L);
  const StiffnessMatrix s = assemble_energy(g);
  const MassMatrix m = assemble_mass(g);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  mass_dev = std::max(mass_dev, std::abs(m.trace() - 1.0));
  out.check("mass_total", mass_dev <= 1e-14, "max |sum M - 1| = " + num(mass_dev) + " (<= 1e-14)",
            {{"max_deviation", mass_dev}});
  // Timing is a requirement only up to level 6.
  out.check("assembly_time", L > 6 || seconds < 1.0, "assembly " + num(seconds, "%.3f") + " s",
            {{"seconds", seconds}, {"level", L}});

  const Vector ones = Vector::Ones(s.dim());
  const double row_sum = (s.entries * ones).cwiseAbs().maxCoeff();
  const SpectralBasis& b = ctx.basis();
  const double lambda1 = b.lambda(1);
  const bool kernel_ok = row_sum <= 1e-12 * s.prefactor && lambda1 > 1e-10 * b.lambda(b.count());
  out.check("stiffness_kernel", kernel_ok, "lambda_1 = " + num(lambda1, "%.6g") + " > 0, |S1| = " + num(row_sum),
            {{"lambda_1", lambda1}, {"max_row_sum", row_sum}});

  double ss = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Vector f = gaussian_coefficients(ctx.options().seed + k, static_cast<int>(g.dim()));
    const double rel = self_similar_energy_residual(g, f) / energy_value(s, f);
    ss = std::max(ss, rel);
  }
  out.check("self_similarity", ss <= 1e-12, "self-similar residual " + num(ss) + " (<= 1e-12)",
            {{"max_relative_residual", ss}, {"vectors", 100}});
  return out.done();
}

// ---------------------------------------------------------------- 2
CheckResult check_spectral(VerifyContext& ctx) {
  Builder out(2, "spectral-hygiene");
  const SpectralBasis& b = ctx.basis();
  const int J = std::min(300, b.count());
  const Vector& mass = ctx.mass().diagonal;
  const Matrix phi = b.modes().leftCols(J + 1);

  const Matrix gram = phi.transpose() * mass.asDiagonal() * phi;
  const double gram_res = max_abs(gram - Matrix::Identity(J + 1, J + 1));

  double mean_res = 0.0, eig_res = 0.0;
  const Matrix sphi = ctx.stiffness().entries * phi;
  const Vector inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  for (int j = 1; j <= J; ++j) {
    mean_res = std::max(mean_res, std::abs(mass.dot(phi.col(j))));
    const Vector r = inv_sqrt.asDiagonal() * (sphi.col(j) - b.lambda(j) * mass.cwiseProduct(phi.col(j)));
    eig_res = std::max(eig_res, r.norm() / b.lambda(j));
  }
  out.check("gram", gram_res <= 1e-8, "Gram residual " + num(gram_res) + " (<= 1e-8)", {{"J", J}, {"value", gram_res}});
  out.check("zero_mean", mean_res <= 1e-10, "max |<Phi_j, 1>_M| " + num(mean_res) + " (<= 1e-10)",
            {{"value", mean_res}});
  out.check("eigen_residual", eig_res <= 1e-8, "eigen residual " + num(eig_res) + " (<= 1e-8)",
            {{"value", eig_res}, {"solver", b.diagnostics().solver}});
  return out.done();
}

// ---------------------------------------------------------------- 3
CheckResult check_weyl(VerifyContext& ctx) {
  Builder out(3, "weyl");
  // The fit sees a 300-mode computed spectrum, as an eigensolve for J = 300 would.
  const int J = std::min(300, ctx.basis().count());
  const WeylFit fit = weyl_exponent_fit(ctx.basis(), J);
  const bool ok = std::abs(fit.slope - kSpectralExponent) <= 0.05;
  out.check("slope", ok,
            "slope " + num(fit.slope, "%.4f") + " vs " + num(kSpectralExponent, "%.4f") + " +- 0.05 over modes [" +
                std::to_string(fit.window_lo) + ", " + std::to_string(fit.window_hi) + ")",
            {{"slope", fit.slope},
             {"J", J},
             {"target", kSpectralExponent},
             {"r2", fit.r2},
             {"points", fit.points},
             {"window", {fit.window_lo, fit.window_hi}}});
  return out.done();
}

// ---------------------------------------------------------------- 4
CheckResult check_heat(VerifyContext& ctx) {
  Builder out(4, "heat");
  const SpectralBasis& b = ctx.basis();
  const Vector& mass = b.mass();
  const HeatKernel h(b, b.count());

  const double t = 0.05, u = 0.1;
  const Matrix ptu = h.matrix(t + u);
  const double semi = max_abs(h.matrix(t) * mass.asDiagonal() * h.matrix(u) - ptu) / max_abs(ptu);
  out.check("semigroup", semi <= 1e-10, "semigroup " + num(semi) + " (<= 1e-10)",
            {{"t", t}, {"u", u}, {"relative_error", semi}});

  double complete = 0.0;
  for (double tc : {0.01, 0.1, 1.0}) {
    const Vector rows = h.matrix(tc) * mass;
    complete = std::max(complete, (rows.array() - 1.0).abs().maxCoeff());
  }
  out.check("stochastic_completeness", complete <= 1e-10, "completeness " + num(complete) + " (<= 1e-10)",
            {{"times", {0.01, 0.1, 1.0}}, {"max_deviation", complete}});

  const double c = h.long_time_constant();
  const double l1 = b.lambda(1);
  double worst = 0.0;
  json ratios = json::array();
  for (double tl : {1.0, 2.0, 4.0, 8.0}) {
    const double ratio = max_abs(h.deviation_matrix(tl)) / (c * std::exp(-l1 * tl));
    worst = std::max(worst, ratio);
    ratios.push_back(ratio);
  }
  out.check("long_time", worst <= 1.0 + 1e-9,
            "max|p_t - 1| / (C e^{-lambda_1 t}) = " + num(worst, "%.4f") + " (<= 1, C = " + num(c, "%.4g") + ")",
            {{"C", c}, {"lambda_1", l1}, {"times", {1, 2, 4, 8}}, {"ratios", ratios}});

  const HeatDiagonalFit fit = fit_heat_diagonal(h, std::exp2(-10.0), std::exp2(-2.0));
  const bool slope_ok = std::abs(fit.slope + kSpectralExponent) <= 0.07;
  out.check("diagonal_slope", slope_ok,
            "diagonal slope " + num(fit.slope, "%.4f") + " vs " + num(-kSpectralExponent, "%.4f") +
                " +- 0.07 over [2^-10, 2^-2]",
            {{"slope", fit.slope},
             {"target", -kSpectralExponent},
             {"r2", fit.r2},
             {"lower_constant", fit.lower_constant},
             {"upper_constant", fit.upper_constant}});
  // Short-time window where p_t is still far from its limit; reported only.
  const HeatDiagonalFit early = fit_heat_diagonal(h, std::exp2(-10.0), std::exp2(-5.0));
  out.note("diagonal_slope_short_window", {{"window", {std::exp2(-10.0), std::exp2(-5.0)}}, {"slope", early.slope}});
  return out.done();
}

// ---------------------------------------------------------------- 5
CheckResult check_riesz(VerifyContext& ctx) {
  Builder out(5, "riesz");
  const SpectralBasis& b = ctx.basis();
  const LevelGraph& g = ctx.graph();
  const double s = ctx.options().s;
  const int J = b.count();
  const RieszKernel gs(b, s, J);
  const Matrix dense = gs.dense();

  double row = 0.0;
  for (VertexId x = 0; x < static_cast<VertexId>(b.dim()); ++x) row = std::max(row, std::abs(gs.row_integral(x)));
  out.check("row_integrals", row <= 1e-10, "row integrals " + num(row) + " (<= 1e-10)", {{"max_abs", row}});

  // Pairs at distance >= 2^-4 whose kernel value is not near a sign change.
  PairSampling far;
  far.d_min = 1.0 / 16.0;
  far.d_max = 1.0;
  far.max_pairs = 4000;
  far.seed = ctx.options().seed;
  const double scale = max_abs(dense);
  std::vector<VertexPair> eligible;
  for (auto p : sample_pairs(g, far))
    if (std::abs(dense(p.first, p.second)) >= 0.05 * scale) eligible.push_back(p);
  const std::size_t want = std::min<std::size_t>(16, eligible.size());
  double quad = 0.0;
  json quad_pairs = json::array();
  std::vector<double> errs(want);
  parallel_for(want, [&](std::size_t k) {
    const auto [x, y] = eligible[k * eligible.size() / want];
    const double spectral = dense(x, y);
    errs[k] = std::abs(riesz_by_time_integral(b, s, x, y, J) - spectral) / std::abs(spectral);
  });
  for (std::size_t k = 0; k < want; ++k) {
    const auto [x, y] = eligible[k * eligible.size() / want];
    quad = std::max(quad, errs[k]);
    quad_pairs.push_back({{"x", x}, {"y", y}, {"relative_error", errs[k]}});
  }
  out.check("time_integral", want > 0 && quad <= 1e-6,
            "time-integral quadrature " + num(quad) + " (<= 1e-6, " + std::to_string(want) + " pairs)",
            {{"max_relative_error", quad}, {"pairs", quad_pairs}});

  double inv = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Vector f = random_span_vector(b, J, ctx.options().seed + 1000 + k);
    const Vector a = apply_riesz(gs, apply_fractional_laplacian(b, s, f), true);
    const Vector c = apply_fractional_laplacian(b, s, apply_riesz(gs, f, true));
    const double fs = f.cwiseAbs().maxCoeff();
    inv = std::max({inv, (a - f).cwiseAbs().maxCoeff() / fs, (c - f).cwiseAbs().maxCoeff() / fs});
  }
  out.check("inverse", inv <= 1e-10, "G_s (-Delta)^s = id to " + num(inv) + " (<= 1e-10)", {{"max_relative_error", inv}});

  const Matrix g2 = RieszKernel(b, 2.0 * s, J).dense();
  const double comp = max_abs(dense * b.mass().asDiagonal() * dense - g2) / max_abs(g2);
  out.check("composition", comp <= 1e-10, "G_{2s} = G_s G_s to " + num(comp) + " (<= 1e-10)",
            {{"relative_error", comp}});
  return out.done();
}

// ---------------------------------------------------------------- 6
CheckResult check_increments(VerifyContext& ctx) {
  Builder out(6, "increments");
  PairSampling sampling;
  sampling.seed = ctx.options().seed;
  for (double s : {0.40, 0.50, 0.60}) {
    const IncrementReport r = increment_l2_check(ctx.graph(), ctx.basis(), s, ctx.basis().count(), sampling);
    out.check("s=" + num(s, "%.2f"), r.pass,
              "s = " + num(s, "%.2f") + ": slope " + num(r.slope, "%.4f") + " >= " + num(r.threshold, "%.4f"),
              {{"slope", r.slope}, {"expected", r.expected_slope}, {"threshold", r.threshold}, {"r2", r.r2},
               {"pairs", r.pairs}});
  }
  return out.done();
}

// ---------------------------------------------------------------- 7
CheckResult check_field(VerifyContext& ctx) {
  Builder out(7, "field");
  const SpectralBasis& b = ctx.basis();
  const LevelGraph& g = ctx.graph();
  const auto& o = ctx.options();
  const int j_tail = truncation_for_tail(b, o.s, o.tail_budget);
  const int J = b.cluster_end(j_tail);
  out.note("truncation", {{"J_tail", j_tail}, {"J", J}, {"tail_budget", o.tail_budget}, {"tail_variance", tail_variance(b, o.s, J)},
                          {"total_variance", tail_variance(b, o.s, 0)}});

  const FieldSample x = sample_field(b, o.s, o.seed, J);
  double per_mode = 0.0;
  for (int j = 1; j <= J; ++j) per_mode = std::max(per_mode, white_noise_pairing(b, x, b.mode(j)).error());
  double random_f = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Vector f = random_span_vector(b, J, o.seed + 2000 + k);
    random_f = std::max(random_f, white_noise_pairing(b, x, f).error());
  }
  out.check("duality", per_mode <= 1e-10 && random_f <= 1e-10,
            "duality " + num(per_mode) + " per mode, " + num(random_f) + " over 100 f (<= 1e-10)",
            {{"per_mode", per_mode}, {"random_f", random_f}});

  const auto seeds = replication_seeds(o.seed, o.replications);
  double mean = 0.0;
  for (std::size_t r = 0; r < std::min<std::size_t>(100, seeds.size()); ++r)
    mean = std::max(mean, std::abs(b.mass().dot(sample_field(b, o.s, seeds[r], J).values)));
  out.check("mean_zero", mean <= 1e-10, "sample means " + num(mean) + " (<= 1e-10)", {{"max_abs_mean", mean}});

  // 90 off-diagonal pairs spread over the sampled distance range plus 10 variances.
  const auto pool = sample_pairs(g, PairSampling{.seed = o.seed});
  std::vector<VertexPair> pairs;
  for (std::size_t k = 0; k < 90 && !pool.empty(); ++k) pairs.push_back(pool[k * pool.size() / 90]);
  for (VertexId k = 0; k < 10; ++k) {
    const auto v = static_cast<VertexId>(static_cast<std::size_t>(k) * g.dim() / 10);
    pairs.emplace_back(v, v);
  }
  const CovarianceReport cov = empirical_covariance(b, o.s, J, seeds, pairs);
  out.check("covariance", cov.pass,
            "covariance max |z| " + num(cov.max_abs_z, "%.3f") + " over " + std::to_string(pairs.size()) +
                " pairs, R = " + std::to_string(cov.replications) + " (<= 5)",
            {{"max_abs_z", cov.max_abs_z}, {"mean_abs_z", cov.mean_abs_z}, {"replications", cov.replications}});

  const auto edges = default_variogram_bins(g.level());
  const VariogramReport vg = variogram(g, b, o.s, J, edges);
  const double target = 2.0 * hurst_from_order(o.s);
  out.check("variogram", std::abs(vg.slope - target) <= 0.1,
            "variogram slope " + num(vg.slope, "%.4f") + " vs 2H = " + num(target, "%.4f") + " +- 0.1",
            {{"slope", vg.slope}, {"target", target}, {"r2", vg.r2}, {"warnings", vg.warnings}});
  return out.done();
}

// ---------------------------------------------------------------- 8
CheckResult check_invariance(VerifyContext& ctx) {
  Builder out(8, "invariance");
  const SpectralBasis& b = ctx.basis();
  const double s = ctx.options().s;
  for (int i = 1; i <= 3; ++i) {
    const InvarianceReport r = symmetry_invariance_test(b, s, b.count(), symmetry_permutation(ctx.graph(), i));
    double spread = 0.0;
    for (const auto& [k, v] : r.metrics)
      if (k == "corner_variance_spread") spread = v;
    out.check("reflection_" + std::to_string(i), r.pass,
              "sigma_" + std::to_string(i) + " deviation " + num(r.max_deviation) + ", corner spread " + num(spread) +
                  " (<= 1e-8)",
              {{"max_deviation", r.max_deviation}, {"corner_variance_spread", spread}});
  }

  // Parent at level L-1; each sub-gasket F_w(V_{L-1}) lives at level L-1+|w|.
  const int m = ctx.options().level - 1;
  const LevelGraph pg = build_level(m);
  const auto solve_all = [&](const LevelGraph& g) {
    return solve_eigen(assemble_energy(g), assemble_mass(g), static_cast<int>(g.dim()) - 1, ctx.options().tolerance);
  };
  const SpectralBasis parent = solve_all(pg);
  for (const char* word : {"", "0", "1", "2"}) {
    const Word w = Word::parse(word);
    const InvarianceReport r = scaling_invariance_test(parent, solve_all(build_subgasket(w, m)), s, w);
    json d = json::object();
    for (const auto& [k, v] : r.metrics) d[k] = v;
    double eig = 0.0, cov = 0.0, target = 0.0;
    for (const auto& [k, v] : r.metrics) {
      if (k == "eigenvalue_ratio_max_rel_dev") eig = v;
      if (k == "covariance_ratio_max_rel_dev") cov = v;
      if (k == "covariance_ratio_target") target = v;
    }
    out.check(r.name, r.pass,
              "w = '" + std::string(word) + "': eigen ratio dev " + num(eig) + " (<= 1%), covariance ratio " +
                  num(target, "%.5f") + " dev " + num(cov) + " (<= 2%)",
              std::move(d));
  }
  return out.done();
}

// ---------------------------------------------------------------- 9
CheckResult check_determinism(VerifyContext& ctx) {
  Builder out(9, "determinism");
  const auto& o = ctx.options();
  std::vector<RunConfig> configs;
  const auto add = [&](Command c) {
    RunConfig cfg;
    cfg.command = c;
    cfg.level = o.level;
    cfg.seed = o.seed;
    cfg.tolerance = o.tolerance;
    cfg.out = "out";
    if (c == Command::Build) cfg.matrix = "matrix";
    if (c == Command::Eigs) cfg.vectors = "vectors";
    if (c == Command::Kernel || c == Command::Sample) {
      cfg.s = o.s;
      cfg.report = "report";
    }
    if (c == Command::Sample) cfg.pgm = "pgm";
    cfg.resolve();
    configs.push_back(cfg);
  };
  for (Command c : {Command::Build, Command::Eigs, Command::Kernel, Command::Sample}) add(c);

  const unsigned saved = max_threads();
  for (const auto& cfg : configs) {
    set_max_threads(saved);
    const Outcome first = execute(cfg);
    // The second run is single-threaded: results must not depend on the split.
    set_max_threads(1);
    const Outcome second = execute(cfg);
    bool same = first.artifacts.size() == second.artifacts.size();
    std::size_t bytes = 0;
    for (std::size_t k = 0; same && k < first.artifacts.size(); ++k) {
      same = first.artifacts[k].content == second.artifacts[k].content;
      bytes += first.artifacts[k].content.size();
    }
    out.check(to_string(cfg.command), same,
              to_string(cfg.command) + (same ? " identical" : " differs") + " (" + std::to_string(bytes) + " bytes)",
              {{"artifacts", first.artifacts.size()}, {"bytes", bytes}});
  }
  set_max_threads(saved);
  return out.done();
}

using CheckFn = CheckResult (*)(VerifyContext&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> r{
      {"structure", check_structure}, {"spectral", check_spectral},     {"weyl", check_weyl},
      {"heat", check_heat},           {"riesz", check_riesz},           {"increments", check_increments},
      {"field", check_field},         {"invariance", check_invariance}, {"determinism", check_determinism}};
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

CheckResult run_check(const std::string& suite, VerifyContext& ctx) {
  for (const auto& [name, fn] : registry())
    if (name == suite) return fn(ctx);
  throw ParameterError("unknown verify suite '" + suite + "'");
}

std::vector<CheckResult> run_suites(const std::string& selection, VerifyContext& ctx) {
  if (selection != "all") return {run_check(selection, ctx)};
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : registry()) out.push_back(fn(ctx));
  return out;
}

std::string format_line(const CheckResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.criterion) + "] " + r.name + ": " + r.summary;
}

}  // namespace gasket::cli
