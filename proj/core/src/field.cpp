#include "gasket/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "gasket/constants.hpp"
#include "gasket/errors.hpp"
#include "gasket/parallel.hpp"
#include "gasket/regression.hpp"

namespace gasket {

Vector gaussian_coefficients(std::uint64_t seed, int J) {
  if (J < 0) throw BoundsError("mode count must be nonnegative");
  std::mt19937_64 engine(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Vector n(J);
  for (int j = 0; j < J; ++j) n[j] = normal(engine);
  return n;
}

std::vector<std::uint64_t> replication_seeds(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  std::uint64_t state = base;
  for (auto& s : out) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s = z ^ (z >> 31);
  }
  return out;
}

namespace {

Vector mode_weights(const SpectralBasis& b, double exponent, int J) {
  Vector w(J);
  for (int j = 1; j <= J; ++j) w[j - 1] = std::pow(b.lambda(j), exponent);
  return w;
}

}  // namespace

FieldSample sample_field(const SpectralBasis& b, double s, std::uint64_t seed, int J) {
  require_admissible_order(s);
  b.check_truncation(J);
  FieldSample x;
  x.level = b.level();
  x.s = s;
  x.hurst = hurst_from_order(s);
  x.modes = J;
  x.seed = seed;
  x.coefficients = gaussian_coefficients(seed, J);
  x.values = b.synthesize(mode_weights(b, -s, J).cwiseProduct(x.coefficients));
  return x;
}

Vector pin_field(const FieldSample& x, VertexId q) {
  if (q < 0 || q >= x.values.size()) throw BoundsError("pinning vertex out of range");
  return x.values.array() - x.values[q];
}

DualityCheck white_noise_pairing(const SpectralBasis& b, const FieldSample& x, const Eigen::Ref<const Vector>& f) {
  if (x.values.size() != b.dim()) throw DimensionError("field does not match basis");
  const int J = x.modes;
  const Vector c = b.coefficients(f, J);
  const Vector projected = b.synthesize(c);
  const Vector lifted = apply_fractional_laplacian(b, x.s, projected, J);

  DualityCheck out;
  out.lhs = lifted.dot(b.mass().cwiseProduct(x.values));
  out.rhs = c.dot(x.coefficients);
  return out;
}

CovarianceReport empirical_covariance(const SpectralBasis& b, double s, int J, std::span<const std::uint64_t> seeds,
                                      std::span<const VertexPair> pairs) {
  require_admissible_order(s);
  b.check_truncation(J);
  if (seeds.size() < kMinCovarianceReplications)
    throw ParameterError("empirical covariance needs at least " + std::to_string(kMinCovarianceReplications) +
                         " replications");

  // Only the vertices touched by some pair are synthesized.
  std::vector<VertexId> verts;
  for (auto [x, y] : pairs) {
    verts.push_back(x);
    verts.push_back(y);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  const auto slot = [&](VertexId v) {
    return static_cast<Eigen::Index>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
  };

  const Vector w = mode_weights(b, -s, J);
  Matrix rows(static_cast<Eigen::Index>(verts.size()), J);
  for (std::size_t i = 0; i < verts.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = b.usable_modes(J).row(verts[i]).cwiseProduct(w.transpose());

  const std::size_t R = seeds.size(), P = pairs.size();
  std::vector<double> products(R * P);
  parallel_for(R, [&](std::size_t r) {
    const Vector xs = rows * gaussian_coefficients(seeds[r], J);
    for (std::size_t p = 0; p < P; ++p) products[r * P + p] = xs[slot(pairs[p].first)] * xs[slot(pairs[p].second)];
  });

  const Vector w2 = mode_weights(b, -2.0 * s, J);
  CovarianceReport rep;
  rep.s = s;
  rep.modes = J;
  rep.replications = R;
  rep.pairs.assign(pairs.begin(), pairs.end());
  for (std::size_t p = 0; p < P; ++p) {
    double mean = 0.0;
    for (std::size_t r = 0; r < R; ++r) mean += products[r * P + p];
    mean /= static_cast<double>(R);
    double var = 0.0;
    for (std::size_t r = 0; r < R; ++r) var += (products[r * P + p] - mean) * (products[r * P + p] - mean);
    var /= static_cast<double>(R - 1);

    const auto [x, y] = pairs[p];
    const double exact = (b.usable_modes(J).row(x).transpose().cwiseProduct(w2)).dot(b.usable_modes(J).row(y));
    const double se = std::sqrt(var / static_cast<double>(R));
    const double z = se > 0.0 ? (mean - exact) / se : 0.0;
    rep.exact.push_back(exact);
    rep.empirical.push_back(mean);
    rep.z_scores.push_back(z);
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
    rep.mean_abs_z += std::abs(z);
  }
  if (P > 0) rep.mean_abs_z /= static_cast<double>(P);
  rep.pass = rep.max_abs_z <= 5.0;
  return rep;
}

std::vector<double> default_variogram_bins(int level) {
  if (level < 4) throw ParameterError("variogram bins need level >= 4");
  std::vector<double> edges;
  for (int k = 2 * (level - 1); k >= 4; --k) edges.push_back(std::exp2(-0.5 * k));
  return edges;
}

VariogramReport variogram(const LevelGraph& g, const SpectralBasis& b, double s, int J,
                          std::span<const double> bin_edges, VariogramMode mode, std::span<const std::uint64_t> seeds,
                          const PairSampling& sampling) {
  require_admissible_order(s);
  b.check_truncation(J);
  if (bin_edges.size() < 3) throw ParameterError("variogram needs at least two bins");
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end())) throw ParameterError("bin edges must increase");
  if (mode == VariogramMode::MonteCarlo && seeds.size() < 2) throw ParameterError("Monte Carlo variogram needs seeds");

  PairSampling window = sampling;
  window.d_min = bin_edges.front();
  window.d_max = bin_edges.back();
  const auto pairs = sample_pairs(g, window);

  VariogramReport rep;
  rep.s = s;
  rep.hurst_target = hurst_from_order(s);
  rep.mode = mode;
  const std::size_t nb = bin_edges.size() - 1;
  rep.bins.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    rep.bins[i].lo = bin_edges[i];
    rep.bins[i].hi = bin_edges[i + 1];
  }

  std::vector<double> second_moment(pairs.size(), 0.0), moment_var(pairs.size(), 0.0);
  if (mode == VariogramMode::Exact) {
    const RieszKernel k(b, s, J);
    for (std::size_t p = 0; p < pairs.size(); ++p) second_moment[p] = k.increment_energy(pairs[p].first, pairs[p].second);
  } else {
    const std::size_t R = seeds.size();
    rep.replications = R;
    std::vector<double> sq(R * pairs.size());
    parallel_for(R, [&](std::size_t r) {
      const FieldSample x = sample_field(b, s, seeds[r], J);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double d = x.values[pairs[p].first] - x.values[pairs[p].second];
        sq[r * pairs.size() + p] = d * d;
      }
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      double m = 0.0;
      for (std::size_t r = 0; r < R; ++r) m += sq[r * pairs.size() + p];
      second_moment[p] = m / static_cast<double>(R);
      double v = 0.0;
      for (std::size_t r = 0; r < R; ++r) v += std::pow(sq[r * pairs.size() + p] - second_moment[p], 2);
      moment_var[p] = v / static_cast<double>(R - 1) / static_cast<double>(R);
    }
  }

  std::vector<double> bin_var(nb, 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double d = euclidean_distance(g.vertex(pairs[p].first), g.vertex(pairs[p].second));
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), d * (1.0 + 1e-12));
    auto i = static_cast<std::size_t>(std::distance(bin_edges.begin(), it));
    i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, nb - 1);
    auto& bin = rep.bins[i];
    ++bin.count;
    bin.log_center += std::log(d);
    bin.mean_square_increment += second_moment[p];
    bin_var[i] += moment_var[p];
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < nb; ++i) {
    auto& bin = rep.bins[i];
    if (bin.count == 0) throw ParameterError("variogram bin [" + std::to_string(bin.lo) + ", " + std::to_string(bin.hi) + ") is empty");
    const auto n = static_cast<double>(bin.count);
    bin.log_center /= n;
    bin.mean_square_increment /= n;
    bin.half_width = 1.96 * std::sqrt(bin_var[i]) / n;
    if (bin.count == 1) {
      rep.warnings.push_back("bin [" + std::to_string(bin.lo) + ", " + std::to_string(bin.hi) +
                             ") holds a single pair; excluded from the fit");
      continue;
    }
    bin.used = true;
    xs.push_back(bin.log_center);
    ys.push_back(std::log(bin.mean_square_increment));
    if (bin.mean_square_increment > 0.0)
      rep.confidence_half_width = std::max(rep.confidence_half_width, bin.half_width / bin.mean_square_increment);
  }
  const LineFit fit = fit_line(xs, ys);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r2 = fit.r2;
  return rep;
}

HoelderReport hoelder_statistic(const LevelGraph& g, const Eigen::Ref<const Vector>& values, double hurst,
                                std::span<const double> deltas) {
  if (static_cast<std::size_t>(values.size()) != g.dim()) throw DimensionError("field does not match graph");
  if (deltas.empty()) throw ParameterError("Hölder statistic needs at least one delta");
  for (double d : deltas)
    if (!(d > 0.0 && d < std::exp(-1.0))) throw ParameterError("Hölder deltas must lie in (0, 1/e)");

  HoelderReport rep;
  rep.hurst = hurst;
  rep.deltas.assign(deltas.begin(), deltas.end());
  rep.statistics.assign(deltas.size(), 0.0);

  const auto n = static_cast<VertexId>(g.dim());
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId c = a + 1; c < n; ++c) {
      const double d = euclidean_distance(g.vertex(a), g.vertex(c));
      const double ratio = std::abs(values[a] - values[c]) / (std::pow(d, hurst) * std::sqrt(std::abs(std::log(d))));
      for (std::size_t k = 0; k < deltas.size(); ++k)
        if (d > 0.5 * deltas[k] * (1.0 + 1e-12) && d <= deltas[k] * (1.0 + 1e-12))
          rep.statistics[k] = std::max(rep.statistics[k], ratio);
    }
  }

  const auto lo = std::min_element(deltas.begin(), deltas.end()) - deltas.begin();
  const auto hi = std::max_element(deltas.begin(), deltas.end()) - deltas.begin();
  rep.ratio = rep.statistics[hi] > 0.0 ? rep.statistics[lo] / rep.statistics[hi] : 0.0;
  rep.bounded_trend = rep.ratio <= rep.cap;
  return rep;
}

InvarianceReport symmetry_invariance_test(const SpectralBasis& b, double s, int J, const SymmetryMap& sigma,
                                          double tolerance) {
  require_admissible_order(s);
  if (sigma.permutation.size() != static_cast<std::size_t>(b.dim())) throw DimensionError("symmetry does not match basis");
  const Matrix cov = RieszKernel(b, 2.0 * s, J).dense();

  InvarianceReport rep;
  rep.name = "symmetry-" + std::to_string(sigma.index);
  rep.tolerance = tolerance;
  const auto n = static_cast<VertexId>(b.dim());
  for (VertexId x = 0; x < n; ++x)
    for (VertexId y = x; y < n; ++y) rep.max_deviation = std::max(rep.max_deviation, std::abs(cov(sigma(x), sigma(y)) - cov(x, y)));

  const double v0 = cov(0, 0), v1 = cov(1, 1), v2 = cov(2, 2);
  const double spread = std::max({v0, v1, v2}) - std::min({v0, v1, v2});
  rep.metrics = {{"var_q0", v0}, {"var_q1", v1}, {"var_q2", v2}, {"corner_variance_spread", spread}};
  rep.pass = rep.max_deviation <= tolerance && spread <= tolerance;
  return rep;
}

InvarianceReport scaling_invariance_test(const SpectralBasis& parent, const SpectralBasis& sub, double s,
                                         const Word& w) {
  require_admissible_order(s);
  const auto n = static_cast<int>(w.size());
  if (sub.level() != parent.level() + n || sub.dim() != parent.dim())
    throw ParameterError("sub-gasket basis must live on F_w(V_m) with V_m the parent level");

  const int J = std::min(parent.count(), sub.count());
  InvarianceReport rep;
  rep.name = "scaling-" + (w.empty() ? std::string("root") : w.to_string());
  rep.tolerance = 0.02;

  const double eig_target = std::pow(5.0, n);
  double eig_dev = 0.0;
  for (int j = 1; j <= std::min(J, 20); ++j) eig_dev = std::max(eig_dev, std::abs(sub.lambda(j) / parent.lambda(j) / eig_target - 1.0));

  const double hurst = hurst_from_order(s);
  const double cov_target = std::exp2(-2.0 * n * hurst);
  const Matrix g_parent = RieszKernel(parent, 2.0 * s, J).dense();
  const Matrix g_sub = RieszKernel(sub, 2.0 * s, J).dense();
  const double floor = 0.1 * g_parent.cwiseAbs().maxCoeff();
  double cov_dev = 0.0, ratio_sum = 0.0;
  std::size_t used = 0;
  for (Eigen::Index x = 0; x < g_parent.rows(); ++x)
    for (Eigen::Index y = x; y < g_parent.cols(); ++y) {
      if (std::abs(g_parent(x, y)) < floor) continue;
      const double ratio = g_sub(x, y) / g_parent(x, y);
      cov_dev = std::max(cov_dev, std::abs(ratio / cov_target - 1.0));
      ratio_sum += ratio;
      ++used;
    }

  rep.max_deviation = std::max(eig_dev, cov_dev);
  rep.metrics = {{"eigenvalue_ratio_target", eig_target},
                 {"eigenvalue_ratio_max_rel_dev", eig_dev},
                 {"covariance_ratio_target", cov_target},
                 {"covariance_ratio_mean", used ? ratio_sum / static_cast<double>(used) : 0.0},
                 {"covariance_ratio_max_rel_dev", cov_dev},
                 {"pairs", static_cast<double>(used)}};
  rep.pass = eig_dev <= 0.01 && cov_dev <= 0.02;
  return rep;
}

}  // namespace gasket
