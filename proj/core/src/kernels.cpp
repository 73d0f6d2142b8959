#include "gasket/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gasket/constants.hpp"
#include "gasket/errors.hpp"
#include "gasket/regression.hpp"

namespace gasket {

// ---------------------------------------------------------------- heat kernel

HeatKernel::HeatKernel(const SpectralBasis& basis, int J) : basis_(&basis), J_(J) { basis.check_truncation(J); }

double HeatKernel::deviation(double t, VertexId x, VertexId y) const {
  if (!(t > 0.0)) throw ParameterError("heat kernel needs t > 0");
  const auto& b = *basis_;
  double sum = 0.0;
  for (int j = 1; j <= J_; ++j) sum += std::exp(-b.lambda(j) * t) * b.modes()(x, j) * b.modes()(y, j);
  return sum;
}

double HeatKernel::operator()(double t, VertexId x, VertexId y) const {
  const auto& phi = basis_->modes();
  return phi(x, 0) * phi(y, 0) + deviation(t, x, y);
}

namespace {

// A diag(w) Aᵀ. Weights below 1e-250 are dropped: they only produce
// subnormal products, which are orders of magnitude slower to multiply.
Matrix weighted_outer(const Eigen::Ref<const Matrix>& a, const Vector& w) {
  const Vector kept = (w.array().abs() < 1e-250).select(0.0, w);
  const Matrix scaled = a * kept.asDiagonal();
  return scaled * a.transpose();
}

}  // namespace

Matrix HeatKernel::matrix(double t) const {
  if (!(t > 0.0)) throw ParameterError("heat kernel needs t > 0");
  const auto& b = *basis_;
  const auto modes = b.modes().leftCols(J_ + 1);
  const Vector decay = (-t * b.lambdas().head(J_ + 1)).array().exp();
  return weighted_outer(modes, decay);
}

Matrix HeatKernel::deviation_matrix(double t) const {
  if (!(t > 0.0)) throw ParameterError("heat kernel needs t > 0");
  const auto& b = *basis_;
  const Vector decay = (-t * b.lambdas().segment(1, J_)).array().exp();
  return weighted_outer(b.usable_modes(J_), decay);
}

Vector HeatKernel::diagonal(double t) const {
  if (!(t > 0.0)) throw ParameterError("heat kernel needs t > 0");
  const auto& b = *basis_;
  const auto modes = b.modes().leftCols(J_ + 1);
  const Vector decay = (-t * b.lambdas().head(J_ + 1)).array().exp();
  return modes.array().square().matrix() * decay;
}

double HeatKernel::trace(double t) const {
  if (!(t > 0.0)) throw ParameterError("heat kernel needs t > 0");
  const auto& b = *basis_;
  double z = 0.0;
  for (int j = J_; j >= 0; --j) z += std::exp(-b.lambda(j) * t);
  return z;
}

double HeatKernel::long_time_constant() const {
  const auto& b = *basis_;
  if (J_ == 0) return 0.0;
  const double l1 = b.lambda(1);
  double c = 0.0;
  for (Eigen::Index x = 0; x < b.dim(); ++x) {
    double sum = 0.0;
    for (int j = 1; j <= J_; ++j) sum += std::exp(-(b.lambda(j) - l1)) * b.modes()(x, j) * b.modes()(x, j);
    c = std::max(c, sum);
  }
  return c;
}

HeatDiagonalFit fit_heat_diagonal(const HeatKernel& h, double t_lo, double t_hi, int samples) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || samples < 2) throw ParameterError("heat fit needs 0 < t_lo < t_hi, samples >= 2");
  HeatDiagonalFit out;
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  out.samples = samples;
  out.lower_constant = std::numeric_limits<double>::infinity();

  std::vector<double> x, y;
  const double step = std::log(t_hi / t_lo) / (samples - 1);
  for (int k = 0; k < samples; ++k) {
    const double t = t_lo * std::exp(step * k);
    x.push_back(std::log(t));
    y.push_back(std::log(h.trace(t)));
    const Vector diag = h.diagonal(t);
    const double scale = std::pow(t, kSpectralExponent);
    out.lower_constant = std::min(out.lower_constant, diag.minCoeff() * scale);
    out.upper_constant = std::max(out.upper_constant, diag.maxCoeff() * scale);
  }
  const LineFit fit = fit_line(x, y);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r2 = fit.r2;
  return out;
}

// ---------------------------------------------------------------- Riesz kernel

RieszKernel::RieszKernel(const SpectralBasis& basis, double s, int J) : basis_(&basis), s_(s), J_(J) {
  if (!(s >= 0.0)) throw ParameterError("Riesz order must be nonnegative");
  basis.check_truncation(J);
  weights_.resize(J);
  for (int j = 1; j <= J; ++j) weights_[j - 1] = std::pow(basis.lambda(j), -s);
}

double RieszKernel::operator()(VertexId x, VertexId y) const {
  const auto modes = basis_->usable_modes(J_);
  double sum = 0.0;
  for (int j = 0; j < J_; ++j) sum += weights_[j] * modes(x, j) * modes(y, j);
  return sum;
}

Matrix RieszKernel::dense() const {
  const auto modes = basis_->usable_modes(J_);
  return weighted_outer(modes, weights_);
}

double RieszKernel::row_integral(VertexId x) const {
  const auto modes = basis_->usable_modes(J_);
  const Vector mode_means = modes.transpose() * basis_->mass();
  return (modes.row(x).transpose().cwiseProduct(weights_)).dot(mode_means);
}

double RieszKernel::increment_energy(VertexId x, VertexId y) const {
  const auto modes = basis_->usable_modes(J_);
  double sum = 0.0;
  for (int j = 0; j < J_; ++j) {
    const double d = modes(x, j) - modes(y, j);
    sum += weights_[j] * weights_[j] * d * d;
  }
  return sum;
}

Vector apply_riesz(const RieszKernel& k, const Eigen::Ref<const Vector>& f, bool zero_mean) {
  const auto& b = k.basis();
  Vector g;
  if (zero_mean) {
    const double mean = b.mass().dot(f);
    if (std::abs(mean) > 1e-8 * std::max(1.0, f.cwiseAbs().maxCoeff()))
      throw ParameterError("apply_riesz: input asserted mean-zero but integrates to " + std::to_string(mean));
    g = f;
  } else {
    g = b.remove_mean(f);
  }
  Vector c = b.coefficients(g, k.truncation());
  for (int j = 1; j <= k.truncation(); ++j) c[j - 1] *= std::pow(b.lambda(j), -k.order());
  return b.synthesize(c);
}

Vector apply_fractional_laplacian(const SpectralBasis& b, double s, const Eigen::Ref<const Vector>& f, int J) {
  if (J < 0) J = b.count();
  Vector c = b.coefficients(b.remove_mean(f), J);
  for (int j = 1; j <= J; ++j) c[j - 1] *= std::pow(b.lambda(j), s);
  return b.synthesize(c);
}

double riesz_by_time_integral(const SpectralBasis& b, double s, VertexId x, VertexId y, int J) {
  if (!(s > 0.0)) throw ParameterError("time-integral Riesz kernel needs s > 0");
  b.check_truncation(J);
  if (J == 0) return 0.0;

  std::vector<double> lam(J), coef(J);
  for (int j = 1; j <= J; ++j) {
    lam[j - 1] = b.lambda(j);
    coef[j - 1] = b.modes()(x, j) * b.modes()(y, j);
  }
  const auto deviation = [&](double t) {
    double sum = 0.0;
    for (int j = 0; j < J; ++j) sum += std::exp(-lam[j] * t) * coef[j];
    return sum;
  };

  // With v = t^s, t^{s-1} dt = dv / s and the integrand is bounded at 0.
  const double horizon = 20.0 / lam.front();
  const double t_floor = 1e-3 / lam.back();
  std::vector<double> breaks{0.0};
  for (double t = t_floor; t < horizon; t *= 2.0) breaks.push_back(t);
  breaks.push_back(horizon);

  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [&](double v) { return deviation(std::pow(v, 1.0 / s)) / s; };
  double head = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = std::pow(breaks[k], s), c = std::pow(breaks[k + 1], s);
    head += gauss_kronrod<double, 61>::integrate(integrand, a, c, 3, 1e-12);
  }

  double tail = 0.0;
  for (int j = 0; j < J; ++j) tail += std::pow(lam[j], -s) * boost::math::gamma_q(s, lam[j] * horizon) * coef[j];
  return head / std::tgamma(s) + tail;
}

// ---------------------------------------------------------------- pair sampling

std::vector<VertexPair> sample_pairs(const LevelGraph& g, const PairSampling& opts) {
  if (!(opts.d_min > 0.0 && opts.d_max >= opts.d_min)) throw ParameterError("pair window must satisfy 0 < d_min <= d_max");
  const auto n = static_cast<VertexId>(g.dim());
  const auto in_window = [&](VertexId a, VertexId b) {
    const double d = euclidean_distance(g.vertex(a), g.vertex(b));
    return d >= opts.d_min * (1.0 - 1e-12) && d <= opts.d_max * (1.0 + 1e-12);
  };

  std::vector<VertexPair> out;
  if (g.depth() <= opts.exhaustive_level) {
    for (VertexId a = 0; a < n; ++a)
      for (VertexId b = a + 1; b < n; ++b)
        if (in_window(a, b)) out.emplace_back(a, b);
    return out;
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  std::set<VertexPair> chosen;
  const std::size_t max_attempts = 200 * opts.max_pairs + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts && chosen.size() < opts.max_pairs; ++attempt) {
    VertexId a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (in_window(a, b)) chosen.emplace(a, b);
  }
  out.assign(chosen.begin(), chosen.end());
  return out;
}

// ---------------------------------------------------------------- estimates

KernelRegime regime_for_order(double s) {
  if (std::abs(s - kSpectralExponent) <= 1e-4) return KernelRegime::Logarithmic;
  return s < kSpectralExponent ? KernelRegime::Power : KernelRegime::Bounded;
}

std::string to_string(KernelRegime r) {
  switch (r) {
    case KernelRegime::Power: return "power";
    case KernelRegime::Logarithmic: return "logarithmic";
    case KernelRegime::Bounded: return "bounded";
  }
  return "unknown";
}

namespace {

double safe_tail(const SpectralBasis& b, double s, int J) {
  if (!(s > kSpectralExponent / 2.0)) return std::numeric_limits<double>::infinity();
  return tail_variance(b, s, J);
}

}  // namespace

KernelEstimateReport estimate_bound_fit(const LevelGraph& g, const SpectralBasis& b, double s, int J,
                                        const PairSampling& opts) {
  if (g.dim() != static_cast<std::size_t>(b.dim())) throw DimensionError("graph and basis dimensions differ");
  const RieszKernel k(b, s, J);
  const auto pairs = sample_pairs(g, opts);

  KernelEstimateReport rep;
  rep.s = s;
  rep.regime = regime_for_order(s);
  rep.window_lo = opts.d_min;
  rep.window_hi = opts.d_max;
  rep.seed = opts.seed;
  rep.pairs = pairs.size();
  rep.tail_variance = safe_tail(b, s, J);
  rep.bound_exponent = rep.regime == KernelRegime::Power         ? kHausdorffDim - s * kWalkDim
                       : rep.regime == KernelRegime::Logarithmic ? 1.0
                                                                 : 0.0;

  // Half-octave bins; the envelope is the sup of |G| in each bin.
  const double lo2 = std::log2(opts.d_min), hi2 = std::log2(opts.d_max);
  const int nbins = std::max(1, static_cast<int>(std::ceil((hi2 - lo2) * 2.0 - 1e-9)));
  std::vector<double> envelope(nbins, 0.0);
  std::vector<int> filled(nbins, 0);
  for (auto [x, y] : pairs) {
    const double d = euclidean_distance(g.vertex(x), g.vertex(y));
    const double v = std::abs(k(x, y));
    const int bin = std::clamp(static_cast<int>(std::floor((std::log2(d) - lo2) * 2.0 + 1e-9)), 0, nbins - 1);
    envelope[bin] = std::max(envelope[bin], v);
    ++filled[bin];
    switch (rep.regime) {
      case KernelRegime::Power: rep.constant = std::max(rep.constant, v * std::pow(d, rep.bound_exponent)); break;
      case KernelRegime::Logarithmic: rep.constant = std::max(rep.constant, v / std::abs(std::log(d))); break;
      case KernelRegime::Bounded: rep.constant = std::max(rep.constant, v); break;
    }
  }
  if (rep.regime == KernelRegime::Bounded)
    for (VertexId x = 0; x < static_cast<VertexId>(g.dim()); ++x) rep.constant = std::max(rep.constant, std::abs(k(x, x)));

  std::vector<double> xs, ys;
  for (int i = 0; i < nbins; ++i) {
    if (filled[i] == 0 || envelope[i] <= 0.0) continue;
    const double center = std::exp2(lo2 + (i + 0.5) / 2.0);
    xs.push_back(rep.regime == KernelRegime::Logarithmic ? std::log(std::abs(std::log(center))) : std::log(center));
    ys.push_back(std::log(envelope[i]));
  }
  if (xs.size() < 2) throw ParameterError("kernel estimate fit window is empty");
  const LineFit fit = fit_line(xs, ys);
  rep.fitted_exponent = rep.regime == KernelRegime::Logarithmic ? fit.slope : -fit.slope;
  rep.residual = fit.residual;
  rep.within_bound = rep.fitted_exponent <= rep.bound_exponent + 0.1;
  return rep;
}

IncrementReport increment_l2_check(const LevelGraph& g, const SpectralBasis& b, double s, int J,
                                   const PairSampling& opts) {
  require_admissible_order(s);
  if (g.dim() != static_cast<std::size_t>(b.dim())) throw DimensionError("graph and basis dimensions differ");
  const RieszKernel k(b, s, J);
  const auto pairs = sample_pairs(g, opts);

  IncrementReport rep;
  rep.s = s;
  rep.expected_slope = 2.0 * s * kWalkDim - kHausdorffDim;
  rep.threshold = rep.expected_slope - 0.2;
  rep.window_lo = opts.d_min;
  rep.window_hi = opts.d_max;
  rep.seed = opts.seed;
  rep.pairs = pairs.size();
  rep.tail_variance = tail_variance(b, s, J);

  std::vector<double> xs, ys;
  xs.reserve(pairs.size());
  ys.reserve(pairs.size());
  for (auto [x, y] : pairs) {
    const double e = k.increment_energy(x, y);
    if (e <= 0.0) continue;
    xs.push_back(std::log(euclidean_distance(g.vertex(x), g.vertex(y))));
    ys.push_back(std::log(e));
  }
  if (xs.size() < 2) throw ParameterError("increment fit window is empty");
  const LineFit fit = fit_line(xs, ys);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r2 = fit.r2;
  rep.pass = rep.slope >= rep.threshold;
  return rep;
}

}  // namespace gasket
