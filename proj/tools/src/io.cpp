#include "gasket/cli/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gasket/errors.hpp"

namespace gasket::cli {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Non-finite values become null; finite ones are dumped in shortest
// round-trip form.
json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json real_array(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

}  // namespace

json graph_json(const LevelGraph& g) {
  json out;
  out["level"] = g.level();
  if (!g.root().empty()) out["root"] = g.root().to_string();
  json verts = json::array();
  for (const auto& v : g.vertices()) {
    const Point2 p = g.point(v.id);
    verts.push_back({{"id", v.id},
                     {"x", real(p.x)},
                     {"y", real(p.y)},
                     {"boundary", v.is_boundary},
                     {"measure", real(g.measure()[static_cast<std::size_t>(v.id)])}});
  }
  out["vertices"] = std::move(verts);
  json edges = json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  out["edges"] = std::move(edges);
  json cells = json::array();
  for (const auto& c : g.cells()) cells.push_back({{"word", c.word.to_string()}, {"ids", c.ids}});
  out["cells"] = std::move(cells);
  return out;
}

void write_matrix_coo(std::ostream& os, const StiffnessMatrix& s, const json& config) {
  json header{{"level", s.level}, {"dim", s.dim()}, {"prefactor", real(s.prefactor)}, {"nnz", s.entries.nonZeros()}};
  if (!config.empty()) header["config"] = config;
  os << header.dump() << '\n';
  for (Eigen::Index col = 0; col < s.entries.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.entries, col); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << format_real(it.value()) << '\n';
}

json eigen_json(const SpectralBasis& b) {
  const auto& d = b.diagnostics();
  json out;
  out["level"] = b.level();
  out["count"] = b.count();
  out["residual"] = real(d.residual_norm);
  out["gram_residual"] = real(d.gram_residual);
  out["mean_residual"] = real(d.mean_residual);
  out["solver"] = d.solver;
  const auto& l = b.lambdas();
  out["lambdas"] = real_array(std::span<const double>(l.data() + 1, static_cast<std::size_t>(b.count())));
  return out;
}

void write_eigenvector_csv(std::ostream& os, const SpectralBasis& b) {
  os << "vertex_id";
  for (int j = 0; j <= b.count(); ++j) os << ",mode_" << j;
  os << '\n';
  for (Eigen::Index x = 0; x < b.dim(); ++x) {
    os << x;
    for (int j = 0; j <= b.count(); ++j) os << ',' << format_real(b.modes()(x, j));
    os << '\n';
  }
}

void write_kernel_csv(std::ostream& os, const Matrix& k, const json& header) {
  os << "# kernel: " << header.dump() << '\n';
  os << "i,j,value\n";
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = i; j < k.cols(); ++j) os << i << ',' << j << ',' << format_real(k(i, j)) << '\n';
}

void write_field_csv(std::ostream& os, const LevelGraph& g, const FieldSample& x, const json& config) {
  json field{{"level", x.level},     {"s", real(x.s)},       {"H", real(x.hurst)},
             {"J", x.modes},         {"seed", x.seed},       {"generator", kGaussianGenerator}};
  os << "# field: " << field.dump() << '\n';
  os << "# config: " << config.dump() << '\n';
  os << "vertex_id,x,y,value\n";
  for (const auto& v : g.vertices()) {
    const Point2 p = g.point(v.id);
    os << v.id << ',' << format_real(p.x) << ',' << format_real(p.y) << ',' << format_real(x.values[v.id]) << '\n';
  }
}

void write_field_pgm(std::ostream& os, const LevelGraph& g, const Vector& values, int size,
                     const std::string& comment) {
  if (size < 2) throw ParameterError("raster size must be at least 2");
  if (static_cast<std::size_t>(values.size()) != g.dim()) throw DimensionError("field does not match graph");
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  // Bucket vertices on a coarse grid so nearest-vertex lookups stay local.
  const int grid = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(g.dim()))));
  std::vector<std::vector<VertexId>> buckets(static_cast<std::size_t>(grid * grid));
  const double height = std::sqrt(3.0) / 2.0;
  const auto cell_of = [&](double x, double y) {
    const int cx = std::clamp(static_cast<int>(x * grid), 0, grid - 1);
    const int cy = std::clamp(static_cast<int>(y / height * grid), 0, grid - 1);
    return std::pair{cx, cy};
  };
  for (const auto& v : g.vertices()) {
    const Point2 p = g.point(v.id);
    auto [cx, cy] = cell_of(p.x, p.y);
    buckets[static_cast<std::size_t>(cy * grid + cx)].push_back(v.id);
  }

  os << "P5\n";
  if (!comment.empty()) os << "# " << comment << '\n';
  os << size << ' ' << size << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(size));
  for (int r = 0; r < size; ++r) {
    const double y = height * (1.0 - (r + 0.5) / size);
    for (int c = 0; c < size; ++c) {
      const double x = (c + 0.5) / size;
      auto [cx, cy] = cell_of(x, y);
      double best = std::numeric_limits<double>::infinity();
      VertexId arg = 0;
      for (int radius = 0; radius < grid && !std::isfinite(best); ++radius) {
        for (int dy = -radius; dy <= radius; ++dy)
          for (int dx = -radius; dx <= radius; ++dx) {
            const int bx = cx + dx, by = cy + dy;
            if (bx < 0 || by < 0 || bx >= grid || by >= grid) continue;
            for (VertexId id : buckets[static_cast<std::size_t>(by * grid + bx)]) {
              const Point2 p = g.point(id);
              const double d = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
              if (d < best) {
                best = d;
                arg = id;
              }
            }
          }
      }
      row[static_cast<std::size_t>(c)] = static_cast<unsigned char>(std::lround(255.0 * (values[arg] - lo) / span));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

json to_json(const KernelEstimateReport& r) {
  return {{"s", real(r.s)},
          {"regime", to_string(r.regime)},
          {"slope", real(r.fitted_exponent)},
          {"bound_exponent", real(r.bound_exponent)},
          {"constant", real(r.constant)},
          {"window", {real(r.window_lo), real(r.window_hi)}},
          {"residual", real(r.residual)},
          {"tail_variance", real(r.tail_variance)},
          {"seed", r.seed},
          {"pairs", r.pairs},
          {"within_bound", r.within_bound}};
}

json to_json(const IncrementReport& r) {
  return {{"s", real(r.s)},
          {"slope", real(r.slope)},
          {"expected_slope", real(r.expected_slope)},
          {"threshold", real(r.threshold)},
          {"r2", real(r.r2)},
          {"window", {real(r.window_lo), real(r.window_hi)}},
          {"residual", real(1.0 - r.r2)},
          {"tail_variance", real(r.tail_variance)},
          {"seed", r.seed},
          {"pairs", r.pairs},
          {"pass", r.pass}};
}

json to_json(const WeylFit& f) {
  return {{"slope", real(f.slope)},
          {"intercept", real(f.intercept)},
          {"r2", real(f.r2)},
          {"window", {f.window_lo, f.window_hi}},
          {"lambda_window", {real(f.lambda_lo), real(f.lambda_hi)}},
          {"points", f.points}};
}

json to_json(const HeatDiagonalFit& f) {
  return {{"slope", real(f.slope)},
          {"intercept", real(f.intercept)},
          {"r2", real(f.r2)},
          {"lower_constant", real(f.lower_constant)},
          {"upper_constant", real(f.upper_constant)},
          {"window", {real(f.t_lo), real(f.t_hi)}},
          {"samples", f.samples}};
}

json to_json(const CovarianceReport& r) {
  return {{"s", real(r.s)},
          {"J", r.modes},
          {"replications", r.replications},
          {"pairs", r.pairs.size()},
          {"max_abs_z", real(r.max_abs_z)},
          {"mean_abs_z", real(r.mean_abs_z)},
          {"pass", r.pass}};
}

json to_json(const VariogramReport& r) {
  json bins = json::array();
  for (const auto& b : r.bins)
    bins.push_back({{"lo", real(b.lo)},
                    {"hi", real(b.hi)},
                    {"log_center", real(b.log_center)},
                    {"count", b.count},
                    {"mean_square_increment", real(b.mean_square_increment)},
                    {"half_width", real(b.half_width)},
                    {"used", b.used}});
  return {{"s", real(r.s)},
          {"H", real(r.hurst_target)},
          {"mode", r.mode == VariogramMode::Exact ? "exact" : "monte-carlo"},
          {"slope", real(r.slope)},
          {"target_slope", real(2.0 * r.hurst_target)},
          {"r2", real(r.r2)},
          {"replications", r.replications},
          {"confidence_half_width", real(r.confidence_half_width)},
          {"bins", std::move(bins)},
          {"warnings", r.warnings}};
}

json to_json(const HoelderReport& r) {
  return {{"H", real(r.hurst)},
          {"deltas", real_array(r.deltas)},
          {"statistics", real_array(r.statistics)},
          {"ratio", real(r.ratio)},
          {"cap", real(r.cap)},
          {"bounded_trend", r.bounded_trend}};
}

json to_json(const InvarianceReport& r) {
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = real(v);
  return {{"name", r.name},
          {"max_deviation", real(r.max_deviation)},
          {"tolerance", real(r.tolerance)},
          {"metrics", std::move(metrics)},
          {"pass", r.pass}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace gasket::cli
