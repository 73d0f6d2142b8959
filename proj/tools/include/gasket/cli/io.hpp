#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "gasket/dirichlet.hpp"
#include "gasket/field.hpp"
#include "gasket/geometry.hpp"
#include "gasket/kernels.hpp"
#include "gasket/spectral.hpp"

namespace gasket::cli {

using json = nlohmann::ordered_json;

/// Decimal text with 17 significant digits.
[[nodiscard]] std::string format_real(double v);

/// {level, vertices:[{id,x,y,boundary,measure}], edges:[[i,j]], cells:[{word,ids}]}.
[[nodiscard]] json graph_json(const LevelGraph& g);

/// First line: JSON header {level, dim, prefactor, nnz}; then one
/// "row col value" line per stored entry in column-major order.
void write_matrix_coo(std::ostream& os, const StiffnessMatrix& s, const json& config = {});

/// {level, count, residual, gram_residual, mean_residual, solver, lambdas:[...]}.
[[nodiscard]] json eigen_json(const SpectralBasis& b);
/// Header "vertex_id,mode_0,...,mode_J"; one row per vertex.
void write_eigenvector_csv(std::ostream& os, const SpectralBasis& b);

/// Upper triangle (i <= j) of a symmetric kernel as "i,j,value" rows.
void write_kernel_csv(std::ostream& os, const Matrix& k, const json& header);

/// "# field: {...}" and "# config: {...}" comment lines, then
/// "vertex_id,x,y,value" rows.
void write_field_csv(std::ostream& os, const LevelGraph& g, const FieldSample& x, const json& config);

/// Binary PGM raster (size x size) with nearest-vertex shading; the value
/// range maps linearly onto 0..255. A non-empty comment is written as a
/// header comment line.
void write_field_pgm(std::ostream& os, const LevelGraph& g, const Vector& values, int size = 512,
                     const std::string& comment = {});

[[nodiscard]] json to_json(const KernelEstimateReport& r);
[[nodiscard]] json to_json(const IncrementReport& r);
[[nodiscard]] json to_json(const WeylFit& f);
[[nodiscard]] json to_json(const HeatDiagonalFit& f);
[[nodiscard]] json to_json(const CovarianceReport& r);
[[nodiscard]] json to_json(const VariogramReport& r);
[[nodiscard]] json to_json(const HoelderReport& r);
[[nodiscard]] json to_json(const InvarianceReport& r);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gasket::cli
