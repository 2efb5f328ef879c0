#pragma once

#include "permlin/decoder.hpp"
#include "permlin/estimators.hpp"
#include "permlin/linalg.hpp"
#include "permlin/regime.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace permlin::io {

using json = nlohmann::ordered_json;

// Matrices: JSON {"n": int, "entries": [[...], ...]} or CSV with n rows of n values.
// Extra JSON keys are ignored. Both readers reject non-square and asymmetric data.
SymMatrix parse_matrix_json(const json& doc);
SymMatrix parse_matrix_csv(std::string_view text);
SymMatrix parse_matrix(std::string_view text);  // sniffs '{' for JSON
SymMatrix read_matrix_file(const std::filesystem::path& path);

json matrix_to_json(const SymMatrix& m);
std::string matrix_to_csv(const SymMatrix& m);

// Params: {"n": int, "gamma": real, "a": real, "v": real, "q": "helmert" | [[...], ...]}
// with q given row-major (q[i][j] is entry i of basis column j).
LinearRegimeParams parse_params_json(const json& doc);
LinearRegimeParams read_params_file(const std::filesystem::path& path);
json params_to_json(const LinearRegimeParams& p);

/// JSON array "[3,1,2]" or a CSV row "3,1,2".
Vector parse_vector(std::string_view text);

json estimate_to_json(const Estimate& e);
json regime_to_json(const RegimeCheckResult& r);
json spectrum_to_json(const Spectrum& s);
json posterior_to_json(const PosteriorTable& t);

/// Columns y1..yn,label with the label quoted ("2,3,1").
void write_region_csv(std::ostream& os, const RegionSample& s);
/// Columns set,x1,x2,x3 with set in {surface, projection}.
void write_ellipsoid_csv(std::ostream& os, const EllipsoidData& d);

std::string read_text_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

} // namespace permlin::io
