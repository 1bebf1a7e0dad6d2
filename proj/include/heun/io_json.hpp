#pragma once

#include <string>

#include "json.hpp"

#include "heun/connection.hpp"
#include "heun/errors.hpp"
#include "heun/series.hpp"

namespace heun::io {

using json = nlohmann::ordered_json;
using cplx = std::complex<double>;

// Complex numbers serialize as [re, im]. All other numbers are plain JSON
// doubles, emitted in the shortest round-trip representation.
json to_json(cplx v);
cplx complex_from_json(const json& j, const std::string& what);

// {"z": [[re,im] x4], "chi": [[re,im] x4], "lambda": [re,im]}
json to_json(const series::SymmetricHeunConfig& cfg);
series::SymmetricHeunConfig config_from_json(const json& j);

// Full reconstruction data for one local solution: center, exponent,
// coefficients, conv_radius, branch_cut_direction, the originating config,
// kind ("taylor"/"frobenius"), sing_index, branch, init_value, init_slope.
json to_json(const series::LocalSolution& sol);
series::LocalSolution solution_from_json(const json& j);

// {"a":..,"q":..,"alpha":..,"beta":..,"gamma":..,"delta":..,"epsilon":..}
json to_json(const series::StandardHeunParams& p);
series::StandardHeunParams standard_params_from_json(const json& j);

// entries row-major as four [re, im] pairs, endpoint centers, the
// convention fingerprint, and the recorded dual-path residual.
json to_json(const connection::ConnectionMatrix& m);
connection::ConnectionMatrix matrix_from_json(const json& j);

// Errors: ParseError on unreadable files or malformed JSON.
json load_json_file(const std::string& path);
series::SymmetricHeunConfig load_config(const std::string& path);

// Two-space indented dump with a trailing newline; deterministic.
std::string dump(const json& j);

// Errors: ParseError when the path cannot be opened for writing.
void write_json_file(const std::string& path, const json& j);

}  // namespace heun::io
