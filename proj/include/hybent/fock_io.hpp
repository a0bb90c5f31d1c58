// JSON dump format shared by states, operators and density matrices:
//   {"dims": [d1, d2, ...], "re": [...], "im": [...]}
// Vectors have prod(dims) entries; matrices prod(dims)^2 entries, row-major.
#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hybent/fock.hpp"

namespace hybent {

nlohmann::json to_json(const Ket& psi);
nlohmann::json to_json(const ModeShape& shape, const CMatrix& matrix);
nlohmann::json to_json(const DensityOp& rho);

Ket ket_from_json(const nlohmann::json& j);
LinOp matrix_from_json(const nlohmann::json& j);
DensityOp density_from_json(const nlohmann::json& j);
/// Accepts either a ket or a matrix dump and returns the density operator.
DensityOp density_from_any_json(const nlohmann::json& j);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace hybent
