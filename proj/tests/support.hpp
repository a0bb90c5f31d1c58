// Shared helpers: the frozen reference values and scratch directories.
#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace hybent::test {

/// tests/oracle/golden.json, produced by tools/make_oracle.py.
const nlohmann::json& golden();

/// Fresh empty directory under the system temp dir, unique per name.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace hybent::test
