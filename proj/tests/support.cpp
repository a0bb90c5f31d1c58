#include "support.hpp"

#include <fstream>
#include <stdexcept>

namespace hybent::test {

const nlohmann::json& golden() {
  static const nlohmann::json j = [] {
    std::ifstream f(HYBENT_ORACLE_PATH);
    if (!f) throw std::runtime_error("cannot open " HYBENT_ORACLE_PATH);
    return nlohmann::json::parse(f);
  }();
  return j;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hybent_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hybent::test
