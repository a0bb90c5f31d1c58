#include "hybent/fock_io.hpp"

#include <fstream>

#include <fmt/format.h>

namespace hybent {

namespace {

ModeShape shape_from_json(const nlohmann::json& j) {
  if (!j.contains("dims") || !j.contains("re") || !j.contains("im")) {
    throw InvalidInput("state dump needs dims, re and im");
  }
  return ModeShape(j.at("dims").get<std::vector<int>>());
}

std::vector<cplx> values_from_json(const nlohmann::json& j) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw InvalidInput("state dump: re/im length mismatch");
  std::vector<cplx> v(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) v[i] = {re[i], im[i]};
  return v;
}

}  // namespace

nlohmann::json to_json(const Ket& psi) {
  std::vector<double> re(static_cast<std::size_t>(psi.amps.size()));
  std::vector<double> im(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = psi[i].real();
    im[i] = psi[i].imag();
  }
  return {{"dims", psi.shape.dims()}, {"re", re}, {"im", im}};
}

nlohmann::json to_json(const ModeShape& shape, const CMatrix& matrix) {
  std::vector<double> re;
  std::vector<double> im;
  re.reserve(static_cast<std::size_t>(matrix.size()));
  im.reserve(static_cast<std::size_t>(matrix.size()));
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      re.push_back(matrix(r, c).real());
      im.push_back(matrix(r, c).imag());
    }
  }
  return {{"dims", shape.dims()}, {"re", re}, {"im", im}};
}

nlohmann::json to_json(const DensityOp& rho) { return to_json(rho.shape(), rho.matrix()); }

Ket ket_from_json(const nlohmann::json& j) {
  ModeShape shape = shape_from_json(j);
  const auto v = values_from_json(j);
  if (v.size() != shape.total()) throw InvalidInput("state dump is not a ket for its dims");
  CVector amps(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) amps(static_cast<Eigen::Index>(i)) = v[i];
  const bool norm = std::abs(amps.squaredNorm() - 1.0) <= 1e-10;
  return Ket(std::move(shape), std::move(amps), norm);
}

LinOp matrix_from_json(const nlohmann::json& j) {
  ModeShape shape = shape_from_json(j);
  const auto v = values_from_json(j);
  const auto n = static_cast<Eigen::Index>(shape.total());
  if (v.size() != shape.total() * shape.total()) throw InvalidInput("state dump is not a matrix for its dims");
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = v[static_cast<std::size_t>(r * n + c)];
  }
  return LinOp(std::move(shape), std::move(m));
}

DensityOp density_from_json(const nlohmann::json& j) {
  LinOp m = matrix_from_json(j);
  return DensityOp(std::move(m.shape), std::move(m.matrix));
}

DensityOp density_from_any_json(const nlohmann::json& j) {
  const ModeShape shape = shape_from_json(j);
  if (j.at("re").size() == shape.total()) return DensityOp::pure(ket_from_json(j));
  return density_from_json(j);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace hybent
