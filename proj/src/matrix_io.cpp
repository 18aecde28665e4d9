#include "covproj/matrix_io.hpp"

#include <fstream>
#include <stdexcept>

#include "covproj/tolerances.hpp"

namespace covproj {

HermitianMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re") || !j.contains("im")) {
    throw std::invalid_argument("matrix_from_json: expected object with fields n, re, im");
  }
  const auto n = j.at("n").get<Eigen::Index>();
  if (n < 1) {
    throw std::invalid_argument("matrix_from_json: n must be >= 1, got " + std::to_string(n));
  }
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  const std::size_t expect = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (re.size() != expect || im.size() != expect) {
    throw std::invalid_argument("matrix_from_json: re/im must each hold n*n = " +
                                std::to_string(expect) + " values, got " +
                                std::to_string(re.size()) + "/" + std::to_string(im.size()));
  }
  CMatrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * n + c;
      a(r, c) = {re[k], im[k]};
    }
  }
  return HermitianMatrix::from_full(a, tol::kIngestSymmetry);
}

nlohmann::json matrix_to_json(const HermitianMatrix& m) {
  const Eigen::Index n = m.dim();
  std::vector<double> re, im;
  re.reserve(n * n);
  im.reserve(n * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return {{"n", n}, {"re", re}, {"im", im}};
}

HermitianMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("read_matrix_file: cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("read_matrix_file: " + path.string() + ": " + e.what());
  }
  return matrix_from_json(j);
}

void write_matrix_file(const HermitianMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("write_matrix_file: cannot open " + path.string());
  }
  out << matrix_to_json(m).dump(2) << "\n";
}

}  // namespace covproj
