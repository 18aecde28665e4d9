#ifndef COVPROJ_MATRIX_IO_HPP
#define COVPROJ_MATRIX_IO_HPP

#include <filesystem>

#include <json.hpp>

#include "covproj/hermitian.hpp"

namespace covproj {

// Wire format: {"n": <int>, "re": [n*n reals, row-major], "im": [n*n reals]}.
// Ingest validates Hermitian symmetry (tolerance tol::kIngestSymmetry,
// relative to the matrix scale) and then symmetrizes.
HermitianMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const HermitianMatrix& m);

HermitianMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const HermitianMatrix& m, const std::filesystem::path& path);

}  // namespace covproj

#endif
