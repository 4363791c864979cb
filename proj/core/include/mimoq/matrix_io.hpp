#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

namespace mimoq {

/// Binary matrix cache. Layout (little-endian):
///   magic "MIMQ1" (5 bytes)
///   role tag (1 byte): R/X/W/S for full-wave (real) matrices,
///                      r/x/w/s for reduced (complex) matrices
///   rows, cols (uint64)
///   k (float64)
///   mask hash (uint64, lowercase roles only)
///   row-major float64 payload; complex entries interleaved (re, im)
struct MatrixRecord {
  char role = 'R';
  double k = 0.0;
  std::optional<std::uint64_t> mask_hash;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd cplx;

  bool is_complex() const { return std::islower(static_cast<unsigned char>(role)); }
};

/// Writes atomically (temp file + rename).
void write_matrix(const std::string& path, char role, double k,
                  const Eigen::MatrixXd& m);
void write_matrix(const std::string& path, char role, double k,
                  const Eigen::MatrixXcd& m, std::uint64_t mask_hash);

MatrixRecord read_matrix(const std::string& path);

}  // namespace mimoq
