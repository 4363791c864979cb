#include "mimoq/matrix_io.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mimoq {

namespace {

constexpr char kMagic[5] = {'M', 'I', 'M', 'Q', '1'};

void write_header(std::ofstream& f, char role, std::uint64_t rows,
                  std::uint64_t cols, double k,
                  std::optional<std::uint64_t> hash) {
  f.write(kMagic, 5);
  f.write(&role, 1);
  f.write(reinterpret_cast<const char*>(&rows), 8);
  f.write(reinterpret_cast<const char*>(&cols), 8);
  f.write(reinterpret_cast<const char*>(&k), 8);
  if (hash) f.write(reinterpret_cast<const char*>(&*hash), 8);
}

void atomic_finish(const std::string& tmp, const std::string& path) {
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_matrix(const std::string& path, char role, double k,
                  const Eigen::MatrixXd& m) {
  if (std::islower(static_cast<unsigned char>(role)))
    throw std::invalid_argument("real matrices use uppercase role tags");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    write_header(f, role, m.rows(), m.cols(), k, std::nullopt);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = m(i, j);
        f.write(reinterpret_cast<const char*>(&v), 8);
      }
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  atomic_finish(tmp, path);
}

void write_matrix(const std::string& path, char role, double k,
                  const Eigen::MatrixXcd& m, std::uint64_t mask_hash) {
  if (!std::islower(static_cast<unsigned char>(role)))
    throw std::invalid_argument("complex matrices use lowercase role tags");
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    write_header(f, role, m.rows(), m.cols(), k, mask_hash);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double re = m(i, j).real(), im = m(i, j).imag();
        f.write(reinterpret_cast<const char*>(&re), 8);
        f.write(reinterpret_cast<const char*>(&im), 8);
      }
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  atomic_finish(tmp, path);
}

MatrixRecord read_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[5];
  f.read(magic, 5);
  if (!f || std::string(magic, 5) != std::string(kMagic, 5))
    throw std::runtime_error("bad magic in " + path);
  MatrixRecord rec;
  f.read(&rec.role, 1);
  std::uint64_t rows = 0, cols = 0;
  f.read(reinterpret_cast<char*>(&rows), 8);
  f.read(reinterpret_cast<char*>(&cols), 8);
  f.read(reinterpret_cast<char*>(&rec.k), 8);
  if (rec.is_complex()) {
    std::uint64_t h = 0;
    f.read(reinterpret_cast<char*>(&h), 8);
    rec.mask_hash = h;
    rec.cplx.resize(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
      for (std::uint64_t j = 0; j < cols; ++j) {
        double re, im;
        f.read(reinterpret_cast<char*>(&re), 8);
        f.read(reinterpret_cast<char*>(&im), 8);
        rec.cplx(i, j) = {re, im};
      }
  } else {
    rec.real.resize(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
      for (std::uint64_t j = 0; j < cols; ++j) {
        double v;
        f.read(reinterpret_cast<char*>(&v), 8);
        rec.real(i, j) = v;
      }
  }
  if (!f) throw std::runtime_error("truncated matrix file: " + path);
  return rec;
}

}  // namespace mimoq
