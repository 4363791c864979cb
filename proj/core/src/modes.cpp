#include "mimoq/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mimoq {

ModeSpectrum gevp_whitened(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                           double rank_tol) {
  if (A.rows() != B.rows() || A.rows() != A.cols() || B.rows() != B.cols())
    throw std::invalid_argument("gevp_whitened: shape mismatch");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(B);
  if (eb.info() != Eigen::Success)
    throw std::runtime_error("gevp_whitened: B eigendecomposition failed");
  const Eigen::VectorXd lam = eb.eigenvalues();
  const double lmax = lam.size() ? lam.maxCoeff() : 0.0;
  if (!(lmax > 0.0))
    throw std::runtime_error("gevp_whitened: B has no positive spectrum");
  const double cut = rank_tol * lmax;

  std::vector<int> keep;
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) > cut) keep.push_back(i);
  const int r = static_cast<int>(keep.size());

  Eigen::MatrixXcd W(B.rows(), r);  // whitener: W^H B W = I
  for (int j = 0; j < r; ++j)
    W.col(j) = eb.eigenvectors().col(keep[j]) / std::sqrt(lam(keep[j]));

  Eigen::MatrixXcd Ar = W.adjoint() * A * W;
  Ar = 0.5 * (Ar + Ar.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(Ar);
  if (ea.info() != Eigen::Success)
    throw std::runtime_error("gevp_whitened: projected eigendecomposition failed");

  ModeSpectrum out;
  out.rank = r;
  out.eigenvalues = ea.eigenvalues();
  out.eigenvectors = W * ea.eigenvectors();
  return out;
}

ModeSpectrum energy_modes_port(const PortSystem& sys, double degeneracy_tol) {
  ModeSpectrum s = gevp_whitened(sys.wx, sys.r);
  s.kind = ModeKind::energy;

  // Mirror gauge for two-port degenerate pairs: any rotation of the pair is
  // an eigenvector, so pin the representatives to the even/odd excitations.
  if (sys.port_count() == 2 && s.count() == 2) {
    const double w1 = s.eigenvalues(0), w2 = s.eigenvalues(1);
    if (std::abs(w2 - w1) <= degeneracy_tol * std::max(std::abs(w1), 1.0)) {
      Eigen::MatrixXcd V(2, 2);
      V << 1.0, 1.0, 1.0, -1.0;
      for (int j = 0; j < 2; ++j) {
        const std::complex<double> n2 = (V.col(j).adjoint() * sys.r * V.col(j))(0);
        V.col(j) /= std::sqrt(std::abs(n2.real()));
      }
      Eigen::Vector2d w;
      for (int j = 0; j < 2; ++j)
        w(j) = (V.col(j).adjoint() * sys.wx * V.col(j))(0).real();
      if (w(0) > w(1)) {
        std::swap(w(0), w(1));
        V.col(0).swap(V.col(1));
      }
      s.eigenvalues = w;
      s.eigenvectors = V;
    }
  }
  return s;
}

ModeSpectrum energy_modes_current(const OperatorSet& op) {
  ModeSpectrum s = gevp_whitened(op.Wx.cast<std::complex<double>>(),
                                 op.R.cast<std::complex<double>>());
  s.kind = ModeKind::energy;
  return s;
}

ModeSpectrum energy_modes_current(const ReducedRegionSystem& sys) {
  ModeSpectrum s = gevp_whitened(sys.Wx, sys.R);
  s.kind = ModeKind::energy;
  return s;
}

ModeSpectrum characteristic_modes(const OperatorSet& op) {
  // Physical eigencurrents of X J = lambda R J can carry appreciable content
  // in the numerical near-nullspace of R (the inductive loop mode stores
  // energy there while radiating little); range-restricted whitening distorts
  // those modes, so solve against a Tikhonov-regularized radiation matrix.
  const int n = op.size();
  const double eps = 1e-9 * op.R.norm();
  const Eigen::MatrixXcd R_reg =
      op.R.cast<std::complex<double>>() +
      eps * Eigen::MatrixXcd::Identity(n, n);
  ModeSpectrum s = gevp_whitened(op.X.cast<std::complex<double>>(), R_reg);
  s.kind = ModeKind::characteristic;

  std::vector<int> order(s.count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(s.eigenvalues(a)) < std::abs(s.eigenvalues(b));
  });
  Eigen::VectorXd ev(s.count());
  Eigen::MatrixXcd vv(s.eigenvectors.rows(), s.count());
  for (int j = 0; j < s.count(); ++j) {
    ev(j) = s.eigenvalues(order[j]);
    vv.col(j) = s.eigenvectors.col(order[j]);
  }
  s.eigenvalues = std::move(ev);
  s.eigenvectors = std::move(vv);
  return s;
}

double rayleigh_quotient_energy(const OperatorSet& op, const Eigen::VectorXcd& J) {
  const double num = (J.adjoint() * op.Wx.cast<std::complex<double>>() * J)(0).real();
  const double den = (J.adjoint() * op.R.cast<std::complex<double>>() * J)(0).real();
  return num / den;
}

int effective_mode_count(const Eigen::VectorXd& eigenvalues, double Q,
                         double tie_tol) {
  int n = 0;
  for (int i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) <= Q * (1.0 + tie_tol)) ++n;
  return n;
}

Eigen::MatrixXcd radiation_patterns(const Eigen::MatrixXd& S,
                                    const Eigen::MatrixXcd& V) {
  return S.cast<std::complex<double>>() * V;
}

Eigen::MatrixXcd radiation_patterns(const Eigen::MatrixXcd& S,
                                    const Eigen::MatrixXcd& V) {
  return S * V;
}

}  // namespace mimoq
