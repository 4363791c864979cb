#include "mimoq/reduction.hpp"

#include <stdexcept>

namespace mimoq {

namespace {

void check_solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                 const Eigen::MatrixXcd& X, const char* what) {
  const double resid = (A * X - B).norm() / (B.norm() + 1e-300);
  if (!(resid < 1e-8))
    throw std::runtime_error(std::string(what) +
                             ": impedance solve residual " +
                             std::to_string(resid) +
                             "; k may sit on an internal resonance, perturb it");
}

}  // namespace

PortSystem port_reduce(const OperatorSet& op, const std::vector<int>& ports) {
  const int M = op.size();
  const int P = static_cast<int>(ports.size());
  if (P == 0) throw std::invalid_argument("port_reduce: no ports");
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M, P);
  for (int p = 0; p < P; ++p) {
    if (ports[p] < 0 || ports[p] >= M)
      throw std::invalid_argument("port_reduce: port index out of range");
    C(ports[p], p) = 1.0;
  }

  const Eigen::MatrixXcd Z = op.impedance();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Z);
  PortSystem sys;
  sys.ports = ports;
  sys.Y = lu.solve(C);
  check_solve(Z, C, sys.Y, "port_reduce");

  const Eigen::MatrixXcd Yh = sys.Y.adjoint();
  sys.r = Yh * op.R * sys.Y;
  sys.x = Yh * op.X * sys.Y;
  sys.wx = Yh * op.Wx * sys.Y;
  sys.s = op.S * sys.Y;
  // symmetrize away solve round-off; the forms are Hermitian by construction
  sys.r = 0.5 * (sys.r + sys.r.adjoint()).eval();
  sys.x = 0.5 * (sys.x + sys.x.adjoint()).eval();
  sys.wx = 0.5 * (sys.wx + sys.wx.adjoint()).eval();
  return sys;
}

ReducedRegionSystem subregion_reduce(const OperatorSet& op,
                                     const SubregionMask& mask) {
  const int M = op.size();
  if (static_cast<int>(mask.controlled.size()) != M)
    throw std::invalid_argument("subregion_reduce: mask size mismatch");

  std::vector<int> ctrl, uncl;
  for (int i = 0; i < M; ++i)
    (mask.controlled[i] ? ctrl : uncl).push_back(i);
  if (ctrl.empty()) throw std::invalid_argument("subregion_reduce: empty mask");

  const int Mc = static_cast<int>(ctrl.size());
  const int Mu = static_cast<int>(uncl.size());
  const Eigen::MatrixXcd Z = op.impedance();

  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(M, Mc);
  for (int j = 0; j < Mc; ++j) T(ctrl[j], j) = 1.0;
  if (Mu > 0) {
    Eigen::MatrixXcd Zuu(Mu, Mu), Zuc(Mu, Mc);
    for (int i = 0; i < Mu; ++i) {
      for (int j = 0; j < Mu; ++j) Zuu(i, j) = Z(uncl[i], uncl[j]);
      for (int j = 0; j < Mc; ++j) Zuc(i, j) = Z(uncl[i], ctrl[j]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Zuu);
    const Eigen::MatrixXcd Ju = -lu.solve(Zuc);
    check_solve(Zuu, -Zuc, Ju, "subregion_reduce");
    for (int i = 0; i < Mu; ++i) T.row(uncl[i]) = Ju.row(i);
  }

  ReducedRegionSystem sys;
  sys.controlled = std::move(ctrl);
  sys.T = std::move(T);
  const Eigen::MatrixXcd Th = sys.T.adjoint();
  sys.R = Th * op.R * sys.T;
  sys.Wx = Th * op.Wx * sys.T;
  sys.S = op.S * sys.T;
  sys.R = 0.5 * (sys.R + sys.R.adjoint()).eval();
  sys.Wx = 0.5 * (sys.Wx + sys.Wx.adjoint()).eval();
  return sys;
}

}  // namespace mimoq
