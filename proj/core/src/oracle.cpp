#include "mimoq/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace mimoq {

namespace {

using Eigen::MatrixXcd;

double fro_inner(const MatrixXcd& A, const MatrixXcd& B) {
  return (A.adjoint() * B).trace().real();
}

MatrixXcd hermitize(const MatrixXcd& A) { return 0.5 * (A + A.adjoint()); }

MatrixXcd project_psd(const MatrixXcd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(A));
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// Projection onto {Tr(r a) = 1} intersected with {Tr(wx a) <= Q} in the
/// Frobenius metric: equality-only first, then both constraints active.
struct AffineProjector {
  const MatrixXcd& r;
  const MatrixXcd& wx;
  double Q;
  double rr, rw, ww;  // Gram matrix of the constraint normals

  AffineProjector(const MatrixXcd& r_, const MatrixXcd& wx_, double Q_)
      : r(r_), wx(wx_), Q(Q_) {
    rr = fro_inner(r, r);
    rw = fro_inner(r, wx);
    ww = fro_inner(wx, wx);
  }

  MatrixXcd operator()(const MatrixXcd& a0) const {
    const MatrixXcd a = hermitize(a0);
    const double cr = fro_inner(r, a) - 1.0;
    MatrixXcd a1 = a - (cr / rr) * r;
    if (fro_inner(wx, a1) <= Q + 1e-14) return a1;
    // both active: solve the 2x2 Gram system for the multipliers
    const double cw = fro_inner(wx, a) - Q;
    const double det = rr * ww - rw * rw;
    if (std::abs(det) < 1e-14 * rr * ww)  // wx parallel to r: equality wins
      return a1;
    const double al = (ww * cr - rw * cw) / det;
    const double be = (rr * cw - rw * cr) / det;
    return a - al * r - be * wx;
  }
};

MatrixXcd dykstra(const MatrixXcd& a0, const AffineProjector& paff,
                  int max_iter = 400, double tol = 1e-13) {
  MatrixXcd x = a0;
  MatrixXcd p = MatrixXcd::Zero(a0.rows(), a0.cols());
  MatrixXcd q = p;
  for (int it = 0; it < max_iter; ++it) {
    const MatrixXcd y = project_psd(x + p);
    p = x + p - y;
    const MatrixXcd xn = paff(y + q);
    q = y + q - xn;
    const double delta = (xn - x).norm();
    x = xn;
    if (delta < tol) break;
  }
  return x;
}

// det(I + gamma s a s^H) = det(I + gamma a B) with B = s^H s, and
// s^H (I + gamma s a s^H)^{-1} s = B (I + gamma a B)^{-1} (push-through),
// so only the dim x dim Gram matrix enters the iteration.
double objective(const MatrixXcd& B, double gamma, const MatrixXcd& a) {
  const int d = static_cast<int>(B.rows());
  const MatrixXcd M = MatrixXcd::Identity(d, d) + gamma * a * B;
  const std::complex<double> ld =
      Eigen::PartialPivLU<MatrixXcd>(M).matrixLU().diagonal().array().log().sum();
  return ld.real() / std::log(2.0);
}

MatrixXcd gradient(const MatrixXcd& B, double gamma, const MatrixXcd& a) {
  const int d = static_cast<int>(B.rows());
  const MatrixXcd M = MatrixXcd::Identity(d, d) + gamma * a * B;
  return hermitize(gamma / std::log(2.0) * B * M.lu().solve(MatrixXcd::Identity(d, d)));
}

double min_energy_eigenvalue(const PrimalInstance& inst) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> er(hermitize(inst.r));
  const Eigen::VectorXd lam = er.eigenvalues();
  const double cut = 1e-10 * lam.maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < lam.size(); ++i)
    if (lam(i) > cut) keep.push_back(i);
  MatrixXcd W(inst.dim(), keep.size());
  for (size_t j = 0; j < keep.size(); ++j)
    W.col(j) = er.eigenvectors().col(keep[j]) / std::sqrt(lam(keep[j]));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ew(
      hermitize(W.adjoint() * inst.wx * W));
  return ew.eigenvalues().minCoeff();
}

}  // namespace

PrimalResult primal_solve(const PrimalInstance& inst, int n_starts,
                          std::uint64_t seed) {
  const int d = inst.dim();
  if (d > 6) throw std::invalid_argument("primal_solve: dimension > 6");
  if (inst.wx.rows() != d || inst.s.cols() != d)
    throw std::invalid_argument("primal_solve: shape mismatch");

  PrimalResult best;
  const double wmin = min_energy_eigenvalue(inst);
  if (inst.Q < wmin) {
    best.feasible = false;
    best.a = MatrixXcd::Zero(d, d);
    return best;
  }

  const AffineProjector paff(inst.r, inst.wx, inst.Q);
  const MatrixXcd B = hermitize(inst.s.adjoint() * inst.s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  best.C = -1.0;

  // equal power in the whitened coordinates: r^+ / d. Optimal whenever the
  // energy constraint is inactive, a good interior start otherwise.
  MatrixXcd r_pinv = MatrixXcd::Zero(d, d);
  {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> er(hermitize(inst.r));
    const double cut = 1e-10 * er.eigenvalues().maxCoeff();
    for (int i = 0; i < d; ++i)
      if (er.eigenvalues()(i) > cut)
        r_pinv += er.eigenvectors().col(i) *
                  er.eigenvectors().col(i).adjoint() / er.eigenvalues()(i);
  }

  for (int start = 0; start < n_starts; ++start) {
    MatrixXcd a(d, d);
    if (start == 0) {
      a = MatrixXcd::Identity(d, d);
    } else if (start == 1) {
      a = r_pinv / d;
    } else {
      MatrixXcd G(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = {nd(rng), nd(rng)};
      a = G * G.adjoint();
    }
    a = dykstra(a, paff);

    double f = objective(B, inst.gamma, a);
    double step = 1.0;
    bool converged = false;
    for (int it = 0; it < 2000; ++it) {
      const MatrixXcd g = gradient(B, inst.gamma, a);
      MatrixXcd a_new;
      double f_new = -1.0;
      double t = step;
      bool improved = false;
      for (int bt = 0; bt < 40; ++bt) {
        a_new = dykstra(a + t * g, paff);
        f_new = objective(B, inst.gamma, a_new);
        if (f_new > f + 1e-15) {
          improved = true;
          break;
        }
        t *= 0.5;
      }
      if (!improved) {
        converged = true;
        break;
      }
      step = std::min(2.0 * t, 1e3);  // mild step growth
      if (f_new - f < 1e-13 * (1.0 + std::abs(f))) {
        a = a_new;
        f = f_new;
        converged = true;
        break;
      }
      a = a_new;
      f = f_new;
    }

    a = dykstra(a, paff, 2000);  // polish feasibility of the candidate
    f = objective(B, inst.gamma, a);
    if (f > best.C) {
      best.C = f;
      best.a = a;
      best.converged = converged;
    }
  }

  best.power_residual = std::abs(fro_inner(inst.r, best.a) - 1.0);
  best.energy_residual = std::max(0.0, fro_inner(inst.wx, best.a) - inst.Q);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ea(hermitize(best.a));
  best.min_eig = ea.eigenvalues().minCoeff();
  return best;
}

}  // namespace mimoq
