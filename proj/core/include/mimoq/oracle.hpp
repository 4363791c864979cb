#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace mimoq {

/// Small primal instance of the Q-constrained capacity problem:
/// maximize log2 det(I + gamma s a s^H) over a >= 0 with Tr(r a) = 1 and
/// Tr(wx a) <= Q. Dimensions are capped so the projected-gradient oracle
/// stays cheap and reliable.
struct PrimalInstance {
  Eigen::MatrixXcd r;   // Hermitian PSD
  Eigen::MatrixXcd wx;  // Hermitian
  Eigen::MatrixXcd s;   // channel rows x dim
  double Q = 1.0;
  double gamma = 20.0;

  int dim() const { return static_cast<int>(r.rows()); }
};

struct PrimalResult {
  double C = 0.0;           // bits/s/Hz at the best feasible iterate
  Eigen::MatrixXcd a;       // covariance
  bool feasible = true;     // false iff Q < smallest energy eigenvalue
  bool converged = false;
  double power_residual = 0.0;   // |Tr(r a) - 1|
  double energy_residual = 0.0;  // max(0, Tr(wx a) - Q)
  double min_eig = 0.0;          // smallest eigenvalue of a
};

/// Projected gradient ascent with Dykstra alternating projections between
/// the PSD cone and the affine/halfspace constraint pair; multi-start with
/// deterministic seeding.
PrimalResult primal_solve(const PrimalInstance& inst, int n_starts = 8,
                          std::uint64_t seed = 1);

}  // namespace mimoq
