#pragma once

#include <Eigen/Dense>

#include "mimoq/efie.hpp"
#include "mimoq/reduction.hpp"

namespace mimoq {

enum class ModeKind { energy, characteristic };

/// Solution of a Hermitian pencil A v = lambda B v with B PSD. Modes are
/// restricted to range(B); eigenvectors are B-orthonormal (v^H B v = 1).
struct ModeSpectrum {
  Eigen::VectorXd eigenvalues;   // ascending (energy) or by |lambda| (char.)
  Eigen::MatrixXcd eigenvectors; // columns matching eigenvalues
  ModeKind kind = ModeKind::energy;
  int rank = 0;                  // numerical rank of B used

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// Generalized Hermitian eigenproblem by whitening the PSD right matrix:
/// eigenpairs of A restricted to range(B), vectors B-orthonormal.
/// `rank_tol` is relative to the largest eigenvalue of B.
ModeSpectrum gevp_whitened(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                           double rank_tol = 1e-10);

/// Energy modes of a multiport antenna: stationary values of the tuned
/// Q-factor quotient wx / r over port excitations. For two-port systems a
/// degenerate pair is gauged to the even/odd mirror combinations so sweeps
/// produce continuous branches.
ModeSpectrum energy_modes_port(const PortSystem& sys, double degeneracy_tol = 1e-6);

/// Energy modes over the full current space (smallest Q eigencurrents),
/// restricted to the range of R.
ModeSpectrum energy_modes_current(const OperatorSet& op);
ModeSpectrum energy_modes_current(const ReducedRegionSystem& sys);

/// Characteristic modes X J = lambda R J, ordered by |lambda| (resonant
/// modes first).
ModeSpectrum characteristic_modes(const OperatorSet& op);

/// Rayleigh quotient J^H Wx J / J^H R J.
double rayleigh_quotient_energy(const OperatorSet& op, const Eigen::VectorXcd& J);

/// Number of modes with eigenvalue <= Q; values within `tie_tol` (relative)
/// of Q count as available.
int effective_mode_count(const Eigen::VectorXd& eigenvalues, double Q,
                         double tie_tol = 1e-9);

/// Spherical expansion coefficients of the mode currents: columns S * V.
Eigen::MatrixXcd radiation_patterns(const Eigen::MatrixXd& S,
                                    const Eigen::MatrixXcd& V);
Eigen::MatrixXcd radiation_patterns(const Eigen::MatrixXcd& S,
                                    const Eigen::MatrixXcd& V);

}  // namespace mimoq
