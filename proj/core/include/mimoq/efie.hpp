#pragma once

#include <Eigen/Dense>
#include <complex>

#include "mimoq/geometry.hpp"

namespace mimoq {

inline constexpr double kVacuumImpedance = 376.730313668;  // ohms

struct AssemblyOptions {
  int quad_order = 4;        // tensor Gauss order per cell dimension
  int quad_order_near = 8;   // order for touching / overlapping cells
  double near_factor = 4.0;  // extraction radius in units of cell diagonal
  int lmax = 0;              // 0 -> ceil(ka) + 8 rule
};

/// Full-wave operators of a PEC mesh in vacuum at one wavenumber.
/// All matrices are in SI units (ohms; S in sqrt-ohms).
struct OperatorSet {
  double k = 0.0;
  double z0 = kVacuumImpedance;
  Eigen::MatrixXd R;    // radiation (real part of Z), symmetric PSD
  Eigen::MatrixXd X;    // reactance, symmetric
  Eigen::MatrixXd Wx;   // (omega/2) dX/domega, symmetric
  Eigen::MatrixXd S;    // spherical projection, L_sph x M
  int lmax = 0;
  AssemblyOptions opts;

  int size() const { return static_cast<int>(R.rows()); }
  Eigen::MatrixXcd impedance() const {
    return R.cast<std::complex<double>>() +
           std::complex<double>(0.0, 1.0) * X.cast<std::complex<double>>();
  }
};

struct StoredEnergyPair {
  double magnetic;  // omega * W_m, watts
  double electric;  // omega * W_e, watts
};

/// Default spherical truncation: ceil(ka) + 8 with a the bounding radius.
int default_lmax(const Mesh& mesh, double k);

/// Galerkin EFIE impedance matrix Z = R + jX over rooftop pairs.
/// Singular 1/R parts use analytic rectangle potentials; the smooth
/// remainder uses tensor-product Gauss quadrature.
Eigen::MatrixXcd assemble_impedance(const Mesh& mesh, double k,
                                    const AssemblyOptions& opts = {});

/// Stored-energy matrix W_x = (omega/2) dX/domega by analytic
/// k-differentiation of the kernel on the same quadrature as Z.
Eigen::MatrixXd assemble_stored_energy(const Mesh& mesh, double k,
                                       const AssemblyOptions& opts = {});

/// Spherical-wave projection S with rows (tau, l, m), l <= lmax;
/// satisfies R ~= S^T S at sufficient truncation.
Eigen::MatrixXd assemble_spherical_projection(const Mesh& mesh, double k,
                                              int lmax,
                                              const AssemblyOptions& opts = {});

/// All operators in one pass (Z and W_x share quadrature work).
OperatorSet assemble_operators(const Mesh& mesh, double k,
                               const AssemblyOptions& opts = {});

/// omega*W_m and omega*W_e quadratic forms for a current vector.
StoredEnergyPair stored_energies(const OperatorSet& op,
                                 const Eigen::VectorXcd& J);

/// Q-factor of a current: untuned variant omega(W_m+W_e)/P_r, or the
/// tuned radiation Q adding the |W_m - W_e| lumped-tuning term.
double compute_Q(const OperatorSet& op, const Eigen::VectorXcd& J,
                 bool tuned = false);

/// Relative Frobenius error of the factorization R = S^T S.
double factorization_error(const Eigen::MatrixXd& R, const Eigen::MatrixXd& S);

}  // namespace mimoq
