#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mimoq/efie.hpp"
#include "mimoq/geometry.hpp"

namespace mimoq {

/// Full-wave operators compressed onto a set of delta-gap feed ports.
/// With Y = Z^{-1} C the port columns of the current solution operator,
/// each matrix is the congruent image Y^H M Y; all are Hermitian and the
/// quadratic forms in port excitations equal the full-wave forms in the
/// induced currents.
struct PortSystem {
  std::vector<int> ports;   // basis index of each feed
  Eigen::MatrixXcd Y;       // M x P current solution operator
  Eigen::MatrixXcd r;       // radiated power form
  Eigen::MatrixXcd x;       // reactive form
  Eigen::MatrixXcd wx;      // stored-energy form
  Eigen::MatrixXcd s;       // spherical projection, L_sph x P

  int port_count() const { return static_cast<int>(ports.size()); }
};

/// Sub-region compression: bases are split into controlled (c) and
/// uncontrolled (u); the uncontrolled currents are those induced on the
/// passive remainder, J_u = -Z_uu^{-1} Z_uc J_c. T maps controlled
/// coefficients to the full current vector in the original row ordering.
struct ReducedRegionSystem {
  std::vector<int> controlled;  // original basis indices, ascending
  Eigen::MatrixXcd T;           // M x Mc embedding
  Eigen::MatrixXcd R;           // T^H R T
  Eigen::MatrixXcd Wx;          // T^H Wx T
  Eigen::MatrixXcd S;           // S T

  int controlled_count() const { return static_cast<int>(controlled.size()); }
};

/// Reduces the operators onto delta-gap ports (1 V gap feeds at the given
/// basis functions). Throws on an ill-conditioned Z solve; perturbing k
/// off an internal resonance is the usual remedy.
PortSystem port_reduce(const OperatorSet& op, const std::vector<int>& ports);

/// Schur-style embedding of the controlled sub-region into the full mesh.
ReducedRegionSystem subregion_reduce(const OperatorSet& op,
                                     const SubregionMask& mask);

}  // namespace mimoq
