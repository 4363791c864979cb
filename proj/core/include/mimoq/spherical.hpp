#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mimoq {

/// Multi-index of a spherical vector wave: tau = 1 (TE / magnetic) or
/// 2 (TM / electric), degree l >= 1, order m in [-l, l]. Negative m labels
/// the sin(|m| phi) real harmonic, positive m the cos(m phi) one.
struct SphIndex {
  int tau;
  int l;
  int m;
};

/// Number of spherical waves with degree l <= lmax: 2 * lmax * (lmax + 2).
int sph_mode_count(int lmax);

/// Row index of (tau, l, m) in the projection matrix ordering
/// (l ascending, then m = -l..l, then tau = 1, 2).
int sph_row(int tau, int l, int m);

/// Inverse of sph_row.
SphIndex sph_index(int row);

/// Evaluates all regular spherical vector waves u^(1)_alpha(k r) with
/// l <= lmax at the point r. Real-valued convention with orthonormal real
/// spherical harmonics, chosen so that R = S^T S holds for the projection
/// matrix of Appendix-B form. Output is resized to sph_mode_count(lmax).
void eval_regular_waves(int lmax, double k, const Eigen::Vector3d& r,
                        std::vector<Eigen::Vector3d>& out);

}  // namespace mimoq
