#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mimoq {

/// Inputs of one Q-constrained capacity point: energy-mode eigenvalues
/// w_n (any order; treated as a set), Q-factor budget and SNR.
struct ChannelSpectrum {
  Eigen::VectorXd w;
  double Q = 1.0;
  double gamma = 20.0;

  int mode_count() const { return static_cast<int>(w.size()); }
};

struct WaterfillResult {
  Eigen::VectorXd a;  // allocation fractions, sum 1
  double C = 0.0;     // bits/s/Hz
  double mu = 0.0;    // water level
  int n_active = 0;
};

struct CapacitySolution {
  double nu_star = 0.0;      // infinity on the explicit equal-power branch
  Eigen::VectorXd sigma2;    // channel singular values squared at nu_star
  Eigen::VectorXd a;         // allocations, sum 1 (zero if infeasible)
  double C = 0.0;
  double C_over_Q = 0.0;
  int n_active = 0;
  bool feasible = true;      // false iff Q < min(w_n)
};

struct ErgodicResult {
  int n_realizations = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> samples;
  std::uint64_t seed = 0;
};

struct SweepPoint {
  double Q;
  CapacitySolution sol;
};

struct CQSweep {
  std::vector<SweepPoint> points;
  int argmax_C_over_Q = -1;  // index into points, -1 if all infeasible
};

struct CorrelationLossResult {
  double delta_mean = 0.0;  // mean(C_opt - C_equal_power)
  double std_error = 0.0;
  int n_realizations = 0;
};

/// Channel singular values squared sigma_n^2 = (1+nu)/(w_n/Q + nu).
Eigen::VectorXd channel_singulars(const Eigen::VectorXd& w, double Q, double nu);

/// Exact water-filling of unit total power over channels with gains
/// gamma*sigma2_n: a_n = max(0, mu - 1/(gamma sigma2_n)).
WaterfillResult waterfill(const Eigen::VectorXd& sigma2, double gamma);

/// Semi-analytic dual: minimize the water-filled objective over nu by
/// golden section on log nu. Returns the explicit equal-power solution
/// when max(w_n)/Q <= 1, and a typed infeasible result when Q < min(w_n).
CapacitySolution dual_capacity(const ChannelSpectrum& cs);

/// N ideal equal channels: C = N log2(1 + gamma/N).
double equal_power_C(int N, double gamma);

/// dual_capacity over a Q grid, tracking the argmax of C/Q.
CQSweep sweep_C_over_Q(const Eigen::VectorXd& w,
                       const Eigen::VectorXd& q_grid, double gamma);

/// Capacity of one channel realization G (rows x N, column n driving mode
/// n): dual water-filling over nu with numeric singular values of
/// G diag(sigma_n(nu)) at every trial nu. G = the mode pattern matrix
/// itself (identity channel) reproduces dual_capacity.
double capacity_given_channel(const Eigen::MatrixXcd& G,
                              const Eigen::VectorXd& w, double Q, double gamma,
                              double* nu_star = nullptr);

/// Equal power over the N modes, no Q constraint: sum log2(1+(gamma/N) s_i^2)
/// over the singular values of G.
double equal_power_capacity_given_channel(const Eigen::MatrixXcd& G,
                                          double gamma);

/// Rayleigh-channel Monte Carlo: per realization draw square H_w (iid
/// CN(0,1/dim) so E[H^H H] = I, dimension = rows of U) from a stream
/// seeded by (seed, index), form G = H_w U and solve the dual. U must have
/// r-orthonormal columns (radiation patterns of the retained modes).
ErgodicResult ergodic_capacity(const Eigen::MatrixXcd& U,
                               const Eigen::VectorXd& w, double Q, double gamma,
                               int realizations, std::uint64_t seed);

/// Mean capacity loss of equal-power signaling relative to the optimal
/// allocation over shared channel realizations.
CorrelationLossResult correlation_loss(const Eigen::MatrixXcd& U,
                                       const Eigen::VectorXd& w, double Q,
                                       double gamma, int realizations,
                                       std::uint64_t seed);

/// The i.i.d. complex Gaussian square channel draw (entry variance 1/dim)
/// used by the Monte Carlo loops, exposed so tests can replay a stream.
Eigen::MatrixXcd draw_rayleigh_channel(int dim, std::uint64_t seed,
                                       std::uint64_t realization);

}  // namespace mimoq
