#include "mimoq/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mimoq {

namespace {

constexpr double kNuHi = 1e12;
constexpr double kLogNuTol = 1e-10;  // relative in nu

// The multiplier ratio nu ranges over (-w_min/Q, inf): the power constraint
// is an equality, so negative values are admissible as long as the combined
// form nu*r + wx/Q stays PSD. Relevant when only part of the spectrum is
// individually affordable (w_1 <= Q < w_2).
double nu_feasibility_floor(const Eigen::VectorXd& w, double Q) {
  return -w.minCoeff() / Q;
}

/// Minimum of f over nu in (floor, kNuHi], parametrized as
/// nu = floor + exp(u): a coarse scan brackets the minimum, golden section
/// refines it.
template <class F>
double golden_min(F&& f, double floor, double hi) {
  const double scale = 1.0 + std::abs(floor);
  const double a_full = std::log(1e-12 * scale);
  const double b_full = std::log(hi - floor);
  const auto eval = [&](double u) { return f(floor + std::exp(u)); };

  constexpr int kScan = 96;
  int i_best = 0;
  double f_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double u = a_full + (b_full - a_full) * i / (kScan - 1);
    const double fu = eval(u);
    if (fu < f_best) {
      f_best = fu;
      i_best = i;
    }
  }
  const double du = (b_full - a_full) / (kScan - 1);
  double a = a_full + du * std::max(0, i_best - 1);
  double b = a_full + du * std::min(kScan - 1, i_best + 1);

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 400 && b - a > kLogNuTol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2);
    }
  }
  return floor + std::exp(0.5 * (a + b));
}

Eigen::VectorXd thin_r_factor_singulars(const Eigen::MatrixXcd& A) {
  if (A.cols() <= 16)
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues();
  return Eigen::BDCSVD<Eigen::MatrixXcd>(A).singularValues();
}

}  // namespace

Eigen::VectorXd channel_singulars(const Eigen::VectorXd& w, double Q, double nu) {
  Eigen::VectorXd s2(w.size());
  for (int n = 0; n < w.size(); ++n) {
    const double den = w(n) / Q + nu;
    if (!(den > 0.0))
      throw std::invalid_argument("channel_singulars: nu below feasibility");
    s2(n) = (1.0 + nu) / den;
  }
  return s2;
}

WaterfillResult waterfill(const Eigen::VectorXd& sigma2, double gamma) {
  const int N = static_cast<int>(sigma2.size());
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sigma2(a) > sigma2(b); });

  // largest active set with positive allocation on its weakest channel
  double inv_sum = 0.0;
  int k_best = 1;
  double mu_best = 0.0;
  for (int k = 1; k <= N; ++k) {
    inv_sum += 1.0 / (gamma * sigma2(order[k - 1]));
    const double mu = (1.0 + inv_sum) / k;
    if (mu - 1.0 / (gamma * sigma2(order[k - 1])) > 0.0) {
      k_best = k;
      mu_best = mu;
    } else {
      break;
    }
  }

  WaterfillResult r;
  r.a = Eigen::VectorXd::Zero(N);
  r.mu = mu_best;
  r.n_active = k_best;
  for (int k = 0; k < k_best; ++k) {
    const int n = order[k];
    r.a(n) = mu_best - 1.0 / (gamma * sigma2(n));
    r.C += std::log2(1.0 + r.a(n) * gamma * sigma2(n));
  }
  return r;
}

CapacitySolution dual_capacity(const ChannelSpectrum& cs) {
  const int N = cs.mode_count();
  if (N == 0) throw std::invalid_argument("dual_capacity: empty spectrum");
  if (!(cs.Q > 0.0) || !(cs.gamma > 0.0))
    throw std::invalid_argument("dual_capacity: Q and gamma must be positive");

  CapacitySolution sol;
  if (cs.Q < cs.w.minCoeff()) {
    sol.feasible = false;
    sol.a = Eigen::VectorXd::Zero(N);
    sol.sigma2 = Eigen::VectorXd::Zero(N);
    return sol;
  }

  if (cs.w.maxCoeff() / cs.Q <= 1.0) {
    // Q-factor constraint trivially satisfied: equal power on all modes
    sol.nu_star = std::numeric_limits<double>::infinity();
    sol.sigma2 = Eigen::VectorXd::Ones(N);
    sol.a = Eigen::VectorXd::Constant(N, 1.0 / N);
    sol.C = equal_power_C(N, cs.gamma);
    sol.n_active = N;
    sol.C_over_Q = sol.C / cs.Q;
    return sol;
  }

  const auto dual = [&](double nu) {
    return waterfill(channel_singulars(cs.w, cs.Q, nu), cs.gamma).C;
  };
  sol.nu_star = golden_min(dual, nu_feasibility_floor(cs.w, cs.Q), kNuHi);
  sol.sigma2 = channel_singulars(cs.w, cs.Q, sol.nu_star);
  const WaterfillResult wf = waterfill(sol.sigma2, cs.gamma);
  sol.a = wf.a;
  sol.C = wf.C;
  sol.n_active = wf.n_active;
  sol.C_over_Q = sol.C / cs.Q;
  return sol;
}

double equal_power_C(int N, double gamma) {
  return N * std::log2(1.0 + gamma / N);
}

CQSweep sweep_C_over_Q(const Eigen::VectorXd& w,
                       const Eigen::VectorXd& q_grid, double gamma) {
  CQSweep sweep;
  sweep.points.reserve(q_grid.size());
  double best = -1.0;
  for (int i = 0; i < q_grid.size(); ++i) {
    ChannelSpectrum cs{w, q_grid(i), gamma};
    SweepPoint p{q_grid(i), dual_capacity(cs)};
    if (p.sol.feasible && p.sol.C_over_Q > best) {
      best = p.sol.C_over_Q;
      sweep.argmax_C_over_Q = i;
    }
    sweep.points.push_back(std::move(p));
  }
  return sweep;
}

double capacity_given_channel(const Eigen::MatrixXcd& G,
                              const Eigen::VectorXd& w, double Q, double gamma,
                              double* nu_star) {
  const int N = static_cast<int>(G.cols());
  if (w.size() != N)
    throw std::invalid_argument("capacity_given_channel: mode count mismatch");
  if (Q < w.minCoeff()) {
    if (nu_star) *nu_star = 0.0;
    return 0.0;
  }

  // thin QR once; only the N x N triangular factor carries the geometry
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  const Eigen::MatrixXcd Rg = qr.matrixQR()
                                  .topRows(N)
                                  .triangularView<Eigen::Upper>();

  const auto dual = [&](double nu) {
    const Eigen::VectorXd s2 = channel_singulars(w, Q, nu);
    Eigen::MatrixXcd Gs = Rg;
    for (int n = 0; n < N; ++n) Gs.col(n) *= std::sqrt(s2(n));
    const Eigen::VectorXd sv = thin_r_factor_singulars(Gs);
    return waterfill(sv.cwiseAbs2(), gamma).C;
  };

  if (w.maxCoeff() / Q <= 1.0) {
    // nu -> infinity limit: sigma = 1 exactly
    if (nu_star) *nu_star = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd sv = thin_r_factor_singulars(Rg);
    return waterfill(sv.cwiseAbs2(), gamma).C;
  }

  const double nu = golden_min(dual, nu_feasibility_floor(w, Q), kNuHi);
  if (nu_star) *nu_star = nu;
  return dual(nu);
}

double equal_power_capacity_given_channel(const Eigen::MatrixXcd& G,
                                          double gamma) {
  const int N = static_cast<int>(G.cols());
  const Eigen::VectorXd sv = thin_r_factor_singulars(G);
  double C = 0.0;
  for (int i = 0; i < sv.size(); ++i)
    C += std::log2(1.0 + gamma / N * sv(i) * sv(i));
  return C;
}

Eigen::MatrixXcd draw_rayleigh_channel(int dim, std::uint64_t seed,
                                       std::uint64_t realization) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(realization),
                    static_cast<std::uint32_t>(realization >> 32)};
  std::mt19937_64 rng(seq);
  // E[H^H H] = I: the isotropic channel is the ensemble mean, so the
  // Rayleigh statistics straddle the deterministic (H = I) curve
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5 / dim));
  Eigen::MatrixXcd H(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      H(i, j) = {re, im};
    }
  return H;
}

ErgodicResult ergodic_capacity(const Eigen::MatrixXcd& U,
                               const Eigen::VectorXd& w, double Q, double gamma,
                               int realizations, std::uint64_t seed) {
  if (realizations < 1)
    throw std::invalid_argument("ergodic_capacity: realizations >= 1");
  const int L = static_cast<int>(U.rows());
  ErgodicResult res;
  res.n_realizations = realizations;
  res.seed = seed;
  res.samples.resize(realizations);
  for (int i = 0; i < realizations; ++i) {
    const Eigen::MatrixXcd G = draw_rayleigh_channel(L, seed, i) * U;
    res.samples[i] = capacity_given_channel(G, w, Q, gamma);
  }
  res.mean = std::accumulate(res.samples.begin(), res.samples.end(), 0.0) /
             realizations;
  if (realizations > 1) {
    double ss = 0.0;
    for (double c : res.samples) ss += (c - res.mean) * (c - res.mean);
    res.stddev = std::sqrt(ss / (realizations - 1));
  }
  return res;
}

CorrelationLossResult correlation_loss(const Eigen::MatrixXcd& U,
                                       const Eigen::VectorXd& w, double Q,
                                       double gamma, int realizations,
                                       std::uint64_t seed) {
  if (realizations < 1)
    throw std::invalid_argument("correlation_loss: realizations >= 1");
  const int L = static_cast<int>(U.rows());
  std::vector<double> delta(realizations);
  for (int i = 0; i < realizations; ++i) {
    const Eigen::MatrixXcd G = draw_rayleigh_channel(L, seed, i) * U;
    delta[i] = capacity_given_channel(G, w, Q, gamma) -
               equal_power_capacity_given_channel(G, gamma);
  }
  CorrelationLossResult res;
  res.n_realizations = realizations;
  res.delta_mean =
      std::accumulate(delta.begin(), delta.end(), 0.0) / realizations;
  if (realizations > 1) {
    double ss = 0.0;
    for (double d : delta) ss += (d - res.delta_mean) * (d - res.delta_mean);
    res.std_error = std::sqrt(ss / (realizations - 1)) /
                    std::sqrt(static_cast<double>(realizations));
  }
  return res;
}

}  // namespace mimoq
