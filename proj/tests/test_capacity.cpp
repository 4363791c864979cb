#include <doctest.h>

#include <cmath>
#include <random>

#include "mimoq/capacity.hpp"

using namespace mimoq;

namespace {

// Independent water-filling oracle: bisect the water level until the unit
// power budget is met, then evaluate the rate.
double waterfill_bisect(const Eigen::VectorXd& sigma2, double gamma,
                        Eigen::VectorXd* a_out = nullptr) {
  const int n = static_cast<int>(sigma2.size());
  Eigen::VectorXd inv_g(n);
  for (int i = 0; i < n; ++i) inv_g(i) = 1.0 / (gamma * sigma2(i));
  auto power = [&](double mu) {
    double p = 0.0;
    for (int i = 0; i < n; ++i) p += std::max(0.0, mu - inv_g(i));
    return p;
  };
  double lo = inv_g.minCoeff(), hi = inv_g.maxCoeff() + 1.0;
  while (power(hi) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (power(mid) < 1.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  double c = 0.0;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    a(i) = std::max(0.0, mu - inv_g(i));
    c += std::log2(1.0 + gamma * sigma2(i) * a(i));
  }
  if (a_out) *a_out = a;
  return c;
}

Eigen::MatrixXcd random_orthonormal_cols(int rows, int cols,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < m.size(); ++i)
    m.data()[i] = std::complex<double>(g(rng), g(rng));
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(m)
      .householderQ() *
      Eigen::MatrixXcd::Identity(rows, cols);
}

}  // namespace

TEST_CASE("water-filling matches an independent bisection oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    Eigen::VectorXd sigma2(n);
    for (int i = 0; i < n; ++i) sigma2(i) = u(rng);
    const double gamma = u(rng) * 10.0;

    Eigen::VectorXd a_ref;
    const double c_ref = waterfill_bisect(sigma2, gamma, &a_ref);
    const WaterfillResult wf = waterfill(sigma2, gamma);
    CHECK(wf.C == doctest::Approx(c_ref).epsilon(1e-10));
    CHECK((wf.a - a_ref).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(wf.a.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wf.a.minCoeff() >= 0.0);
  }
}

TEST_CASE("water-filling closed forms") {
  SUBCASE("equal channels split the power evenly") {
    const Eigen::VectorXd sigma2 = Eigen::VectorXd::Constant(4, 0.7);
    const WaterfillResult wf = waterfill(sigma2, 20.0);
    CHECK(wf.n_active == 4);
    for (int i = 0; i < 4; ++i)
      CHECK(wf.a(i) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(wf.C == doctest::Approx(4.0 * std::log2(1.0 + 20.0 * 0.7 / 4.0))
                      .epsilon(1e-12));
  }
  SUBCASE("single channel takes everything") {
    Eigen::VectorXd sigma2(1);
    sigma2 << 0.3;
    const WaterfillResult wf = waterfill(sigma2, 5.0);
    CHECK(wf.n_active == 1);
    CHECK(wf.a(0) == doctest::Approx(1.0));
    CHECK(wf.C == doctest::Approx(std::log2(1.0 + 5.0 * 0.3)).epsilon(1e-12));
  }
  SUBCASE("a hopeless channel is dropped") {
    Eigen::VectorXd sigma2(2);
    sigma2 << 1.0, 1e-6;
    const WaterfillResult wf = waterfill(sigma2, 2.0);
    CHECK(wf.n_active == 1);
    CHECK(wf.a(1) == 0.0);
    CHECK(wf.C == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("water level satisfies the KKT conditions") {
  Eigen::VectorXd sigma2(5);
  sigma2 << 2.0, 1.3, 0.9, 0.2, 0.05;
  const double gamma = 8.0;
  const WaterfillResult wf = waterfill(sigma2, gamma);
  for (int i = 0; i < 5; ++i) {
    const double inv_g = 1.0 / (gamma * sigma2(i));
    if (wf.a(i) > 0.0)
      CHECK(wf.a(i) + inv_g == doctest::Approx(wf.mu).epsilon(1e-8));
    else
      CHECK(inv_g >= wf.mu * (1.0 - 1e-12));
  }
}

TEST_CASE("channel singular values") {
  Eigen::VectorXd w(3);
  w << 0.5, 2.0, 8.0;
  const Eigen::VectorXd s2 = channel_singulars(w, 4.0, 1.0);
  for (int i = 0; i < 3; ++i)
    CHECK(s2(i) == doctest::Approx(2.0 / (w(i) / 4.0 + 1.0)).epsilon(1e-14));
  // nu below the feasibility floor must throw
  CHECK_THROWS(channel_singulars(w, 4.0, -3.0));
}

TEST_CASE("dual capacity: explicit branch when the budget is loose") {
  ChannelSpectrum cs;
  cs.w = Eigen::VectorXd::Zero(3);
  cs.w << 0.5, 0.9, 1.0;
  cs.Q = 1.0;  // max(w)/Q = 1: every mode already within budget
  cs.gamma = 20.0;
  const CapacitySolution sol = dual_capacity(cs);
  CHECK(sol.feasible);
  CHECK(std::isinf(sol.nu_star));
  CHECK(sol.C == doctest::Approx(equal_power_C(3, 20.0)).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    CHECK(sol.a(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("dual capacity: infeasible budget is typed, not thrown") {
  ChannelSpectrum cs;
  cs.w = Eigen::VectorXd::Zero(2);
  cs.w << 3.0, 10.0;
  cs.Q = 2.0;  // below min(w)
  const CapacitySolution sol = dual_capacity(cs);
  CHECK_FALSE(sol.feasible);
  CHECK(sol.C == 0.0);
  CHECK(sol.a.norm() == 0.0);
}

TEST_CASE("dual capacity satisfies its optimality conditions") {
  ChannelSpectrum cs;
  cs.w = Eigen::VectorXd::Zero(4);
  cs.w << 0.8, 3.0, 12.0, 40.0;
  cs.Q = 5.0;
  cs.gamma = 20.0;
  const CapacitySolution sol = dual_capacity(cs);
  REQUIRE(sol.feasible);
  CHECK(std::isfinite(sol.nu_star));
  CHECK(sol.nu_star > 0.0);

  // sol.a are water-filled fractions over the transformed channels; the
  // physical covariance is a_n sigma_n^2, and at the optimum it satisfies
  // both original constraints
  CHECK(sol.a.sum() == doctest::Approx(1.0).epsilon(1e-9));
  const Eigen::VectorXd phys = sol.a.cwiseProduct(sol.sigma2);
  CHECK(phys.sum() == doctest::Approx(1.0).epsilon(1e-6));

  // complementary slackness: a positive multiplier means the energy
  // constraint is active
  CHECK(phys.dot(cs.w) == doctest::Approx(cs.Q).epsilon(1e-6));

  // nu_star is a minimum of the dual function along nu
  auto dual_value = [&](double nu) {
    return waterfill(channel_singulars(cs.w, cs.Q, nu), cs.gamma).C;
  };
  const double f0 = dual_value(sol.nu_star);
  CHECK(sol.C == doctest::Approx(f0).epsilon(1e-9));
  CHECK(dual_value(sol.nu_star * 1.01) >= f0 - 1e-9);
  CHECK(dual_value(sol.nu_star * 0.99) >= f0 - 1e-9);
}

TEST_CASE("capacity is concave and nondecreasing in the budget") {
  Eigen::VectorXd w(4);
  w << 0.8, 3.0, 12.0, 40.0;
  const double gamma = 20.0;
  auto cofq = [&](double Q) {
    ChannelSpectrum cs;
    cs.w = w;
    cs.Q = Q;
    cs.gamma = gamma;
    return dual_capacity(cs).C;
  };
  double prev = 0.0;
  for (double q = 1.0; q <= 256.0; q *= 2.0) {
    const double c = cofq(q);
    CHECK(c >= prev - 1e-9);
    prev = c;
    // midpoint concavity on the linear Q axis
    const double mid = cofq(1.5 * q);
    CHECK(mid >= 0.5 * (cofq(q) + cofq(2.0 * q)) - 1e-9);
  }
  // Q -> infinity approaches the ideal equal-power ceiling
  CHECK(cofq(1e4 * w.maxCoeff()) ==
        doctest::Approx(equal_power_C(4, gamma)).epsilon(1e-3));
}

TEST_CASE("sweep tracks the best C/Q point") {
  Eigen::VectorXd w(3);
  w << 2.0, 6.0, 30.0;
  Eigen::VectorXd q(5);
  q << 1.0, 3.0, 8.0, 40.0, 200.0;
  const CQSweep sweep = sweep_C_over_Q(w, q, 20.0);
  REQUIRE(sweep.points.size() == 5);
  CHECK_FALSE(sweep.points[0].sol.feasible);  // Q=1 < min(w)=2
  REQUIRE(sweep.argmax_C_over_Q >= 1);
  const double best = sweep.points[sweep.argmax_C_over_Q].sol.C_over_Q;
  for (const SweepPoint& p : sweep.points)
    if (p.sol.feasible) CHECK(p.sol.C_over_Q <= best * (1.0 + 1e-12));
}

TEST_CASE("identity channel reproduces the semi-analytic solution") {
  const Eigen::MatrixXcd U = random_orthonormal_cols(9, 4, 3);
  Eigen::VectorXd w(4);
  w << 0.8, 3.0, 12.0, 40.0;
  const double Q = 5.0, gamma = 20.0;
  ChannelSpectrum cs;
  cs.w = w;
  cs.Q = Q;
  cs.gamma = gamma;
  const CapacitySolution ref = dual_capacity(cs);
  double nu = 0.0;
  const double c = capacity_given_channel(U, w, Q, gamma, &nu);
  CHECK(c == doctest::Approx(ref.C).epsilon(1e-8));
  CHECK(nu == doctest::Approx(ref.nu_star).epsilon(1e-4));
}

TEST_CASE("channel draws are deterministic in (seed, index)") {
  const Eigen::MatrixXcd h1 = draw_rayleigh_channel(5, 77, 3);
  const Eigen::MatrixXcd h2 = draw_rayleigh_channel(5, 77, 3);
  CHECK((h1.array() == h2.array()).all());
  const Eigen::MatrixXcd h3 = draw_rayleigh_channel(5, 77, 4);
  CHECK((h1 - h3).norm() > 0.0);
  const Eigen::MatrixXcd h4 = draw_rayleigh_channel(5, 78, 3);
  CHECK((h1 - h4).norm() > 0.0);
  // normalization: E[||H||_F^2] = dim, so a single draw should be within
  // a loose band around dim
  CHECK(h1.squaredNorm() > 1.0);
  CHECK(h1.squaredNorm() < 25.0);
}

TEST_CASE("ergodic capacity is reproducible and sane") {
  const Eigen::MatrixXcd U = random_orthonormal_cols(8, 3, 9);
  Eigen::VectorXd w(3);
  w << 1.0, 4.0, 15.0;
  const ErgodicResult e1 = ergodic_capacity(U, w, 20.0, 20.0, 64, 123);
  const ErgodicResult e2 = ergodic_capacity(U, w, 20.0, 20.0, 64, 123);
  CHECK(e1.mean == e2.mean);
  CHECK(e1.stddev == e2.stddev);
  REQUIRE(e1.samples.size() == 64);
  for (size_t i = 0; i < e1.samples.size(); ++i)
    CHECK(e1.samples[i] == e2.samples[i]);
  CHECK(e1.mean > 0.0);
  CHECK(e1.stddev > 0.0);
  CHECK(e1.n_realizations == 64);
  CHECK(e1.seed == 123);

  const ErgodicResult e3 = ergodic_capacity(U, w, 20.0, 20.0, 64, 124);
  CHECK(e3.mean != e1.mean);
}

TEST_CASE("correlation loss is nonnegative and shrinks at high SNR") {
  const Eigen::MatrixXcd U = random_orthonormal_cols(8, 3, 21);
  Eigen::VectorXd w(3);
  w << 1.0, 4.0, 15.0;
  const double Q = 20.0;  // above max(w): equal power is always feasible
  const CorrelationLossResult lo = correlation_loss(U, w, Q, 2.0, 300, 5);
  const CorrelationLossResult hi = correlation_loss(U, w, Q, 1000.0, 300, 5);
  CHECK(lo.n_realizations == 300);
  CHECK(lo.delta_mean >= -1e-9);  // optimal allocation can never lose
  CHECK(hi.delta_mean >= -1e-9);
  CHECK(lo.std_error > 0.0);
  // water-filling converges to equal power as gamma grows
  CHECK(hi.delta_mean < 0.5 * lo.delta_mean + 2.0 * hi.std_error + 1e-12);
}
