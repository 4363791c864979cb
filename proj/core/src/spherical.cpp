#include "mimoq/spherical.hpp"

#include <cmath>
#include <stdexcept>

namespace mimoq {

int sph_mode_count(int lmax) { return 2 * lmax * (lmax + 2); }

int sph_row(int tau, int l, int m) {
  // pairs with degree < l: l^2 - 1
  return 2 * (l * l - 1 + (m + l)) + (tau - 1);
}

SphIndex sph_index(int row) {
  const int tau = row % 2 + 1;
  int p = row / 2;
  int l = 1;
  while (l * l - 1 + (2 * l + 1) <= p) ++l;
  const int m = p - (l * l - 1) - l;
  return {tau, l, m};
}

namespace {

// Spherical Bessel j_l, j_l/x and the Riccati form (x j_l)'/x, with
// series fallbacks near x = 0.
struct RadialTable {
  std::vector<double> j, j_over_x, ricc;
};

double dfact(int n) {  // (2l+1)!!
  double v = 1.0;
  for (int i = n; i >= 2; i -= 2) v *= i;
  return v;
}

RadialTable radial_table(int lmax, double x) {
  RadialTable t;
  t.j.resize(lmax + 1);
  t.j_over_x.resize(lmax + 1);
  t.ricc.resize(lmax + 1);
  if (x < 1e-4) {
    // leading series terms; j_over_x and ricc are only used for l >= 1
    t.j[0] = 1.0 - x * x / 6.0;
    t.j_over_x[0] = 0.0;
    t.ricc[0] = 0.0;
    double pw = 1.0;  // x^(l-1)
    for (int l = 1; l <= lmax; ++l) {
      const double c = dfact(2 * l + 1);
      t.j[l] = pw * x / c * (1.0 - x * x / (2.0 * (2 * l + 3)));
      t.j_over_x[l] = pw / c;
      t.ricc[l] = (l + 1) * pw / c;
      pw *= x;
    }
    return t;
  }
  for (int l = 0; l <= lmax; ++l) {
    t.j[l] = std::sph_bessel(static_cast<unsigned>(l), x);
    t.j_over_x[l] = t.j[l] / x;
  }
  t.ricc[0] = 0.0;  // unused
  for (int l = 1; l <= lmax; ++l) t.ricc[l] = t.j[l - 1] - l * t.j_over_x[l];
  return t;
}

}  // namespace

void eval_regular_waves(int lmax, double k, const Eigen::Vector3d& r_in,
                        std::vector<Eigen::Vector3d>& out) {
  if (lmax < 1) throw std::invalid_argument("lmax must be >= 1");
  out.assign(sph_mode_count(lmax), Eigen::Vector3d::Zero());

  Eigen::Vector3d r = r_in;
  double rn = r.norm();
  if (rn < 1e-14 / k) {  // nudge off the singular coordinate origin
    r = Eigen::Vector3d(0.0, 0.0, 1e-14 / k);
    rn = r.norm();
  }
  const double x = k * rn;
  const RadialTable rad = radial_table(lmax, x);

  const double rho = std::hypot(r.x(), r.y());
  const double ct = r.z() / rn;
  const double st = rho / rn;
  double cp = 1.0, sp = 0.0;
  if (rho > 0.0) {
    cp = r.x() / rho;
    sp = r.y() / rho;
  }
  const Eigen::Vector3d rhat = r / rn;
  const Eigen::Vector3d that(ct * cp, ct * sp, -st);
  const Eigen::Vector3d phat(-sp, cp, 0.0);

  // cos(m phi), sin(m phi) by recurrence
  std::vector<double> cm(lmax + 1), sm(lmax + 1);
  cm[0] = 1.0;
  sm[0] = 0.0;
  for (int m = 1; m <= lmax; ++m) {
    cm[m] = cm[m - 1] * cp - sm[m - 1] * sp;
    sm[m] = sm[m - 1] * cp + cm[m - 1] * sp;
  }

  // U[l][m] = P_l^m / sin(theta) for m >= 1 (regular at the poles),
  // P[l] = P_l^0. No Condon-Shortley phase.
  std::vector<std::vector<double>> U(lmax + 1, std::vector<double>(lmax + 2, 0.0));
  for (int m = 1; m <= lmax; ++m) {
    double umm = dfact(2 * m - 1);
    for (int i = 0; i < m - 1; ++i) umm *= st;
    U[m][m] = umm;
    if (m + 1 <= lmax) U[m + 1][m] = (2 * m + 1) * ct * umm;
    for (int l = m + 2; l <= lmax; ++l)
      U[l][m] = ((2 * l - 1) * ct * U[l - 1][m] - (l - 1 + m) * U[l - 2][m]) / (l - m);
  }
  std::vector<double> P0(lmax + 1);
  P0[0] = 1.0;
  if (lmax >= 1) P0[1] = ct;
  for (int l = 2; l <= lmax; ++l)
    P0[l] = ((2 * l - 1) * ct * P0[l - 1] - (l - 1) * P0[l - 2]) / l;

  const double inv4pi = 1.0 / (4.0 * M_PI);
  for (int l = 1; l <= lmax; ++l) {
    const double ll1 = std::sqrt(static_cast<double>(l) * (l + 1));
    for (int m = -l; m <= l; ++m) {
      const int ma = std::abs(m);
      // normalization: sqrt((2l+1)/(4pi) * (l-|m|)!/(l+|m|)!), with the
      // sqrt(2) of the real harmonics folded in for m != 0
      double ratio = 1.0;
      for (int i = l - ma + 1; i <= l + ma; ++i) ratio /= i;
      double N = std::sqrt((2 * l + 1) * inv4pi * ratio);
      if (m != 0) N *= std::sqrt(2.0);

      double Pl, tau_d, dphi_over_s;  // P_l^|m|, dP/dtheta, (1/s) dY/dphi parts
      if (ma == 0) {
        Pl = P0[l];
        tau_d = -st * U[l][1];  // dP_l/dtheta = -P_l^1
        dphi_over_s = 0.0;
      } else {
        const double u = U[l][ma];
        const double um1 = (l - 1 >= ma) ? U[l - 1][ma] : 0.0;
        Pl = u * st;
        tau_d = l * ct * u - (l + ma) * um1;
        dphi_over_s = ma * u;
      }
      double Y, dY_dt, dY_dp_s;
      if (m >= 0) {
        Y = N * Pl * cm[ma];
        dY_dt = N * tau_d * cm[ma];
        dY_dp_s = -N * dphi_over_s * sm[ma];
      } else {
        Y = N * Pl * sm[ma];
        dY_dt = N * tau_d * sm[ma];
        dY_dp_s = N * dphi_over_s * cm[ma];
      }

      const Eigen::Vector3d A1 = (that * dY_dp_s - phat * dY_dt) / ll1;
      const Eigen::Vector3d A2 = (that * dY_dt + phat * dY_dp_s) / ll1;
      const Eigen::Vector3d A3 = rhat * Y;

      out[sph_row(1, l, m)] = rad.j[l] * A1;
      out[sph_row(2, l, m)] = rad.ricc[l] * A2 + ll1 * rad.j_over_x[l] * A3;
    }
  }
}

}  // namespace mimoq
