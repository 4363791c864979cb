#include "mimoq/efie.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mimoq/spherical.hpp"

namespace mimoq {

namespace {

using Cplx = std::complex<double>;

struct GaussRule {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;
};

// Gauss-Legendre rule by Newton iteration on P_n.
GaussRule gauss_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    r.x[i] = 0.5 * (1.0 + t);
    r.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);  // already halved for [0,1]
  }
  return r;
}

const GaussRule& cached_rule(int n) {
  static const GaussRule g4 = gauss_rule(4);
  static const GaussRule g8 = gauss_rule(8);
  static const GaussRule g2 = gauss_rule(2);
  static const GaussRule g6 = gauss_rule(6);
  if (n <= 2) return g2;
  if (n <= 4) return g4;
  if (n <= 6) return g6;
  return g8;
}

struct QuadPoint {
  Eigen::Vector3d r;
  double u, v;
  double w;  // weight including cell area
};

std::vector<QuadPoint> cell_quadrature(const Cell& c, int order) {
  const GaussRule& g = cached_rule(order);
  std::vector<QuadPoint> pts;
  pts.reserve(g.x.size() * g.x.size());
  const double area = c.area();
  for (size_t i = 0; i < g.x.size(); ++i)
    for (size_t j = 0; j < g.x.size(); ++j) {
      QuadPoint p;
      p.u = g.x[i];
      p.v = g.x[j];
      p.w = g.w[i] * g.w[j] * area;
      p.r = c.point(p.u, p.v);
      pts.push_back(p);
    }
  return pts;
}

// Analytic potentials of a rectangle: integrals of {1, u', v'}/R over the
// cell, with (u', v') the cell's local coordinates in [0,1].
Eigen::Vector3d static_moments(const Cell& c, const Eigen::Vector3d& robs) {
  const double L1 = c.len_u(), L2 = c.len_v();
  const Eigen::Vector3d xh = c.edge_u / L1;
  const Eigen::Vector3d yh = c.edge_v / L2;
  const Eigen::Vector3d zh = xh.cross(yh);
  const Eigen::Vector3d p = robs - c.origin;
  const double px = p.dot(xh), py = p.dot(yh), w0 = std::abs(p.dot(zh));
  const double scale = std::max(L1, L2);

  const double uu[2] = {-px, L1 - px};
  const double vv[2] = {-py, L2 - py};

  // coef * ln(a + R) with (a + R)(R - a) = b2 used to stabilize a ~ -R;
  // coef_scale sets the magnitude below which the term is exactly zero.
  auto logterm = [](double coef, double a, double b2, double R,
                    double coef_scale) {
    if (std::abs(coef) < 1e-13 * coef_scale) return 0.0;
    double val = a + R;
    if (val < 1e-12 * R) val = b2 / (R - a);
    return coef * std::log(val);
  };

  double I0 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double u = uu[i], v = vv[j];
      const double R = std::sqrt(u * u + v * v + w0 * w0);
      const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      double f = logterm(u, v, u * u + w0 * w0, R, scale) +
                 logterm(v, u, v * v + w0 * w0, R, scale);
      if (w0 > 1e-13 * scale) f -= w0 * std::atan2(u * v, w0 * R);
      I0 += sgn * f;
    }

  auto edge_int = [&](double a, double c1, double c2) {
    // int_{c1}^{c2} sqrt(a^2 + t^2 + w0^2) dt
    const double b2 = a * a + w0 * w0;
    auto prim = [&](double t) {
      const double R = std::sqrt(b2 + t * t);
      return 0.5 * (t * R + logterm(b2, t, b2, R, scale * scale));
    };
    return prim(c2) - prim(c1);
  };

  const double Ix_rel = edge_int(uu[1], vv[0], vv[1]) - edge_int(uu[0], vv[0], vv[1]);
  const double Iy_rel = edge_int(vv[1], uu[0], uu[1]) - edge_int(vv[0], uu[0], uu[1]);

  const double Ix = Ix_rel + px * I0;  // integral of x'/R, x' in [0, L1]
  const double Iy = Iy_rel + py * I0;
  return {I0, Ix / L1, Iy / L2};
}

// Rooftop half in assembly form.
struct Half {
  int basis;
  Eigen::Vector3d flow_over_w;  // flow unit vector / edge width
  double q;                     // signed constant charge 1/(w h)
  Eigen::Vector3d alpha;        // T(u, v) = alpha . (1, u, v)
};

Half make_half(const Mesh& mesh, int basis_id, const RooftopHalf& h,
               double edge_length) {
  const Cell& c = mesh.cells[h.cell];
  const Eigen::Vector3d axis_vec = (h.axis == 0) ? c.edge_u : c.edge_v;
  const double hlen = axis_vec.norm();
  const double dir = h.sign * (h.shared_at_one ? 1.0 : -1.0);
  Half out;
  out.basis = basis_id;
  out.flow_over_w = dir * axis_vec / hlen / edge_length;
  out.q = h.sign / (edge_length * hlen);
  if (h.shared_at_one)
    out.alpha = (h.axis == 0) ? Eigen::Vector3d(0, 1, 0) : Eigen::Vector3d(0, 0, 1);
  else
    out.alpha = (h.axis == 0) ? Eigen::Vector3d(1, -1, 0) : Eigen::Vector3d(1, 0, -1);
  return out;
}

struct Moments {
  Eigen::Matrix3cd g;  // moments of exp(-jkR)/R against (1,u,v) x (1,u',v')
  Eigen::Matrix3cd e;  // moments of exp(-jkR)
};

Moments pair_moments(const Cell& ci, const Cell& cj, double k, int order_i,
                     int order_j, bool extract) {
  Moments m;
  m.g.setZero();
  m.e.setZero();
  const auto qi = cell_quadrature(ci, order_i);
  const auto qj = cell_quadrature(cj, order_j);

  for (const auto& po : qi) {
    const Eigen::Vector3d Po(1.0, po.u, po.v);
    Eigen::Matrix3cd accg = Eigen::Matrix3cd::Zero();
    Eigen::Matrix3cd acce = Eigen::Matrix3cd::Zero();
    for (const auto& ps : qj) {
      const double R = (po.r - ps.r).norm();
      const double kR = k * R;
      const double cR = std::cos(kR), sR = std::sin(kR);
      Cplx gk, ek(cR, -sR);
      if (!extract) {
        gk = Cplx(cR / R, -sR / R);
      } else if (kR < 1e-5) {
        gk = Cplx(-0.5 * k * kR * (1.0 - kR * kR / 12.0),
                  -k * (1.0 - kR * kR / 6.0));
      } else {
        gk = Cplx((cR - 1.0) / R, -sR / R);
      }
      const Eigen::Vector3d Ps(1.0, ps.u, ps.v);
      const Eigen::Matrix3d outer = Po * Ps.transpose() * ps.w;
      accg += gk * outer;
      acce += ek * outer;
    }
    if (extract) {
      const Eigen::Vector3d s3 = static_moments(cj, po.r);
      accg += (Po * s3.transpose()).cast<Cplx>();
    }
    m.g += po.w * accg;
    m.e += po.w * acce;
  }
  return m;
}

}  // namespace

int default_lmax(const Mesh& mesh, double k) {
  const double ka = k * mesh.bounding_radius();
  return static_cast<int>(std::ceil(ka)) + 8;
}

namespace {

// Assembles Z and/or W_x in one sweep over unordered cell pairs.
void assemble_zw(const Mesh& mesh, double k, const AssemblyOptions& opts,
                 Eigen::MatrixXcd* Z, Eigen::MatrixXd* Wx) {
  if (k <= 0.0) throw std::invalid_argument("wavenumber must be positive");
  const int M = mesh.basis_count();
  if (M == 0) throw std::invalid_argument("mesh has no basis functions");
  if (Z) Z->setZero(M, M);
  if (Wx) Wx->setZero(M, M);

  // Per-cell lists of attached rooftop halves.
  std::vector<std::vector<Half>> on_cell(mesh.cells.size());
  for (int n = 0; n < M; ++n) {
    const Basis& b = mesh.bases[n];
    on_cell[b.plus.cell].push_back(make_half(mesh, n, b.plus, b.edge_length));
    on_cell[b.minus.cell].push_back(make_half(mesh, n, b.minus, b.edge_length));
  }

  const double z0 = kVacuumImpedance;
  const double cz = k * z0 / (4.0 * M_PI);        // Z prefactor (times j)
  const double cw = z0 / (8.0 * M_PI);            // W_x prefactor
  const double diag = mesh.max_cell_diag();
  const int nc = static_cast<int>(mesh.cells.size());

  for (int ci = 0; ci < nc; ++ci) {
    if (on_cell[ci].empty()) continue;
    for (int cj = ci; cj < nc; ++cj) {
      if (on_cell[cj].empty()) continue;
      const double dist =
          (mesh.cells[ci].center() - mesh.cells[cj].center()).norm();
      const bool touching = dist < 1.2 * diag;
      const bool extract = dist < opts.near_factor * diag;
      const int order = touching ? opts.quad_order_near : opts.quad_order;
      const Moments mom =
          pair_moments(mesh.cells[ci], mesh.cells[cj], k, order, order, extract);

      auto add_pair = [&](const Half& a, const Half& b) {
        const double cf = a.flow_over_w.dot(b.flow_over_w);
        const double qq = a.q * b.q;
        const Cplx A = a.alpha.transpose().cast<Cplx>() * mom.g * b.alpha.cast<Cplx>();
        if (Z) {
          const Cplx B = mom.g(0, 0);
          const Cplx val = Cplx(0.0, cz) * (cf * A - qq * B / (k * k));
          (*Z)(a.basis, b.basis) += val;
          if (a.basis != b.basis || &a != &b) (*Z)(b.basis, a.basis) += val;
        }
        if (Wx) {
          const Cplx C = a.alpha.transpose().cast<Cplx>() * mom.e * b.alpha.cast<Cplx>();
          const double val =
              cw * (k * cf * A.real() + qq * mom.g(0, 0).real() / k +
                    k * k * cf * C.imag() - qq * mom.e(0, 0).imag());
          (*Wx)(a.basis, b.basis) += val;
          if (a.basis != b.basis || &a != &b) (*Wx)(b.basis, a.basis) += val;
        }
      };

      if (ci == cj) {
        const auto& hs = on_cell[ci];
        for (size_t ia = 0; ia < hs.size(); ++ia)
          for (size_t ib = ia; ib < hs.size(); ++ib) add_pair(hs[ia], hs[ib]);
      } else {
        for (const Half& a : on_cell[ci])
          for (const Half& b : on_cell[cj]) add_pair(a, b);
      }
    }
  }
}

}  // namespace

Eigen::MatrixXcd assemble_impedance(const Mesh& mesh, double k,
                                    const AssemblyOptions& opts) {
  Eigen::MatrixXcd Z;
  assemble_zw(mesh, k, opts, &Z, nullptr);
  return Z;
}

Eigen::MatrixXd assemble_stored_energy(const Mesh& mesh, double k,
                                       const AssemblyOptions& opts) {
  Eigen::MatrixXd Wx;
  assemble_zw(mesh, k, opts, nullptr, &Wx);
  return Wx;
}

Eigen::MatrixXd assemble_spherical_projection(const Mesh& mesh, double k,
                                              int lmax,
                                              const AssemblyOptions& opts) {
  if (lmax < 1) throw std::invalid_argument("lmax must be >= 1");
  const int M = mesh.basis_count();
  const int L = sph_mode_count(lmax);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(L, M);
  const double scale = k * std::sqrt(kVacuumImpedance);

  std::vector<Eigen::Vector3d> waves;
  for (int n = 0; n < M; ++n) {
    const Basis& b = mesh.bases[n];
    for (const RooftopHalf* rh : {&b.plus, &b.minus}) {
      const Half h = make_half(mesh, n, *rh, b.edge_length);
      for (const auto& p : cell_quadrature(mesh.cells[rh->cell], opts.quad_order)) {
        const double T = h.alpha.dot(Eigen::Vector3d(1.0, p.u, p.v));
        const Eigen::Vector3d cur = (T * p.w) * h.flow_over_w;
        eval_regular_waves(lmax, k, p.r, waves);
        for (int a = 0; a < L; ++a) S(a, n) += scale * cur.dot(waves[a]);
      }
    }
  }
  return S;
}

OperatorSet assemble_operators(const Mesh& mesh, double k,
                               const AssemblyOptions& opts) {
  OperatorSet op;
  op.k = k;
  op.opts = opts;
  op.lmax = opts.lmax > 0 ? opts.lmax : default_lmax(mesh, k);
  Eigen::MatrixXcd Z;
  assemble_zw(mesh, k, opts, &Z, &op.Wx);
  op.R = Z.real();
  op.X = Z.imag();
  op.S = assemble_spherical_projection(mesh, k, op.lmax, opts);
  return op;
}

StoredEnergyPair stored_energies(const OperatorSet& op,
                                 const Eigen::VectorXcd& J) {
  const Eigen::MatrixXd& X = op.X;
  const Eigen::MatrixXd& Wx = op.Wx;
  const double wdx = std::real(J.dot(Wx * J));  // J^H (omega dX/domega / 2) J
  const double xq = std::real(J.dot(X * J));
  return {(2.0 * wdx + xq) / 8.0, (2.0 * wdx - xq) / 8.0};
}

double compute_Q(const OperatorSet& op, const Eigen::VectorXcd& J,
                 bool tuned) {
  const double pr = 0.5 * std::real(J.dot(op.R * J));
  if (pr <= 0.0)
    throw std::runtime_error("compute_Q: radiated power is not positive");
  const auto [wm, we] = stored_energies(op, J);
  double q = (wm + we) / pr;
  if (tuned) q += std::abs(wm - we) / pr;
  return q;
}

double factorization_error(const Eigen::MatrixXd& R, const Eigen::MatrixXd& S) {
  return (R - S.transpose() * S).norm() / R.norm();
}

}  // namespace mimoq
