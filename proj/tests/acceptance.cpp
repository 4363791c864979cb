// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Heavier than the unit suite (full-size sub-region plate,
// 500-realization Monte Carlo) but still desk scale.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mimoq/capacity.hpp"
#include "mimoq/efie.hpp"
#include "mimoq/geometry.hpp"
#include "mimoq/modes.hpp"
#include "mimoq/oracle.hpp"
#include "mimoq/reduction.hpp"
#include "mimoq/runner.hpp"

using namespace mimoq;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("%s: criterion %2d  %s  (%s)\n", ok ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void criterion(int id, const std::string& what,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(id, what, ok, detail);
}

std::string fmtv(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr double kK = 2.0 * M_PI;

PortSystem dipole_pair(double d_over_l, double rotation = 0.0) {
  ArraySpec as;
  as.count = 2;
  as.spacing = d_over_l * as.element.length;
  as.rotation = rotation;
  const ArrayMesh am = build_array(as);
  const OperatorSet op = assemble_operators(am.mesh, kK);
  return port_reduce(op, am.ports);
}

Eigen::VectorXd pair_eigs(double d_over_l, double rotation = 0.0) {
  return energy_modes_port(dipole_pair(d_over_l, rotation)).eigenvalues;
}

double capacity_at(const Eigen::VectorXd& w, double Q, double gamma) {
  ChannelSpectrum cs;
  cs.w = w;
  cs.Q = Q;
  cs.gamma = gamma;
  return dual_capacity(cs).C;
}

Eigen::VectorXd plate_energy_eigs(double ka, int n) {
  PlateSpec ps;
  ps.ka = ka;
  const OperatorSet op = assemble_operators(build_plate(ps), ps.k);
  return energy_modes_current(op).eigenvalues.head(n);
}

}  // namespace

int main() {
  criterion(1, "synthetic dual solver", [](std::string& d) {
    ChannelSpectrum cs;
    cs.w = Eigen::VectorXd::Zero(5);
    cs.w << 1e-2, 1e-1, 1.0, 10.0, 100.0;
    cs.Q = 1.0;
    const double targets[3] = {22.1, 4.5, 1.9};
    const double gammas[3] = {2.0, 20.0, 200.0};
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      cs.gamma = gammas[i];
      const CapacitySolution s = dual_capacity(cs);
      d += "nu(" + fmtv(gammas[i]) + ")=" + fmtv(s.nu_star) + " ";
      ok = ok && std::abs(s.nu_star - targets[i]) <= 0.05 * targets[i];
      if (i < 2) ok = ok && s.a(4) == 0.0;  // stiffest mode unallocated
    }
    return ok;
  });

  criterion(2, "equal-power asymptotes", [](std::string& d) {
    const double c1 = equal_power_C(1, 20.0);
    const double c2 = equal_power_C(2, 20.0);
    d = "C1=" + fmtv(c1) + " C2=" + fmtv(c2);
    return std::abs(c1 - std::log2(21.0)) < 1e-12 &&
           std::abs(c2 - 2.0 * std::log2(11.0)) < 1e-12;
  });

  Eigen::VectorXd w_pair;  // reused by criteria 4 and 11
  criterion(3, "two-dipole energy modes", [&](std::string& d) {
    w_pair = pair_eigs(0.3);
    d = "w1=" + fmtv(w_pair(0)) + " w2=" + fmtv(w_pair(1));
    bool ok = w_pair(0) >= 2.5 && w_pair(0) <= 3.1 && w_pair(1) >= 28.0 &&
              w_pair(1) <= 34.0;
    // the in-phase/out-of-phase crossings sit near d/L = 0.9 and 1.9; their
    // exact locations shift slightly with discretization, so search locally
    for (double d0 : {0.9, 1.9}) {
      double rel_min = std::numeric_limits<double>::infinity();
      double at = d0;
      for (double dl = d0 - 0.1; dl <= d0 + 0.1 + 1e-12; dl += 0.01) {
        const Eigen::VectorXd w = pair_eigs(dl);
        const double rel = std::abs(w(1) - w(0)) / w(0);
        if (rel < rel_min) {
          rel_min = rel;
          at = dl;
        }
      }
      d += " deg(" + fmtv(at) + ")=" + fmtv(rel_min);
      ok = ok && rel_min < 0.05;
    }
    return ok;
  });

  criterion(4, "two-dipole capacity", [&](std::string& d) {
    if (w_pair.size() == 0) w_pair = pair_eigs(0.3);
    ChannelSpectrum cs;
    cs.w = w_pair;
    cs.gamma = 20.0;
    cs.Q = 0.99 * w_pair(0);
    const bool infeasible_below = !dual_capacity(cs).feasible;
    const double c31 = capacity_at(w_pair, 31.0, 20.0);
    const double c_at_w1 = capacity_at(w_pair, 1.001 * w_pair(0), 20.0);
    d = "C(31)=" + fmtv(c31) + " C(w1+)=" + fmtv(c_at_w1);
    return infeasible_below && std::abs(c31 - 6.9) <= 0.2 &&
           std::abs(c_at_w1 - std::log2(21.0)) < 0.1;
  });

  criterion(5, "crossed dipoles", [](std::string& d) {
    const Eigen::VectorXd w = pair_eigs(0.3, M_PI / 2);
    const double c = capacity_at(w, 1e3, 20.0);
    d = "w1=" + fmtv(w(0)) + " w2=" + fmtv(w(1)) + " C=" + fmtv(c);
    return std::abs(w(1) - w(0)) / w(0) < 0.02 && std::abs(c - 6.9) <= 0.2;
  });

  criterion(6, "single dipole Q", [](std::string& d) {
    const Mesh mesh = build_dipole(StripDipoleSpec{});
    const OperatorSet op = assemble_operators(mesh, kK);
    const double q = energy_modes_current(op).eigenvalues(0);
    d = "Q=" + fmtv(q);
    return std::abs(q - 5.0) <= 0.15 * 5.0;
  });

  Eigen::VectorXd w_plate;  // reused by criterion 11
  criterion(7, "plate modes and small-ka slope", [&](std::string& d) {
    w_plate = plate_energy_eigs(1.0, 8);
    d = "W1..3=" + fmtv(w_plate(0)) + "," + fmtv(w_plate(1)) + "," +
        fmtv(w_plate(2));
    bool ok = std::abs(w_plate(0) - 4.0) <= 0.6 &&
              std::abs(w_plate(1) - 9.0) <= 1.35 &&
              std::abs(w_plate(2) - 15.0) <= 2.25;
    // log-log fit of W1 over ka in [0.2, 0.5]
    const std::vector<double> kas = {0.2, 0.3, 0.4, 0.5};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double ka : kas) {
      const double x = std::log(ka);
      const double y = std::log(plate_energy_eigs(ka, 1)(0));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const int n = static_cast<int>(kas.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    d += " slope=" + fmtv(slope);
    return ok && std::abs(slope - (-3.0)) <= 0.2;
  });

  criterion(8, "characteristic-vs-energy overlap", [](std::string& d) {
    PlateSpec ps;
    const OperatorSet op = assemble_operators(build_plate(ps), ps.k);
    const ModeSpectrum en = energy_modes_current(op);
    const ModeSpectrum ch = characteristic_modes(op);
    bool ok = true;
    for (int m = 0; m < 3; ++m) {
      const double rq = rayleigh_quotient_energy(op, ch.eigenvectors.col(m));
      d += fmtv(rq) + "/" + fmtv(en.eigenvalues(m)) + " ";
      ok = ok && std::abs(rq - en.eigenvalues(m)) <= 0.20 * en.eigenvalues(m);
    }
    return ok;
  });

  criterion(9, "sub-region ordering", [](std::string& d) {
    PlateSpec ps;
    ps.cells_x = 40;
    ps.cells_y = 20;
    const Mesh mesh = build_plate(ps);
    const OperatorSet op = assemble_operators(mesh, ps.k);
    auto w1 = [&](const std::string& case_id) {
      const SubregionMask mask = make_subregion_mask(mesh, ps, case_id);
      return energy_modes_current(subregion_reduce(op, mask)).eigenvalues(0);
    };
    const double full = w1("full");
    const double e = w1("E");
    d = "full=" + fmtv(full) + " E=" + fmtv(e);
    bool ok = e < 2.0 * full && e >= full * (1.0 - 1e-9);
    const double factor_e = e / full;
    double prev = 1e300;
    for (const std::string c : {"A", "B", "D"}) {
      const double w = w1(c);
      d += " " + c + "=" + fmtv(w);
      ok = ok && (w / full > factor_e);
      // enlarging the controlled set (A within B within D) never hurts
      ok = ok && w <= prev * (1.0 + 1e-9);
      prev = w;
    }
    ok = ok && full <= prev * (1.0 + 1e-9);
    const double c = w1("C");
    d += " C=" + fmtv(c);
    ok = ok && (c / full > factor_e);
    return ok;
  });

  criterion(10, "duality-gap certificate", [](std::string& d) {
    const fs::path out = fs::temp_directory_path() / "mimoq_acceptance_verify";
    fs::create_directories(out);
    RunOptions opt;
    opt.out_dir = out.string();
    const RunReport rep = run_verify(opt);
    std::string gaps_path;
    for (const std::string& p : rep.outputs)
      if (p.find("gaps") != std::string::npos) gaps_path = p;
    std::ifstream f(gaps_path);
    std::string line;
    std::getline(f, line);  // header
    bool ok = !gaps_path.empty();
    double worst = 0.0;
    int rows = 0;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      ++rows;
      std::istringstream ss(line);
      std::string name, cp, cd, gap;
      std::getline(ss, name, ',');
      std::getline(ss, cp, ',');
      std::getline(ss, cd, ',');
      std::getline(ss, gap, ',');
      const double cprimal = std::stod(cp), cdual = std::stod(cd);
      const double g = std::stod(gap);
      worst = std::max(worst, std::abs(g));
      ok = ok && std::abs(g) < 1e-4;
      ok = ok && cprimal <= cdual + 1e-9;  // weak duality
    }
    d = "instances=" + std::to_string(rows) + " worst=" + fmtv(worst);
    return ok && rows >= 4;
  });

  criterion(11, "ergodic bands", [&](std::string& d) {
    bool ok = true;
    // two-dipole port system
    {
      const PortSystem ps = dipole_pair(0.3);
      const ModeSpectrum ms = energy_modes_port(ps);
      const Eigen::MatrixXcd U = radiation_patterns(ps.s, ms.eigenvectors);
      const std::vector<double> qs = {3.0, 10.0, 31.0, 100.0, 200.0};
      for (double Q : qs) {
        if (Q < ms.eigenvalues(0)) continue;
        const double det = capacity_at(ms.eigenvalues, Q, 20.0);
        const ErgodicResult e =
            ergodic_capacity(U, ms.eigenvalues, Q, 20.0, 500, 1);
        if (std::abs(det - e.mean) > e.stddev) {
          ok = false;
          d += "dipole Q=" + fmtv(Q) + " off-band ";
        }
      }
      d += "dipole done; ";
    }
    // ka = 1 plate, leading 8 energy modes
    {
      PlateSpec ps;
      const OperatorSet op = assemble_operators(build_plate(ps), ps.k);
      const ModeSpectrum ms = energy_modes_current(op);
      const int n = 8;
      const Eigen::VectorXd w = ms.eigenvalues.head(n);
      const Eigen::MatrixXcd U =
          radiation_patterns(op.S, ms.eigenvectors.leftCols(n));
      const std::vector<double> qs = {5.0, 10.0, 30.0, 100.0, 300.0};
      for (double Q : qs) {
        if (Q < w(0)) continue;
        const double det = capacity_at(w, Q, 20.0);
        const ErgodicResult e = ergodic_capacity(U, w, Q, 20.0, 500, 1);
        if (std::abs(det - e.mean) > e.stddev) {
          ok = false;
          d += "plate Q=" + fmtv(Q) + " off-band ";
        }
      }
      d += "plate done";
    }
    return ok;
  });

  criterion(12, "numerical self-consistency", [](std::string& d) {
    const Mesh mesh = build_dipole(StripDipoleSpec{});
    const OperatorSet op = assemble_operators(mesh, kK);
    bool ok = true;

    const Eigen::MatrixXcd Z = op.impedance();
    const double recip = (Z - Z.transpose()).norm() / Z.norm();
    ok = ok && recip < 1e-10;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.R);
    ok = ok && es.eigenvalues().minCoeff() >
                   -1e-8 * es.eigenvalues().maxCoeff();

    const double fact = factorization_error(op.R, op.S);
    ok = ok && fact < 1e-3;

    const double e = 1e-5;
    const Eigen::MatrixXd Xp = assemble_impedance(mesh, kK * (1 + e)).imag();
    const Eigen::MatrixXd Xm = assemble_impedance(mesh, kK * (1 - e)).imag();
    const double fd =
        (op.Wx - (Xp - Xm) / (4.0 * e)).norm() / op.Wx.norm();
    ok = ok && fd < 1e-4;

    Eigen::VectorXd sigma2(4);
    sigma2 << 2.0, 1.1, 0.4, 0.05;
    const WaterfillResult wf = waterfill(sigma2, 10.0);
    double kkt = 0.0;
    for (int i = 0; i < 4; ++i)
      if (wf.a(i) > 0.0)
        kkt = std::max(kkt,
                       std::abs(wf.a(i) + 1.0 / (10.0 * sigma2(i)) - wf.mu));
    ok = ok && kkt < 1e-8;

    // congruence invariance: transform the port basis, eigenvalues stay
    const PortSystem ps = dipole_pair(0.3);
    Eigen::Matrix2cd P;
    P << std::complex<double>(1.3, 0.2), std::complex<double>(-0.4, 0.9),
        std::complex<double>(0.1, -0.7), std::complex<double>(0.8, 0.3);
    const ModeSpectrum m1 = gevp_whitened(ps.wx, ps.r);
    const ModeSpectrum m2 =
        gevp_whitened(P.adjoint() * ps.wx * P, P.adjoint() * ps.r * P);
    double cong = 0.0;
    for (int i = 0; i < m1.count(); ++i)
      cong = std::max(cong, std::abs(m1.eigenvalues(i) - m2.eigenvalues(i)) /
                                m1.eigenvalues(i));
    ok = ok && cong < 1e-8;

    const Eigen::MatrixXcd h1 = draw_rayleigh_channel(6, 42, 7);
    const Eigen::MatrixXcd h2 = draw_rayleigh_channel(6, 42, 7);
    const bool seeds = (h1.array() == h2.array()).all();
    ok = ok && seeds;

    d = "recip=" + fmtv(recip) + " fact=" + fmtv(fact) + " fd=" + fmtv(fd) +
        " kkt=" + fmtv(kkt) + " cong=" + fmtv(cong) +
        (seeds ? " seeds=bit-exact" : " seeds=MISMATCH");
    return ok;
  });

  criterion(13, "array trends", [](std::string& d) {
    bool ok = true;
    // w1 never increases as elements are added (d/L = 0.5)
    double prev = 1e300;
    for (int count : {1, 2, 4, 7, 10}) {
      ArraySpec as;
      as.count = count;
      as.spacing = 0.5 * as.element.length;
      const ArrayMesh am = build_array(as);
      const OperatorSet op = assemble_operators(am.mesh, kK);
      const double w1 =
          count == 1
              ? energy_modes_current(op).eigenvalues(0)
              : energy_modes_port(port_reduce(op, am.ports)).eigenvalues(0);
      d += "w1(" + std::to_string(count) + ")=" + fmtv(w1) + " ";
      ok = ok && w1 <= prev * (1.0 + 1e-9);
      prev = w1;
    }
    // 10-element array at d/L = 0.7 approaches the ideal ceiling
    ArraySpec as;
    as.count = 10;
    as.spacing = 0.7 * as.element.length;
    const ArrayMesh am = build_array(as);
    const OperatorSet op = assemble_operators(am.mesh, kK);
    const ModeSpectrum ms = energy_modes_port(port_reduce(op, am.ports));
    ChannelSpectrum cs;
    cs.w = ms.eigenvalues;
    cs.Q = 1e4;
    cs.gamma = 20.0;
    const double c = dual_capacity(cs).C;
    const double ideal = equal_power_C(10, 20.0);
    d += "C(1e4)=" + fmtv(c) + " ideal=" + fmtv(ideal);
    ok = ok && std::abs(c - ideal) <= 0.10 * ideal;
    return ok;
  });

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
