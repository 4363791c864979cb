#include "mimoq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mimoq {

double Mesh::bounding_radius() const {
  double r = 0.0;
  for (const auto& n : nodes) r = std::max(r, n.norm());
  return r;
}

double Mesh::max_cell_diag() const {
  double d = 0.0;
  for (const auto& c : cells) d = std::max(d, (c.edge_u + c.edge_v).norm());
  return d;
}

void Mesh::validate() const {
  if (bases.empty()) throw std::runtime_error("mesh has no basis functions");
  const int nc = static_cast<int>(cells.size());
  for (const auto& c : cells) {
    if (std::abs(c.edge_u.dot(c.edge_v)) > 1e-10 * c.edge_u.norm() * c.edge_v.norm())
      throw std::runtime_error("non-rectangular cell");
  }
  for (const auto& b : bases) {
    for (const RooftopHalf* h : {&b.plus, &b.minus}) {
      if (h->cell < 0 || h->cell >= nc)
        throw std::runtime_error("basis references missing cell");
      if (h->axis != 0 && h->axis != 1)
        throw std::runtime_error("bad basis axis");
    }
    // The two halves must meet along a full common edge.
    auto edge_of = [&](const RooftopHalf& h) {
      const Cell& c = cells[h.cell];
      const Eigen::Vector3d along = (h.axis == 0) ? c.edge_v : c.edge_u;
      const Eigen::Vector3d dir = (h.axis == 0) ? c.edge_u : c.edge_v;
      Eigen::Vector3d start = c.origin;
      if (h.shared_at_one) start += dir;
      return std::pair<Eigen::Vector3d, Eigen::Vector3d>(start, start + along);
    };
    auto [p0, p1] = edge_of(b.plus);
    auto [q0, q1] = edge_of(b.minus);
    const double tol = 1e-10 * b.edge_length;
    const bool same = ((p0 - q0).norm() < tol && (p1 - q1).norm() < tol) ||
                      ((p0 - q1).norm() < tol && (p1 - q0).norm() < tol);
    if (!same) throw std::runtime_error("basis halves do not share a full edge");
    if (std::abs((p1 - p0).norm() - b.edge_length) > tol)
      throw std::runtime_error("basis edge length inconsistent");
  }
  // Duplicate node check, brute force (meshes are desk-scale).
  double h = max_cell_diag();
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t j = i + 1; j < nodes.size(); ++j)
      if ((nodes[i] - nodes[j]).norm() < 1e-10 * h)
        throw std::runtime_error("duplicate mesh nodes");
}

std::string Mesh::to_text() const {
  std::ostringstream os;
  os << "nodes " << nodes.size() << "\n";
  for (const auto& n : nodes) os << n.x() << " " << n.y() << " " << n.z() << "\n";
  os << "cells " << cells.size() << "\n";
  for (const auto& c : cells)
    os << c.nodes[0] << " " << c.nodes[1] << " " << c.nodes[2] << " " << c.nodes[3] << "\n";
  os << "bases " << bases.size() << "\n";
  for (const auto& b : bases)
    os << b.plus.cell << " " << b.minus.cell << " axis " << b.plus.axis
       << " width " << b.edge_length << "\n";
  return os.str();
}

int SubregionMask::controlled_count() const {
  return static_cast<int>(std::count(controlled.begin(), controlled.end(), true));
}

namespace {

void check_dipole_spec(const StripDipoleSpec& s) {
  if (s.length <= 0.0) throw std::invalid_argument("dipole length must be positive");
  if (s.aspect < 10.0)
    throw std::invalid_argument("thin-strip violation: L/W must be >= 10");
  if (std::abs(s.axis.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("dipole axis must be unit norm");
  if (s.cells_along_length < 2)
    throw std::invalid_argument("degenerate mesh: need at least 2 cells along length");
}

Eigen::Vector3d width_direction(const Eigen::Vector3d& axis) {
  Eigen::Vector3d ref = Eigen::Vector3d::UnitX();
  if (std::abs(ref.dot(axis)) > 0.9) ref = Eigen::Vector3d::UnitY();
  return (ref - ref.dot(axis) * axis).normalized();
}

// Appends a strip dipole to an existing mesh, returns index of its
// central basis function.
int append_dipole(Mesh& m, const StripDipoleSpec& s) {
  check_dipole_spec(s);
  const int nc = s.cells_along_length;
  const double width = s.length / s.aspect;
  const double h = s.length / nc;
  const Eigen::Vector3d wdir = width_direction(s.axis);
  const Eigen::Vector3d corner =
      s.center - 0.5 * s.length * s.axis - 0.5 * width * wdir;

  const int node0 = static_cast<int>(m.nodes.size());
  for (int i = 0; i <= nc; ++i) {
    m.nodes.push_back(corner + i * h * s.axis);
    m.nodes.push_back(corner + i * h * s.axis + width * wdir);
  }
  const int cell0 = static_cast<int>(m.cells.size());
  for (int i = 0; i < nc; ++i) {
    Cell c;
    c.origin = corner + i * h * s.axis;
    c.edge_u = h * s.axis;
    c.edge_v = width * wdir;
    c.nodes = {node0 + 2 * i, node0 + 2 * (i + 1), node0 + 2 * (i + 1) + 1,
               node0 + 2 * i + 1};
    m.cells.push_back(c);
  }
  const int basis0 = static_cast<int>(m.bases.size());
  for (int i = 0; i + 1 < nc; ++i) {
    Basis b;
    b.plus = {cell0 + i, 0, true, +1.0};
    b.minus = {cell0 + i + 1, 0, false, -1.0};
    b.edge_length = width;
    m.bases.push_back(b);
  }
  const int nb = nc - 1;
  return basis0 + (nb - 1) / 2;  // exact center for odd nb (even cell count)
}

}  // namespace

Mesh build_dipole(const StripDipoleSpec& spec) {
  Mesh m;
  append_dipole(m, spec);
  return m;
}

ArrayMesh build_array(const ArraySpec& spec) {
  check_dipole_spec(spec.element);
  if (spec.count < 1) throw std::invalid_argument("array needs at least 1 element");
  const double width = spec.element.length / spec.element.aspect;
  if (spec.count > 1) {
    if (spec.spacing <= 0.0)
      throw std::invalid_argument("array spacing must be positive");
    if (spec.spacing < width)
      throw std::invalid_argument("geometric overlap: spacing smaller than strip width");
  }

  ArrayMesh am;
  for (int n = 0; n < spec.count; ++n) {
    StripDipoleSpec el = spec.element;
    const double x = (n - 0.5 * (spec.count - 1)) * spec.spacing;
    el.center = Eigen::Vector3d(x, 0.0, 0.0) + spec.element.center;
    if (n % 2 == 1 && spec.rotation != 0.0) {
      Eigen::AngleAxisd rot(spec.rotation, Eigen::Vector3d::UnitX());
      el.axis = rot * spec.element.axis;
    }
    am.ports.push_back(append_dipole(am.mesh, el));
  }
  return am;
}

double plate_side_length(const PlateSpec& spec) {
  if (spec.ka <= 0.0 || spec.k <= 0.0)
    throw std::invalid_argument("plate ka and k must be positive");
  const double a = spec.ka / spec.k;
  return 4.0 * a / std::sqrt(5.0);  // a = sqrt(l^2 + (l/2)^2) / 2
}

Mesh build_plate(const PlateSpec& spec) {
  if (spec.cells_x < 1 || spec.cells_y < 1)
    throw std::invalid_argument("plate cell counts must be positive");
  if (spec.cells_x < 2 && spec.cells_y < 2)
    throw std::invalid_argument("degenerate mesh: 1x1 plate has no interior edges");
  const double l = plate_side_length(spec);
  const int nx = spec.cells_x, ny = spec.cells_y;
  const double dx = l / nx, dy = 0.5 * l / ny;
  const double x0 = -0.5 * l, y0 = -0.25 * l;

  Mesh m;
  auto node_id = [&](int i, int j) { return i * (ny + 1) + j; };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      m.nodes.emplace_back(x0 + i * dx, y0 + j * dy, 0.0);

  auto cell_id = [&](int i, int j) { return i * ny + j; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      Cell c;
      c.origin = Eigen::Vector3d(x0 + i * dx, y0 + j * dy, 0.0);
      c.edge_u = Eigen::Vector3d(dx, 0.0, 0.0);
      c.edge_v = Eigen::Vector3d(0.0, dy, 0.0);
      c.nodes = {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1),
                 node_id(i, j + 1)};
      m.cells.push_back(c);
    }

  // x-directed rooftops on interior vertical edges
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      Basis b;
      b.plus = {cell_id(i, j), 0, true, +1.0};
      b.minus = {cell_id(i + 1, j), 0, false, -1.0};
      b.edge_length = dy;
      m.bases.push_back(b);
    }
  // y-directed rooftops on interior horizontal edges
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) {
      Basis b;
      b.plus = {cell_id(i, j), 1, true, +1.0};
      b.minus = {cell_id(i, j + 1), 1, false, -1.0};
      b.edge_length = dx;
      m.bases.push_back(b);
    }
  return m;
}

std::vector<MaskRect> subregion_case_rects(const PlateSpec& spec,
                                           const std::string& case_id) {
  const double l = plate_side_length(spec);
  const double rx = 0.1 * l, ry = 0.05 * l;  // element size, cases A-D
  const double x0 = -0.5 * l, x1 = 0.5 * l;
  const double y0 = -0.25 * l, y1 = 0.25 * l;
  // Placements flush to the plate corners/edges. Coordinates are meters in
  // the plate plane; the long side runs along x.
  const MaskRect bl{x0, x0 + rx, y0, y0 + ry};
  const MaskRect br{x1 - rx, x1, y0, y0 + ry};
  const MaskRect tl{x0, x0 + rx, y1 - ry, y1};
  const MaskRect tr{x1 - rx, x1, y1 - ry, y1};
  if (case_id == "A") return {bl};
  if (case_id == "B") return {bl, tr};  // diagonally placed pair
  if (case_id == "C") return {bl, br};  // pair on the same long edge
  if (case_id == "D") return {bl, br, tl, tr};
  if (case_id == "E") {
    const double w = 0.05 * l;  // closed loop strip along the perimeter
    return {{x0, x1, y0, y0 + w},
            {x0, x1, y1 - w, y1},
            {x0, x0 + w, y0, y1},
            {x1 - w, x1, y0, y1}};
  }
  if (case_id == "full") return {{x0, x1, y0, y1}};
  throw std::invalid_argument("unknown sub-region case: " + case_id);
}

SubregionMask make_subregion_mask(const Mesh& mesh,
                                  const std::vector<MaskRect>& rects,
                                  const std::string& name) {
  SubregionMask mask;
  mask.name = name;
  mask.controlled.assign(mesh.bases.size(), false);

  const double tol = 1e-9 * mesh.max_cell_diag();
  auto cell_inside = [&](const Cell& c) {
    for (const auto& r : rects) {
      bool in = true;
      for (const auto& corner : {c.point(0, 0), c.point(1, 0), c.point(1, 1), c.point(0, 1)}) {
        if (corner.x() < r.x0 - tol || corner.x() > r.x1 + tol ||
            corner.y() < r.y0 - tol || corner.y() > r.y1 + tol) {
          in = false;
          break;
        }
      }
      if (in) return true;
    }
    return false;
  };

  for (size_t n = 0; n < mesh.bases.size(); ++n) {
    const Basis& b = mesh.bases[n];
    mask.controlled[n] =
        cell_inside(mesh.cells[b.plus.cell]) && cell_inside(mesh.cells[b.minus.cell]);
  }
  if (mask.controlled_count() == 0)
    throw std::runtime_error("sub-region mask selects no basis functions");
  return mask;
}

SubregionMask make_subregion_mask(const Mesh& mesh, const PlateSpec& spec,
                                  const std::string& case_id) {
  return make_subregion_mask(mesh, subregion_case_rects(spec, case_id), case_id);
}

std::uint64_t mesh_hash(const Mesh& mesh) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](const void* p, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& n : mesh.nodes) mix(n.data(), 3 * sizeof(double));
  for (const auto& b : mesh.bases) {
    int ids[4] = {b.plus.cell, b.minus.cell, b.plus.axis,
                  b.plus.shared_at_one ? 1 : 0};
    mix(ids, sizeof(ids));
    mix(&b.edge_length, sizeof(double));
  }
  return h;
}

}  // namespace mimoq
