#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mimoq {

/// Rectangular mesh cell. Points are r(u,v) = origin + u*edge_u + v*edge_v,
/// (u,v) in [0,1]^2, with edge_u orthogonal to edge_v.
struct Cell {
  Eigen::Vector3d origin;
  Eigen::Vector3d edge_u;
  Eigen::Vector3d edge_v;
  std::array<int, 4> nodes;  // origin, origin+u, origin+u+v, origin+v

  double len_u() const { return edge_u.norm(); }
  double len_v() const { return edge_v.norm(); }
  double area() const { return len_u() * len_v(); }
  Eigen::Vector3d center() const { return origin + 0.5 * edge_u + 0.5 * edge_v; }
  Eigen::Vector3d point(double u, double v) const {
    return origin + u * edge_u + v * edge_v;
  }
};

/// One half of a rooftop basis function: the current on one of the two
/// cells sharing the common edge. `axis` selects the cell direction the
/// current flows along (0 -> edge_u, 1 -> edge_v). `shared_at_one` is true
/// when the shared edge sits at local coordinate 1 of that axis. `sign`
/// is +1 on the cell the reference current flows out of (positive charge)
/// and -1 on the receiving cell.
struct RooftopHalf {
  int cell;
  int axis;
  bool shared_at_one;
  double sign;
};

/// Divergence-conforming rooftop basis function spanning two adjacent
/// rectangular cells that share a full edge.
struct Basis {
  RooftopHalf plus;   // current flows toward the shared edge
  RooftopHalf minus;  // current flows away from the shared edge
  double edge_length; // width of the shared edge (normalization)
};

struct Mesh {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<Cell> cells;
  std::vector<Basis> bases;

  int basis_count() const { return static_cast<int>(bases.size()); }

  /// Radius of the smallest origin-centered sphere containing all nodes.
  double bounding_radius() const;

  /// Largest cell diagonal, used for near/far quadrature classification.
  double max_cell_diag() const;

  /// Checks rooftop cell-edge adjacency and node sanity; throws on failure.
  void validate() const;

  /// Plain-text node/cell/basis listing for debugging.
  std::string to_text() const;
};

struct StripDipoleSpec {
  double length = 0.49;                      // meters
  double aspect = 50.0;                      // L/W
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  Eigen::Vector3d axis{0.0, 0.0, 1.0};       // unit vector
  int cells_along_length = 32;
};

struct ArraySpec {
  StripDipoleSpec element;
  int count = 2;
  double spacing = 0.0;       // meters, pitch along x
  double rotation = 0.0;      // radians, applied about the x axis
};

struct PlateSpec {
  double ka = 1.0;            // electrical size, a = circumscribing radius
  double k = 2.0 * 3.14159265358979323846;  // wavenumber fixing meters
  int cells_x = 16;           // along the long side l
  int cells_y = 8;            // along the short side l/2
};

struct SubregionMask {
  std::string name;
  std::vector<bool> controlled;  // one flag per basis function

  int controlled_count() const;
};

/// Thin-strip dipole: a 1 x cells_along_length strip of rectangular cells
/// with rooftop bases on the interior edges (M = cells - 1).
Mesh build_dipole(const StripDipoleSpec& spec);

struct ArrayMesh {
  Mesh mesh;
  std::vector<int> ports;  // central basis index of each element
};

/// Linear array of identical strip dipoles at pitch `spacing` along x.
/// Odd-indexed elements are rotated by `rotation` about the x axis
/// (two-element rotation study); rotation = 0 gives a plain linear array.
ArrayMesh build_array(const ArraySpec& spec);

/// Rectangular plate l x l/2 in the xy plane, centered at the origin,
/// with rooftop bases on all interior edges of both orientations.
Mesh build_plate(const PlateSpec& spec);

/// Side length l of the plate described by `spec` (a = sqrt(l^2+(l/2)^2)/2).
double plate_side_length(const PlateSpec& spec);

/// Axis-aligned rectangle in the plate plane, in meters.
struct MaskRect {
  double x0, x1, y0, y1;
};

/// Controlled sub-region mask for the named case (A-E per the bundled
/// studies) on a plate mesh. A basis is controlled iff its entire two-cell
/// support lies inside one of the case rectangles.
SubregionMask make_subregion_mask(const Mesh& mesh, const PlateSpec& spec,
                                  const std::string& case_id);

/// Mask from an explicit rectangle list (plate-plane coordinates, meters).
SubregionMask make_subregion_mask(const Mesh& mesh,
                                  const std::vector<MaskRect>& rects,
                                  const std::string& name = "custom");

/// Rectangles used by a named case, exposed so the exact placement is
/// testable and documented.
std::vector<MaskRect> subregion_case_rects(const PlateSpec& spec,
                                           const std::string& case_id);

/// FNV-1a hash over node coordinates and basis topology, used to key the
/// operator cache.
std::uint64_t mesh_hash(const Mesh& mesh);

}  // namespace mimoq
