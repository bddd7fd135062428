#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "dimerbem/kernels.hpp"

namespace dimerbem {

// How node rings are clustered toward the contact pole. Gap grading places
// ring k so that the surface separation delta grows by a fixed factor per
// ring (geometric equidistribution of log delta), which is what resolves the
// 1/delta densities that drive the |log eps| capacity growth. Power grading
// theta -> theta_cut (theta/theta_cut)^s is kept as a tunable fallback.
enum class GradingLaw { Gap, Power };

struct DimerConfig {
  double radius = 1.0;           // sphere radius R
  double gap = 1e-3;             // surface-to-surface distance eps
  int refinement = 3;            // subdivision level (8*4^level panels per sphere)
  GradingLaw grading_law = GradingLaw::Gap;
  double grading_exponent = 2.0; // power law: polar clustering toward the contact point
  double grading_factor = 1.0;   // power law: pole panel diameter <= factor * sqrt(eps R)
  double chart_radius_factor = 0.5;  // R0 = factor * R
  int max_dofs = 12288;          // resource cap on 3 * panel count

  void validate() const;
  double chart_radius() const { return chart_radius_factor * radius; }
};

struct Panel {
  std::array<int, 3> v;   // node indices, outward CCW
  Vec3 centroid;          // collocation point (on the surface for curved builds)
  Vec3 normal;            // outward unit normal at the centroid
  double area = 0.0;
  double diam = 0.0;      // max vertex chord, used for near-pair detection
  int component = 0;
  std::array<Vec3, 7> qp;     // quadrature points
  std::array<Vec3, 7> qn;     // outward normals at the quadrature points
  std::array<double, 7> qw;   // quadrature weights, sum to area
};

// Exact shape behind a mesh component, when known; lets quadrature refine
// onto the true surface instead of the flat panels.
struct ComponentShape {
  bool curved = false;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct SurfaceMesh {
  std::vector<Vec3> nodes;
  std::vector<Panel> panels;
  std::vector<ComponentShape> shapes;
  int num_components = 0;

  int panel_count() const { return static_cast<int>(panels.size()); }
  int dof_count() const { return 3 * panel_count(); }
  double component_area(int comp) const;
  double component_volume(int comp) const;  // (1/3) sum area * normal . centroid
  Vec3 component_flux(int comp) const;      // sum area * normal, ~0 for closed surfaces
  int euler_characteristic(int comp) const;
};

// Boundary graphs of the two spheres over the transverse coordinate x',
// measured from the plane x3 = +-eps/2: upper surface at eps/2 + h1, lower at
// -eps/2 + h2 with h2 = -h1 for the symmetric dimer.
struct GapChart {
  double radius = 1.0;
  double gap = 1e-3;

  double h1(double t) const;
  double h2(double t) const { return -h1(t); }
  double delta(double t) const { return gap + h1(t) - h2(t); }
  double curvature() const { return 1.0 / radius; }
};

struct SymmetryReport {
  std::array<double, 3> deviation{};  // maps (x,-y,-z), (-x,y,-z), (x,y,-z)
  double tol = 0.0;
  bool pass = false;
};

struct DimerGeometry {
  DimerConfig config;
  SurfaceMesh mesh;
  GapChart chart;

  double center_offset() const { return config.radius + 0.5 * config.gap; }
  Vec3 center(int comp) const { return Vec3(0, 0, comp == 0 ? center_offset() : -center_offset()); }
  double component_volume_exact() const;  // 4 pi R^3 / 3
};

// Two spheres of radius R centered at (0,0,+-(R+eps/2)), meshed by graded
// octasphere subdivision; panels carry exact spherical areas and radial
// normals. The lower sphere is the floating-point-exact mirror of the upper
// one, so the construction is invariant under the three dimer symmetries and
// under quarter-turns about the contact axis.
DimerGeometry build_sphere_dimer(const DimerConfig& config);

// Ungraded octasphere, single component.
SurfaceMesh build_single_sphere(double radius, const Vec3& center, int refinement);

// Max deviation of the node set under the maps (x,-y,-z), (-x,y,-z), (x,y,-z).
SymmetryReport verify_symmetry(const SurfaceMesh& mesh, double tol);

// n points on the gap midline {(x', 0) : |x'| <= r}, sunflower-distributed;
// r = 0 degenerates to the contact-axis point.
std::vector<Vec3> narrow_region_points(const DimerGeometry& geometry, double r, int n);

// Indexed-triangle text interchange; import recomputes flat panel data.
void write_mesh_text(const SurfaceMesh& mesh, std::ostream& os);
SurfaceMesh read_mesh_text(std::istream& is);
void write_mesh_file(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh read_mesh_file(const std::string& path);

}  // namespace dimerbem
