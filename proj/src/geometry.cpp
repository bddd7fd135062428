#include "dimerbem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "dimerbem/errors.hpp"
#include "tri_quadrature.hpp"

namespace dimerbem {
namespace {

using detail::tri_rule;
using detail::TriRule;

constexpr double kPi = 3.14159265358979323846;
constexpr double kThetaCut = kPi / 2.0;  // grading acts on the gap-facing hemisphere

struct Tri {
  std::array<int, 3> v;
};

// Midpoint-normalized subdivision of the unit octahedron.
void octasphere(int level, std::vector<Vec3>& nodes, std::vector<Tri>& tris) {
  nodes = {Vec3(0, 0, -1), Vec3(1, 0, 0),  Vec3(0, 1, 0),
           Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)};
  tris = {{{0, 2, 1}}, {{0, 3, 2}}, {{0, 4, 3}}, {{0, 1, 4}},
          {{5, 1, 2}}, {{5, 2, 3}}, {{5, 3, 4}}, {{5, 4, 1}}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = 0.5 * (nodes[i] + nodes[j]);
      m /= m.norm();
      nodes.push_back(m);
      const int idx = static_cast<int>(nodes.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Tri> next;
    next.reserve(4 * tris.size());
    for (const Tri& t : tris) {
      const int a = t.v[0], b = t.v[1], c = t.v[2];
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({{a, ab, ca}});
      next.push_back({{b, bc, ab}});
      next.push_back({{c, ca, bc}});
      next.push_back({{ab, bc, ca}});
    }
    tris.swap(next);
  }
}

// Polar grading about the -z pole: theta' = theta_cut (theta/theta_cut)^s on
// the contact hemisphere, identity beyond. Preserves azimuth exactly, so the
// quarter-turn and reflection symmetries of the octasphere survive in
// floating point.
void grade_toward_pole(std::vector<Vec3>& nodes, double s) {
  if (s <= 1.0) return;
  for (Vec3& p : nodes) {
    const double t = std::hypot(p(0), p(1));
    const double theta = std::atan2(t, -p(2));
    if (theta >= kThetaCut || theta == 0.0) continue;
    const double tp = kThetaCut * std::pow(theta / kThetaCut, s);
    const double tnew = std::sin(tp);
    const double scale = tnew / t;
    p(0) *= scale;
    p(1) *= scale;
    p(2) = -std::cos(tp);
  }
}

// Gap grading about the -z pole: move each node ring so the dimer surface
// separation delta = eps + 2(R - sqrt(R^2 - t^2)) grows by the same factor
// between consecutive rings, i.e. delta(t'(u)) = eps * Q^u with u the polar
// fraction theta/theta_cut and Q = delta(equator)/eps. Densities behaving
// like 1/delta then vary by a bounded factor across every panel. Works on
// the unit sphere, so eps enters as eps/R. Azimuth is preserved exactly.
void grade_gap_law(std::vector<Vec3>& nodes, double eps_over_r) {
  const double e = eps_over_r;
  const double logQ = std::log1p(2.0 / e);  // Q = 1 + 2/e
  for (Vec3& p : nodes) {
    const double t = std::hypot(p(0), p(1));
    const double theta = std::atan2(t, -p(2));
    if (theta >= kThetaCut || theta == 0.0) continue;
    const double u = theta / kThetaCut;
    const double g = std::min(1.0, 0.5 * e * std::expm1(u * logQ));
    const double tnew = std::sqrt(g * (2.0 - g));
    const double scale = tnew / t;
    p(0) *= scale;
    p(1) *= scale;
    p(2) = -(1.0 - g);
  }
}

// Spherical excess of the geodesic triangle with unit-vector vertices.
double spherical_excess(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = a.dot(b.cross(c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

Panel make_curved_panel(const std::vector<Vec3>& nodes, const Tri& t, const Vec3& center,
                        double R, int component) {
  Panel p;
  p.v = t.v;
  p.component = component;
  const Vec3 v0 = nodes[t.v[0]], v1 = nodes[t.v[1]], v2 = nodes[t.v[2]];
  const Vec3 a = (v0 - center) / R, b = (v1 - center) / R, c = (v2 - center) / R;
  const double excess = spherical_excess(a, b, c);
  if (excess <= 0.0) throw NumericalError("degenerate or inverted mesh panel");
  p.area = excess * R * R;
  Vec3 fc = (v0 + v1 + v2) / 3.0 - center;
  fc *= R / fc.norm();
  p.centroid = center + fc;
  p.normal = fc / R;
  p.diam = std::max({(v0 - v1).norm(), (v1 - v2).norm(), (v2 - v0).norm()});
  const TriRule& rule = tri_rule();
  for (int q = 0; q < 7; ++q) {
    Vec3 fp = rule.b[q][0] * v0 + rule.b[q][1] * v1 + rule.b[q][2] * v2 - center;
    fp *= R / fp.norm();
    p.qp[q] = center + fp;
    p.qn[q] = fp / R;
    p.qw[q] = rule.w[q] * p.area;
  }
  return p;
}

Panel make_flat_panel(const std::vector<Vec3>& nodes, const Tri& t, int component) {
  Panel p;
  p.v = t.v;
  p.component = component;
  const Vec3 v0 = nodes[t.v[0]], v1 = nodes[t.v[1]], v2 = nodes[t.v[2]];
  const Vec3 cr = (v1 - v0).cross(v2 - v0);
  const double n2 = cr.norm();
  if (n2 <= 0.0) throw NumericalError("degenerate mesh panel");
  p.area = 0.5 * n2;
  p.centroid = (v0 + v1 + v2) / 3.0;
  p.normal = cr / n2;
  p.diam = std::max({(v0 - v1).norm(), (v1 - v2).norm(), (v2 - v0).norm()});
  const TriRule& rule = tri_rule();
  for (int q = 0; q < 7; ++q) {
    p.qp[q] = rule.b[q][0] * v0 + rule.b[q][1] * v1 + rule.b[q][2] * v2;
    p.qn[q] = p.normal;
    p.qw[q] = rule.w[q] * p.area;
  }
  return p;
}

}  // namespace

void DimerConfig::validate() const {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(gap > 0.0)) throw ConfigError("gap must be positive");
  if (refinement < 0) throw ConfigError("refinement must be nonnegative");
  if (!(grading_exponent >= 1.0)) throw ConfigError("grading exponent must be >= 1");
  if (!(grading_factor > 0.0)) throw ConfigError("grading factor must be positive");
  if (!(chart_radius_factor > 0.0 && chart_radius_factor <= 1.0))
    throw ConfigError("chart radius factor must be in (0, 1]");
  const long long dofs = 48LL << (2 * refinement);  // 3 * 2 * 8 * 4^level
  if (dofs > max_dofs)
    throw ResourceError("refinement level " + std::to_string(refinement) + " needs " +
                        std::to_string(dofs) + " degrees of freedom, cap is " +
                        std::to_string(max_dofs));
}

double SurfaceMesh::component_area(int comp) const {
  double a = 0.0;
  for (const Panel& p : panels)
    if (p.component == comp) a += p.area;
  return a;
}

double SurfaceMesh::component_volume(int comp) const {
  double v = 0.0;
  for (const Panel& p : panels)
    if (p.component == comp) v += p.area * p.normal.dot(p.centroid);
  return v / 3.0;
}

Vec3 SurfaceMesh::component_flux(int comp) const {
  Vec3 f = Vec3::Zero();
  for (const Panel& p : panels)
    if (p.component == comp) f += p.area * p.normal;
  return f;
}

int SurfaceMesh::euler_characteristic(int comp) const {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  long long faces = 0;
  for (const Panel& p : panels) {
    if (p.component != comp) continue;
    ++faces;
    for (int i = 0; i < 3; ++i) {
      verts.insert(p.v[i]);
      edges.insert(std::minmax(p.v[i], p.v[(i + 1) % 3]));
    }
  }
  return static_cast<int>(verts.size() + faces - edges.size());
}

double GapChart::h1(double t) const {
  if (std::abs(t) > radius) throw ConfigError("gap chart evaluated outside its validity disk");
  return radius - std::sqrt(radius * radius - t * t);
}

double DimerGeometry::component_volume_exact() const {
  return 4.0 * kPi * config.radius * config.radius * config.radius / 3.0;
}

DimerGeometry build_sphere_dimer(const DimerConfig& config) {
  config.validate();
  const double R = config.radius;

  std::vector<Vec3> unit_nodes;
  std::vector<Tri> tris;
  octasphere(config.refinement, unit_nodes, tris);

  if (config.grading_law == GradingLaw::Gap) {
    grade_gap_law(unit_nodes, config.gap / R);
  } else {
    // Ensure the pole panel diameter reaches grading_factor * sqrt(eps R): bump
    // the exponent when the configured one is too weak for this gap/level.
    const double h_ang = kThetaCut / double(1 << config.refinement);
    // pole panels are octant right triangles: hypotenuse = sqrt(2) * polar arc
    const double target = config.grading_factor * std::sqrt(config.gap * R) / (R * std::sqrt(2.0));
    double s = config.grading_exponent;
    if (target < kThetaCut) {
      const double s_req = std::log(target / kThetaCut) / std::log(h_ang / kThetaCut);
      s = std::max(s, s_req);
    }
    grade_toward_pole(unit_nodes, s);
  }

  DimerGeometry g;
  g.config = config;
  g.chart = GapChart{R, config.gap};

  const double zc = g.center_offset();
  const Vec3 c1(0, 0, zc);

  // Upper sphere: scale, translate, build curved panels.
  SurfaceMesh& mesh = g.mesh;
  mesh.num_components = 2;
  mesh.shapes = {ComponentShape{true, c1, R}, ComponentShape{true, Vec3(0, 0, -zc), R}};
  const int n_nodes = static_cast<int>(unit_nodes.size());
  mesh.nodes.resize(2 * n_nodes);
  for (int i = 0; i < n_nodes; ++i) mesh.nodes[i] = c1 + R * unit_nodes[i];
  // Lower sphere: exact mirror of the upper node set.
  for (int i = 0; i < n_nodes; ++i) {
    const Vec3& u = mesh.nodes[i];
    mesh.nodes[n_nodes + i] = Vec3(u(0), u(1), -u(2));
  }

  mesh.panels.reserve(2 * tris.size());
  for (const Tri& t : tris) mesh.panels.push_back(make_curved_panel(mesh.nodes, t, c1, R, 0));
  const int n_panels = static_cast<int>(mesh.panels.size());
  for (int k = 0; k < n_panels; ++k) {
    Panel p = mesh.panels[k];  // mirror all panel data so symmetry is exact in FP
    p.component = 1;
    p.v = {p.v[0] + n_nodes, p.v[2] + n_nodes, p.v[1] + n_nodes};
    p.centroid(2) = -p.centroid(2);
    p.normal(2) = -p.normal(2);
    for (int q = 0; q < 7; ++q) {
      p.qp[q](2) = -p.qp[q](2);
      p.qn[q](2) = -p.qn[q](2);
    }
    mesh.panels.push_back(p);
  }
  return g;
}

SurfaceMesh build_single_sphere(double radius, const Vec3& center, int refinement) {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (refinement < 0) throw ConfigError("refinement must be nonnegative");
  std::vector<Vec3> unit_nodes;
  std::vector<Tri> tris;
  octasphere(refinement, unit_nodes, tris);
  SurfaceMesh mesh;
  mesh.num_components = 1;
  mesh.shapes = {ComponentShape{true, center, radius}};
  mesh.nodes.resize(unit_nodes.size());
  for (size_t i = 0; i < unit_nodes.size(); ++i) mesh.nodes[i] = center + radius * unit_nodes[i];
  mesh.panels.reserve(tris.size());
  for (const Tri& t : tris)
    mesh.panels.push_back(make_curved_panel(mesh.nodes, t, center, radius, 0));
  return mesh;
}

SymmetryReport verify_symmetry(const SurfaceMesh& mesh, double tol) {
  static const std::array<Vec3, 3> signs = {Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(1, 1, -1)};
  SymmetryReport rep;
  rep.tol = tol;
  for (int m = 0; m < 3; ++m) {
    double worst = 0.0;
    for (const Vec3& x : mesh.nodes) {
      const Vec3 img = x.cwiseProduct(signs[m]);
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& y : mesh.nodes) best = std::min(best, (img - y).squaredNorm());
      worst = std::max(worst, best);
    }
    rep.deviation[m] = std::sqrt(worst);
  }
  rep.pass = rep.deviation[0] <= tol && rep.deviation[1] <= tol && rep.deviation[2] <= tol;
  return rep;
}

std::vector<Vec3> narrow_region_points(const DimerGeometry& geometry, double r, int n) {
  const double r0 = geometry.config.chart_radius();
  if (r < 0.0 || r > 2.0 * r0)
    throw ConfigError("narrow-region radius outside the chart validity disk");
  if (n < 0) throw ConfigError("point count must be nonnegative");
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double rho = (n > 1) ? r * std::sqrt(double(k) / double(n - 1)) : 0.0;
    const double phi = k * golden;
    pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), 0.0);
  }
  return pts;
}

void write_mesh_text(const SurfaceMesh& mesh, std::ostream& os) {
  os.precision(17);
  os << "dimerbem-mesh 1\n";
  os << "nodes " << mesh.nodes.size() << "\n";
  for (const Vec3& x : mesh.nodes) os << x(0) << " " << x(1) << " " << x(2) << "\n";
  os << "panels " << mesh.panels.size() << "\n";
  for (const Panel& p : mesh.panels)
    os << p.v[0] << " " << p.v[1] << " " << p.v[2] << " " << p.component << "\n";
}

SurfaceMesh read_mesh_text(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "dimerbem-mesh" || version != 1)
    throw ConfigError("unrecognized mesh file header");
  std::string tag;
  size_t n_nodes = 0;
  if (!(is >> tag >> n_nodes) || tag != "nodes") throw ConfigError("malformed mesh file: nodes");
  SurfaceMesh mesh;
  mesh.nodes.resize(n_nodes);
  for (size_t i = 0; i < n_nodes; ++i)
    if (!(is >> mesh.nodes[i](0) >> mesh.nodes[i](1) >> mesh.nodes[i](2)))
      throw ConfigError("malformed mesh file: node coordinates");
  size_t n_panels = 0;
  if (!(is >> tag >> n_panels) || tag != "panels")
    throw ConfigError("malformed mesh file: panels");
  mesh.panels.reserve(n_panels);
  int max_comp = -1;
  for (size_t i = 0; i < n_panels; ++i) {
    Tri t;
    int comp = 0;
    if (!(is >> t.v[0] >> t.v[1] >> t.v[2] >> comp))
      throw ConfigError("malformed mesh file: panel record");
    for (int k = 0; k < 3; ++k)
      if (t.v[k] < 0 || t.v[k] >= static_cast<int>(n_nodes))
        throw ConfigError("mesh file panel references a missing node");
    mesh.panels.push_back(make_flat_panel(mesh.nodes, t, comp));
    max_comp = std::max(max_comp, comp);
  }
  mesh.num_components = max_comp + 1;
  mesh.shapes.assign(mesh.num_components, ComponentShape{});
  return mesh;
}

void write_mesh_file(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open mesh file for writing: " + path);
  write_mesh_text(mesh, os);
  if (!os) throw ConfigError("failed writing mesh file: " + path);
}

SurfaceMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open mesh file: " + path);
  return read_mesh_text(is);
}

}  // namespace dimerbem
