#include "dimerbem/rigid_space.hpp"

#include <array>
#include <cmath>

#include "dimerbem/errors.hpp"

namespace dimerbem {
namespace {

const double kPi = 3.14159265358979323846;

Vec3 generator(int k, const Vec3& x) {
  switch (k) {
    case 0: return Vec3(1, 0, 0);
    case 1: return Vec3(0, 1, 0);
    case 2: return Vec3(0, 0, 1);
    case 3: return Vec3(x[1], -x[0], 0);
    case 4: return Vec3(x[2], 0, -x[0]);
    default: return Vec3(0, x[2], -x[1]);
  }
}

}  // namespace

Eigen::MatrixXd rigid_traces(const SurfaceMesh& mesh) {
  const int nf = 6 * mesh.num_components;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(mesh.dof_count(), nf);
  for (int p = 0; p < mesh.panel_count(); ++p) {
    const Panel& pan = mesh.panels[p];
    for (int k = 0; k < 6; ++k)
      X.block<3, 1>(3 * p, 6 * pan.component + k) = generator(k, pan.centroid);
  }
  return X;
}

Eigen::MatrixXd mass_moments(const DimerGeometry& geom) {
  const double R = geom.config.radius;
  const double V = 4.0 * kPi * R * R * R / 3.0;
  const double I2 = V * R * R / 5.0;  // second moment of the ball about its center, per axis
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(12, 12);
  for (int c = 0; c < 2; ++c) {
    const double zc = geom.center(c)[2];
    const int o = 6 * c;
    B(o + 0, o + 0) = B(o + 1, o + 1) = B(o + 2, o + 2) = V;
    B(o + 3, o + 3) = 2.0 * I2;
    B(o + 4, o + 4) = B(o + 5, o + 5) = 2.0 * I2 + V * zc * zc;
    B(o + 0, o + 4) = B(o + 4, o + 0) = V * zc;
    B(o + 1, o + 5) = B(o + 5, o + 1) = V * zc;
  }
  return B;
}

CapacitySystem compute_capacity(const SurfaceMesh& mesh, const SingleLayerSolver& solver) {
  CapacitySystem sys;
  const Eigen::MatrixXd X = rigid_traces(mesh);
  sys.densities = solver.solve_many(X);
  Eigen::VectorXd w(mesh.dof_count());
  for (int p = 0; p < mesh.panel_count(); ++p) w.segment<3>(3 * p).setConstant(mesh.panels[p].area);
  sys.E = -sys.densities.transpose() * w.asDiagonal() * X;
  sys.rcond = solver.rcond();
  return sys;
}

double capacity_log_slope(const ElasticMedium& m, double curvature, int i, int j) {
  if (i > j) std::swap(i, j);
  const double shear = m.mu * kPi / curvature;
  const double comp = (m.lambda + 2.0 * m.mu) * kPi / curvature;
  if (i == j && (i == 0 || i == 1 || i == 6 || i == 7)) return shear;
  if ((i == 0 && j == 6) || (i == 1 && j == 7)) return -shear;
  if (i == j && (i == 2 || i == 8)) return comp;
  if (i == 2 && j == 8) return -comp;
  return 0.0;
}

LogFit fit_log_constants(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size() || eps.size() < 2)
    throw ConfigError("log fit needs at least two matching (eps, value) samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw ConfigError("gap values must be positive in a log fit");
    const double x = std::abs(std::log(eps[k]));
    sx += x;
    sy += values[k];
    sxx += x * x;
    sxy += x * values[k];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-14 * n * sxx)
    throw ConfigError("log fit is degenerate: gap values must differ");
  LogFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.constant = (sxx * sy - sx * sxy) / det;
  return f;
}

Eigen::MatrixXd capacity_constants(const Eigen::MatrixXd& E, const ElasticMedium& m,
                                   double curvature, double eps) {
  if (!(eps > 0.0)) throw ConfigError("gap must be positive");
  const double L = std::abs(std::log(eps));
  Eigen::MatrixXd C = E;
  for (int i = 0; i < E.rows(); ++i)
    for (int j = 0; j < E.cols(); ++j) C(i, j) -= capacity_log_slope(m, curvature, i, j) * L;
  return C;
}

MatrixLogFit fit_capacity_matrix(const std::vector<double>& eps,
                                 const std::vector<Eigen::MatrixXd>& Es) {
  if (eps.size() != Es.size()) throw ConfigError("capacity sweep sizes disagree");
  if (Es.empty()) throw ConfigError("capacity sweep is empty");
  const Eigen::Index n = Es.front().rows();
  MatrixLogFit fit;
  fit.slope.resize(n, n);
  fit.intercept.resize(n, n);
  std::vector<double> values(eps.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      for (size_t k = 0; k < eps.size(); ++k) values[k] = Es[k](i, j);
      const LogFit f = fit_log_constants(eps, values);
      fit.slope(i, j) = f.slope;
      fit.intercept(i, j) = f.constant;
    }
  return fit;
}

StructureReport check_capacity_structure(const Eigen::MatrixXd& E, double tol) {
  if (E.rows() != 12 || E.cols() != 12)
    throw ConfigError("structure check expects the 12-field capacity matrix");
  StructureReport r;
  r.norm = E.cwiseAbs().maxCoeff();
  // the twelve fields couple only inside four closed groups
  auto group = [](int i) {
    switch (i) {
      case 0: case 4: case 6: case 10: return 0;
      case 1: case 5: case 7: case 11: return 1;
      case 2: case 8: return 2;
      default: return 3;  // 3, 9
    }
  };
  double off = 0.0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (group(i) != group(j)) off = std::max(off, std::abs(E(i, j)));
  r.off_pattern = off / r.norm;

  r.asymmetry = (E - E.transpose()).cwiseAbs().maxCoeff() / r.norm;

  const Eigen::MatrixXd Es = 0.5 * (E + E.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Es);
  r.min_eigenvalue = eig.eigenvalues().minCoeff() / r.norm;

  // component swap is the z-mirror: tz, ry, rx flip sign, so mixed entries
  // acquire the product of their field parities
  const std::array<double, 6> parity = {1, 1, -1, 1, -1, -1};
  double mirror = 0.0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const double s = parity[i % 6] * parity[j % 6];
      mirror = std::max(mirror, std::abs(E(i, j) - s * E((i + 6) % 12, (j + 6) % 12)));
    }
  r.mirror_deviation = mirror / r.norm;

  // translation-rotation couplings flip sign under the component swap
  const std::array<std::array<int, 4>, 4> ties = {
      {{0, 4, 6, 10}, {0, 10, 6, 4}, {1, 5, 7, 11}, {1, 11, 7, 5}}};
  double sgn = 0.0;
  for (const auto& t : ties) sgn = std::max(sgn, std::abs(E(t[0], t[1]) + E(t[2], t[3])));
  r.sign_relation = sgn / r.norm;

  double floor = 1e300;
  for (int i = 0; i < 6; ++i) {
    floor = std::min(floor, E(i, i) + E(i, i + 6));
    floor = std::min(floor, E(i, i) - E(i, i + 6));
  }
  r.sum_floor = floor / r.norm;

  r.pass = r.off_pattern <= tol && r.asymmetry <= tol && r.min_eigenvalue >= -tol &&
           r.mirror_deviation <= tol && r.sign_relation <= tol && r.sum_floor >= -tol;
  return r;
}

}  // namespace dimerbem
