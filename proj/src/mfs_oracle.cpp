#include "dimerbem/mfs_oracle.hpp"

#include <cmath>

#include "dimerbem/errors.hpp"
#include "dimerbem/kernels.hpp"

namespace dimerbem {

namespace {

void check_config(const MFSConfig& cfg, const SurfaceMesh& mesh) {
  if (cfg.sources_per_component < 4) throw ConfigError("need at least four sources per component");
  if (cfg.depth_factor < 0.3 || cfg.depth_factor > 0.9)
    throw ConfigError("source depth factor must lie in [0.3, 0.9]");
  if (!(cfg.min_oversampling >= 1.0)) throw ConfigError("oversampling factor must be at least 1");
  const double unknowns = 6.0 * cfg.sources_per_component;
  if (mesh.dof_count() < cfg.min_oversampling * unknowns)
    throw ConfigError("mesh provides too few collocation equations for this many sources");
}

std::vector<Vec3> build_sources(const DimerGeometry& geom, const MFSConfig& cfg) {
  const std::vector<Vec3> dirs = fibonacci_sphere(cfg.sources_per_component);
  std::vector<Vec3> sources;
  sources.reserve(2 * dirs.size());
  for (int c = 0; c < 2; ++c) {
    const Vec3 center = geom.center(c);
    const double r = cfg.depth_factor * geom.config.radius;
    for (const Vec3& d : dirs) sources.push_back(center + r * d);
  }
  return sources;
}

Eigen::MatrixXd build_system(const SurfaceMesh& mesh, const ElasticMedium& medium,
                             const std::vector<Vec3>& sources, Eigen::VectorXd& weights) {
  const int rows = mesh.dof_count();
  const int cols = 3 * static_cast<int>(sources.size());
  Eigen::MatrixXd A(rows, cols);
  weights.resize(rows);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < mesh.panel_count(); ++p) {
    const double w = std::sqrt(mesh.panels[p].area);
    weights.segment<3>(3 * p).setConstant(w);
    for (std::size_t s = 0; s < sources.size(); ++s)
      A.block<3, 3>(3 * p, 3 * static_cast<int>(s)) =
          w * kelvin_matrix(medium, mesh.panels[p].centroid - sources[s]);
  }
  return A;
}

}  // namespace

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
  }
  return pts;
}

std::vector<OracleSolution> mfs_solve_many(const DimerGeometry& geom, const ElasticMedium& medium,
                                           const Eigen::MatrixXd& traces, const MFSConfig& config) {
  medium.validate();
  const SurfaceMesh& mesh = geom.mesh;
  check_config(config, mesh);
  if (traces.rows() != mesh.dof_count())
    throw ConfigError("boundary data must be sampled at the panel centroids of this mesh");
  if (!traces.allFinite()) throw ConfigError("boundary data must be finite");

  const std::vector<Vec3> sources = build_sources(geom, config);
  Eigen::VectorXd w;
  const Eigen::MatrixXd A = build_system(mesh, medium, sources, w);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(config.svd_rel_cutoff);

  std::vector<OracleSolution> out;
  out.reserve(traces.cols());
  for (int j = 0; j < traces.cols(); ++j) {
    OracleSolution sol;
    sol.medium = medium;
    sol.sources = sources;
    sol.trace = traces.col(j);
    const Eigen::VectorXd b = w.asDiagonal() * traces.col(j);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
      sol.strengths = Eigen::VectorXd::Zero(A.cols());
      sol.residual = 0.0;
      sol.reliable = true;
    } else {
      sol.strengths = svd.solve(b);
      sol.residual = (A * sol.strengths - b).norm() / bnorm;
      sol.reliable = sol.residual <= config.residual_threshold;
    }
    out.push_back(std::move(sol));
  }
  return out;
}

OracleSolution mfs_solve(const DimerGeometry& geom, const ElasticMedium& medium,
                         const Eigen::VectorXd& trace, const MFSConfig& config) {
  return mfs_solve_many(geom, medium, trace, config).front();
}

Vec3 oracle_value(const OracleSolution& sol, const Vec3& x) {
  Vec3 u = Vec3::Zero();
  for (std::size_t s = 0; s < sol.sources.size(); ++s)
    u += kelvin_matrix(sol.medium, x - sol.sources[s]) * sol.strengths.segment<3>(3 * s);
  return u;
}

Vec3 oracle_traction(const OracleSolution& sol, const Vec3& x, const Vec3& nu) {
  Vec3 t = Vec3::Zero();
  for (std::size_t s = 0; s < sol.sources.size(); ++s)
    t += traction_kernel(sol.medium, x - sol.sources[s], nu) * sol.strengths.segment<3>(3 * s);
  return t;
}

OracleEnergy oracle_energy(const OracleSolution& sol_i, const OracleSolution& sol_j,
                           const SurfaceMesh& mesh) {
  if (sol_j.trace.size() != mesh.dof_count())
    throw ConfigError("the data solution does not match this mesh");
  OracleEnergy e;
  e.reliable = sol_i.reliable && sol_j.reliable;
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (int p = 0; p < mesh.panel_count(); ++p) {
    const Vec3 t = oracle_traction(sol_i, mesh.panels[p].centroid, mesh.panels[p].normal);
    acc += mesh.panels[p].area * t.dot(sol_j.trace.segment<3>(3 * p));
  }
  e.value = -acc;
  return e;
}

}  // namespace dimerbem
