#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dimerbem/geometry.hpp"
#include "dimerbem/medium.hpp"

namespace dimerbem {

// Method-of-fundamental-solutions solver for the exterior Dirichlet problem:
// point Kelvin sources on an interior sphere of each inclusion, fitted to the
// boundary data in a weighted least-squares sense. Fully independent of the
// boundary-integral path; used to cross-validate capacity entries and gap
// fields.
struct MFSConfig {
  int sources_per_component = 96;
  double depth_factor = 0.7;       // source sphere radius as a fraction of R
  double min_oversampling = 1.5;   // equations per unknown, enforced
  double residual_threshold = 1e-2;  // relative boundary residual above which the fit is unreliable
  double svd_rel_cutoff = 1e-12;   // truncation threshold of the least-squares factorization
};

struct OracleSolution {
  ElasticMedium medium;
  std::vector<Vec3> sources;   // both components, upper first
  Eigen::VectorXd strengths;   // 3 per source
  Eigen::VectorXd trace;       // boundary data at the panel centroids
  double residual = 0.0;       // relative area-weighted boundary misfit
  bool reliable = false;
};

// Golden-angle spiral on the unit sphere.
std::vector<Vec3> fibonacci_sphere(int n);

OracleSolution mfs_solve(const DimerGeometry& geom, const ElasticMedium& medium,
                         const Eigen::VectorXd& trace, const MFSConfig& config = {});

// One factorization shared across several boundary-data columns.
std::vector<OracleSolution> mfs_solve_many(const DimerGeometry& geom, const ElasticMedium& medium,
                                           const Eigen::MatrixXd& traces,
                                           const MFSConfig& config = {});

// Displacement and traction of the source representation at exterior points.
Vec3 oracle_value(const OracleSolution& sol, const Vec3& x);
Vec3 oracle_traction(const OracleSolution& sol, const Vec3& x, const Vec3& nu);

// Capacity entry -surface integral of (traction of w_i) . (data of w_j),
// quadratured over the mesh panels; reliability is inherited from the inputs.
struct OracleEnergy {
  double value = 0.0;
  bool reliable = false;
};

OracleEnergy oracle_energy(const OracleSolution& sol_i, const OracleSolution& sol_j,
                           const SurfaceMesh& mesh);

}  // namespace dimerbem
