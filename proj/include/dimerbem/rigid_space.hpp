#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dimerbem/boundary_ops.hpp"
#include "dimerbem/geometry.hpp"
#include "dimerbem/medium.hpp"

namespace dimerbem {

// Six rigid generators per component, in global coordinates and in this fixed
// order: translations e1, e2, e3, then (x2,-x1,0), (x3,0,-x1), (0,x3,-x2).
// Field 6c+k lives on component c and vanishes on the others.
Eigen::MatrixXd rigid_traces(const SurfaceMesh& mesh);

// Volume moments B(i,j) = integral over the supporting ball of k_i . k_j,
// evaluated in closed form for the sphere dimer.
Eigen::MatrixXd mass_moments(const DimerGeometry& geom);

struct CapacitySystem {
  Eigen::MatrixXd densities;  // dof x 6*components; column i solves S[zeta_i] = xi_i
  Eigen::MatrixXd E;          // E(i,j) = -integral of zeta_i . xi_j over the surface
  double rcond = 0.0;
};

CapacitySystem compute_capacity(const SurfaceMesh& mesh, const SingleLayerSolver& solver);

// Coefficient of |log eps| in the gap asymptotics of E(i,j); zero for the
// entries that stay bounded as the gap closes. Indices are 0-based fields.
double capacity_log_slope(const ElasticMedium& m, double curvature, int i, int j);

struct LogFit {
  double slope = 0.0;
  double constant = 0.0;
};

// Least-squares fit of values[k] = slope * |log eps[k]| + constant.
LogFit fit_log_constants(const std::vector<double>& eps, const std::vector<double>& values);

// Bounded parts of E at one gap value: subtract the predicted |log eps| growth.
Eigen::MatrixXd capacity_constants(const Eigen::MatrixXd& E, const ElasticMedium& m,
                                   double curvature, double eps);

struct MatrixLogFit {
  Eigen::MatrixXd slope;      // 12x12 fitted |log eps| coefficients
  Eigen::MatrixXd intercept;  // 12x12 fitted constants
};

// Entrywise least-squares fit of a capacity sweep E(eps[k]).
MatrixLogFit fit_capacity_matrix(const std::vector<double>& eps,
                                 const std::vector<Eigen::MatrixXd>& Es);

struct StructureReport {
  double norm = 0.0;          // max |E(i,j)|
  double off_pattern = 0.0;   // largest entry outside the four coupling blocks, / norm
  double asymmetry = 0.0;     // max |E - E^T| / norm
  double min_eigenvalue = 0.0;  // of the symmetrized E, / norm
  double mirror_deviation = 0.0;  // invariance under swapping the two components
  double sign_relation = 0.0;     // antisymmetric tie between mirrored couplings
  double sum_floor = 0.0;         // min over i of (E(i,i) +/- E(i,i+6)), / norm
  bool pass = false;
};

StructureReport check_capacity_structure(const Eigen::MatrixXd& E, double tol);

}  // namespace dimerbem
