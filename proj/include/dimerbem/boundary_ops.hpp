#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dimerbem/geometry.hpp"
#include "dimerbem/kernels.hpp"
#include "dimerbem/medium.hpp"

namespace dimerbem {

enum class OperatorKind : int {
  SingleLayer = 0,         // S_D, static, real
  SingleLayerDynamic = 1,  // S_D^w, complex
  SingleLayerSeries1 = 2,  // first frequency-series term, constant kernel
  SingleLayerSeries2 = 3,  // second frequency-series term, real
  DoubleLayer = 4,         // K_D, static, real
  NPAdjoint = 5,           // K*_D, static, real
  NPAdjointTerm2 = 6,      // K*_{D,2}, real
};

enum class ExecMode { Serial, Parallel };

struct AssemblyOptions {
  ExecMode exec = ExecMode::Parallel;
  double near_factor = 3.0;  // adaptive treatment when dist < near_factor * diam
  int max_depth = 24;
};

// Dense discretization stored in weighted (bilinear) form: the block M_pq
// approximates the double integral of the kernel over panels p x q, i.e.
// M = W T where W holds panel areas and T maps a density to its pointwise
// values at the collocation points. Hence <a, Op b>_{L2} = a^T M b, the
// static single layer is a symmetric matrix, and the N-P adjoint is the
// literal transpose of the double layer.
struct DenseBoundaryOperator {
  OperatorKind kind = OperatorKind::SingleLayer;
  double omega = 0.0;
  bool complex_valued = false;
  Eigen::MatrixXd re;
  Eigen::MatrixXcd cx;
  Eigen::VectorXd weights;  // panel areas expanded to 3N

  Eigen::Index size() const { return weights.size(); }
  // pointwise operator action at the collocation points: W^{-1} M density
  Eigen::VectorXd apply(const Eigen::VectorXd& density) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& density) const;
  // weighted inner product <a, Op b>_{L2(boundary)}
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

DenseBoundaryOperator assemble_single_layer(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                            double omega, const AssemblyOptions& opts = {});
DenseBoundaryOperator assemble_single_layer_series(const SurfaceMesh& mesh,
                                                   const ElasticMedium& medium, int n,
                                                   const AssemblyOptions& opts = {});
DenseBoundaryOperator assemble_double_layer(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                            const AssemblyOptions& opts = {});
DenseBoundaryOperator assemble_np_adjoint_static(const SurfaceMesh& mesh,
                                                 const ElasticMedium& medium,
                                                 const AssemblyOptions& opts = {});
DenseBoundaryOperator assemble_np_adjoint_term2(const SurfaceMesh& mesh,
                                                const ElasticMedium& medium,
                                                const AssemblyOptions& opts = {});

// Cached LU of the weighted static single layer; solves S phi = trace for
// repeated right-hand sides.
class SingleLayerSolver {
 public:
  explicit SingleLayerSolver(const DenseBoundaryOperator& S, double rcond_floor = 1e-14);
  Eigen::VectorXd solve(const Eigen::VectorXd& trace) const;
  Eigen::MatrixXd solve_many(const Eigen::MatrixXd& traces) const;
  double rcond() const { return rcond_; }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd weights_;
  double rcond_ = 0.0;
};

// Single-layer potential and its Jacobian (d u_i / d x_j) at off-boundary
// points; panels closer than near_factor * diam are integrated adaptively.
std::vector<Vec3c> evaluate_potential(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                      double omega, const Eigen::VectorXcd& density,
                                      const std::vector<Vec3>& points,
                                      const AssemblyOptions& opts = {});
std::vector<Mat3c> evaluate_potential_gradient(const SurfaceMesh& mesh,
                                               const ElasticMedium& medium, double omega,
                                               const Eigen::VectorXcd& density,
                                               const std::vector<Vec3>& points,
                                               const AssemblyOptions& opts = {});

void write_operator_binary(const DenseBoundaryOperator& op, const std::string& path);
DenseBoundaryOperator read_operator_binary(const std::string& path);

}  // namespace dimerbem
