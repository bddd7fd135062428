#pragma once

#include <string>
#include <vector>

#include "dimerbem/boundary_ops.hpp"
#include "dimerbem/geometry.hpp"
#include "dimerbem/resonance.hpp"
#include "dimerbem/rigid_space.hpp"

namespace dimerbem {

// Linear gap profile: 1 on the upper inclusion boundary, 0 on the lower one,
// affine in x3 between them at fixed transverse position. Only defined in the
// chart cylinder, strictly between the two surface graphs.
double gap_profile(const GapChart& chart, const Vec3& x);
Vec3 gap_profile_gradient(const GapChart& chart, const Vec3& x);

// Explicit competitor fields for the twelve rigid boundary conditions:
// field i carries trace k_i on one boundary and 0 on the other (1..6 excite
// the upper inclusion, 7..12 the lower). Their gradients reproduce the
// gap-region gradients of the true harmonic extensions up to O(1).
Vec3 aux_field(const GapChart& chart, const ElasticMedium& m, int field_index, const Vec3& x);
// Jacobian J(i,j) = d v_i / d x_j of the competitor field.
Mat3 aux_gradient_predictor(const GapChart& chart, const ElasticMedium& m, int field_index,
                            const Vec3& x);

struct EigenmodeField {
  int mode_index = 0;       // 1..12 closed-form numbering; 0 for a custom combination
  Eigen::VectorXd coeff;    // 12 coefficients over the capacity densities
  Eigen::VectorXd density;  // assembled boundary density, 3 * panels
};

// Combine capacity densities (columns of zeta_basis) with the given weights.
EigenmodeField eigenmode_field(const Eigen::MatrixXd& zeta_basis, const Eigen::VectorXd& coeff,
                               int mode_index = 0);

// Leading-order density of closed-form mode i, embedding its block eigenvector.
EigenmodeField asymptotic_eigenmode(const Eigen::MatrixXd& zeta_basis,
                                    const AsymptoticFormulas& af, int mode_index);

// Relative weighted residual of S[density] against the rigid trace combination
// the mode is supposed to carry.
double trace_residual(const SurfaceMesh& mesh, const DenseBoundaryOperator& S,
                      const EigenmodeField& mode);

// Static single-layer evaluation of the mode off the boundary.
Vec3 eigenmode_value(const SurfaceMesh& mesh, const ElasticMedium& m, const EigenmodeField& mode,
                     const Vec3& x, const AssemblyOptions& opts = {});
Mat3 eigenmode_gradient(const SurfaceMesh& mesh, const ElasticMedium& m,
                        const EigenmodeField& mode, const Vec3& x,
                        const AssemblyOptions& opts = {});

// Where in the gap the gradient is sampled. Center is the contact axis;
// SqrtEps sits at transverse radius sqrt(eps / curvature), where the
// bounded-at-center modes peak, in the azimuth (x1, x2) (default +x1 —
// rotation modes vanish along their own axis, so y-family modes need the
// +x2 ring); Offset is a fixed midline point.
struct GapProbe {
  enum class Kind { Center, SqrtEps, Offset };
  Kind kind = Kind::Center;
  double x1 = 0.0, x2 = 0.0;  // Offset coordinates or SqrtEps azimuth
};

Vec3 probe_point(const GapChart& chart, const GapProbe& probe);

// Theoretical growth rate of |grad u_mode| at the probe as the gap closes,
// up to constants and logarithms: delta^e with the returned exponent e of eps.
double predicted_exponent(int mode_index, const GapProbe& probe);
// The same rate evaluated literally at one gap value (including logarithms).
double predicted_rate(const GapChart& chart, int mode_index, const GapProbe& probe);

struct BlowupConfig {
  DimerConfig base;             // gap is overridden by each sweep value
  ElasticMedium medium;
  double eta = 1e-4;
  std::vector<double> epsilons;
  std::vector<int> modes;       // closed-form indices 1..12
  std::vector<GapProbe> probes;
  AssemblyOptions assembly;
};

struct BlowupSample {
  double eps = 0.0;
  int mode = 0;
  int probe = 0;           // index into the probe list
  double grad_norm = 0.0;  // Frobenius norm of the mode Jacobian at the probe
  double axial_share = 0.0;  // fraction of that norm carried by the x3 derivatives
  double predicted = 0.0;    // literal theorem rate at this gap value
};

struct BlowupFit {
  int mode = 0;
  int probe = 0;
  double fitted_exponent = 0.0;
  double log_constant = 0.0;  // intercept of the log-log fit
  double residual = 0.0;      // rms of the weighted fit residuals
  double predicted_exponent = 0.0;
};

struct BlowupSweep {
  std::vector<double> epsilons;
  std::vector<int> modes;
  std::vector<GapProbe> probes;
  std::vector<BlowupSample> samples;
  std::vector<BlowupFit> fits;
  std::vector<std::string> errors;  // per-gap failures; the sweep continues without them
};

// For each gap value: build the dimer, solve for the capacity densities,
// assemble each requested closed-form mode, and record gradient norms at the
// probes. Log-log rates are fitted per (mode, probe) with the coarsest gap
// down-weighted.
BlowupSweep blowup_sweep(const BlowupConfig& config);

std::string blowup_csv(const BlowupSweep& sweep);

}  // namespace dimerbem
