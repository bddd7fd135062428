#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimerbem/boundary_ops.hpp"
#include "dimerbem/geometry.hpp"
#include "dimerbem/medium.hpp"
#include "dimerbem/resonance.hpp"

namespace dimerbem {

// Time-harmonic plane wave in the background medium: compressional (P,
// displacement along the travel direction) or shear (S, displacement along a
// transverse polarization).
struct IncidentWave {
  enum class Kind { P, S };
  Kind kind = Kind::P;
  Vec3 direction = Vec3(0, 0, 1);     // unit travel direction
  Vec3 polarization = Vec3(1, 0, 0);  // unit, orthogonal to direction; S only
  double omega = 0.0;
  double amplitude = 1.0;
  ElasticMedium medium;

  Vec3c value(const Vec3& x) const;
};

// Validates the inputs: unit direction, positive frequency, and for shear
// waves a unit polarization orthogonal to the travel direction.
IncidentWave incident_plane_wave(const ElasticMedium& medium, IncidentWave::Kind kind,
                                 const Vec3& direction, const Vec3& polarization, double omega,
                                 double amplitude = 1.0);

// Excitation amplitudes of the twelve resonant modes for one incident wave.
// A mode whose pole factor omega^2 - omega_i^2 falls under the floor is
// flagged resonant and its amplitude reported as NaN: the expansion has no
// finite leading-order value there.
struct ModalCoefficients {
  double omega = 0.0;
  std::array<std::complex<double>, 12> b{};  // b[k] multiplies mode k+1
  std::array<bool, 12> resonant{};
  Eigen::VectorXcd pairings;    // surface moments of the transmitted density against the rigid traces
  double remainder_scale = 0.0; // nominal size of the dropped (tau*omega)^3 + delta*omega terms
};

// Core algebra, mesh-free: the twelve surface pairings determine the twelve
// amplitudes through the block-diagonal resonance structure. The translation
// and torsion pairs invert exactly; the sway-rock quartets reduce to two 2x2
// systems after symmetrizing upper and lower rows. pole_floor_rel is the
// floor on |omega^2 - omega_i^2| relative to omega_i^2.
ModalCoefficients modal_from_pairings(const Eigen::VectorXcd& pairings,
                                      const AsymptoticFormulas& af,
                                      const Eigen::MatrixXd& moments, double rho,
                                      const ContrastParams& contrasts, double omega,
                                      double pole_floor_rel = 1e-3);

// Solves the static boundary equation for the incident trace and forms the
// pairings; moments is the 12x12 rigid mass-moment matrix of the geometry.
ModalCoefficients modal_coefficients(const IncidentWave& wave, const SurfaceMesh& mesh,
                                     const SingleLayerSolver& solver,
                                     const AsymptoticFormulas& af, const Eigen::MatrixXd& moments,
                                     const ContrastParams& contrasts,
                                     double pole_floor_rel = 1e-3);

// Leading-order scattering solution: the incident wave, the modal amplitudes,
// and the two boundary densities of the field representation. Flagged
// resonant modes are left out of mode_density so the field stays finite.
struct ScatteringSolution {
  IncidentWave wave;
  ModalCoefficients coeffs;
  Eigen::VectorXcd correction;    // transmitted density, radiates at the incident frequency
  Eigen::VectorXcd mode_density;  // weighted resonant densities, radiate through the static potential
};

ScatteringSolution solve_scattering(const IncidentWave& wave, const SurfaceMesh& mesh,
                                    const SingleLayerSolver& solver, const AsymptoticFormulas& af,
                                    const Eigen::MatrixXd& basis, const Eigen::MatrixXd& moments,
                                    const ContrastParams& contrasts, double pole_floor_rel = 1e-3);

// Total displacement at exterior points: incident wave minus the transmitted
// correction plus the resonant contribution.
std::vector<Vec3c> total_field(const ScatteringSolution& solution, const SurfaceMesh& mesh,
                               const std::vector<Vec3>& points, const AssemblyOptions& opts = {});

// Frequency sweep sharing one boundary factorization. Each grid point records
// the modal amplitudes, |u| at a gap probe, and |u - u^i| at a far probe.
struct ScanPoint {
  double omega = 0.0;
  std::array<std::complex<double>, 12> b{};
  std::array<bool, 12> resonant{};
  double gap_amplitude = 0.0;
  double far_amplitude = 0.0;
};

struct ResonanceScan {
  std::vector<ScanPoint> points;
};

ResonanceScan resonance_scan(const IncidentWave& wave, const SurfaceMesh& mesh,
                             const SingleLayerSolver& solver, const AsymptoticFormulas& af,
                             const Eigen::MatrixXd& basis, const Eigen::MatrixXd& moments,
                             const ContrastParams& contrasts, const std::vector<double>& omegas,
                             const Vec3& gap_probe, const Vec3& far_probe,
                             double pole_floor_rel = 1e-3, const AssemblyOptions& opts = {});

// Columns: omega, re/im of b1..b12, gap amplitude, far amplitude.
std::string scan_csv(const ResonanceScan& scan);

}  // namespace dimerbem
