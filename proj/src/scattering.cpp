#include "dimerbem/scattering.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "dimerbem/errors.hpp"
#include "dimerbem/rigid_space.hpp"

namespace dimerbem {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Eigen::VectorXd panel_weights(const SurfaceMesh& mesh) {
  Eigen::VectorXd w(mesh.dof_count());
  for (int p = 0; p < mesh.panel_count(); ++p) w.segment<3>(3 * p).setConstant(mesh.panels[p].area);
  return w;
}

Eigen::VectorXcd incident_trace(const IncidentWave& wave, const SurfaceMesh& mesh) {
  Eigen::VectorXcd t(mesh.dof_count());
  for (int p = 0; p < mesh.panel_count(); ++p)
    t.segment<3>(3 * p) = wave.value(mesh.panels[p].centroid);
  return t;
}

Eigen::VectorXcd solve_complex(const SingleLayerSolver& solver, const Eigen::VectorXcd& trace) {
  Eigen::MatrixXd rhs(trace.size(), 2);
  rhs.col(0) = trace.real();
  rhs.col(1) = trace.imag();
  const Eigen::MatrixXd sol = solver.solve_many(rhs);
  return sol.col(0) + kI * sol.col(1);
}

// Transmitted density and its rigid-trace pairings for one incident wave.
void transmitted_pairings(const IncidentWave& wave, const SurfaceMesh& mesh,
                          const SingleLayerSolver& solver, Eigen::VectorXcd& correction,
                          Eigen::VectorXcd& pairings) {
  correction = solve_complex(solver, incident_trace(wave, mesh));
  const Eigen::MatrixXd Z = rigid_traces(mesh);
  const Eigen::VectorXd w = panel_weights(mesh);
  pairings = Z.transpose() * w.asDiagonal() * correction;
}

// One sway-rock quartet. The four amplitudes split into two pairs after
// combining upper and lower rows by the mirror parity of the beta vectors:
// columns 0,1 carry (r1, r2, -r1, r2), columns 2,3 carry (r1, r2, r1, -r2).
// rigid holds the four density indices, betas the four block eigenvectors,
// omegas the four frequencies, g the four unnormalized pairings.
void quartet_amplitudes(const std::array<int, 4>& rigid,
                        const std::array<Eigen::Vector4d, 4>& betas, const double* omegas,
                        const Eigen::Vector4cd& g, const Eigen::MatrixXd& B, double rho,
                        double eta, double omega, std::complex<double>* out) {
  Eigen::Matrix4d M;  // pole-free part of the moment system, column per mode
  const int a = rigid[0], s = rigid[1], al = rigid[2], sl = rigid[3];
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4d& beta = betas[i];
    M(0, i) = beta(0) * B(a, a) + beta(1) * B(s, a);
    M(1, i) = beta(0) * B(a, s) + beta(1) * B(s, s);
    M(2, i) = beta(2) * B(al, al) + beta(3) * B(sl, al);
    M(3, i) = beta(2) * B(al, sl) + beta(3) * B(sl, sl);
  }
  const double den_lo = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  const double den_hi = M(0, 2) * M(1, 3) - M(0, 3) * M(1, 2);
  const double scale = M.cwiseAbs().maxCoeff();
  if (std::abs(den_lo) <= 1e-12 * scale * scale || std::abs(den_hi) <= 1e-12 * scale * scale)
    throw NumericalError("sway-rock moment system is degenerate; the mode basis does not resolve the quartet");
  const std::complex<double> gm = g(0) - g(2), gp = g(1) + g(3);
  const std::complex<double> hp = g(0) + g(2), hm = g(1) - g(3);
  const std::complex<double> d0 = (M(1, 1) * gm - M(0, 1) * gp) / (2.0 * rho * den_lo);
  const std::complex<double> d1 = (M(1, 0) * -gm + M(0, 0) * gp) / (2.0 * rho * den_lo);
  const std::complex<double> d2 = (M(1, 3) * hp - M(0, 3) * hm) / (2.0 * rho * den_hi);
  const std::complex<double> d3 = (-M(1, 2) * hp + M(0, 2) * hm) / (2.0 * rho * den_hi);
  const std::complex<double> d[4] = {d0, d1, d2, d3};
  for (int i = 0; i < 4; ++i) out[i] = eta / (omega * omega - omegas[i] * omegas[i]) * d[i];
}

}  // namespace

Vec3c IncidentWave::value(const Vec3& x) const {
  const double k = kind == Kind::P ? medium.kp(omega) : medium.ks(omega);
  const Vec3& u = kind == Kind::P ? direction : polarization;
  return amplitude * std::exp(kI * (k * direction.dot(x))) * u.cast<std::complex<double>>();
}

IncidentWave incident_plane_wave(const ElasticMedium& medium, IncidentWave::Kind kind,
                                 const Vec3& direction, const Vec3& polarization, double omega,
                                 double amplitude) {
  medium.validate();
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ConfigError("incident frequency must be positive");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw ConfigError("incident direction must be a unit vector");
  if (kind == IncidentWave::Kind::S) {
    if (std::abs(polarization.norm() - 1.0) > 1e-9)
      throw ConfigError("shear polarization must be a unit vector");
    if (std::abs(direction.dot(polarization)) > 1e-9)
      throw ConfigError("shear polarization must be orthogonal to the travel direction");
  }
  IncidentWave wave;
  wave.kind = kind;
  wave.direction = direction;
  wave.polarization = polarization;
  wave.omega = omega;
  wave.amplitude = amplitude;
  wave.medium = medium;
  return wave;
}

ModalCoefficients modal_from_pairings(const Eigen::VectorXcd& pairings,
                                      const AsymptoticFormulas& af, const Eigen::MatrixXd& moments,
                                      double rho, const ContrastParams& contrasts, double omega,
                                      double pole_floor_rel) {
  if (pairings.size() != 12) throw ConfigError("expected twelve rigid-trace pairings");
  if (moments.rows() != 12 || moments.cols() != 12)
    throw ConfigError("expected the 12x12 rigid mass-moment matrix");
  if (!(rho > 0.0)) throw ConfigError("background density must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("frequency must be positive");
  if (!(pole_floor_rel > 0.0)) throw ConfigError("pole floor must be positive");
  contrasts.check();
  for (int k = 0; k < 12; ++k)
    if (!std::isfinite(af.omega[k]) || af.omega[k] <= 0.0)
      throw NumericalError("resonant frequencies are not all positive and finite");
  for (const auto& beta : af.beta3)
    if (!beta.allFinite()) throw NumericalError("sway-rock mode vectors are not finite");
  for (const auto& beta : af.beta4)
    if (!beta.allFinite()) throw NumericalError("sway-rock mode vectors are not finite");

  ModalCoefficients mc;
  mc.omega = omega;
  mc.pairings = pairings;
  const double tau_omega = contrasts.tau * omega;
  mc.remainder_scale = tau_omega * tau_omega * tau_omega + contrasts.delta * omega;

  const double w2 = omega * omega;
  const auto pole = [&](int k) { return w2 - af.omega[k] * af.omega[k]; };

  // Translation pair: normalized pairings, exact inversion of the (-1,1)/(1,1) basis.
  const Eigen::Vector2cd g1(pairings(2) / moments(2, 2), pairings(8) / moments(8, 8));
  const double tr_den = 2.0 * rho * contrasts.tau * contrasts.tau;
  mc.b[0] = contrasts.delta * (af.beta1[0](0) * g1(0) + af.beta1[0](1) * g1(1)) / (tr_den * pole(0));
  mc.b[1] = contrasts.delta * (af.beta1[1](0) * g1(0) + af.beta1[1](1) * g1(1)) / (tr_den * pole(1));

  // Torsion pair.
  const Eigen::Vector2cd g2(pairings(3) / moments(3, 3), pairings(9) / moments(9, 9));
  mc.b[2] = contrasts.delta * (af.beta2[0](0) * g2(0) + af.beta2[0](1) * g2(1)) / (tr_den * pole(2));
  mc.b[3] = contrasts.delta * (af.beta2[1](0) * g2(0) + af.beta2[1](1) * g2(1)) / (tr_den * pole(3));

  // Sway-rock quartets, one per horizontal axis.
  const Eigen::Vector4cd g3(pairings(0), pairings(4), pairings(6), pairings(10));
  quartet_amplitudes({0, 4, 6, 10}, af.beta3, af.omega.data() + 4, g3, moments, rho,
                     contrasts.eta, omega, mc.b.data() + 4);
  const Eigen::Vector4cd g4(pairings(1), pairings(5), pairings(7), pairings(11));
  quartet_amplitudes({1, 5, 7, 11}, af.beta4, af.omega.data() + 8, g4, moments, rho,
                     contrasts.eta, omega, mc.b.data() + 8);

  for (int k = 0; k < 12; ++k) {
    if (std::abs(pole(k)) < pole_floor_rel * af.omega[k] * af.omega[k]) {
      mc.resonant[k] = true;
      mc.b[k] = std::complex<double>(std::numeric_limits<double>::quiet_NaN(),
                                     std::numeric_limits<double>::quiet_NaN());
    }
  }
  return mc;
}

ModalCoefficients modal_coefficients(const IncidentWave& wave, const SurfaceMesh& mesh,
                                     const SingleLayerSolver& solver, const AsymptoticFormulas& af,
                                     const Eigen::MatrixXd& moments, const ContrastParams& contrasts,
                                     double pole_floor_rel) {
  Eigen::VectorXcd correction, pairings;
  transmitted_pairings(wave, mesh, solver, correction, pairings);
  return modal_from_pairings(pairings, af, moments, wave.medium.rho, contrasts, wave.omega,
                             pole_floor_rel);
}

ScatteringSolution solve_scattering(const IncidentWave& wave, const SurfaceMesh& mesh,
                                    const SingleLayerSolver& solver, const AsymptoticFormulas& af,
                                    const Eigen::MatrixXd& basis, const Eigen::MatrixXd& moments,
                                    const ContrastParams& contrasts, double pole_floor_rel) {
  if (basis.rows() != mesh.dof_count() || basis.cols() != 12)
    throw ConfigError("mode basis must hold the twelve rigid densities of this mesh");
  ScatteringSolution sol;
  sol.wave = wave;
  Eigen::VectorXcd pairings;
  transmitted_pairings(wave, mesh, solver, sol.correction, pairings);
  sol.coeffs = modal_from_pairings(pairings, af, moments, wave.medium.rho, contrasts, wave.omega,
                                   pole_floor_rel);
  Eigen::VectorXcd weights = Eigen::VectorXcd::Zero(12);
  for (int k = 0; k < 12; ++k) {
    if (sol.coeffs.resonant[k]) continue;
    weights += sol.coeffs.b[k] * asymptotic_mode_vector(af, k + 1).cast<std::complex<double>>();
  }
  sol.mode_density = basis.cast<std::complex<double>>() * weights;
  return sol;
}

std::vector<Vec3c> total_field(const ScatteringSolution& solution, const SurfaceMesh& mesh,
                               const std::vector<Vec3>& points, const AssemblyOptions& opts) {
  const auto transmitted = evaluate_potential(mesh, solution.wave.medium, solution.wave.omega,
                                              solution.correction, points, opts);
  const auto resonant =
      evaluate_potential(mesh, solution.wave.medium, 0.0, solution.mode_density, points, opts);
  std::vector<Vec3c> u(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    u[i] = solution.wave.value(points[i]) - transmitted[i] + resonant[i];
  return u;
}

ResonanceScan resonance_scan(const IncidentWave& wave, const SurfaceMesh& mesh,
                             const SingleLayerSolver& solver, const AsymptoticFormulas& af,
                             const Eigen::MatrixXd& basis, const Eigen::MatrixXd& moments,
                             const ContrastParams& contrasts, const std::vector<double>& omegas,
                             const Vec3& gap_probe, const Vec3& far_probe, double pole_floor_rel,
                             const AssemblyOptions& opts) {
  ResonanceScan scan;
  scan.points.reserve(omegas.size());
  const std::vector<Vec3> probes = {gap_probe, far_probe};
  for (double omega : omegas) {
    IncidentWave w = wave;
    w.omega = omega;
    const ScatteringSolution sol =
        solve_scattering(w, mesh, solver, af, basis, moments, contrasts, pole_floor_rel);
    const auto u = total_field(sol, mesh, probes, opts);
    ScanPoint point;
    point.omega = omega;
    point.b = sol.coeffs.b;
    point.resonant = sol.coeffs.resonant;
    point.gap_amplitude = u[0].norm();
    point.far_amplitude = (u[1] - w.value(far_probe)).norm();
    scan.points.push_back(point);
  }
  return scan;
}

std::string scan_csv(const ResonanceScan& scan) {
  std::ostringstream out;
  out << "omega";
  for (int k = 1; k <= 12; ++k) out << ",b" << k << "_re,b" << k << "_im";
  out << ",gap_amplitude,far_amplitude\n";
  out << std::setprecision(12);
  for (const ScanPoint& p : scan.points) {
    out << p.omega;
    for (int k = 0; k < 12; ++k) out << "," << p.b[k].real() << "," << p.b[k].imag();
    out << "," << p.gap_amplitude << "," << p.far_amplitude << "\n";
  }
  return out.str();
}

}  // namespace dimerbem
