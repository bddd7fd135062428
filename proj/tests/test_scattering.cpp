#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <sstream>

#include "dimerbem/errors.hpp"
#include "dimerbem/geometry.hpp"
#include "dimerbem/medium.hpp"
#include "dimerbem/resonance.hpp"
#include "dimerbem/rigid_space.hpp"
#include "dimerbem/scattering.hpp"

using namespace dimerbem;
using C = std::complex<double>;

namespace {

ElasticMedium canonical_medium() { return ElasticMedium{}; }

// Shared level-1 problem at gap 1e-2: mesh, factorization, capacity basis,
// mass moments, and the closed-form resonance data.
struct Fixture {
  DimerGeometry geom;
  DenseBoundaryOperator S;
  std::unique_ptr<SingleLayerSolver> solver;
  CapacitySystem cap;
  Eigen::MatrixXd B;
  AsymptoticFormulas af;
  ContrastParams contrasts;
};

const Fixture& fix() {
  static const Fixture f = [] {
    Fixture f;
    DimerConfig cfg;
    cfg.gap = 1e-2;
    cfg.refinement = 1;
    f.geom = build_sphere_dimer(cfg);
    f.S = assemble_single_layer(f.geom.mesh, canonical_medium(), 0.0);
    f.solver = std::make_unique<SingleLayerSolver>(f.S);
    f.cap = compute_capacity(f.geom.mesh, *f.solver);
    const Eigen::MatrixXd Cfit = capacity_constants(f.cap.E, canonical_medium(), 1.0, cfg.gap);
    f.B = mass_moments(f.geom);
    f.af = asymptotic_formulas(f.B, Cfit, canonical_medium(), 1e-4, cfg.gap, 1.0, 4.0 * M_PI / 3.0);
    f.contrasts = ContrastParams::from_eta_tau(1e-4, 1.0);
    return f;
  }();
  return f;
}

// Elastic operator applied to the wave by central differences, plus the
// inertial term; zero for an exact plane wave.
Vec3c lame_residual(const IncidentWave& w, const Vec3& x, double h) {
  const auto u = [&](const Vec3& y) { return w.value(y); };
  Vec3c lap = Vec3c::Zero();
  Vec3c graddiv = Vec3c::Zero();
  for (int i = 0; i < 3; ++i) {
    Vec3 ei = Vec3::Zero();
    ei(i) = h;
    lap += (u(x + ei) - 2.0 * u(x) + u(x - ei)) / (h * h);
    for (int j = 0; j < 3; ++j) {
      Vec3 ej = Vec3::Zero();
      ej(j) = h;
      if (i == j) {
        graddiv(i) += (u(x + ei)(j) - 2.0 * u(x)(j) + u(x - ei)(j)) / (h * h);
      } else {
        graddiv(i) += (u(x + ei + ej)(j) - u(x + ei - ej)(j) - u(x - ei + ej)(j) +
                       u(x - ei - ej)(j)) /
                      (4.0 * h * h);
      }
    }
  }
  const ElasticMedium& m = w.medium;
  return m.mu * lap + (m.lambda + m.mu) * graddiv + m.rho * w.omega * w.omega * u(x);
}

double max_abs_b(const ModalCoefficients& mc, std::initializer_list<int> modes) {
  double v = 0.0;
  for (int k : modes) v = std::max(v, std::abs(mc.b[k - 1]));
  return v;
}

}  // namespace

TEST_CASE("plane waves: exact values and a vanishing elastic residual") {
  const ElasticMedium m = canonical_medium();

  const auto pw = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.05);
  const Vec3c p0 = pw.value(Vec3::Zero());
  CHECK(std::abs(p0(0)) == 0.0);
  CHECK(std::abs(p0(1)) == 0.0);
  CHECK(p0(2).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p0(2).imag() == 0.0);
  const double kp = 0.05 / std::sqrt(3.0);  // compressional speed sqrt(lambda + 2 mu) at unit density
  const Vec3c pz = pw.value(Vec3(0.3, -0.2, 0.7));
  CHECK(pz(2).real() == doctest::Approx(std::cos(kp * 0.7)).epsilon(1e-14));
  CHECK(pz(2).imag() == doctest::Approx(std::sin(kp * 0.7)).epsilon(1e-14));

  const auto sw = incident_plane_wave(m, IncidentWave::Kind::S, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.05);
  const Vec3c s0 = sw.value(Vec3(0, 0, 0.4));
  CHECK(s0(0).real() == doctest::Approx(std::cos(0.05 * 0.4)).epsilon(1e-14));  // shear speed 1
  CHECK(s0(0).imag() == doctest::Approx(std::sin(0.05 * 0.4)).epsilon(1e-14));
  CHECK(std::abs(s0(2)) == 0.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  const auto sw2 = incident_plane_wave(m, IncidentWave::Kind::S, Vec3(1, 2, 2).normalized(),
                                       Vec3(2, 1, -2).normalized(), 0.3);
  for (int t = 0; t < 10; ++t) {
    const Vec3 x(pick(rng), pick(rng), pick(rng));
    CHECK(lame_residual(pw, x, 1e-3).norm() <= 1e-6);
    CHECK(lame_residual(sw2, x, 1e-3).norm() <= 1e-6);
  }

  CHECK_THROWS_AS(incident_plane_wave(m, IncidentWave::Kind::S, Vec3(0, 0, 1), Vec3(0, 0, 1), 0.05),
                  ConfigError);
  CHECK_THROWS_AS(incident_plane_wave(m, IncidentWave::Kind::S, Vec3(0, 0, 1), Vec3(0, 2, 0), 0.05),
                  ConfigError);
  CHECK_THROWS_AS(incident_plane_wave(m, IncidentWave::Kind::P, Vec3(1, 0, 1), Vec3(1, 0, 0), 0.05),
                  ConfigError);
  CHECK_THROWS_AS(incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.0),
                  ConfigError);
  CHECK_THROWS_AS(incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), -0.1),
                  ConfigError);
  // a compressional wave ignores the polarization slot
  CHECK_NOTHROW(incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(0, 0, 1), 0.05));
}

TEST_CASE("modal algebra: closed forms equal the direct block solves") {
  const Fixture& f = fix();
  const double rho = 1.0;
  const double omega = 0.04;

  Eigen::VectorXcd g(12);
  for (int j = 0; j < 12; ++j) g(j) = C(1.0 + 0.5 * j, 0.3 * j - 1.0);
  const auto mc = modal_from_pairings(g, f.af, f.B, rho, f.contrasts, omega);
  CHECK(mc.remainder_scale == doctest::Approx(std::pow(omega, 3) + 1e-4 * omega).epsilon(1e-12));

  const double w2 = omega * omega;
  // translation and torsion pairs: columns rho tau^2 (w^2 - w_i^2) beta_i B_jj
  for (int blk = 0; blk < 2; ++blk) {
    const int ju = blk == 0 ? 2 : 3, jl = blk == 0 ? 8 : 9;
    const auto& betas = blk == 0 ? f.af.beta1 : f.af.beta2;
    Eigen::Matrix2cd N;
    for (int i = 0; i < 2; ++i) {
      const double wi = f.af.omega[2 * blk + i];
      N.col(i) = (rho * (w2 - wi * wi) *
                  Eigen::Vector2d(betas[i](0) * f.B(ju, ju), betas[i](1) * f.B(jl, jl)))
                     .cast<C>();
    }
    const Eigen::Vector2cd bd =
        N.fullPivLu().solve(f.contrasts.delta * Eigen::Vector2cd(g(ju), g(jl)));
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(bd(i) - mc.b[2 * blk + i]) <= 1e-12 * std::abs(bd(i)));
  }
  // sway-rock quartets: columns pair the betas with the mass moments
  for (int blk = 0; blk < 2; ++blk) {
    const std::array<int, 4> rg = blk == 0 ? std::array<int, 4>{0, 4, 6, 10}
                                           : std::array<int, 4>{1, 5, 7, 11};
    const auto& betas = blk == 0 ? f.af.beta3 : f.af.beta4;
    Eigen::Matrix4cd N;
    for (int i = 0; i < 4; ++i) {
      const auto& beta = betas[i];
      Eigen::Vector4d col;
      col(0) = beta(0) * f.B(rg[0], rg[0]) + beta(1) * f.B(rg[1], rg[0]);
      col(1) = beta(0) * f.B(rg[0], rg[1]) + beta(1) * f.B(rg[1], rg[1]);
      col(2) = beta(2) * f.B(rg[2], rg[2]) + beta(3) * f.B(rg[3], rg[2]);
      col(3) = beta(2) * f.B(rg[2], rg[3]) + beta(3) * f.B(rg[3], rg[3]);
      const double wi = f.af.omega[4 * (blk + 1) + i];
      N.col(i) = (rho * (w2 - wi * wi) * col).cast<C>();
    }
    const Eigen::Vector4cd gb(g(rg[0]), g(rg[1]), g(rg[2]), g(rg[3]));
    const Eigen::Vector4cd bd = N.fullPivLu().solve(f.contrasts.delta * gb);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(bd(i) - mc.b[4 * (blk + 1) + i]) <= 1e-12 * std::abs(bd(i)));
  }

  // linearity in the pairings
  const auto mc2 = modal_from_pairings(2.0 * g, f.af, f.B, rho, f.contrasts, omega);
  for (int k = 0; k < 12; ++k) CHECK(std::abs(mc2.b[k] - 2.0 * mc.b[k]) <= 1e-15 * std::abs(mc.b[k]));

  // for fixed pairings each amplitude is a pure pole: b * (w^2 - w_i^2) is frequency-free
  const auto mca = modal_from_pairings(g, f.af, f.B, rho, f.contrasts, 0.045);
  const auto mcb = modal_from_pairings(g, f.af, f.B, rho, f.contrasts, 0.052);
  for (int k = 0; k < 12; ++k) {
    const double wk2 = f.af.omega[k] * f.af.omega[k];
    const C pa = mca.b[k] * C(0.045 * 0.045 - wk2, 0.0);
    const C pb = mcb.b[k] * C(0.052 * 0.052 - wk2, 0.0);
    CHECK(std::abs(pa - pb) <= 1e-12 * std::abs(pa));
  }

  // zero pairings annihilate every amplitude
  const auto mc0 = modal_from_pairings(Eigen::VectorXcd::Zero(12), f.af, f.B, rho, f.contrasts, omega);
  for (int k = 0; k < 12; ++k) {
    CHECK(std::abs(mc0.b[k]) == 0.0);
    CHECK_FALSE(mc0.resonant[k]);
  }

  // pole floor: a frequency on a sway-rock resonance flags the mode and its twin
  const double wres = f.af.omega[4] * std::sqrt(1.0 + 5e-4);
  const auto mcr = modal_from_pairings(g, f.af, f.B, rho, f.contrasts, wres);
  CHECK(mcr.resonant[4]);
  CHECK(mcr.resonant[8]);  // the y quartet shares its frequencies with the x quartet
  CHECK(std::isnan(mcr.b[4].real()));
  CHECK(std::isnan(mcr.b[8].real()));
  for (int k : {0, 1, 2, 3, 5, 6, 7, 9, 10, 11}) {
    CHECK_FALSE(mcr.resonant[k]);
    CHECK(std::isfinite(std::abs(mcr.b[k])));
  }

  // scaling the contrast: above all resonances a quarter eta shrinks every
  // amplitude about fourfold (the poles themselves move with eta)
  {
    const double w = 2.0 * f.af.omega[0];
    const Eigen::MatrixXd Cfit = capacity_constants(f.cap.E, canonical_medium(), 1.0, 1e-2);
    const auto af4 =
        asymptotic_formulas(f.B, Cfit, canonical_medium(), 2.5e-5, 1e-2, 1.0, 4.0 * M_PI / 3.0);
    const auto c4 = ContrastParams::from_eta_tau(2.5e-5, 1.0);
    const auto hi = modal_from_pairings(g, f.af, f.B, rho, f.contrasts, w);
    const auto lo = modal_from_pairings(g, af4, f.B, rho, c4, w);
    for (int k = 0; k < 12; ++k) {
      const double ratio = std::abs(hi.b[k]) / std::abs(lo.b[k]);
      CHECK(ratio >= 3.0);
      CHECK(ratio <= 5.5);
    }
  }

  CHECK_THROWS_AS(modal_from_pairings(g.head(11), f.af, f.B, rho, f.contrasts, omega), ConfigError);
  CHECK_THROWS_AS(modal_from_pairings(g, f.af, f.B.topRows(11), rho, f.contrasts, omega), ConfigError);
  CHECK_THROWS_AS(modal_from_pairings(g, f.af, f.B, -1.0, f.contrasts, omega), ConfigError);
  CHECK_THROWS_AS(modal_from_pairings(g, f.af, f.B, rho, f.contrasts, -0.04), ConfigError);
  AsymptoticFormulas bad = f.af;
  bad.beta4[2](1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(modal_from_pairings(g, bad, f.B, rho, f.contrasts, omega), NumericalError);
  AsymptoticFormulas neg = f.af;
  neg.omega[3] = -neg.omega[3];
  CHECK_THROWS_AS(modal_from_pairings(g, neg, f.B, rho, f.contrasts, omega), NumericalError);
  AsymptoticFormulas deg = f.af;
  deg.beta3[1] = deg.beta3[0];
  CHECK_THROWS_AS(modal_from_pairings(g, deg, f.B, rho, f.contrasts, omega), NumericalError);
}

TEST_CASE("static limit: pairings of a slow wave reproduce the capacity matrix") {
  const Fixture& f = fix();
  const auto wave = incident_plane_wave(canonical_medium(), IncidentWave::Kind::P, Vec3(0, 0, 1),
                                        Vec3(1, 0, 0), 1e-3);
  const auto mc = modal_coefficients(wave, f.geom.mesh, *f.solver, f.af, f.B, f.contrasts);

  // a nearly constant trace transmits the summed axial capacity densities
  const double expect_u = -(f.cap.E(2, 2) + f.cap.E(8, 2));
  const double expect_l = -(f.cap.E(2, 8) + f.cap.E(8, 8));
  CHECK(std::abs(mc.pairings(2) - C(expect_u, 0)) <= 5e-3 * std::abs(expect_u));
  CHECK(std::abs(mc.pairings(2).real() - expect_u) <= 1e-5 * std::abs(expect_u));
  CHECK(std::abs(mc.pairings(8) - C(expect_l, 0)) <= 5e-3 * std::abs(expect_l));
  // mirror symmetry conjugates the two axial pairings
  CHECK(std::abs(mc.pairings(8) - std::conj(mc.pairings(2))) <= 1e-10 * std::abs(mc.pairings(2)));
  // every non-axial pairing vanishes
  for (int j : {0, 1, 3, 4, 5, 6, 7, 9, 10, 11})
    CHECK(std::abs(mc.pairings(j)) <= 1e-10 * std::abs(mc.pairings(2)));
}

TEST_CASE("incidence symmetries select the matching mode blocks") {
  const Fixture& f = fix();
  const ElasticMedium m = canonical_medium();

  // normal compressional wave: only the axial translation pair responds
  {
    const auto wave = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.03);
    const auto mc = modal_coefficients(wave, f.geom.mesh, *f.solver, f.af, f.B, f.contrasts);
    const double lead = max_abs_b(mc, {1, 2});
    CHECK(std::abs(mc.b[1]) >= 0.3);
    CHECK(std::abs(mc.b[1]) <= 0.5);
    CHECK(std::abs(mc.b[0]) >= 0.008);
    CHECK(std::abs(mc.b[0]) <= 0.015);
    CHECK(max_abs_b(mc, {3, 4, 5, 6, 7, 8, 9, 10, 11, 12}) <= 1e-10 * lead);
  }
  // vertical shear polarized along x: only the x sway-rock quartet responds
  {
    const auto wave = incident_plane_wave(m, IncidentWave::Kind::S, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.03);
    const auto mc = modal_coefficients(wave, f.geom.mesh, *f.solver, f.af, f.B, f.contrasts);
    const double lead = max_abs_b(mc, {5, 6, 7, 8});
    CHECK(std::abs(mc.b[7]) >= 0.2);
    CHECK(std::abs(mc.b[7]) <= 0.4);
    CHECK(max_abs_b(mc, {1, 2, 3, 4, 9, 10, 11, 12}) <= 1e-10 * lead);
  }
  // oblique shear polarized along y: torsion pair plus the y quartet
  {
    const Vec3 d(std::sin(0.5), 0.0, std::cos(0.5));
    const auto wave = incident_plane_wave(m, IncidentWave::Kind::S, d, Vec3(0, 1, 0), 0.03);
    const auto mc = modal_coefficients(wave, f.geom.mesh, *f.solver, f.af, f.B, f.contrasts);
    const double lead = max_abs_b(mc, {3, 4, 9, 10, 11, 12});
    CHECK(std::abs(mc.b[3]) >= 0.01);
    CHECK(std::abs(mc.b[3]) <= 0.03);
    CHECK(std::abs(mc.b[2]) >= 1e-4);
    CHECK(std::abs(mc.b[2]) <= 1e-3);
    CHECK(std::abs(mc.b[11]) >= 0.2);
    CHECK(std::abs(mc.b[11]) <= 0.4);
    CHECK(max_abs_b(mc, {1, 2, 5, 6, 7, 8}) <= 1e-10 * lead);
  }
}

TEST_CASE("pole approach: inverse-distance growth and the zero-wave annihilation") {
  const Fixture& f = fix();
  const ElasticMedium m = canonical_medium();
  const double w1 = f.af.omega[0];

  std::vector<double> lx, ly;
  for (int j = 0; j < 12; ++j) {
    const double s = 3e-3 * std::pow(70.0, j / 11.0) * (j % 2 ? 1.0 : -1.0);
    const double w = w1 * std::sqrt(1.0 + s);
    const auto wave = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), w);
    const auto mc = modal_coefficients(wave, f.geom.mesh, *f.solver, f.af, f.B, f.contrasts);
    REQUIRE_FALSE(mc.resonant[0]);
    lx.push_back(std::log(std::abs(w * w - w1 * w1)));
    ly.push_back(std::log(std::abs(mc.b[0])));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sx += lx[j];
    sy += ly[j];
    sxx += lx[j] * lx[j];
    sxy += lx[j] * ly[j];
  }
  const double n = static_cast<double>(lx.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));

  // a zero-amplitude wave excites nothing and scatters nothing
  const auto mute = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.03, 0.0);
  const auto sol = solve_scattering(mute, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B, f.contrasts);
  for (int k = 0; k < 12; ++k) CHECK(std::abs(sol.coeffs.b[k]) == 0.0);
  const auto u = total_field(sol, f.geom.mesh, {Vec3(0, 0, 0), Vec3(1.1, 0.4, 2.0)});
  CHECK(u[0].norm() <= 1e-14);
  CHECK(u[1].norm() <= 1e-14);
}

TEST_CASE("resonant amplification, far-field decay, and field linearity") {
  const Fixture& f = fix();
  const ElasticMedium m = canonical_medium();
  const double wlow = f.af.omega[1];  // the lowest resonance, the in-phase translation pair

  const std::vector<Vec3> probes = {Vec3(0, 0, 0), Vec3(100, 0, 0), Vec3(200, 0, 0)};
  double gap_on = 0, gap_off = 0, b2_on = 0, b2_off = 0, far_on100 = 0, far_on200 = 0, far_off = 0;
  for (double w : {1.01 * wlow, 2.0 * wlow}) {
    const auto wave = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), w);
    const auto sol = solve_scattering(wave, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B, f.contrasts);
    const auto u = total_field(sol, f.geom.mesh, probes);
    if (w < 1.5 * wlow) {
      gap_on = u[0].norm();
      b2_on = std::abs(sol.coeffs.b[1]);
      far_on100 = (u[1] - wave.value(probes[1])).norm();
      far_on200 = (u[2] - wave.value(probes[2])).norm();
    } else {
      gap_off = u[0].norm();
      b2_off = std::abs(sol.coeffs.b[1]);
      far_off = (u[1] - wave.value(probes[1])).norm();
    }
  }
  CHECK(gap_on >= 10.0 * gap_off);
  // the amplitude ratio is the pole ratio (4 - 1) / (1.01^2 - 1) of the shared numerator
  CHECK(b2_on / b2_off == doctest::Approx(3.0 / 0.0201).epsilon(0.02));
  CHECK(far_on100 / far_on200 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(far_off <= 0.05);  // unit incident amplitude

  // doubling the incident amplitude doubles the amplitudes and the scattered field
  {
    const double w = 2.0 * wlow;
    const auto w1 = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), w, 1.0);
    const auto w2 = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0), w, 2.0);
    const auto s1 = solve_scattering(w1, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B, f.contrasts);
    const auto s2 = solve_scattering(w2, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B, f.contrasts);
    for (int k = 0; k < 12; ++k)
      CHECK(std::abs(s2.coeffs.b[k] - 2.0 * s1.coeffs.b[k]) <= 1e-14 * std::abs(s1.coeffs.b[k]));
    const Vec3 x(0.0, 0.3, 0.0);
    const auto u1 = total_field(s1, f.geom.mesh, {x});
    const auto u2 = total_field(s2, f.geom.mesh, {x});
    const Vec3c scat1 = u1[0] - w1.value(x), scat2 = u2[0] - w2.value(x);
    CHECK((scat2 - 2.0 * scat1).norm() <= 1e-13 * scat1.norm());
  }

  // at a flagged resonance the mode drops out and the field stays finite
  {
    const auto wave = incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1), Vec3(1, 0, 0),
                                          wlow * std::sqrt(1.0 + 5e-4));
    const auto sol = solve_scattering(wave, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B, f.contrasts);
    CHECK(sol.coeffs.resonant[1]);
    CHECK(sol.mode_density.allFinite());
    const auto u = total_field(sol, f.geom.mesh, {Vec3(0.3, 0.4, 1.5)});
    CHECK(std::isfinite(u[0].norm()));
  }

  // the mode basis must match the mesh
  CHECK_THROWS_AS(solve_scattering(incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1),
                                                       Vec3(1, 0, 0), 0.03),
                                   f.geom.mesh, *f.solver, f.af,
                                   Eigen::MatrixXd::Zero(f.geom.mesh.dof_count(), 11), f.B,
                                   f.contrasts),
                  ConfigError);
  CHECK_THROWS_AS(solve_scattering(incident_plane_wave(m, IncidentWave::Kind::P, Vec3(0, 0, 1),
                                                       Vec3(1, 0, 0), 0.03),
                                   f.geom.mesh, *f.solver, f.af, Eigen::MatrixXd::Zero(30, 12), f.B,
                                   f.contrasts),
                  ConfigError);
}

TEST_CASE("frequency scan: every excited mode peaks at its own resonance") {
  const Fixture& f = fix();
  const ElasticMedium m = canonical_medium();
  const Vec3 d(std::sin(0.5), 0.0, std::cos(0.5));
  const auto wave = incident_plane_wave(m, IncidentWave::Kind::S, d, Vec3(0, 1, 0), 0.03);

  std::vector<double> grid(38);
  for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = 0.0143 + 0.0011 * static_cast<double>(j);
  const auto scan = resonance_scan(wave, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B,
                                   f.contrasts, grid, Vec3(0.1, 0, 0), Vec3(100, 0, 0));
  REQUIRE(scan.points.size() == grid.size());
  for (const auto& p : scan.points) {
    for (int k = 0; k < 12; ++k) REQUIRE_FALSE(p.resonant[k]);
    CHECK(p.gap_amplitude > 0.0);
    CHECK(p.far_amplitude >= 0.0);
  }

  double excited_max = 0.0;
  for (int k : {2, 3, 8, 9, 10, 11}) {  // torsion pair and the y sway-rock quartet
    int arg = 0, nearest = 0;
    double best = -1.0, dist = 1e30;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = std::abs(scan.points[j].b[k]);
      if (v > best) {
        best = v;
        arg = static_cast<int>(j);
      }
      if (std::abs(grid[j] - f.af.omega[k]) < dist) {
        dist = std::abs(grid[j] - f.af.omega[k]);
        nearest = static_cast<int>(j);
      }
    }
    CHECK(arg == nearest);
    excited_max = std::max(excited_max, best);
  }
  double silent_max = 0.0;
  for (const auto& p : scan.points)
    for (int k : {0, 1, 4, 5, 6, 7}) silent_max = std::max(silent_max, std::abs(p.b[k]));
  CHECK(silent_max <= 1e-12 * excited_max);

  const auto empty = resonance_scan(wave, f.geom.mesh, *f.solver, f.af, f.cap.densities, f.B,
                                    f.contrasts, {}, Vec3(0.1, 0, 0), Vec3(100, 0, 0));
  CHECK(empty.points.empty());

  const std::string csv = scan_csv(scan);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header.substr(0, 17) == "omega,b1_re,b1_im");
  CHECK(header.find(",b12_re,b12_im,gap_amplitude,far_amplitude") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 26);
  }
  CHECK(rows == static_cast<int>(grid.size()));
}
