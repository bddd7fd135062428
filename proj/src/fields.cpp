#include "dimerbem/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "dimerbem/errors.hpp"

namespace dimerbem {

namespace {

// Chart quantities at one gap point: profile value, transverse slope terms,
// and the curvature block of delta. Everything is radial in x' = (x1, x2).
struct ChartFrame {
  double vbar = 0.0;
  Vec3 grad_vbar = Vec3::Zero();
  Eigen::Vector2d grad_delta = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess_delta = Eigen::Matrix2d::Zero();
};

ChartFrame chart_frame(const GapChart& chart, const Vec3& x) {
  const double R = chart.radius;
  const double t2 = x(0) * x(0) + x(1) * x(1);
  if (!(t2 < R * R))
    throw ConfigError("gap point lies outside the chart disk of the inclusion surfaces");
  const double s = std::sqrt(R * R - t2);  // distance from the sphere center plane
  const double h = chart.h1(std::sqrt(t2));
  const double d = chart.gap + 2.0 * h;
  const double upper = 0.5 * chart.gap + h;
  if (!(x(2) >= -upper && x(2) <= upper))
    throw ConfigError("gap point is not between the two inclusion surfaces");

  ChartFrame f;
  f.vbar = (x(2) + upper) / d;
  f.grad_vbar(2) = 1.0 / d;
  for (int a = 0; a < 2; ++a) {
    f.grad_vbar(a) = (x(a) / s) * (1.0 - 2.0 * f.vbar) / d;
    f.grad_delta(a) = 2.0 * x(a) / s;
    for (int b = 0; b < 2; ++b)
      f.hess_delta(a, b) = 2.0 * (((a == b) ? 1.0 : 0.0) / s + x(a) * x(b) / (s * s * s));
  }
  return f;
}

Vec3 rigid_value(int j, const Vec3& x) {
  switch (j) {
    case 1: return Vec3(1, 0, 0);
    case 2: return Vec3(0, 1, 0);
    case 3: return Vec3(0, 0, 1);
    case 4: return Vec3(x(1), -x(0), 0);
    case 5: return Vec3(x(2), 0, -x(0));
    default: return Vec3(0, x(2), -x(1));
  }
}

Mat3 rigid_jacobian(int j) {
  Mat3 J = Mat3::Zero();
  if (j == 4) { J(0, 1) = 1; J(1, 0) = -1; }
  if (j == 5) { J(0, 2) = 1; J(2, 0) = -1; }
  if (j == 6) { J(1, 2) = 1; J(2, 1) = -1; }
  return J;
}

void check_field_index(int field_index) {
  if (field_index < 1 || field_index > 12)
    throw ConfigError("auxiliary field index must lie in 1..12");
}

// f(t) = (t - 1/2)^2 / 2 - 1/8 vanishes at 0 and 1, so the pressure/shear
// corrections keep the rigid boundary traces intact.
double bubble(double t) { return 0.5 * (t - 0.5) * (t - 0.5) - 0.125; }
double bubble_slope(double t) { return t - 0.5; }

}  // namespace

double gap_profile(const GapChart& chart, const Vec3& x) { return chart_frame(chart, x).vbar; }

Vec3 gap_profile_gradient(const GapChart& chart, const Vec3& x) {
  return chart_frame(chart, x).grad_vbar;
}

Vec3 aux_field(const GapChart& chart, const ElasticMedium& m, int field_index, const Vec3& x) {
  check_field_index(field_index);
  const auto f = chart_frame(chart, x);
  const int j = (field_index - 1) % 6 + 1;
  const bool lower = field_index > 6;
  const double vb = lower ? 1.0 - f.vbar : f.vbar;

  // the correction cancels the (lambda + mu) grad(div) residual of the main
  // profile; the profile slope flips sign on the lower fields, so the
  // correction flips with it (the lower field is the mirror image of the
  // upper one)
  const double corr = lower ? -1.0 : 1.0;

  Vec3 v = vb * rigid_value(j, x);
  if (j == 1 || j == 2) {
    const double cp = (m.lambda + m.mu) / (m.lambda + 2.0 * m.mu);
    v(2) += corr * cp * bubble(vb) * f.grad_delta(j - 1);
  } else if (j == 3) {
    const double cs = (m.lambda + m.mu) / m.mu;
    v(0) += corr * cs * bubble(vb) * f.grad_delta(0);
    v(1) += corr * cs * bubble(vb) * f.grad_delta(1);
  }
  return v;
}

Mat3 aux_gradient_predictor(const GapChart& chart, const ElasticMedium& m, int field_index,
                            const Vec3& x) {
  check_field_index(field_index);
  const auto f = chart_frame(chart, x);
  const int j = (field_index - 1) % 6 + 1;
  const bool lower = field_index > 6;
  const double vb = lower ? 1.0 - f.vbar : f.vbar;
  const Vec3 gvb = lower ? Vec3(-f.grad_vbar) : f.grad_vbar;
  const double corr = lower ? -1.0 : 1.0;

  Mat3 J = vb * rigid_jacobian(j) + rigid_value(j, x) * gvb.transpose();
  if (j == 1 || j == 2) {
    const double cp = (m.lambda + m.mu) / (m.lambda + 2.0 * m.mu);
    const Vec3 gslope(f.hess_delta(j - 1, 0), f.hess_delta(j - 1, 1), 0.0);
    J.row(2) += corr * cp *
                (bubble_slope(vb) * f.grad_delta(j - 1) * gvb + bubble(vb) * gslope).transpose();
  } else if (j == 3) {
    const double cs = (m.lambda + m.mu) / m.mu;
    for (int a = 0; a < 2; ++a) {
      const Vec3 gslope(f.hess_delta(a, 0), f.hess_delta(a, 1), 0.0);
      J.row(a) += corr * cs *
                  (bubble_slope(vb) * f.grad_delta(a) * gvb + bubble(vb) * gslope).transpose();
    }
  }
  return J;
}

EigenmodeField eigenmode_field(const Eigen::MatrixXd& zeta_basis, const Eigen::VectorXd& coeff,
                               int mode_index) {
  if (zeta_basis.cols() != 12 || zeta_basis.rows() % 3 != 0)
    throw ConfigError("capacity basis must have twelve columns of vector densities");
  if (coeff.size() != 12) throw ConfigError("mode coefficients must have twelve entries");
  EigenmodeField mode;
  mode.mode_index = mode_index;
  mode.coeff = coeff;
  mode.density = zeta_basis * coeff;
  return mode;
}

EigenmodeField asymptotic_eigenmode(const Eigen::MatrixXd& zeta_basis,
                                    const AsymptoticFormulas& af, int mode_index) {
  const Eigen::VectorXd a = asymptotic_mode_vector(af, mode_index);
  if (!a.allFinite())
    throw NumericalError("closed-form eigenvector is unavailable for mode " +
                         std::to_string(mode_index) + "; see the formula flags");
  return eigenmode_field(zeta_basis, a, mode_index);
}

double trace_residual(const SurfaceMesh& mesh, const DenseBoundaryOperator& S,
                      const EigenmodeField& mode) {
  if (S.size() != mode.density.size())
    throw ConfigError("operator and mode density sizes disagree");
  const Eigen::VectorXd trace = S.apply(mode.density);
  const Eigen::VectorXd target = rigid_traces(mesh) * mode.coeff;
  const Eigen::ArrayXd w = S.weights.array();
  const double err = std::sqrt((w * (trace - target).array().square()).sum());
  const double ref = std::sqrt((w * target.array().square()).sum());
  if (ref == 0.0) throw ConfigError("mode carries a vanishing rigid trace");
  return err / ref;
}

Vec3 eigenmode_value(const SurfaceMesh& mesh, const ElasticMedium& m, const EigenmodeField& mode,
                     const Vec3& x, const AssemblyOptions& opts) {
  const Eigen::VectorXcd density = mode.density.cast<std::complex<double>>();
  return evaluate_potential(mesh, m, 0.0, density, {x}, opts).front().real();
}

Mat3 eigenmode_gradient(const SurfaceMesh& mesh, const ElasticMedium& m,
                        const EigenmodeField& mode, const Vec3& x, const AssemblyOptions& opts) {
  const Eigen::VectorXcd density = mode.density.cast<std::complex<double>>();
  return evaluate_potential_gradient(mesh, m, 0.0, density, {x}, opts).front().real();
}

Vec3 probe_point(const GapChart& chart, const GapProbe& probe) {
  switch (probe.kind) {
    case GapProbe::Kind::Center: return Vec3::Zero();
    case GapProbe::Kind::SqrtEps: {
      const double r = std::sqrt(chart.gap / chart.curvature());
      if (!(r < chart.radius))
        throw ConfigError("gap too wide: the sqrt-eps probe leaves the chart disk");
      const double len = std::hypot(probe.x1, probe.x2);
      if (len == 0.0) return Vec3(r, 0.0, 0.0);
      return Vec3(r * probe.x1 / len, r * probe.x2 / len, 0.0);
    }
    case GapProbe::Kind::Offset: return Vec3(probe.x1, probe.x2, 0.0);
  }
  throw ConfigError("unknown probe kind");
}

namespace {

// Blow-up classes of the twelve modes: axial antiphase translations grow like
// 1/delta, the rotation/transverse antiphase group like (eps + |x'|)/delta,
// the sway-rock pair picks up an extra 1/|log eps|, and in-phase modes stay
// bounded.
enum class RateClass { Axial, Bounded, Transverse, SwayRock };

RateClass rate_class(int mode_index) {
  check_field_index(mode_index);
  switch (mode_index) {
    case 1: case 6: case 10: return RateClass::Axial;
    case 2: case 4: return RateClass::Bounded;
    case 5: case 9: return RateClass::SwayRock;
    default: return RateClass::Transverse;
  }
}

double probe_radius(const GapChart& chart, const GapProbe& probe) {
  const Vec3 x = probe_point(chart, probe);
  return std::hypot(x(0), x(1));
}

}  // namespace

double predicted_exponent(int mode_index, const GapProbe& probe) {
  const RateClass cls = rate_class(mode_index);
  const bool fixed_offset = probe.kind == GapProbe::Kind::Offset &&
                            (probe.x1 != 0.0 || probe.x2 != 0.0);
  if (cls == RateClass::Bounded || fixed_offset) return 0.0;
  if (cls == RateClass::Transverse)
    return probe.kind == GapProbe::Kind::SqrtEps ? -0.5 : 0.0;
  return -1.0;  // axial and sway-rock; the latter carries a 1/|log eps| correction
}

double predicted_rate(const GapChart& chart, int mode_index, const GapProbe& probe) {
  const double r = probe_radius(chart, probe);
  const double d = chart.delta(r);
  switch (rate_class(mode_index)) {
    case RateClass::Axial: return 1.0 / d;
    case RateClass::Bounded: return 1.0;
    case RateClass::Transverse: return (chart.gap + r) / d;
    case RateClass::SwayRock: return 1.0 / (d * std::abs(std::log(chart.gap)));
  }
  return 0.0;
}

namespace {

struct FitAccumulator {
  std::vector<double> log_eps, log_val, weight;
};

}  // namespace

BlowupSweep blowup_sweep(const BlowupConfig& config) {
  if (config.epsilons.empty()) throw ConfigError("gradient sweep needs at least one gap value");
  if (config.probes.empty()) throw ConfigError("gradient sweep needs at least one probe");
  for (int mode : config.modes) check_field_index(mode);
  config.medium.validate();

  BlowupSweep sweep;
  sweep.epsilons = config.epsilons;
  sweep.modes = config.modes;
  sweep.probes = config.probes;
  if (config.modes.empty()) return sweep;

  for (double eps : config.epsilons) {
    try {
      DimerConfig cfg = config.base;
      cfg.gap = eps;
      const DimerGeometry geom = build_sphere_dimer(cfg);
      const auto S = assemble_single_layer(geom.mesh, config.medium, 0.0, config.assembly);
      const SingleLayerSolver solver(S);
      const auto cap = compute_capacity(geom.mesh, solver);
      const Eigen::MatrixXd B = mass_moments(geom);
      const double curv = geom.chart.curvature();
      const Eigen::MatrixXd C = capacity_constants(cap.E, config.medium, curv, eps);
      const auto af = asymptotic_formulas(B, C, config.medium, config.eta, eps, curv,
                                          geom.component_volume_exact());

      std::vector<Vec3> points;
      points.reserve(config.probes.size());
      for (const auto& probe : config.probes) points.push_back(probe_point(geom.chart, probe));

      for (int mode : config.modes) {
        const auto fld = asymptotic_eigenmode(cap.densities, af, mode);
        const Eigen::VectorXcd density = fld.density.cast<std::complex<double>>();
        const auto jacobians = evaluate_potential_gradient(geom.mesh, config.medium, 0.0, density,
                                                           points, config.assembly);
        for (std::size_t p = 0; p < config.probes.size(); ++p) {
          const Mat3 J = jacobians[p].real();
          BlowupSample sample;
          sample.eps = eps;
          sample.mode = mode;
          sample.probe = static_cast<int>(p);
          sample.grad_norm = J.norm();
          sample.axial_share = sample.grad_norm > 0.0 ? J.col(2).norm() / sample.grad_norm : 0.0;
          sample.predicted = predicted_rate(geom.chart, mode, config.probes[p]);
          sweep.samples.push_back(sample);
        }
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "eps=" << std::setprecision(6) << eps << ": " << e.what();
      sweep.errors.push_back(msg.str());
    }
  }

  // Weighted log-log fit per (mode, probe); the coarsest gap is farthest from
  // the asymptotic regime, so it enters with a quarter of the weight.
  std::map<std::pair<int, int>, FitAccumulator> groups;
  for (const auto& s : sweep.samples) {
    if (!(s.grad_norm > 0.0) || !std::isfinite(s.grad_norm)) continue;
    auto& g = groups[{s.mode, s.probe}];
    g.log_eps.push_back(std::log(s.eps));
    g.log_val.push_back(std::log(s.grad_norm));
    g.weight.push_back(1.0);
  }
  for (auto& [key, g] : groups) {
    if (g.log_eps.size() < 2) continue;
    const auto coarsest = std::max_element(g.log_eps.begin(), g.log_eps.end());
    g.weight[static_cast<std::size_t>(coarsest - g.log_eps.begin())] = 0.25;

    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < g.log_eps.size(); ++k) {
      const double w = g.weight[k], x = g.log_eps[k], y = g.log_val[k];
      sw += w; sx += w * x; sy += w * y; sxx += w * x * x; sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    if (det == 0.0) continue;

    BlowupFit fit;
    fit.mode = key.first;
    fit.probe = key.second;
    fit.fitted_exponent = (sw * sxy - sx * sy) / det;
    fit.log_constant = (sxx * sy - sx * sxy) / det;
    double rss = 0;
    for (std::size_t k = 0; k < g.log_eps.size(); ++k) {
      const double r = g.log_val[k] - fit.fitted_exponent * g.log_eps[k] - fit.log_constant;
      rss += g.weight[k] * r * r;
    }
    fit.residual = std::sqrt(rss / sw);
    fit.predicted_exponent =
        predicted_exponent(key.first, sweep.probes[static_cast<std::size_t>(key.second)]);
    sweep.fits.push_back(fit);
  }
  return sweep;
}

std::string blowup_csv(const BlowupSweep& sweep) {
  std::map<std::pair<int, int>, const BlowupFit*> fits;
  for (const auto& f : sweep.fits) fits[{f.mode, f.probe}] = &f;

  std::ostringstream out;
  out << std::setprecision(12);
  out << "eps,mode,probe,probe_kind,grad_norm,axial_share,predicted_rate,"
         "fitted_exponent,predicted_exponent\n";
  for (const auto& s : sweep.samples) {
    const auto& probe = sweep.probes[static_cast<std::size_t>(s.probe)];
    const char* kind = probe.kind == GapProbe::Kind::Center ? "center"
                       : probe.kind == GapProbe::Kind::SqrtEps ? "sqrt_eps"
                                                               : "offset";
    out << s.eps << ',' << s.mode << ',' << s.probe << ',' << kind << ',' << s.grad_norm << ','
        << s.axial_share << ',' << s.predicted << ',';
    if (const auto it = fits.find({s.mode, s.probe}); it != fits.end())
      out << it->second->fitted_exponent << ',' << it->second->predicted_exponent;
    else
      out << "nan,nan";
    out << '\n';
  }
  return out.str();
}

}  // namespace dimerbem
