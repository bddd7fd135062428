#include "dimerbem/kernels.hpp"

#include <cmath>
#include <complex>

#include "dimerbem/errors.hpp"

namespace dimerbem {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSingularFloor = 1e-14;
// Below omega*r/cs = 1e-4 the two exponentials in the dynamic kernel cancel
// to ~8 digits; the degree-4 series is accurate to ~1e-20 relative there.
constexpr double kSeriesSwitch = 1e-4;
constexpr int kSeriesOrder = 4;

using Cplx = std::complex<double>;

double checked_norm(const Vec3& x) {
  const double r = x.norm();
  if (r < kSingularFloor) throw NumericalError("kernel evaluated at a singular point");
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// i^n without trig round-off.
Cplx ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Coefficients of Gamma_n = a_n r^{n-1} I + b_n r^{n-3} x x^t.
void series_coeffs(const ElasticMedium& m, int n, Cplx& a, Cplx& b) {
  const double cs = m.cs(), cp = m.cp();
  const double ws = 1.0 / (m.mu * std::pow(cs, n));
  const double wp = 1.0 / ((m.lambda + 2.0 * m.mu) * std::pow(cp, n));
  const Cplx pre = ipow(n) / (4.0 * kPi * (n + 2) * factorial(n));
  a = -pre * ((n + 1) * ws + wp);
  b = pre * double(n - 1) * (ws - wp);
}

// Radial derivatives of g(r) = e^{ikr}/r.
struct RadialExp {
  Cplx g, g1, g2, g3;
  RadialExp(double k, double r) {
    const Cplx e = std::exp(Cplx(0.0, k * r));
    const Cplx ikr(0.0, k * r);
    const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
    g = e / r;
    g1 = e * (ikr - 1.0) / r2;
    g2 = e * (2.0 - 2.0 * ikr - k * k * r2) / r3;
    g3 = e * (-6.0 + 6.0 * ikr + 3.0 * k * k * r2 - ikr * k * k * r2) / r4;
  }
};

}  // namespace

Mat3 kelvin_matrix(const ElasticMedium& m, const Vec3& x) {
  const double r = checked_norm(x);
  const double a = -m.alpha1() / (8.0 * kPi * r);
  const double b = -m.alpha2() / (8.0 * kPi * r * r * r);
  return a * Mat3::Identity() + b * (x * x.transpose());
}

std::array<Mat3, 3> kelvin_gradient(const ElasticMedium& m, const Vec3& x) {
  const double r = checked_norm(x);
  const double r3 = r * r * r, r5 = r3 * r * r;
  const double a = -m.alpha1() / (8.0 * kPi);
  const double b = -m.alpha2() / (8.0 * kPi);
  std::array<Mat3, 3> g;
  for (int k = 0; k < 3; ++k) {
    Mat3& gk = g[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = -a * (i == j) * x(k) / r3;
        v += b * (((i == k) * x(j) + (j == k) * x(i)) / r3 - 3.0 * x(i) * x(j) * x(k) / r5);
        gk(i, j) = v;
      }
  }
  return g;
}

Mat3c green_tensor(const ElasticMedium& m, double omega, const Vec3& x) {
  if (omega == 0.0) return kelvin_matrix(m, x).cast<Cplx>();
  const double r = checked_norm(x);
  if (omega * r / m.cs() < kSeriesSwitch) {
    Mat3c sum = Mat3c::Zero();
    double wn = 1.0;
    for (int n = 0; n <= kSeriesOrder; ++n, wn *= omega) sum += wn * green_series_term(m, n, x);
    return sum;
  }
  const RadialExp gs(m.ks(omega), r);
  const RadialExp gp(m.kp(omega), r);
  const Vec3 rh = x / r;
  const Cplx F1 = gp.g1 - gs.g1;
  const Cplx F2 = gp.g2 - gs.g2;
  const double c = 1.0 / (4.0 * kPi * m.rho * omega * omega);
  Mat3c out = (-gs.g / (4.0 * kPi * m.mu) + c * F1 / r) * Mat3c::Identity();
  out += c * (F2 - F1 / r) * (rh * rh.transpose()).cast<Cplx>();
  return out;
}

std::array<Mat3c, 3> green_tensor_gradient(const ElasticMedium& m, double omega, const Vec3& x) {
  std::array<Mat3c, 3> g;
  if (omega == 0.0) {
    const auto gr = kelvin_gradient(m, x);
    for (int k = 0; k < 3; ++k) g[k] = gr[k].cast<Cplx>();
    return g;
  }
  const double r = checked_norm(x);
  if (omega * r / m.cs() < kSeriesSwitch) {
    for (int k = 0; k < 3; ++k) g[k] = Mat3c::Zero();
    double wn = 1.0;
    for (int n = 0; n <= kSeriesOrder; ++n, wn *= omega) {
      const auto gn = green_series_term_gradient(m, n, x);
      for (int k = 0; k < 3; ++k) g[k] += wn * gn[k];
    }
    return g;
  }
  const RadialExp gs(m.ks(omega), r);
  const RadialExp gp(m.kp(omega), r);
  const Vec3 rh = x / r;
  const Cplx F1 = gp.g1 - gs.g1;
  const Cplx F2 = gp.g2 - gs.g2;
  const Cplx F3 = gp.g3 - gs.g3;
  const double c = 1.0 / (4.0 * kPi * m.rho * omega * omega);
  const Cplx t3 = c * (F3 - 3.0 * F2 / r + 3.0 * F1 / (r * r));
  const Cplx t1 = c * (F2 / r - F1 / (r * r));
  const Cplx ds = -gs.g1 / (4.0 * kPi * m.mu);
  for (int k = 0; k < 3; ++k) {
    Mat3c& gk = g[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Cplx v = ds * double(i == j) * rh(k);
        v += t3 * rh(i) * rh(j) * rh(k);
        v += t1 * (double(i == j) * rh(k) + double(i == k) * rh(j) + double(j == k) * rh(i));
        gk(i, j) = v;
      }
  }
  return g;
}

Mat3c green_series_term(const ElasticMedium& m, int n, const Vec3& x) {
  if (n < 0) throw NumericalError("series index must be nonnegative");
  Cplx a, b;
  series_coeffs(m, n, a, b);
  if (n == 1) return a * Mat3c::Identity();  // constant term, x = 0 allowed
  const double r = checked_norm(x);
  return a * std::pow(r, n - 1) * Mat3c::Identity() +
         b * std::pow(r, n - 3) * (x * x.transpose()).cast<Cplx>();
}

std::array<Mat3c, 3> green_series_term_gradient(const ElasticMedium& m, int n, const Vec3& x) {
  if (n < 0) throw NumericalError("series index must be nonnegative");
  std::array<Mat3c, 3> g;
  if (n == 1) {
    for (int k = 0; k < 3; ++k) g[k] = Mat3c::Zero();
    return g;
  }
  Cplx a, b;
  series_coeffs(m, n, a, b);
  const double r = checked_norm(x);
  const double rn3 = std::pow(r, n - 3), rn5 = std::pow(r, n - 5);
  for (int k = 0; k < 3; ++k) {
    Mat3c& gk = g[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Cplx v = a * double(n - 1) * rn3 * x(k) * double(i == j);
        v += b * (double(n - 3) * rn5 * x(i) * x(j) * x(k) +
                  rn3 * (double(i == k) * x(j) + double(j == k) * x(i)));
        gk(i, j) = v;
      }
  }
  return g;
}

Mat3 traction_kernel(const ElasticMedium& m, const Vec3& x, const Vec3& nu) {
  const auto grad = kelvin_gradient(m, x);
  Mat3 t;
  for (int j = 0; j < 3; ++j) {
    std::array<Vec3, 3> du;
    for (int k = 0; k < 3; ++k) du[k] = grad[k].col(j);
    t.col(j) = traction_of_gradient(m, du, nu);
  }
  return t;
}

Mat3 series2_traction_kernel(const ElasticMedium& m, const Vec3& x, const Vec3& nu) {
  const auto grad = green_series_term_gradient(m, 2, x);
  Mat3 t;
  for (int j = 0; j < 3; ++j) {
    std::array<Vec3, 3> du;
    for (int k = 0; k < 3; ++k) du[k] = grad[k].col(j).real();
    t.col(j) = traction_of_gradient(m, du, nu);
  }
  return t;
}

}  // namespace dimerbem
