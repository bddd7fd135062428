#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "dimerbem/medium.hpp"

namespace dimerbem {

using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;

// Static (Kelvin) fundamental solution of the Lame operator,
//   Gamma_ij(x) = -(1/8pi) [ alpha1 delta_ij / |x| + alpha2 x_i x_j / |x|^3 ].
Mat3 kelvin_matrix(const ElasticMedium& m, const Vec3& x);

// grad[k](i,j) = d/dx_k Gamma_ij(x).
std::array<Mat3, 3> kelvin_gradient(const ElasticMedium& m, const Vec3& x);

// Outgoing time-harmonic fundamental solution
//   Gamma^w_ij(x) = -delta_ij e^{i ks r}/(4 pi mu r)
//                   + (1/(4 pi rho w^2)) d_i d_j [ (e^{i kp r} - e^{i ks r})/r ],
// with the derivative block in closed form. omega = 0 returns the Kelvin
// matrix; small omega*r switches to the low-frequency series to avoid
// cancellation between the two exponentials.
Mat3c green_tensor(const ElasticMedium& m, double omega, const Vec3& x);

// grad[k](i,j) = d/dx_k Gamma^w_ij(x), closed form (no nested differencing).
std::array<Mat3c, 3> green_tensor_gradient(const ElasticMedium& m, double omega, const Vec3& x);

// n-th coefficient of the low-frequency expansion Gamma^w = sum_n w^n Gamma_n:
//   Gamma_n(x) = -(i^n / (4pi (n+2) n!)) [ (n+1)/(mu cs^n) + 1/((l+2mu) cp^n) ] |x|^{n-1} I
//              + (i^n (n-1) / (4pi (n+2) n!)) [ 1/(mu cs^n) - 1/((l+2mu) cp^n) ] |x|^{n-3} x x^t.
// n=0 is the Kelvin matrix; n=1 is a constant matrix (x may be zero).
Mat3c green_series_term(const ElasticMedium& m, int n, const Vec3& x);

std::array<Mat3c, 3> green_series_term_gradient(const ElasticMedium& m, int n, const Vec3& x);

// Conormal derivative (traction with respect to the first argument) of the
// Kelvin matrix columns: T_ij = lambda nu_i (div Gamma)_j
//                              + mu nu_k (d_k Gamma_ij + d_i Gamma_kj).
// Homogeneous of degree -2; the strongly singular kernel of the adjoint
// Neumann-Poincare operator.
Mat3 traction_kernel(const ElasticMedium& m, const Vec3& x, const Vec3& nu);

// Traction of the (real, bounded) second series term Gamma_2.
Mat3 series2_traction_kernel(const ElasticMedium& m, const Vec3& x, const Vec3& nu);

// Traction of a displacement field from its gradient: given du[k](i) = d_k u_i,
// t_i = lambda nu_i div(u) + mu nu_k (d_k u_i + d_i u_k).
template <class Scalar>
Eigen::Matrix<Scalar, 3, 1> traction_of_gradient(const ElasticMedium& m,
                                                 const std::array<Eigen::Matrix<Scalar, 3, 1>, 3>& du,
                                                 const Vec3& nu) {
  Eigen::Matrix<Scalar, 3, 1> t;
  const Scalar div = du[0](0) + du[1](1) + du[2](2);
  for (int i = 0; i < 3; ++i) {
    Scalar s = m.lambda * nu(i) * div;
    for (int k = 0; k < 3; ++k) s += m.mu * nu(k) * (du[k](i) + du[i](k));
    t(i) = s;
  }
  return t;
}

}  // namespace dimerbem
