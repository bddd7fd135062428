#include "dimerbem/boundary_ops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "dimerbem/errors.hpp"
#include "tri_quadrature.hpp"

namespace dimerbem {
namespace {

using Cplx = std::complex<double>;
using detail::gauss8;
using detail::tri_rule;

// Closest distance from a point to a triangle (Ericson, Real-Time Collision
// Detection, 5.1.5).
double dist_point_tri(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

// Geometry of one source panel as seen by the quadrature machinery.
struct SrcPanel {
  Vec3 a, b, c;        // flat vertices
  double ratio = 1.0;  // curved area / flat area, applied uniformly
  ComponentShape shape;
};

SrcPanel src_panel(const SurfaceMesh& mesh, const Panel& p) {
  SrcPanel s;
  s.a = mesh.nodes[p.v[0]];
  s.b = mesh.nodes[p.v[1]];
  s.c = mesh.nodes[p.v[2]];
  const double flat = 0.5 * (s.b - s.a).cross(s.c - s.a).norm();
  s.ratio = p.area / flat;
  s.shape = (p.component < static_cast<int>(mesh.shapes.size())) ? mesh.shapes[p.component]
                                                                 : ComponentShape{};
  return s;
}

// Lift a flat-parametrized point onto the true surface.
inline void lift(const SrcPanel& s, const Vec3& flat_normal, Vec3& y, Vec3& ny) {
  if (s.shape.curved) {
    Vec3 d = y - s.shape.center;
    d *= s.shape.radius / d.norm();
    y = s.shape.center + d;
    ny = d / s.shape.radius;
  } else {
    ny = flat_normal;
  }
}

template <class Mat, class KernelFn>
Mat rule_integrate(const SrcPanel& s, const Vec3& a, const Vec3& b, const Vec3& c,
                   const KernelFn& f) {
  const auto& rule = tri_rule();
  const Vec3 cr = (b - a).cross(c - a);
  const double flat_area = 0.5 * cr.norm();
  const Vec3 fn = cr / cr.norm();
  Mat out = Mat::Zero();
  for (int q = 0; q < 7; ++q) {
    Vec3 y = rule.b[q][0] * a + rule.b[q][1] * b + rule.b[q][2] * c;
    Vec3 ny;
    lift(s, fn, y, ny);
    out += (rule.w[q] * flat_area * s.ratio) * f(y, ny);
  }
  return out;
}

// Adaptive 4-way subdivision with the geometric acceptance rule
// dist >= near_factor * diam; the degree-5 rule at that separation has a
// fixed small relative error, so recursion depth tracks the true distance.
template <class Mat, class KernelFn>
Mat adaptive_integrate(const Vec3& x, const SrcPanel& s, const Vec3& a, const Vec3& b,
                       const Vec3& c, const KernelFn& f, double near_factor, int depth,
                       int max_depth) {
  const double diam = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
  if (dist_point_tri(x, a, b, c) >= near_factor * diam) return rule_integrate<Mat>(s, a, b, c, f);
  if (depth >= max_depth)
    throw QuadratureError("near-panel quadrature exceeded max subdivision depth");
  const Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  Mat out = adaptive_integrate<Mat>(x, s, a, ab, ca, f, near_factor, depth + 1, max_depth);
  out += adaptive_integrate<Mat>(x, s, b, bc, ab, f, near_factor, depth + 1, max_depth);
  out += adaptive_integrate<Mat>(x, s, c, ca, bc, f, near_factor, depth + 1, max_depth);
  out += adaptive_integrate<Mat>(x, s, ab, bc, ca, f, near_factor, depth + 1, max_depth);
  return out;
}

// Self-panel integration: polar (Duffy) transform about the flat centroid,
// y(u,w) = c0 + u((va-c0) + w(vb-va)), whose Jacobian u|J| cancels the 1/r
// singularity at the collocation point.
template <class Mat, class KernelFn>
Mat duffy_self(const SrcPanel& s, const KernelFn& f) {
  const auto& gl = gauss8();
  const Vec3 c0 = (s.a + s.b + s.c) / 3.0;
  const Vec3 cr = (s.b - s.a).cross(s.c - s.a);
  const Vec3 fn = cr / cr.norm();
  Mat out = Mat::Zero();
  const std::array<std::array<Vec3, 2>, 3> edges = {
      {{s.a, s.b}, {s.b, s.c}, {s.c, s.a}}};
  for (const auto& e : edges) {
    const Vec3 va = e[0], vb = e[1];
    const double jac = (va - c0).cross(vb - va).norm();
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const double u = gl.x[i], w = gl.x[j];
        Vec3 y = c0 + u * ((va - c0) + w * (vb - va));
        Vec3 ny;
        lift(s, fn, y, ny);
        out += (gl.w[i] * gl.w[j] * u * jac * s.ratio) * f(y, ny);
      }
  }
  return out;
}

// Row-parallel assembly of the pointwise operator matrix; RowFn fills the
// 3x3 blocks of one target row. Exceptions are collected across threads.
template <class Scalar, class RowFn>
void assemble_rows(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M, int n_panels,
                   ExecMode exec, const RowFn& row) {
  std::string error;
  bool failed = false;
  if (exec == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < n_panels; ++p) {
      if (failed) continue;
      try {
        row(p);
      } catch (const std::exception& e) {
#pragma omp critical
        {
          failed = true;
          error = e.what();
        }
      }
    }
  } else {
    for (int p = 0; p < n_panels; ++p) row(p);
  }
  if (failed) throw QuadratureError(error);
}

Eigen::VectorXd expanded_weights(const SurfaceMesh& mesh) {
  Eigen::VectorXd w(mesh.dof_count());
  for (int p = 0; p < mesh.panel_count(); ++p) w.segment<3>(3 * p).setConstant(mesh.panels[p].area);
  return w;
}

template <class Scalar>
void scale_rows_by_weights(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M,
                           const Eigen::VectorXd& w) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) *= w(i);
}

// Generic single-layer-style assembly: kernel(x_target - y) integrated over
// source panels, with Duffy self panels and adaptive near panels.
template <class Mat, class KernelFn>
void assemble_single_layer_like(Eigen::Matrix<typename Mat::Scalar, Eigen::Dynamic,
                                              Eigen::Dynamic>& M,
                                const SurfaceMesh& mesh, const KernelFn& kernel,
                                const AssemblyOptions& opts) {
  const int n = mesh.panel_count();
  std::vector<SrcPanel> src(n);
  for (int q = 0; q < n; ++q) src[q] = src_panel(mesh, mesh.panels[q]);
  auto row = [&](int p) {
    const Vec3 x = mesh.panels[p].centroid;
    for (int q = 0; q < n; ++q) {
      auto f = [&](const Vec3& y, const Vec3&) -> Mat { return kernel(x - y); };
      Mat block;
      if (q == p) {
        block = duffy_self<Mat>(src[q], f);
      } else {
        const double d = dist_point_tri(x, src[q].a, src[q].b, src[q].c);
        if (d < opts.near_factor * mesh.panels[q].diam) {
          try {
            block = adaptive_integrate<Mat>(x, src[q], src[q].a, src[q].b, src[q].c, f,
                                            opts.near_factor, 0, opts.max_depth);
          } catch (const QuadratureError&) {
            throw QuadratureError("quadrature did not converge for panel pair (" +
                                  std::to_string(p) + ", " + std::to_string(q) + ")");
          }
        } else {
          const Panel& pq = mesh.panels[q];
          block = Mat::Zero();
          for (int k = 0; k < 7; ++k) block += pq.qw[k] * kernel(x - pq.qp[k]);
        }
      }
      M.template block<3, 3>(3 * p, 3 * q) = block;
    }
  };
  assemble_rows(M, n, opts.exec, row);
}

void check_finite(const DenseBoundaryOperator& op) {
  const bool ok = op.complex_valued ? op.cx.allFinite() : op.re.allFinite();
  if (!ok) throw NumericalError("assembled operator contains non-finite entries");
}

}  // namespace

Eigen::VectorXd DenseBoundaryOperator::apply(const Eigen::VectorXd& density) const {
  if (complex_valued) throw NumericalError("real apply on a complex operator");
  return (re * density).cwiseQuotient(weights);
}

Eigen::VectorXcd DenseBoundaryOperator::apply(const Eigen::VectorXcd& density) const {
  Eigen::VectorXcd out;
  if (complex_valued) {
    out = cx * density;
  } else {
    out = (re * density.real()).cast<Cplx>();
    out += Cplx(0, 1) * (re * density.imag()).cast<Cplx>();
  }
  return out.cwiseQuotient(weights.cast<Cplx>());
}

double DenseBoundaryOperator::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (complex_valued) throw NumericalError("real inner product on a complex operator");
  return a.dot(re * b);
}

DenseBoundaryOperator assemble_single_layer(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                            double omega, const AssemblyOptions& opts) {
  DenseBoundaryOperator op;
  op.omega = omega;
  op.weights = expanded_weights(mesh);
  const int dofs = mesh.dof_count();
  if (omega == 0.0) {
    op.kind = OperatorKind::SingleLayer;
    op.complex_valued = false;
    op.re.resize(dofs, dofs);
    auto kernel = [&](const Vec3& r) -> Mat3 { return kelvin_matrix(medium, r); };
    assemble_single_layer_like<Mat3>(op.re, mesh, kernel, opts);
    scale_rows_by_weights(op.re, op.weights);
    op.re = ((op.re + op.re.transpose()) * 0.5).eval();
  } else {
    op.kind = OperatorKind::SingleLayerDynamic;
    op.complex_valued = true;
    op.cx.resize(dofs, dofs);
    auto kernel = [&](const Vec3& r) -> Mat3c { return green_tensor(medium, omega, r); };
    assemble_single_layer_like<Mat3c>(op.cx, mesh, kernel, opts);
    scale_rows_by_weights(op.cx, op.weights);
    op.cx = ((op.cx + op.cx.transpose()) * 0.5).eval();  // even kernel: complex symmetric
  }
  check_finite(op);
  return op;
}

DenseBoundaryOperator assemble_single_layer_series(const SurfaceMesh& mesh,
                                                   const ElasticMedium& medium, int n,
                                                   const AssemblyOptions& opts) {
  DenseBoundaryOperator op;
  op.weights = expanded_weights(mesh);
  const int dofs = mesh.dof_count();
  if (n == 1) {
    // constant kernel: rank-3 weighted matrix A_p Gamma_1 A_q
    op.kind = OperatorKind::SingleLayerSeries1;
    op.complex_valued = true;
    const Mat3c g1 = green_series_term(medium, 1, Vec3::Zero());
    op.cx.resize(dofs, dofs);
    for (int p = 0; p < mesh.panel_count(); ++p)
      for (int q = 0; q < mesh.panel_count(); ++q)
        op.cx.block<3, 3>(3 * p, 3 * q) = mesh.panels[p].area * mesh.panels[q].area * g1;
  } else if (n == 2) {
    op.kind = OperatorKind::SingleLayerSeries2;
    op.complex_valued = false;
    op.re.resize(dofs, dofs);
    auto kernel = [&](const Vec3& r) -> Mat3 { return green_series_term(medium, 2, r).real(); };
    assemble_single_layer_like<Mat3>(op.re, mesh, kernel, opts);
    scale_rows_by_weights(op.re, op.weights);
    op.re = ((op.re + op.re.transpose()) * 0.5).eval();
  } else {
    throw ConfigError("only series terms 1 and 2 are assembled as operators");
  }
  check_finite(op);
  return op;
}

DenseBoundaryOperator assemble_double_layer(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                            const AssemblyOptions& opts) {
  DenseBoundaryOperator op;
  op.kind = OperatorKind::DoubleLayer;
  op.complex_valued = false;
  op.weights = expanded_weights(mesh);
  const int n = mesh.panel_count();
  op.re.resize(mesh.dof_count(), mesh.dof_count());
  std::vector<SrcPanel> src(n);
  for (int q = 0; q < n; ++q) src[q] = src_panel(mesh, mesh.panels[q]);

  auto row = [&](int p) {
    const Vec3 x = mesh.panels[p].centroid;
    for (int q = 0; q < n; ++q) {
      if (q == p) continue;  // principal-value diagonal set by rigid-motion identity
      auto f = [&](const Vec3& y, const Vec3& ny) -> Mat3 {
        return traction_kernel(medium, y - x, ny).transpose();
      };
      Mat3 block;
      const double d = dist_point_tri(x, src[q].a, src[q].b, src[q].c);
      if (d < opts.near_factor * mesh.panels[q].diam) {
        try {
          block = adaptive_integrate<Mat3>(x, src[q], src[q].a, src[q].b, src[q].c, f,
                                           opts.near_factor, 0, opts.max_depth);
        } catch (const QuadratureError&) {
          throw QuadratureError("quadrature did not converge for panel pair (" +
                                std::to_string(p) + ", " + std::to_string(q) + ")");
        }
      } else {
        const Panel& pq = mesh.panels[q];
        block = Mat3::Zero();
        for (int k = 0; k < 7; ++k)
          block += pq.qw[k] * traction_kernel(medium, pq.qp[k] - x, pq.qn[k]).transpose();
      }
      op.re.block<3, 3>(3 * p, 3 * q) = block;
    }
    // K_D maps per-component rigid translations to half themselves; the
    // same-component row sum pins the strongly singular diagonal.
    Mat3 diag = 0.5 * Mat3::Identity();
    for (int q = 0; q < n; ++q)
      if (q != p && mesh.panels[q].component == mesh.panels[p].component)
        diag -= op.re.block<3, 3>(3 * p, 3 * q);
    op.re.block<3, 3>(3 * p, 3 * p) = diag;
  };
  assemble_rows(op.re, n, opts.exec, row);
  scale_rows_by_weights(op.re, op.weights);
  check_finite(op);
  return op;
}

DenseBoundaryOperator assemble_np_adjoint_static(const SurfaceMesh& mesh,
                                                 const ElasticMedium& medium,
                                                 const AssemblyOptions& opts) {
  DenseBoundaryOperator op = assemble_double_layer(mesh, medium, opts);
  // adjoint in the area-weighted inner product: the weighted form transposes
  op.re = op.re.transpose().eval();
  op.kind = OperatorKind::NPAdjoint;
  return op;
}

DenseBoundaryOperator assemble_np_adjoint_term2(const SurfaceMesh& mesh,
                                                const ElasticMedium& medium,
                                                const AssemblyOptions& opts) {
  DenseBoundaryOperator op;
  op.kind = OperatorKind::NPAdjointTerm2;
  op.complex_valued = false;
  op.weights = expanded_weights(mesh);
  const int n = mesh.panel_count();
  op.re.resize(mesh.dof_count(), mesh.dof_count());
  std::vector<SrcPanel> src(n);
  for (int q = 0; q < n; ++q) src[q] = src_panel(mesh, mesh.panels[q]);
  auto row = [&](int p) {
    const Vec3 x = mesh.panels[p].centroid;
    const Vec3 nu = mesh.panels[p].normal;
    auto f = [&](const Vec3& y, const Vec3&) -> Mat3 {
      return series2_traction_kernel(medium, x - y, nu);
    };
    for (int q = 0; q < n; ++q) {
      Mat3 block;
      if (q == p) {
        block = duffy_self<Mat3>(src[q], f);  // kernel bounded, direction-dependent at 0
      } else {
        const double d = dist_point_tri(x, src[q].a, src[q].b, src[q].c);
        if (d < opts.near_factor * mesh.panels[q].diam) {
          block = adaptive_integrate<Mat3>(x, src[q], src[q].a, src[q].b, src[q].c, f,
                                           opts.near_factor, 0, opts.max_depth);
        } else {
          const Panel& pq = mesh.panels[q];
          block = Mat3::Zero();
          for (int k = 0; k < 7; ++k)
            block += pq.qw[k] * series2_traction_kernel(medium, x - pq.qp[k], nu);
        }
      }
      op.re.block<3, 3>(3 * p, 3 * q) = block;
    }
  };
  assemble_rows(op.re, n, opts.exec, row);
  scale_rows_by_weights(op.re, op.weights);
  check_finite(op);
  return op;
}

SingleLayerSolver::SingleLayerSolver(const DenseBoundaryOperator& S, double rcond_floor) {
  if (S.kind != OperatorKind::SingleLayer || S.complex_valued)
    throw ConfigError("solver requires the static single-layer operator");
  weights_ = S.weights;
  lu_.compute(S.re);
  rcond_ = lu_.rcond();
  if (!(rcond_ > rcond_floor))
    throw IllConditionedError("single-layer system is ill-conditioned: rcond = " +
                              std::to_string(rcond_));
}

Eigen::VectorXd SingleLayerSolver::solve(const Eigen::VectorXd& trace) const {
  return lu_.solve((trace.array() * weights_.array()).matrix());
}

Eigen::MatrixXd SingleLayerSolver::solve_many(const Eigen::MatrixXd& traces) const {
  return lu_.solve(weights_.asDiagonal() * traces);
}

namespace {

template <class Mat, class KernelFn>
Mat eval_at_point(const SurfaceMesh& mesh, const std::vector<SrcPanel>& src, const Vec3& x,
                  const KernelFn& kernel, const Eigen::VectorXcd& density,
                  const AssemblyOptions& opts) {
  Mat out = Mat::Zero();
  for (int q = 0; q < mesh.panel_count(); ++q) {
    const double d = dist_point_tri(x, src[q].a, src[q].b, src[q].c);
    if (d < 1e-11 * std::max(1.0, mesh.panels[q].diam))
      throw NumericalError("evaluation point lies on the boundary");
    Eigen::Matrix<Cplx, Mat::RowsAtCompileTime, 3> blk;
    auto f = [&](const Vec3& y, const Vec3&) { return kernel(x - y); };
    if (d < opts.near_factor * mesh.panels[q].diam) {
      using KMat = Eigen::Matrix<Cplx, Mat::RowsAtCompileTime, 3>;
      try {
        blk = adaptive_integrate<KMat>(x, src[q], src[q].a, src[q].b, src[q].c, f,
                                       opts.near_factor, 0, opts.max_depth);
      } catch (const QuadratureError&) {
        throw QuadratureError("quadrature did not converge for evaluation point near panel " +
                              std::to_string(q));
      }
    } else {
      const Panel& pq = mesh.panels[q];
      blk.setZero();
      for (int k = 0; k < 7; ++k) blk += pq.qw[k] * kernel(x - pq.qp[k]);
    }
    out += blk * density.segment<3>(3 * q);
  }
  return out;
}

}  // namespace

std::vector<Vec3c> evaluate_potential(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                      double omega, const Eigen::VectorXcd& density,
                                      const std::vector<Vec3>& points,
                                      const AssemblyOptions& opts) {
  if (density.size() != mesh.dof_count())
    throw ConfigError("density length does not match the mesh");
  std::vector<SrcPanel> src(mesh.panel_count());
  for (int q = 0; q < mesh.panel_count(); ++q) src[q] = src_panel(mesh, mesh.panels[q]);
  auto kernel = [&](const Vec3& r) -> Mat3c { return green_tensor(medium, omega, r); };
  std::vector<Vec3c> out(points.size());
  std::string error;
  bool failed = false;
  const int npts = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic) if (opts.exec == ExecMode::Parallel)
  for (int i = 0; i < npts; ++i) {
    if (failed) continue;
    try {
      out[i] = eval_at_point<Vec3c>(mesh, src, points[i], kernel, density, opts);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        error = e.what();
      }
    }
  }
  if (failed) throw NumericalError(error);
  return out;
}

std::vector<Mat3c> evaluate_potential_gradient(const SurfaceMesh& mesh,
                                               const ElasticMedium& medium, double omega,
                                               const Eigen::VectorXcd& density,
                                               const std::vector<Vec3>& points,
                                               const AssemblyOptions& opts) {
  if (density.size() != mesh.dof_count())
    throw ConfigError("density length does not match the mesh");
  std::vector<SrcPanel> src(mesh.panel_count());
  for (int q = 0; q < mesh.panel_count(); ++q) src[q] = src_panel(mesh, mesh.panels[q]);
  // stack d_k Gamma into a 9x3 block so one adaptive pass integrates all of it;
  // J(i,k) = sum_j dGamma[k](i,j) phi_j
  using Mat93 = Eigen::Matrix<Cplx, 9, 3>;
  auto kernel = [&](const Vec3& r) -> Mat93 {
    const auto g = green_tensor_gradient(medium, omega, r);
    Mat93 out;
    for (int k = 0; k < 3; ++k) out.middleRows<3>(3 * k) = g[k];
    return out;
  };
  std::vector<Mat3c> out(points.size());
  std::string error;
  bool failed = false;
  const int npts = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic) if (opts.exec == ExecMode::Parallel)
  for (int i = 0; i < npts; ++i) {
    if (failed) continue;
    try {
      const Eigen::Matrix<Cplx, 9, 1> flat =
          eval_at_point<Eigen::Matrix<Cplx, 9, 1>>(mesh, src, points[i], kernel, density, opts);
      Mat3c J;
      for (int k = 0; k < 3; ++k) J.col(k) = flat.segment<3>(3 * k);
      out[i] = J;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        error = e.what();
      }
    }
  }
  if (failed) throw NumericalError(error);
  return out;
}

void write_operator_binary(const DenseBoundaryOperator& op, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open operator file for writing: " + path);
  const char magic[4] = {'D', 'B', 'O', 'P'};
  os.write(magic, 4);
  const std::uint32_t version = 1;
  const std::int32_t kind = static_cast<std::int32_t>(op.kind);
  const std::uint8_t is_cx = op.complex_valued ? 1 : 0;
  const std::int64_t n = op.size();
  os.write(reinterpret_cast<const char*>(&version), sizeof version);
  os.write(reinterpret_cast<const char*>(&kind), sizeof kind);
  os.write(reinterpret_cast<const char*>(&is_cx), sizeof is_cx);
  os.write(reinterpret_cast<const char*>(&op.omega), sizeof op.omega);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(op.weights.data()), n * sizeof(double));
  if (op.complex_valued) {
    Eigen::RowVectorXcd rowbuf(n);
    for (std::int64_t i = 0; i < n; ++i) {
      rowbuf = op.cx.row(i);
      os.write(reinterpret_cast<const char*>(rowbuf.data()), n * 2 * sizeof(double));
    }
  } else {
    Eigen::RowVectorXd rowbuf(n);
    for (std::int64_t i = 0; i < n; ++i) {
      rowbuf = op.re.row(i);
      os.write(reinterpret_cast<const char*>(rowbuf.data()), n * sizeof(double));
    }
  }
  if (!os) throw ConfigError("failed writing operator file: " + path);
}

DenseBoundaryOperator read_operator_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open operator file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DBOP", 4) != 0)
    throw ConfigError("unrecognized operator file header");
  std::uint32_t version = 0;
  std::int32_t kind = 0;
  std::uint8_t is_cx = 0;
  double omega = 0.0;
  std::int64_t n = 0;
  is.read(reinterpret_cast<char*>(&version), sizeof version);
  is.read(reinterpret_cast<char*>(&kind), sizeof kind);
  is.read(reinterpret_cast<char*>(&is_cx), sizeof is_cx);
  is.read(reinterpret_cast<char*>(&omega), sizeof omega);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is || version != 1 || n < 0) throw ConfigError("malformed operator file");
  DenseBoundaryOperator op;
  op.kind = static_cast<OperatorKind>(kind);
  op.complex_valued = is_cx != 0;
  op.omega = omega;
  op.weights.resize(n);
  is.read(reinterpret_cast<char*>(op.weights.data()), n * sizeof(double));
  if (op.complex_valued) {
    op.cx.resize(n, n);
    std::vector<double> rowbuf(2 * n);
    for (std::int64_t i = 0; i < n; ++i) {
      is.read(reinterpret_cast<char*>(rowbuf.data()), n * 2 * sizeof(double));
      for (std::int64_t j = 0; j < n; ++j) op.cx(i, j) = Cplx(rowbuf[2 * j], rowbuf[2 * j + 1]);
    }
  } else {
    op.re.resize(n, n);
    std::vector<double> rowbuf(n);
    for (std::int64_t i = 0; i < n; ++i) {
      is.read(reinterpret_cast<char*>(rowbuf.data()), n * sizeof(double));
      for (std::int64_t j = 0; j < n; ++j) op.re(i, j) = rowbuf[j];
    }
  }
  if (!is) throw ConfigError("truncated operator file");
  return op;
}

}  // namespace dimerbem
