#include "dimerbem/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dimerbem/errors.hpp"
#include "dimerbem/rigid_space.hpp"

namespace dimerbem {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int block_size(int b) { return b <= 2 ? 2 : 4; }

const int* block_indices(int b) {
  switch (b) {
    case 1: return kBlock1.data();
    case 2: return kBlock2.data();
    case 3: return kBlock3.data();
    default: return kBlock4.data();
  }
}

// B restricted to one block's index set, as a quadratic form on 12-vectors.
Eigen::MatrixXd block_mass(const Eigen::MatrixXd& B, int b) {
  Eigen::MatrixXd Bk = Eigen::MatrixXd::Zero(12, 12);
  const int* idx = block_indices(b);
  const int m = block_size(b);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Bk(idx[i], idx[j]) = B(idx[i], idx[j]);
  return Bk;
}

// Rotate a degenerate eigenspace onto the block structure: any orthogonal
// mix of degenerate eigenvectors is again an eigenvector, so pick the basis
// that diagonalizes the per-block B-norm content.
void purify_cluster(Eigen::MatrixXd& A, int first, int count, const std::array<Eigen::MatrixXd, 4>& Bk) {
  Eigen::Block<Eigen::MatrixXd> sub = A.block(0, first, 12, count);
  std::vector<int> blocks = {0, 1, 2, 3};
  int done = 0;  // purified columns accumulate on the right
  while (count - done > 1 && blocks.size() > 1) {
    auto cols = sub.leftCols(count - done);
    int best = blocks.front();
    double best_trace = -1.0;
    for (int b : blocks) {
      const double tr = (cols.transpose() * Bk[b] * cols).trace();
      if (tr > best_trace) {
        best_trace = tr;
        best = b;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cols.transpose() * Bk[best] * cols);
    cols = (cols * es.eigenvectors()).eval();  // ascending content; pure columns land last
    int pure = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      if (es.eigenvalues()(k) > 0.5) ++pure;
    done += pure;
    blocks.erase(std::find(blocks.begin(), blocks.end(), best));
  }
}

}  // namespace

std::string to_string(ModeClass c) {
  switch (c) {
    case ModeClass::Dipolar: return "dipolar";
    case ModeClass::Quadrupolar: return "quadrupolar";
    case ModeClass::Hybrid: return "hybrid";
    default: return "unclassified";
  }
}

ModeClass classify_mode(const SpectrumEntry& entry, double balance_tol) {
  if (entry.block >= 3) return ModeClass::Hybrid;
  const int* idx = block_indices(entry.block);
  const double x = entry.a(idx[0]), y = entry.a(idx[1]);
  const double lo = std::min(std::abs(x), std::abs(y));
  const double hi = std::max(std::abs(x), std::abs(y));
  if (!(hi > 0.0) || lo / hi < balance_tol) return ModeClass::Unclassified;
  return x * y < 0.0 ? ModeClass::Quadrupolar : ModeClass::Dipolar;
}

ResonanceSpectrum generalized_spectrum(const Eigen::MatrixXd& E, const Eigen::MatrixXd& B,
                                       const ElasticMedium& medium, double eta,
                                       const SpectrumOptions& opt) {
  if (E.rows() != 12 || E.cols() != 12 || B.rows() != 12 || B.cols() != 12)
    throw ConfigError("generalized spectrum expects 12x12 stiffness and mass matrices");
  if (!(eta > 0.0)) throw ConfigError("contrast eta must be positive");
  medium.validate();

  const double bnorm = B.cwiseAbs().maxCoeff();
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * bnorm)
    throw NumericalError("mass-moment matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mass-moment matrix is not positive definite");

  const double enorm = E.cwiseAbs().maxCoeff();
  if ((E - E.transpose()).cwiseAbs().maxCoeff() > opt.sym_tol * enorm)
    throw NumericalError("capacity matrix asymmetry exceeds tolerance");
  const Eigen::MatrixXd Es = 0.5 * (E + E.transpose());

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Es, B);
  if (ges.info() != Eigen::Success) throw NumericalError("generalized eigensolve failed");
  Eigen::VectorXd lam = ges.eigenvalues();
  Eigen::MatrixXd A = ges.eigenvectors();  // columns a with a^T B a = 1

  const double lam_scale = lam.cwiseAbs().maxCoeff();
  if (lam.minCoeff() < -opt.psd_tol * lam_scale)
    throw NumericalError("capacity matrix is not positive semidefinite within tolerance");

  std::array<Eigen::MatrixXd, 4> Bk;
  for (int b = 1; b <= 4; ++b) Bk[b - 1] = block_mass(B, b);

  // split the ascending eigenvalues into degenerate clusters
  for (int i = 0; i < 12;) {
    int j = i + 1;
    while (j < 12 && lam(j) - lam(j - 1) <= opt.degeneracy_tol * std::max(std::abs(lam(j)), 1e-300)) ++j;
    if (j - i > 1) purify_cluster(A, i, j - i, Bk);
    i = j;
  }

  ResonanceSpectrum spec;
  spec.entries.resize(12);
  for (int i = 0; i < 12; ++i) {
    SpectrumEntry& e = spec.entries[i];
    e.a = A.col(i);
    // deterministic sign: largest coefficient positive
    Eigen::Index imax;
    e.a.cwiseAbs().maxCoeff(&imax);
    if (e.a(imax) < 0.0) e.a = -e.a;
    e.lambda_gen = e.a.dot(Es * e.a) / e.a.dot(B * e.a);
    e.omega = std::sqrt(eta * std::max(e.lambda_gen, 0.0) / medium.rho);
    double total = e.a.dot(B * e.a);
    double best = -1.0;
    for (int b = 1; b <= 4; ++b) {
      const double share = e.a.dot(Bk[b - 1] * e.a) / total;
      if (share > best) {
        best = share;
        e.block = b;
      }
    }
    e.block_share = best;
    e.classification = classify_mode(e, opt.balance_tol);
  }

  std::stable_sort(spec.entries.begin(), spec.entries.end(),
                   [&](const SpectrumEntry& a, const SpectrumEntry& b) {
                     const double scale = std::max({std::abs(a.lambda_gen), std::abs(b.lambda_gen), 1e-300});
                     if (std::abs(a.lambda_gen - b.lambda_gen) > opt.degeneracy_tol * scale)
                       return a.lambda_gen < b.lambda_gen;
                     return a.block < b.block;
                   });
  return spec;
}

AsymptoticFormulas asymptotic_formulas(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                       const ElasticMedium& m, double eta, double epsilon,
                                       double curvature, double component_volume,
                                       const AsymptoticOptions& opt) {
  if (B.rows() != 12 || B.cols() != 12 || C.rows() != 12 || C.cols() != 12)
    throw ConfigError("asymptotic formulas expect 12x12 moment and constant matrices");
  if (!(eta > 0.0) || !(epsilon > 0.0) || !(epsilon < 1.0))
    throw ConfigError("asymptotic formulas need eta > 0 and 0 < eps < 1");
  if (!(curvature > 0.0) || !(component_volume > 0.0))
    throw ConfigError("asymptotic formulas need positive curvature and volume");
  m.validate();

  AsymptoticFormulas af;
  af.block = {1, 1, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4};
  const double L = std::abs(std::log(epsilon));
  const double rho = m.rho;
  // 1-based field indices; bounded entries equal their fitted constants, the
  // growing ones get their |log eps| part restored
  auto Eh = [&](int i, int j) { return C(i - 1, j - 1) + capacity_log_slope(m, curvature, i - 1, j - 1) * L; };
  auto Bm = [&](int i, int j) { return B(i - 1, j - 1); };
  auto freq = [&](double omega_sq, const char* what) {
    if (omega_sq >= 0.0) return std::sqrt(omega_sq);
    af.domain_ok = false;
    af.flags.push_back(std::string("negative squared frequency for ") + what);
    return kNaN;
  };

  af.omega[0] = freq(2.0 * (m.lambda + 2.0 * m.mu) * kPi * L * eta / (curvature * rho * component_volume), "mode 1");
  af.omega[1] = freq((C(2, 2) + C(2, 8)) * eta / (rho * component_volume), "mode 2");
  af.omega[2] = freq((Eh(4, 4) - Eh(4, 10)) * eta / (rho * Bm(4, 4)), "mode 3");
  af.omega[3] = freq((Eh(4, 4) + Eh(4, 10)) * eta / (rho * Bm(4, 4)), "mode 4");

  af.beta1[0] << -1.0, 1.0;
  af.beta1[1] << 1.0, 1.0;
  af.beta2[0] << -1.0, 1.0;
  af.beta2[1] << 1.0, 1.0;

  // sway-rock family: 1-based fields (1,5,7,11), then its quarter-turn image
  for (int fam = 0; fam < 2; ++fam) {
    const int t = fam == 0 ? 1 : 2;   // translation field
    const int r = fam == 0 ? 5 : 6;   // rocking field
    const int tm = t + 6, rm = r + 6; // mirrored fields
    const double btt = Bm(t, t), brr = Bm(r, r), btr = Bm(t, r);
    const double det = btt * brr - btr * btr;
    const double Err = Eh(r, r), Erm = Eh(r, rm), Etr = Eh(t, r), Etm = Eh(t, rm);
    const double csum = C(t - 1, t - 1) + C(t - 1, tm - 1);

    const int o = fam == 0 ? 4 : 8;  // first slot of this family in the order
    af.omega[o] = freq((Err + Erm) * eta / (rho * brr), fam == 0 ? "mode 5" : "mode 9");
    af.omega[o + 1] =
        freq(2.0 * m.mu * kPi * brr / (curvature * rho * det) * L * eta, fam == 0 ? "mode 6" : "mode 10");

    const double bracket = 2.0 * btr * (Etm - Etr) - Erm * btt + brr * csum + Err * btt;
    const double dtilde = bracket * bracket -
                          4.0 * (btr * btr - btt * brr) * ((Etm - Etr) * (Etm - Etr) + (Erm - Err) * csum);
    if (fam == 0)
      af.dtilde1 = dtilde;
    else
      af.dtilde3 = dtilde;

    double d_hi = kNaN, d_lo = kNaN;
    if (dtilde >= 0.0) {
      d_hi = (bracket + std::sqrt(dtilde)) / (2.0 * det);
      d_lo = (bracket - std::sqrt(dtilde)) / (2.0 * det);
    } else {
      af.domain_ok = false;
      af.flags.push_back(fam == 0 ? "negative discriminant in the first sway-rock family"
                                  : "negative discriminant in the second sway-rock family");
    }
    af.d[2 * fam] = d_hi;
    af.d[2 * fam + 1] = d_lo;
    af.omega[o + 2] = std::isnan(d_hi) ? kNaN : freq(eta * d_hi / rho, fam == 0 ? "mode 7" : "mode 11");
    af.omega[o + 3] = std::isnan(d_lo) ? kNaN : freq(eta * d_lo / rho, fam == 0 ? "mode 8" : "mode 12");

    auto& beta = fam == 0 ? af.beta3 : af.beta4;

    // lowest mode: the translation admixture decays like 1/|log eps|
    const double bnum = fam == 0 || !opt.use_cross_inclusion_moment ? btr : Bm(t, rm);
    const double b11 = ((Err + Erm) * bnum - (Etr + Etm) * brr) / brr * curvature / (2.0 * m.mu * kPi) / L;
    beta[0] << b11, 1.0, -b11, 1.0;

    const double e1 = m.mu * kPi / curvature;
    const double e2 = 2.0 * e1 * brr / det;
    if (btr == 0.0) {
      af.domain_ok = false;
      af.flags.push_back("vanishing translation-rocking moment in an eigenvector denominator");
      beta[1] << kNaN, 1.0, kNaN, 1.0;
    } else {
      const double disc = 4.0 * e1 * e1 + 4.0 * e1 * e2 * (brr - btt) +
                          e2 * e2 * ((btt - brr) * (btt - brr) + 4.0 * btr * btr);
      const double b21 = -((std::sqrt(disc) + 2.0 * e1) / (2.0 * e2 * btr)) * ((brr - btt) / (2.0 * btr));
      beta[1] << b21, 1.0, -b21, 1.0;
    }

    const double Ett = Eh(t, t);
    for (int k = 0; k < 2; ++k) {
      const double dk = af.d[2 * fam + k];
      if (std::isnan(dk)) {
        beta[2 + k] << kNaN, 1.0, kNaN, -1.0;
        continue;
      }
      const double den = Ett - Etr + btr * dk;
      if (den == 0.0) {
        af.domain_ok = false;
        af.flags.push_back("vanishing eigenvector denominator in a sway-rock mode");
        beta[2 + k] << kNaN, 1.0, kNaN, -1.0;
        continue;
      }
      const double bk1 = -(Etr - Err + brr * dk) / den;
      beta[2 + k] << bk1, 1.0, bk1, -1.0;
    }
  }
  return af;
}

Eigen::VectorXd asymptotic_mode_vector(const AsymptoticFormulas& af, int mode_index) {
  if (mode_index < 1 || mode_index > 12) throw ConfigError("mode index must lie in 1..12");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(12);
  const int b = af.block[mode_index - 1];
  const int* idx = block_indices(b);
  switch (b) {
    case 1: a(idx[0]) = af.beta1[mode_index - 1](0); a(idx[1]) = af.beta1[mode_index - 1](1); break;
    case 2: a(idx[0]) = af.beta2[mode_index - 3](0); a(idx[1]) = af.beta2[mode_index - 3](1); break;
    case 3:
      for (int k = 0; k < 4; ++k) a(idx[k]) = af.beta3[mode_index - 5](k);
      break;
    default:
      for (int k = 0; k < 4; ++k) a(idx[k]) = af.beta4[mode_index - 9](k);
  }
  return a;
}

ModeClass asymptotic_mode_class(int mode_index) {
  if (mode_index < 1 || mode_index > 12) throw ConfigError("mode index must lie in 1..12");
  if (mode_index >= 5) return ModeClass::Hybrid;
  return mode_index % 2 == 1 ? ModeClass::Quadrupolar : ModeClass::Dipolar;
}

SpectrumComparison compare_spectra(const ResonanceSpectrum& num, const AsymptoticFormulas& asym) {
  if (num.entries.size() != 12) throw ConfigError("spectrum comparison expects 12 numerical modes");
  SpectrumComparison cmp;
  // rank the closed forms inside each block, then match by block-local rank
  std::array<std::vector<int>, 5> asym_by_block;  // 1..4 used
  for (int i = 0; i < 12; ++i) asym_by_block[asym.block[i]].push_back(i);
  for (int b = 1; b <= 4; ++b)
    std::sort(asym_by_block[b].begin(), asym_by_block[b].end(),
              [&](int i, int j) { return asym.omega[i] < asym.omega[j]; });
  std::array<int, 5> used{};
  for (int i = 0; i < 12; ++i) {
    const SpectrumEntry& e = num.entries[i];
    SpectrumComparison::Row& row = cmp.rows[i];
    row.block = e.block;
    row.omega_num = e.omega;
    const auto& pool = asym_by_block[e.block];
    if (used[e.block] < static_cast<int>(pool.size())) {
      const int k = pool[used[e.block]++];
      row.mode_index = k + 1;
      row.omega_asym = asym.omega[k];
      row.rel_gap = std::abs(row.omega_num - row.omega_asym) / std::abs(row.omega_asym);
    }
  }
  return cmp;
}

CharacteristicScan direct_characteristic_search(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                                const ContrastParams& contrasts,
                                                const std::vector<double>& omega_grid,
                                                const AssemblyOptions& opt) {
  if (omega_grid.empty()) throw ConfigError("direct search needs a frequency grid");
  contrasts.check();
  const int n = 3 * mesh.panel_count();
  const double delta = contrasts.delta, tau = contrasts.tau;

  const DenseBoundaryOperator Ks = assemble_np_adjoint_static(mesh, medium, opt);
  const DenseBoundaryOperator K2 = assemble_np_adjoint_term2(mesh, medium, opt);
  Eigen::VectorXd half_w = 0.5 * Ks.weights;  // weighted identity block

  CharacteristicScan scan;
  scan.omega = omega_grid;
  scan.sigma_min.resize(omega_grid.size());

  Eigen::MatrixXcd A(2 * n, 2 * n);
  for (size_t g = 0; g < omega_grid.size(); ++g) {
    const double w = omega_grid[g];
    if (!(w >= 0.0)) throw ConfigError("direct search frequencies must be nonnegative");
    const DenseBoundaryOperator Si = assemble_single_layer(mesh, medium, tau * w, opt);
    const DenseBoundaryOperator So =
        tau == 1.0 ? Si : assemble_single_layer(mesh, medium, w, opt);
    auto cplx = [n](const DenseBoundaryOperator& op) -> Eigen::MatrixXcd {
      return op.complex_valued ? op.cx : op.re.cast<std::complex<double>>();
    };
    A.topLeftCorner(n, n) = cplx(Si);
    A.topRightCorner(n, n) = -cplx(So);
    Eigen::MatrixXd bl = Ks.re + (tau * w) * (tau * w) * K2.re;
    bl.diagonal() -= half_w;
    A.bottomLeftCorner(n, n) = bl.cast<std::complex<double>>();
    Eigen::MatrixXd br = -delta * Ks.re;
    br.diagonal() -= delta * half_w;
    A.bottomRightCorner(n, n) = br.cast<std::complex<double>>();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    scan.sigma_min[g] = svd.singularValues().minCoeff();
  }
  for (size_t g = 1; g + 1 < scan.sigma_min.size(); ++g)
    if (scan.sigma_min[g] < scan.sigma_min[g - 1] && scan.sigma_min[g] < scan.sigma_min[g + 1])
      scan.minima.push_back(static_cast<int>(g));
  return scan;
}

}  // namespace dimerbem
