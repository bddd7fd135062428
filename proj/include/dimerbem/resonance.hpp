#pragma once

// Subwavelength resonances of the rigid-inclusion dimer. The twelve
// frequencies solve the 12x12 generalized eigenproblem E a = lambda B a on
// the rigid-motion density space (lambda = rho omega^2 / eta), and are
// independently available as closed forms in the fitted capacity constants.

#include <array>
#include <string>
#include <vector>

#include "boundary_ops.hpp"
#include "geometry.hpp"
#include "medium.hpp"

namespace dimerbem {

// Index sets of the four decoupled subsystems (0-based into the 12-dim rigid
// basis): axial translations, torsions, x-sway/y-rock, y-sway/x-rock.
inline constexpr std::array<int, 2> kBlock1 = {2, 8};
inline constexpr std::array<int, 2> kBlock2 = {3, 9};
inline constexpr std::array<int, 4> kBlock3 = {0, 4, 6, 10};
inline constexpr std::array<int, 4> kBlock4 = {1, 5, 7, 11};

enum class ModeClass { Dipolar, Quadrupolar, Hybrid, Unclassified };

std::string to_string(ModeClass c);

struct SpectrumEntry {
  double omega = 0.0;       // sqrt(eta * lambda / rho)
  double lambda_gen = 0.0;  // generalized eigenvalue of (E, B)
  Eigen::VectorXd a;        // 12 coefficients over the rigid densities, a^T B a = 1
  int block = 0;            // 1..4
  double block_share = 0.0; // fraction of the B-norm carried by the labeled block
  ModeClass classification = ModeClass::Unclassified;
};

struct ResonanceSpectrum {
  std::vector<SpectrumEntry> entries;  // 12, ascending omega (block label breaks ties)
};

struct SpectrumOptions {
  double sym_tol = 0.02;        // tolerated relative asymmetry of E
  double psd_tol = 1e-3;        // tolerated negative eigenvalue of E, relative
  double degeneracy_tol = 1e-6; // relative eigenvalue gap treated as degenerate
  double balance_tol = 0.2;     // in-block amplitude ratio below which a mode is unclassified
};

// Solve E a = lambda B a, sort ascending, label blocks by dominant B-norm
// share, classify. Degenerate clusters are rotated onto the block structure
// (any basis of a degenerate eigenspace solves the problem; the block-pure
// one is the physically meaningful choice).
ResonanceSpectrum generalized_spectrum(const Eigen::MatrixXd& E, const Eigen::MatrixXd& B,
                                       const ElasticMedium& medium, double eta,
                                       const SpectrumOptions& opt = {});

ModeClass classify_mode(const SpectrumEntry& entry, double balance_tol = 0.2);

struct AsymptoticOptions {
  // The lowest sway-rock mode of the second family admits two equivalent
  // index conventions for the mass-moment factor in its small component; the
  // cross-inclusion one vanishes identically, so the same-inclusion factor is
  // the default.
  bool use_cross_inclusion_moment = false;
};

struct AsymptoticFormulas {
  std::array<double, 12> omega{};  // closed-form frequencies, family order
  std::array<int, 12> block{};     // block label per entry: 1,1,2,2,3,3,3,3,4,4,4,4
  std::array<double, 4> d{};       // quartic-family constants d1..d4
  double dtilde1 = 0.0, dtilde3 = 0.0;
  std::array<Eigen::Vector2d, 2> beta1;  // block-1 eigenvectors over (zeta_3, zeta_9)
  std::array<Eigen::Vector2d, 2> beta2;  // block-2 eigenvectors over (zeta_4, zeta_10)
  std::array<Eigen::Vector4d, 4> beta3;  // block-3 eigenvectors over (zeta_1, zeta_5, zeta_7, zeta_11)
  std::array<Eigen::Vector4d, 4> beta4;  // block-4 eigenvectors over (zeta_2, zeta_6, zeta_8, zeta_12)
  bool domain_ok = true;
  std::vector<std::string> flags;  // domain problems: negative discriminants, vanishing denominators
};

// Evaluate every closed form. C is the 12x12 matrix of fitted intercepts of
// E over |log eps|; entries with nonzero theoretical slope are reconstructed
// as C + slope * |log eps| where needed.
AsymptoticFormulas asymptotic_formulas(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                       const ElasticMedium& medium, double eta, double epsilon,
                                       double curvature, double component_volume,
                                       const AsymptoticOptions& opt = {});

// The 12-dim coefficient vector of closed-form mode i (1..12) over the rigid
// densities, embedding its block beta vector.
Eigen::VectorXd asymptotic_mode_vector(const AsymptoticFormulas& af, int mode_index);

// Closed-form classification: modes 1,3 quadrupolar; 2,4 dipolar; 5..12 hybrid.
ModeClass asymptotic_mode_class(int mode_index);

struct SpectrumComparison {
  struct Row {
    int mode_index = 0;  // closed-form family index 1..12 matched by block rank
    int block = 0;
    double omega_num = 0.0;
    double omega_asym = 0.0;
    double rel_gap = 0.0;  // |num - asym| / asym
  };
  std::array<Row, 12> rows;  // ordered like the numerical spectrum
};

SpectrumComparison compare_spectra(const ResonanceSpectrum& num, const AsymptoticFormulas& asym);

struct CharacteristicScan {
  std::vector<double> omega;      // grid
  std::vector<double> sigma_min;  // smallest singular value of the block operator
  std::vector<int> minima;        // indices of strict local minima
};

// Direct verification path: assemble the two-density transmission operator
// [[S^{tau w}, -S^w], [-I/2 + K* + (tau w)^2 K*_2, -delta (I/2 + K*)]] on the
// grid and record where its smallest singular value dips.
CharacteristicScan direct_characteristic_search(const SurfaceMesh& mesh, const ElasticMedium& medium,
                                                const ContrastParams& contrasts,
                                                const std::vector<double>& omega_grid,
                                                const AssemblyOptions& opt = {});

}  // namespace dimerbem
