#pragma once

#include <cmath>

#include "dimerbem/errors.hpp"

namespace dimerbem {

// Isotropic elastic background. Nondimensional throughout; the canonical
// medium is lambda = mu = rho = 1.
struct ElasticMedium {
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;

  double cs() const { return std::sqrt(mu / rho); }
  double cp() const { return std::sqrt((lambda + 2.0 * mu) / rho); }
  double alpha1() const { return 1.0 / mu + 1.0 / (lambda + 2.0 * mu); }
  double alpha2() const { return 1.0 / mu - 1.0 / (lambda + 2.0 * mu); }
  double ks(double omega) const { return omega / cs(); }
  double kp(double omega) const { return omega / cp(); }

  void validate() const {
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
      throw ConfigError("elastic medium violates strong ellipticity (need mu > 0 and 3*lambda + 2*mu > 0)");
    if (!(rho > 0.0)) throw ConfigError("mass density must be positive");
  }
};

// Hard-inclusion contrast: interior Lame pair is (lambda, mu)/delta and
// interior density rho/eta, with tau = sqrt(delta/eta) the speed-contrast
// ratio. Small delta and eta are the operating regime but are not enforced
// as hard errors.
struct ContrastParams {
  double delta = 1e-4;
  double eta = 1e-4;
  double tau = 1.0;

  static ContrastParams from_eta_tau(double eta, double tau) {
    ContrastParams c;
    c.eta = eta;
    c.tau = tau;
    c.delta = tau * tau * eta;
    c.check();
    return c;
  }

  static ContrastParams from_eta_delta(double eta, double delta) {
    ContrastParams c;
    c.eta = eta;
    c.delta = delta;
    c.tau = std::sqrt(delta / eta);
    c.check();
    return c;
  }

  void check() const {
    if (!(eta > 0.0) || !(delta > 0.0))
      throw ConfigError("contrast parameters must be positive");
    if (std::abs(tau * tau - delta / eta) > 1e-10 * std::max(1.0, tau * tau))
      throw ConfigError("contrast parameters inconsistent: tau^2 must equal delta/eta");
  }
};

}  // namespace dimerbem
