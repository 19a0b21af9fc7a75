#pragma once

#include <cmath>
#include <stdexcept>

namespace csh {

/// Physical constants of the coupled matter / gauge-field system.
/// All five must be strictly positive and finite.
struct PhysicalParams {
  double m = 1.0;      // mass scale
  double omega = 1.0;  // frequency of the standing wave
  double e = 0.05;     // coupling constant
  double kappa = 1.0;  // Chern-Simons constant
  double q = 1.0;      // gauge coupling

  void validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!(ok(m) && ok(omega) && ok(e) && ok(kappa) && ok(q)))
      throw std::invalid_argument("physical parameters must be positive and finite");
  }

  // derived combinations used throughout
  double mu() const { return kappa * q; }                       // screening mass
  double coupling_c() const { return 1.0 + kappa * q / (2.0 * m); }
  double cs_prefactor() const {                                 // e^4 / (4 m kappa^2)
    return std::pow(e, 4) / (4.0 * m * kappa * kappa);
  }
  double a0_prefactor() const {                                 // e^3 / (m kappa^2)
    return std::pow(e, 3) / (m * kappa * kappa);
  }
};

}  // namespace csh
