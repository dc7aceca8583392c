#ifndef SERI_EXPONENTS_HPP
#define SERI_EXPONENTS_HPP

#include <cmath>
#include <string>

#include "seri/errors.hpp"

namespace seri {

/// Reproduction-rate scale c = 1 / (1 + delta/2). Also the gamma of the drift matrix.
inline double rate_scale(double delta) { return 1.0 / (1.0 + 0.5 * delta); }

/// Growth/tail exponent phi(delta) = (1 + delta/2)/2 * [1 + sqrt(1 + 4/(1 + delta/2))].
inline double phi(double delta) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  const double a = 1.0 + 0.5 * delta;
  return 0.5 * a * (1.0 + std::sqrt(1.0 + 4.0 / a));
}

/// Positive root of lambda^2 + lambda = c, written in cancellation-free form.
inline double malthusian_root(double c) { return 2.0 * c / (1.0 + std::sqrt(1.0 + 4.0 * c)); }

struct ExponentPack {
  double delta = 0;
  double phi = 0;
  double lambda = 0;       // 1 / phi
  double gamma = 0;        // 2 / (2 + delta)
  double eigen_plus = 0;   // principal eigenvalue of the drift matrix
  double eigen_minus = 0;  // secondary eigenvalue (negative)
  double v2 = 0;           // second coordinate of the principal left eigenvector (first = 1)
  double u2 = 0;           // second coordinate of the secondary left eigenvector (first = 1)
};

/// Drift matrix [[g, -g], [g, -(1+g)]] in row-major order.
struct DriftMatrix {
  double a11, a12, a21, a22;
};

inline DriftMatrix drift_matrix(double delta) {
  const double g = 2.0 / (2.0 + delta);
  return {g, -g, g, -(1.0 + g)};
}

/// Closed-form exponents and drift-matrix spectrum. Throws ConsistencyError when
/// the identities linking them fail.
inline ExponentPack exponents(double delta, double phi_perturbation = 0.0) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  ExponentPack e;
  e.delta = delta;
  e.phi = phi(delta) + phi_perturbation;
  e.lambda = 1.0 / e.phi;
  e.gamma = 2.0 / (2.0 + delta);
  const double root = std::sqrt(1.0 + 4.0 * e.gamma);
  e.eigen_plus = 0.5 * (root - 1.0);
  e.eigen_minus = 0.5 * (-root - 1.0);
  e.v2 = (e.eigen_plus - e.gamma) / e.gamma;
  e.u2 = (e.eigen_minus - e.gamma) / e.gamma;

  const double c = rate_scale(delta);
  auto fail = [&](const std::string& what) {
    throw ConsistencyError("exponent identity failed at delta=" + std::to_string(delta) + ": " + what);
  };
  if (std::abs(e.lambda * e.lambda + e.lambda - c) > 1e-12) fail("lambda^2 + lambda = 1/(1+delta/2)");
  if (!(e.phi < 2.0 + delta)) fail("phi < 2 + delta");
  if (std::abs(e.eigen_plus - e.lambda) > 1e-12) fail("eigen_plus = 1/phi");
  if (!(e.eigen_minus < 0.0)) fail("eigen_minus < 0");
  if (!(e.v2 > -1.0 && e.v2 < 0.0)) fail("-1 < v2 < 0");
  return e;
}

/// Cumulant kappa_l = c / (l lambda (l lambda + 1)) of the discounted edge
/// offspring sum.
inline double zeta_hat_cumulant(double delta, int l) {
  require(l >= 1, "cumulant order must be >= 1");
  const double c = rate_scale(delta);
  const double lam = malthusian_root(c);
  const double x = l * lam;
  return c / (x * (x + 1.0));
}

}  // namespace seri

#endif  // SERI_EXPONENTS_HPP
