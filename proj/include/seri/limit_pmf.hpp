#ifndef SERI_LIMIT_PMF_HPP
#define SERI_LIMIT_PMF_HPP

#include <cmath>
#include <cstdint>
#include <map>

#include "seri/errors.hpp"
#include "seri/exponents.hpp"
#include "seri/pmf.hpp"
#include "seri/point_process.hpp"
#include "seri/quadrature.hpp"
#include "seri/replicas.hpp"

namespace seri {

/// p(1) = int_0^inf e^{-t} exp(-a (t - 1 + e^{-t})) dt,  a = (1 + delta)/(1 + delta/2):
/// the probability of no arrival before an independent exp(1) time.
inline QuadratureResult limit_p1_quadrature(double delta) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  const double a = (1.0 + delta) * rate_scale(delta);
  return integrate_half_line([a](double t) { return std::exp(-t - a * (t + std::expm1(-t))); }, 1.0, 1e-14);
}

/// Monte Carlo limit degree pmf: the degree is 1 + (number of arrivals before an
/// independent exp(1) time). Replica r uses stream_seed(seed, r).
inline DegreePMF limit_degree_pmf_mc(double delta, std::uint64_t reps, std::uint64_t seed) {
  require(reps >= 1, "reps must be >= 1");
  require(delta > -1.0, "delta must satisfy delta > -1");
  const auto degrees = run_replicas<std::uint64_t>(reps, seed, [delta](std::uint64_t, CounterRng& rng) {
    return static_cast<std::uint64_t>(sample_arrivals(delta, StopRule::at_exp1(), rng).sigmas.size() + 1);
  });
  std::map<std::uint64_t, std::uint64_t> counts;
  for (auto d : degrees) ++counts[d];
  return pmf_from_counts(counts);
}

}  // namespace seri

#endif  // SERI_LIMIT_PMF_HPP
