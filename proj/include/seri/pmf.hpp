#ifndef SERI_PMF_HPP
#define SERI_PMF_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>

#include "seri/errors.hpp"

namespace seri {

/// Probability mass function over degrees k >= 1. n_samples = 0 marks an
/// exact (non-sampled) pmf.
struct DegreePMF {
  std::map<std::uint64_t, double> p;
  std::map<std::uint64_t, double> stderr_;
  std::uint64_t n_samples = 0;

  double at(std::uint64_t k) const {
    auto it = p.find(k);
    return it == p.end() ? 0.0 : it->second;
  }
  double stderr_at(std::uint64_t k) const {
    auto it = stderr_.find(k);
    return it == stderr_.end() ? 0.0 : it->second;
  }
  double total() const {
    double s = 0;
    for (const auto& [k, v] : p) s += v;
    return s;
  }
};

/// Normalized pmf from counts; stderr is the binomial sqrt(p(1-p)/N).
inline DegreePMF pmf_from_counts(const std::map<std::uint64_t, std::uint64_t>& counts) {
  DegreePMF out;
  for (const auto& [k, c] : counts) out.n_samples += c;
  require(out.n_samples > 0, "pmf needs at least one sample");
  const double n = static_cast<double>(out.n_samples);
  for (const auto& [k, c] : counts) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / n;
    out.p[k] = q;
    out.stderr_[k] = std::sqrt(q * (1.0 - q) / n);
  }
  return out;
}

/// pmf from a degree_counts vector (index = degree), e.g. a growth snapshot.
inline DegreePMF pmf_from_degree_vector(std::span<const std::uint64_t> counts) {
  std::map<std::uint64_t, std::uint64_t> m;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] > 0) m[k] = counts[k];
  return pmf_from_counts(m);
}

/// CSV "k,probability,stderr".
inline void write_pmf_csv(std::ostream& os, const DegreePMF& pmf) {
  os << "k,probability,stderr\n";
  os.precision(17);
  for (const auto& [k, v] : pmf.p) os << k << ',' << v << ',' << pmf.stderr_at(k) << '\n';
}

}  // namespace seri

#endif  // SERI_PMF_HPP
