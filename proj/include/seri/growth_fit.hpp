#ifndef SERI_GROWTH_FIT_HPP
#define SERI_GROWTH_FIT_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seri/errors.hpp"
#include "seri/growth.hpp"
#include "seri/replicas.hpp"
#include "seri/tail.hpp"

namespace seri {

struct GrowthFit {
  Vertex vertex = 1;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> checkpoints;  // (n, degree) of the first seed
  std::vector<double> seed_slopes;
  double slope = 0;   // mean of per-seed slopes
  double stderr_ = 0;  // standard error of that mean
  double spread = 0;  // sample standard deviation of per-seed slopes
};

/// Geometric checkpoints n_first * ratio^j up to n_last (n_last always included).
inline std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_first, std::uint64_t n_last, double ratio = 10.0) {
  require(n_first >= 1 && n_last >= n_first && ratio > 1.0, "invalid checkpoint range");
  std::vector<std::uint64_t> out;
  for (double x = static_cast<double>(n_first); x < static_cast<double>(n_last) * (1 - 1e-12); x *= ratio)
    out.push_back(static_cast<std::uint64_t>(std::llround(x)));
  out.push_back(n_last);
  return out;
}

/// Per-seed regression of log d(v_i, n) on log n; seed r grows with
/// stream_seed(params.seed, r). params.n_final is raised to the last checkpoint.
inline GrowthFit fit_degree_growth(GrowthParams params, Vertex vertex, const std::vector<std::uint64_t>& checkpoints,
                                   std::uint64_t seeds) {
  require(seeds >= 1, "need at least one seed");
  require(checkpoints.size() >= 4, "need at least 4 checkpoints");
  require(static_cast<double>(checkpoints.back()) >= 1000.0 * static_cast<double>(checkpoints.front()),
          "checkpoints must span at least 3 decades");
  for (std::size_t j = 1; j < checkpoints.size(); ++j)
    require(checkpoints[j] > checkpoints[j - 1], "checkpoints must be strictly increasing");
  require(vertex <= checkpoints.front(),
          "vertex " + std::to_string(vertex) + " is not yet born at the first checkpoint " + std::to_string(checkpoints.front()));
  params.n_final = checkpoints.back();

  using Track = std::vector<std::pair<std::uint64_t, std::uint32_t>>;
  const auto tracks = run_replicas<Track>(seeds, params.seed, [&](std::uint64_t r, CounterRng&) {
    GrowthParams p = params;
    p.seed = stream_seed(params.seed, r);
    const auto res = grow(p, checkpoints, {vertex});
    Track t;
    for (const auto& s : res.snapshots) t.emplace_back(s.n, s.tracked.front().second);
    return t;
  });

  GrowthFit fit;
  fit.vertex = vertex;
  fit.checkpoints = tracks.front();
  for (const auto& t : tracks) {
    std::vector<double> x, y;
    for (const auto& [n, d] : t) {
      x.push_back(std::log(static_cast<double>(n)));
      y.push_back(std::log(static_cast<double>(d)));
    }
    fit.seed_slopes.push_back(least_squares(x, y).slope);
  }
  const double s = static_cast<double>(seeds);
  for (double b : fit.seed_slopes) fit.slope += b / s;
  if (seeds > 1) {
    double ss = 0;
    for (double b : fit.seed_slopes) ss += (b - fit.slope) * (b - fit.slope);
    fit.spread = std::sqrt(ss / (s - 1));
    fit.stderr_ = fit.spread / std::sqrt(s);
  }
  return fit;
}

}  // namespace seri

#endif  // SERI_GROWTH_FIT_HPP
