#ifndef SERI_SAMPLERS_HPP
#define SERI_SAMPLERS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "seri/tree_record.hpp"
#include "seri/weights.hpp"

// Attachment-target samplers.
//
// The naive sampler scans all weights. The fast sampler uses the token
// decomposition of the integrated weight: edge m carries total token mass
// (2 + delta)(n + 1 - m), split as (n + 1 - m) on its parent endpoint and
// (1 + delta)(n + 1 - m) on its child v_m (the child's own delta accrual is
// folded into its parent edge). The only leftover is the delta accrual of v_0,
// w0 = delta * steps(0). When w0 >= 0 it is a separate token; when w0 < 0 it is
// removed from v_0's parent-endpoint token on edge 1 by thinning.

namespace seri {

/// O(n) reference sampler: one pass over the edge log builds all weights, one
/// pass locates the target.
template <class Rng>
Vertex sample_target_naive(const TreeRecord& tree, Rng& rng, Convention c) {
  const auto theta = all_weights<double>(tree, c, tree.delta());
  double total = 0.0;
  for (double w : theta) total += w;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    acc += theta[i];
    if (u < acc) return static_cast<Vertex>(i);
  }
  // Rounding can leave u == total; return the last vertex with positive weight.
  for (std::size_t i = theta.size(); i-- > 0;)
    if (theta[i] > 0.0) return static_cast<Vertex>(i);
  return 0;
}

/// Smallest K in [1, n] with K(K+1)/2 > r, for r in [0, n(n+1)/2). Integer-exact.
inline std::uint64_t triangular_index(std::uint64_t r) {
  const long double x = std::sqrt(1.0L + 8.0L * static_cast<long double>(r + 1));
  auto k = static_cast<std::uint64_t>(std::ceil((x - 1.0L) / 2.0L));
  if (k == 0) k = 1;
  const auto tri = [](std::uint64_t j) { return j * (j + 1) / 2; };
  while (tri(k) < r + 1) ++k;
  while (k > 1 && tri(k - 1) >= r + 1) --k;
  return k;
}

/// Draw the creation time m of an edge token with P(m) ∝ (n + 1 - m), m in 1..n.
template <class Rng>
std::uint64_t sample_edge_time(std::uint64_t n, Rng& rng) {
  const std::uint64_t r = rng.below(n * (n + 1) / 2);
  return n + 1 - triangular_index(r);
}

/// O(1) expected-time sampler with the same distribution as sample_target_naive.
template <class Rng>
Vertex sample_target_fast(const TreeRecord& tree, Rng& rng, Convention c) {
  const std::uint64_t n = tree.n();
  const double delta = tree.delta();
  const double nn = static_cast<double>(n);
  const double w0 = delta * static_cast<double>(delta_accrual_steps(n, 0, c));
  const double edge_mass = (2.0 + delta) * nn * (nn + 1.0) / 2.0;
  const double p_parent = 1.0 / (2.0 + delta);

  if (w0 > 0.0 && rng.uniform() * (edge_mass + w0) < w0) return 0;
  for (;;) {
    const std::uint64_t m = sample_edge_time(n, rng);
    if (rng.uniform() >= p_parent) return static_cast<Vertex>(m);
    if (m == 1 && w0 < 0.0) {
      // v_0's token on edge 1 has weight n; keep only n + w0 of it.
      if (rng.uniform() * nn >= nn + w0) continue;
    }
    return tree.parent(m);
  }
}

template <class Rng>
Vertex sample_target(const TreeRecord& tree, Rng& rng, Convention c, Sampler s) {
  return s == Sampler::fast ? sample_target_fast(tree, rng, c) : sample_target_naive(tree, rng, c);
}

/// Probability vector induced by the fast sampler's stages, computed analytically
/// (no weights are summed per vertex). Exact when S is a rational type.
template <class S>
std::vector<S> fast_sampler_probabilities(const TreeRecord& tree, Convention c, const S& delta) {
  require(tree.n() >= 1, "sampling is defined for n >= 1");
  const std::uint64_t n = tree.n();
  const S nn = S(n);
  const S w0 = delta * S(delta_accrual_steps(n, 0, c));
  const S edge_mass = (S(2) + delta) * nn * (nn + S(1)) / S(2);
  const S p_parent = S(1) / (S(2) + delta);
  const S p_child = (S(1) + delta) / (S(2) + delta);
  const S tri_total = nn * (nn + S(1)) / S(2);

  std::vector<S> p(n + 1, S(0));
  S p_direct_v0 = S(0);
  if (w0 > S(0)) p_direct_v0 = w0 / (edge_mass + w0);
  const S p_edges = S(1) - p_direct_v0;

  S accept = S(1);
  for (std::uint64_t m = 1; m <= n; ++m) {
    const S pm = S(n + 1 - m) / tri_total;
    S parent_keep = S(1);
    if (m == 1 && w0 < S(0)) {
      parent_keep = (nn + w0) / nn;
      accept -= pm * p_parent * (S(1) - parent_keep);
    }
    p[tree.parent(m)] += p_edges * pm * p_parent * parent_keep;
    p[m] += p_edges * pm * p_child;
  }
  for (auto& x : p) x /= accept;
  p[0] += p_direct_v0;
  return p;
}

}  // namespace seri

#endif  // SERI_SAMPLERS_HPP
