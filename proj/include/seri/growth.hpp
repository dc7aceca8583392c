#ifndef SERI_GROWTH_HPP
#define SERI_GROWTH_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "seri/errors.hpp"
#include "seri/rng.hpp"
#include "seri/samplers.hpp"
#include "seri/tree_record.hpp"

namespace seri {

struct GrowthParams {
  double delta = 0.0;
  std::uint64_t n_final = 1;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::fast;
  Convention convention = Convention::exact;

  void validate() const {
    validate_delta(delta, convention);
    require(n_final >= 1, "n must be >= 1");
    require(n_final < (std::uint64_t{1} << 32) - 1, "n must fit a 32-bit vertex index");
  }
};

/// State recorded when the tree reaches a checkpoint time.
struct Snapshot {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> degree_counts;  // degree_counts[k] = N_k(n)
  std::uint32_t max_degree = 0;
  std::vector<std::pair<Vertex, std::uint32_t>> tracked;  // (vertex, degree); unborn vertices omitted
};

struct GrowthResult {
  TreeRecord tree;
  std::vector<Snapshot> snapshots;
};

/// Runs the attachment dynamics from the single vertex v_0 to time n_final.
/// `checkpoints` must be sorted and lie in [1, n_final].
inline GrowthResult grow(const GrowthParams& params, const std::vector<std::uint64_t>& checkpoints = {},
                         const std::vector<Vertex>& tracked = {0, 1}) {
  params.validate();
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()), "checkpoints must be sorted");
  for (auto t : checkpoints) {
    require(t >= 1, "checkpoints must be >= 1");
    require(t <= params.n_final, "checkpoint " + std::to_string(t) + " is beyond n = " + std::to_string(params.n_final));
  }

  CounterRng rng(params.seed);
  GrowthResult out{TreeRecord(params.delta), {}};
  TreeRecord& tree = out.tree;
  tree.reserve(params.n_final);

  // counts[k] = number of vertices with degree k, maintained incrementally.
  std::vector<std::uint64_t> counts{1};
  std::uint32_t max_degree = 0;
  auto bump = [&](std::uint32_t old_degree) {
    --counts[old_degree];
    if (counts.size() <= old_degree + 1) counts.resize(old_degree + 2, 0);
    ++counts[old_degree + 1];
    max_degree = std::max(max_degree, old_degree + 1);
  };

  std::size_t next_cp = 0;
  auto record = [&]() {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == tree.n()) {
      Snapshot s;
      s.n = tree.n();
      s.degree_counts.assign(counts.begin(), counts.begin() + max_degree + 1);
      s.max_degree = max_degree;
      for (Vertex v : tracked)
        if (v <= tree.n()) s.tracked.emplace_back(v, tree.degree(v));
      out.snapshots.push_back(std::move(s));
      ++next_cp;
    }
  };

  // n = 1 is forced: v_1 attaches to v_0.
  bump(0);
  ++counts[1];
  tree.attach(0);
  record();

  while (tree.n() < params.n_final) {
    const Vertex target = sample_target(tree, rng, params.convention, params.sampler);
    bump(tree.degree(target));
    ++counts[1];
    tree.attach(target);
    record();
  }
  return out;
}

}  // namespace seri

#endif  // SERI_GROWTH_HPP
