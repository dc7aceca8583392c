#ifndef SERI_BRANCHING_HPP
#define SERI_BRANCHING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "seri/errors.hpp"
#include "seri/exponents.hpp"
#include "seri/point_process.hpp"
#include "seri/rng.hpp"

namespace seri {

inline constexpr std::size_t kDefaultNodeCap = 10'000'000;

/// A continuous-time branching realization. Nodes are stored in birth order;
/// node 0 is the root, born at time 0.
struct BranchingTree {
  struct Node {
    std::int64_t parent = -1;  // -1 for the root
    double birth_time = 0;
    bool is_root = false;
  };
  std::vector<Node> nodes;
  double horizon = 0;
  bool truncated = false;  // stopped early at a size limit; nodes are then incomplete

  std::size_t size() const noexcept { return nodes.size(); }

  /// Number of individuals born at or before t.
  std::size_t size_at(double t) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                               [](double x, const Node& n) { return x < n.birth_time; });
    return static_cast<std::size_t>(it - nodes.begin());
  }

  /// Parent array in the convention shared with the fringe tools (-1 = root).
  std::vector<std::int64_t> parents() const {
    std::vector<std::int64_t> p(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) p[i] = nodes[i].parent;
    return p;
  }
};

/// Solves scale * (a - 1 + e^{-a}) = target for a >= 0: safeguarded Newton on a
/// convex increasing function, started at target/scale + 1 (right of the root),
/// bisection when a step leaves the bracket. Tolerance 1e-12.
// a - (1 - e^{-a}) without cancellation near zero
inline double ramp_integral(double a) {
  if (std::abs(a) < 0.05) {
    // alternating series a^2/2 - a^3/6 + ..., truncation below 1e-17 relative
    double term = a * a / 2, sum = 0;
    for (int k = 3; k < 14; ++k) {
      sum += term;
      term *= -a / k;
    }
    return sum;
  }
  return a + std::expm1(-a);
}

inline double invert_cumulative_rate(double target, double scale) {
  if (target <= 0.0) return 0.0;
  const double e = target / scale;
  auto g = [e](double a) { return ramp_integral(a) - e; };
  double lo = 0.0;
  double hi = e + 1.0;
  double a = hi;
  for (int it = 0; it < 200; ++it) {
    const double ga = g(a);
    if (ga > 0.0) hi = a; else lo = a;
    const double slope = -std::expm1(-a);
    double next = slope > 0.0 ? a - ga / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) <= 1e-14 * a) return next;
    a = next;
  }
  return a;
}

/// Cumulative reproduction rate of a node with rate scale * (1 - e^{-age}).
inline double cumulative_rate(double age, double scale) { return scale * ramp_integral(age); }

/// Edge branching process: the root reproduces at rate c(1+delta)(1 - e^{-t}),
/// every other node at rate c(1 - e^{-age}). Births are generated in time order
/// from per-node Poisson clocks (exact inversion of the cumulative rate).
template <class Rng>
BranchingTree sample_edge_bp(double delta, StopRule stop, Rng& rng, std::size_t node_cap = kDefaultNodeCap) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  stop.validate();
  const double c = rate_scale(delta);
  double t_max = stop.t_max;
  if (stop.kind == StopRule::Kind::exp1_time) t_max = rng.exp1();
  const std::uint64_t count_max =
      stop.kind == StopRule::Kind::count ? stop.count_max : std::numeric_limits<std::uint64_t>::max();

  BranchingTree tree;
  tree.horizon = t_max;
  tree.nodes.push_back({-1, 0.0, true});

  struct Clock {
    double next_time;
    double cum_target;  // accumulated unit-exponential increments
    std::size_t node;
  };
  auto later = [](const Clock& a, const Clock& b) { return a.next_time > b.next_time; };
  std::priority_queue<Clock, std::vector<Clock>, decltype(later)> clocks(later);

  auto arm = [&](std::size_t node, double cum_target) {
    const double scale = tree.nodes[node].is_root ? c * (1.0 + delta) : c;
    const double birth = tree.nodes[node].birth_time;
    // Skip the root-find when the next event is past the horizon.
    if (std::isfinite(t_max) && cum_target > cumulative_rate(t_max - birth, scale)) return;
    clocks.push({birth + invert_cumulative_rate(cum_target, scale), cum_target, node});
  };
  arm(0, rng.exp1());

  while (!clocks.empty() && tree.nodes.size() < count_max) {
    const Clock ev = clocks.top();
    clocks.pop();
    if (ev.next_time > t_max) break;
    if (tree.nodes.size() >= node_cap)
      throw ResourceCapExceeded("branching realization exceeded the node cap of " + std::to_string(node_cap));
    tree.nodes.push_back({static_cast<std::int64_t>(ev.node), ev.next_time, false});
    arm(tree.nodes.size() - 1, rng.exp1());
    arm(ev.node, ev.cum_target + rng.exp1());
  }
  if (stop.kind == StopRule::Kind::count) tree.horizon = tree.nodes.back().birth_time;
  return tree;
}

/// One draw of the discounted offspring sum  sum_i e^{-lambda t_i}  over the points
/// t_i of a Poisson process with rate c(1 - e^{-t}). Points beyond the horizon H
/// with c e^{-lambda H} / lambda = 1e-13 are dropped.
template <class Rng>
double sample_zeta_hat(double delta, Rng& rng) {
  const double c = rate_scale(delta);
  const double lam = malthusian_root(c);
  const double horizon = std::log(c / (lam * 1e-13)) / lam;
  const double cap = cumulative_rate(horizon, c);
  double sum = 0.0;
  double cum = rng.exp1();
  while (cum <= cap) {
    sum += std::exp(-lam * invert_cumulative_rate(cum, c));
    cum += rng.exp1();
  }
  return sum;
}

enum class GenealogyMethod { nested_arrivals, edge_bp };

/// The branching process whose individuals each reproduce by an independent copy
/// of the offspring point process, run to `horizon`. Genealogy only.
/// With edge_bp, an individual's children are the non-root births of an
/// independent edge branching process (same law of birth times).
/// Once the genealogy has more than `size_limit` individuals sampling stops and
/// the result is flagged `truncated`; smaller realizations are unaffected.
template <class Rng>
BranchingTree sample_bp_seri(double delta, double horizon, Rng& rng,
                             GenealogyMethod method = GenealogyMethod::nested_arrivals,
                             std::size_t node_cap = kDefaultNodeCap,
                             std::size_t size_limit = std::numeric_limits<std::size_t>::max()) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  require(horizon >= 0.0, "horizon must be >= 0");
  BranchingTree tree;
  tree.horizon = horizon;
  tree.nodes.push_back({-1, 0.0, true});
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const double birth = tree.nodes[i].birth_time;
    std::vector<double> child_ages;
    if (method == GenealogyMethod::nested_arrivals) {
      child_ages = sample_arrivals(delta, StopRule::at_time(horizon - birth), rng).sigmas;
    } else {
      // A sub-process larger than the room left already decides truncation.
      const std::size_t room = size_limit - std::min(size_limit, tree.nodes.size());
      const bool limited = room < node_cap - 1;
      try {
        const auto sub = sample_edge_bp(delta, StopRule::at_time(horizon - birth), rng, limited ? room + 2 : node_cap);
        for (std::size_t j = 1; j < sub.nodes.size(); ++j) child_ages.push_back(sub.nodes[j].birth_time);
      } catch (const ResourceCapExceeded&) {
        if (!limited) throw;
        tree.truncated = true;
        return tree;
      }
    }
    if (tree.nodes.size() + child_ages.size() > size_limit) {
      tree.truncated = true;
      return tree;
    }
    if (tree.nodes.size() + child_ages.size() > node_cap)
      throw ResourceCapExceeded("branching realization exceeded the node cap of " + std::to_string(node_cap));
    for (double a : child_ages) tree.nodes.push_back({static_cast<std::int64_t>(i), birth + a, false});
  }
  // Breadth-first order is not birth order; sort while remapping parents.
  std::vector<std::size_t> order(tree.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tree.nodes[a].birth_time < tree.nodes[b].birth_time; });
  std::vector<std::int64_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<std::int64_t>(r);
  std::vector<BranchingTree::Node> sorted(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto n = tree.nodes[order[r]];
    if (n.parent >= 0) n.parent = rank[static_cast<std::size_t>(n.parent)];
    sorted[r] = n;
  }
  tree.nodes = std::move(sorted);
  return tree;
}

}  // namespace seri

#endif  // SERI_BRANCHING_HPP
