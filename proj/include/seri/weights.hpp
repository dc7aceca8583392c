#ifndef SERI_WEIGHTS_HPP
#define SERI_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "seri/errors.hpp"
#include "seri/tree_record.hpp"

namespace seri {

/// theta(v_i,n) split into its degree and delta contributions.
template <class S>
struct WeightView {
  Vertex vertex = 0;
  S theta{};
  S degree_part{};  // sum over incident edges e of (n + 1 - t_e)
  S delta_part{};   // delta * (number of accrual steps)
};

template <class S>
bool same_value(const S& a, const S& b) {
  if constexpr (std::is_floating_point_v<S>) {
    const S scale = std::max({S(1), std::abs(a), std::abs(b)});
    return std::abs(a - b) <= S(1e-12) * scale;
  } else {
    return a == b;
  }
}

/// Number of steps at which v_i accrues delta by time n.
inline std::uint64_t delta_accrual_steps(std::uint64_t n, std::uint64_t i, Convention c) {
  if (i == 0 && c == Convention::paper_total) return 0;
  return n + 1 - i;
}

namespace detail {

inline void check_vertex(const TreeRecord& tree, std::uint64_t i) {
  require(tree.n() >= 1, "weights are defined for n >= 1");
  require(i <= tree.n(), "vertex index " + std::to_string(i) + " out of range 0.." + std::to_string(tree.n()));
}

}  // namespace detail

/// theta(v_i,n) by literally summing (d(v_i,m) + delta) over m = i..n, replaying the
/// degree history of v_i. O(n).
template <class S>
WeightView<S> theta_replay(const TreeRecord& tree, std::uint64_t i, Convention c, const S& delta) {
  detail::check_vertex(tree, i);
  const std::uint64_t n = tree.n();
  std::vector<std::uint64_t> child_times;
  for (std::uint64_t m = i + 1; m <= n; ++m)
    if (tree.parent(m) == i) child_times.push_back(m);

  WeightView<S> w;
  w.vertex = static_cast<Vertex>(i);
  std::size_t next_child = 0;
  std::uint64_t degree = (i == 0) ? 0 : 1;
  for (std::uint64_t m = i; m <= n; ++m) {
    while (next_child < child_times.size() && child_times[next_child] <= m) {
      ++degree;
      ++next_child;
    }
    w.degree_part += S(degree);
    const bool accrues = !(i == 0 && c == Convention::paper_total);
    if (accrues) w.delta_part += delta;
  }
  w.theta = w.degree_part + w.delta_part;
  return w;
}

/// theta(v_i,n) from the edge-event identity
///   sum_{e ∋ v_i} (n + 1 - t_e) + delta * steps(i).
template <class S>
WeightView<S> theta_events(const TreeRecord& tree, std::uint64_t i, Convention c, const S& delta) {
  detail::check_vertex(tree, i);
  const std::uint64_t n = tree.n();
  std::uint64_t deg_part = (i >= 1) ? n + 1 - i : 0;
  for (std::uint64_t m = i + 1; m <= n; ++m)
    if (tree.parent(m) == i) deg_part += n + 1 - m;
  WeightView<S> w;
  w.vertex = static_cast<Vertex>(i);
  w.degree_part = S(deg_part);
  w.delta_part = delta * S(delta_accrual_steps(n, i, c));
  w.theta = w.degree_part + w.delta_part;
  return w;
}

/// Integrated weight of v_i at time n, computed by replay and by the event identity;
/// throws ConsistencyError if they disagree.
template <class S>
WeightView<S> vertex_weight(const TreeRecord& tree, std::uint64_t i, Convention c, const S& delta) {
  const auto a = theta_replay<S>(tree, i, c, delta);
  const auto b = theta_events<S>(tree, i, c, delta);
  if (!same_value(a.theta, b.theta) || !same_value(a.degree_part, b.degree_part))
    throw ConsistencyError("replay and event-identity weights disagree at vertex " + std::to_string(i));
  return b;
}

inline WeightView<double> vertex_weight(const TreeRecord& tree, std::uint64_t i, Convention c) {
  return vertex_weight<double>(tree, i, c, tree.delta());
}

/// All weights at time n in one pass over the edge log.
template <class S>
std::vector<S> all_weights(const TreeRecord& tree, Convention c, const S& delta) {
  require(tree.n() >= 1, "weights are defined for n >= 1");
  const std::uint64_t n = tree.n();
  std::vector<std::uint64_t> deg_part(n + 1, 0);
  for (std::uint64_t m = 1; m <= n; ++m) {
    const std::uint64_t w = n + 1 - m;
    deg_part[m] += w;
    deg_part[tree.parent(m)] += w;
  }
  std::vector<S> theta(n + 1);
  for (std::uint64_t i = 0; i <= n; ++i)
    theta[i] = S(deg_part[i]) + delta * S(delta_accrual_steps(n, i, c));
  return theta;
}

/// Closed form of the total weight:
///   paper_total: n(n+1)(1 + delta/2)
///   exact:       n(n+1) + delta (n+1)(n+2)/2
template <class S>
S total_weight_closed(std::uint64_t n, Convention c, const S& delta) {
  const S nn = S(n);
  if (c == Convention::paper_total) return nn * (nn + S(1)) * (S(1) + delta / S(2));
  return nn * (nn + S(1)) + delta * (nn + S(1)) * (nn + S(2)) / S(2);
}

/// Sum of all vertex weights, checked against the closed form.
template <class S>
S total_weight(const TreeRecord& tree, Convention c, const S& delta) {
  S sum{};
  for (const auto& w : all_weights<S>(tree, c, delta)) sum += w;
  if (!same_value(sum, total_weight_closed<S>(tree.n(), c, delta)))
    throw ConsistencyError("total weight disagrees with its closed form");
  return sum;
}

inline double total_weight(const TreeRecord& tree, Convention c) {
  return total_weight<double>(tree, c, tree.delta());
}

/// theta(v_i,n) / sum_j theta(v_j,n) for i = 0..n.
template <class S>
std::vector<S> attach_probabilities(const TreeRecord& tree, Convention c, const S& delta) {
  auto theta = all_weights<S>(tree, c, delta);
  S total{};
  for (const auto& w : theta) total += w;
  for (auto& w : theta) w /= total;
  return theta;
}

inline std::vector<double> attach_probabilities(const TreeRecord& tree, Convention c) {
  return attach_probabilities<double>(tree, c, tree.delta());
}

}  // namespace seri

#endif  // SERI_WEIGHTS_HPP
