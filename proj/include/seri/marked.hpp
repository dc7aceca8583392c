#ifndef SERI_MARKED_HPP
#define SERI_MARKED_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "seri/errors.hpp"
#include "seri/exponents.hpp"
#include "seri/point_process.hpp"
#include "seri/tree_record.hpp"
#include "seri/weights.hpp"

namespace seri {

/// Ordered rooted tree with attachment marks a_v in (0, 1]. Node 0 is the root.
/// Children are ordered by mark (Ulam-Harris order = order of attachment).
/// Discrete attachment times tau_v are optional (0 when absent).
class MarkedTree {
 public:
  struct Node {
    std::int64_t parent = -1;
    double mark = 1.0;
    std::uint64_t time = 0;
  };

  MarkedTree() = default;

  static MarkedTree from_marks(std::vector<std::int64_t> parents, std::vector<double> marks) {
    require(parents.size() == marks.size() && !parents.empty(), "marked tree needs one mark per vertex");
    MarkedTree t;
    for (std::size_t i = 0; i < parents.size(); ++i) t.nodes_.push_back({parents[i], marks[i], 0});
    t.finish();
    return t;
  }

  /// Marks tau_v / n from discrete times.
  static MarkedTree from_times(std::vector<std::int64_t> parents, std::vector<std::uint64_t> times, std::uint64_t n) {
    require(parents.size() == times.size() && !parents.empty(), "marked tree needs one time per vertex");
    require(n >= 1, "n must be >= 1");
    MarkedTree t;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      require(times[i] >= 1 && times[i] <= n, "attachment times must lie in 1..n");
      t.nodes_.push_back({parents[i], static_cast<double>(times[i]) / static_cast<double>(n), times[i]});
    }
    t.finish();
    return t;
  }

  /// Copy with tau_v = ceil(n a_v).
  MarkedTree discretize(std::uint64_t n) const {
    MarkedTree t = *this;
    for (auto& v : t.nodes_) v.time = static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) * v.mark));
    return t;
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
  bool has_times() const noexcept { return nodes_.front().time != 0; }

 private:
  void finish() {
    require(nodes_[0].parent == -1, "node 0 must be the root");
    children_.assign(nodes_.size(), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& v = nodes_[i];
      require(v.mark > 0.0 && v.mark <= 1.0, "marks must lie in (0, 1]");
      if (i == 0) continue;
      require(v.parent >= 0 && static_cast<std::size_t>(v.parent) < nodes_.size() && static_cast<std::size_t>(v.parent) != i,
              "invalid parent index");
      require(nodes_[static_cast<std::size_t>(v.parent)].mark < v.mark, "marks must increase from parent to child");
      children_[static_cast<std::size_t>(v.parent)].push_back(i);
    }
    for (auto& ch : children_)
      std::sort(ch.begin(), ch.end(), [&](std::size_t a, std::size_t b) { return nodes_[a].mark < nodes_[b].mark; });
  }

  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> children_;
};

/// Random marked tree on `size` vertices: uniform recursive shape, root mark in
/// [0.05, 0.95], each child mark uniform over the middle 98% of (parent mark, 1).
template <class Rng>
MarkedTree random_marked_tree(std::size_t size, Rng& rng) {
  require(size >= 1, "marked tree needs at least one vertex");
  std::vector<std::int64_t> parents{-1};
  std::vector<double> marks{0.05 + 0.9 * rng.uniform()};
  for (std::size_t v = 1; v < size; ++v) {
    const auto p = static_cast<std::size_t>(rng.below(v));
    parents.push_back(static_cast<std::int64_t>(p));
    marks.push_back(marks[p] + (1.0 - marks[p]) * (0.01 + 0.98 * rng.uniform()));
  }
  return MarkedTree::from_marks(std::move(parents), std::move(marks));
}

/// Log-probability that the forward neighborhood (all later descendants) of the
/// vertex born at tau_root is exactly `t`, with the given attachment times, and
/// receives no other attachment up to time n. Conditional on the root vertex;
/// subtract log(n) for a uniformly chosen root. O(n |V(t)|).
inline double marked_neighborhood_log_prob(std::uint64_t n, const MarkedTree& t, double delta, Convention conv) {
  validate_delta(delta, conv);
  require(t.has_times(), "marked tree has no discrete times");
  const std::size_t nv = t.size();
  std::vector<std::uint64_t> times(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    times[i] = t.node(i).time;
    require(times[i] >= 1 && times[i] <= n, "attachment times must lie in 1..n");
    if (i > 0)
      require(t.node(static_cast<std::size_t>(t.node(i).parent)).time < times[i],
              "attachment times must increase from parent to child");
  }
  {
    auto sorted = times;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "attachment times must be distinct");
  }
  // Vertex arriving at each time (only neighborhood times are relevant).
  std::vector<std::size_t> by_time(nv);
  for (std::size_t i = 0; i < nv; ++i) by_time[i] = i;
  std::sort(by_time.begin(), by_time.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> theta(nv, 0.0);
  std::vector<std::uint64_t> degree(nv, 0);
  std::vector<bool> alive(nv, false);
  alive[0] = true;
  degree[0] = 1;
  theta[0] = 1.0 + delta;

  double log_p = 0.0;
  std::size_t next = 1;  // index into by_time; by_time[0] is the root
  for (std::uint64_t s = times[0] + 1; s <= n; ++s) {
    const double total = total_weight_closed<double>(s - 1, conv, delta);
    if (next < nv && times[by_time[next]] == s) {
      const std::size_t w = by_time[next++];
      const auto p = static_cast<std::size_t>(t.node(w).parent);
      log_p += std::log(theta[p] / total);
      ++degree[p];
      alive[w] = true;
      degree[w] = 1;
    } else {
      double nb = 0.0;
      for (std::size_t i = 0; i < nv; ++i)
        if (alive[i]) nb += theta[i];
      log_p += std::log1p(-nb / total);
    }
    // Weights at time s.
    for (std::size_t i = 0; i < nv; ++i)
      if (alive[i]) theta[i] += static_cast<double>(degree[i]) + delta;
  }
  return log_p;
}

/// Same event with the root vertex drawn uniformly from v_1..v_n.
inline double marked_neighborhood_log_prob_uniform_root(std::uint64_t n, const MarkedTree& t, double delta,
                                                        Convention conv) {
  return marked_neighborhood_log_prob(n, t, delta, conv) - std::log(static_cast<double>(n));
}

enum class DensityForm { discrete_limit, hazard_product };

namespace detail {

/// Product-and-exponential form obtained as the n -> inf limit of the discrete
/// probability scaled by n^{|V|}.
inline double density_discrete_limit(const MarkedTree& t, double delta) {
  const double c = rate_scale(delta);
  double log_prod = 0.0;
  double exponent = 0.0;
  for (std::size_t u = 0; u < t.size(); ++u) {
    const double au = t.node(u).mark;
    const auto& ch = t.children(u);
    double sum_marks = au;  // sum_{m=0}^{k-1} a_um
    for (std::size_t k = 1; k <= ch.size(); ++k) {
      const double auk = t.node(ch[k - 1]).mark;
      // delta (a_uk - a_u) + sum_{m=0}^{k} (a_uk - a_um); the m = k term is zero.
      const double num = delta * (auk - au) + (static_cast<double>(k) * auk - sum_marks);
      log_prod += std::log(c * num / (auk * auk));
      sum_marks += auk;
    }
    double e = delta * ((au - 1.0) - std::log(au)) + ((au - 1.0) - std::log(au));
    for (std::size_t child : ch) {
      const double a = t.node(child).mark;
      e += (a - 1.0) - std::log(a);
    }
    exponent += e;
  }
  return std::exp(log_prod - c * exponent);
}

/// Product of hazard rates and survival factors of the offspring point process,
/// in log-time relative to each vertex's own mark.
inline double density_hazard_product(const MarkedTree& t, double delta) {
  double log_density = 0.0;
  for (std::size_t u = 0; u < t.size(); ++u) {
    const double au = t.node(u).mark;
    const auto& ch = t.children(u);
    std::vector<double> prefix;
    double last = 0.0;
    for (std::size_t k = 1; k <= ch.size(); ++k) {
      const double auk = t.node(ch[k - 1]).mark;
      const double s = std::log(auk / au);
      const double x = s - last;
      log_density += -std::log(auk) + std::log(hazard(k, prefix, x, delta)) - cumulative_hazard(k, prefix, x, delta);
      prefix.push_back(s);
      last = s;
    }
    const double end = std::log(1.0 / au);
    log_density -= cumulative_hazard(ch.size() + 1, prefix, end - last, delta);
  }
  return std::exp(log_density);
}

}  // namespace detail

/// Limit density of the marked forward neighborhood. Both closed forms are
/// evaluated; ConsistencyError if they differ by more than 1e-10 (relative).
inline double limit_neighborhood_density(const MarkedTree& t, double delta,
                                         DensityForm form = DensityForm::discrete_limit) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  const double a = detail::density_discrete_limit(t, delta);
  const double b = detail::density_hazard_product(t, delta);
  if (std::abs(a - b) > 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}))
    throw ConsistencyError("limit density forms disagree: " + std::to_string(a) + " vs " + std::to_string(b));
  return form == DensityForm::discrete_limit ? a : b;
}

}  // namespace seri

#endif  // SERI_MARKED_HPP
