#ifndef SERI_TREE_RECORD_HPP
#define SERI_TREE_RECORD_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seri/errors.hpp"

namespace seri {

using Vertex = std::uint32_t;

/// How the delta-accrual of the initial vertex v_0 is counted.
///  - exact:       theta(v_0,n) includes the m = 0 summand (0 + delta).
///  - paper_total: v_0 accrues no delta at all, which makes the total weight
///                 n(n+1)(1 + delta/2). Every other vertex is unchanged.
enum class Convention { exact, paper_total };

enum class Sampler { fast, naive };

inline const char* to_string(Convention c) { return c == Convention::exact ? "exact" : "paper-total"; }
inline const char* to_string(Sampler s) { return s == Sampler::fast ? "fast" : "naive"; }

inline Convention parse_convention(const std::string& s) {
  if (s == "exact") return Convention::exact;
  if (s == "paper-total" || s == "paper_total") return Convention::paper_total;
  throw ValidationError("unknown convention '" + s + "' (expected exact|paper-total)");
}

inline Sampler parse_sampler(const std::string& s) {
  if (s == "fast") return Sampler::fast;
  if (s == "naive") return Sampler::naive;
  throw ValidationError("unknown sampler '" + s + "' (expected fast|naive)");
}

/// Smallest delta admitted by a convention. Under `exact`, theta(v_0,1) = 1 + 2*delta,
/// so the initial vertex has non-positive weight for delta <= -1/2.
inline double delta_lower_bound(Convention c) { return c == Convention::exact ? -0.5 : -1.0; }

inline void validate_delta(double delta, Convention c) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  require(delta > delta_lower_bound(c),
          "delta must satisfy delta > -1/2 under the exact convention (theta(v_0,1) = 1 + 2 delta); "
          "use --convention paper-total for delta in (-1, -1/2]");
}

/// The grown tree. Vertex v_m is born (and attaches) at time m; v_0 exists at time 0.
/// Edge m is (v_m, parent[m]).
class TreeRecord {
 public:
  explicit TreeRecord(double delta = 0.0) : delta_(delta), parent_(1, 0), degree_(1, 0) {}

  /// Rebuild from a parent list for vertices 1..n (parents[0] is parent of v_1).
  static TreeRecord from_parents(double delta, std::span<const Vertex> parents) {
    TreeRecord t(delta);
    t.reserve(parents.size());
    for (std::size_t m = 0; m < parents.size(); ++m) {
      require(parents[m] <= m, "parent of v_" + std::to_string(m + 1) + " must be an earlier vertex");
      t.attach(parents[m]);
    }
    return t;
  }

  void reserve(std::size_t n) {
    parent_.reserve(n + 1);
    degree_.reserve(n + 1);
  }

  /// Vertex v_{n+1} attaches to `target`; time advances to n+1.
  void attach(Vertex target) {
    parent_.push_back(target);
    ++degree_[target];
    degree_.push_back(1);
  }

  std::uint64_t n() const noexcept { return parent_.size() - 1; }
  std::size_t vertex_count() const noexcept { return degree_.size(); }
  double delta() const noexcept { return delta_; }

  /// parent(m) for 1 <= m <= n.
  Vertex parent(std::uint64_t m) const noexcept { return parent_[m]; }
  std::uint32_t degree(std::uint64_t i) const noexcept { return degree_[i]; }

  /// Index 0 is a placeholder; parents()[m] is meaningful for m >= 1.
  std::span<const Vertex> parents() const noexcept { return parent_; }
  std::span<const std::uint32_t> degrees() const noexcept { return degree_; }

  /// Endpoints of the edge created at time m: (v_m, parent[m]).
  std::pair<Vertex, Vertex> edge(std::uint64_t m) const noexcept {
    return {static_cast<Vertex>(m), parent_[m]};
  }

 private:
  double delta_;
  std::vector<Vertex> parent_;
  std::vector<std::uint32_t> degree_;
};

}  // namespace seri

#endif  // SERI_TREE_RECORD_HPP
