#ifndef SERI_ENUMERATE_HPP
#define SERI_ENUMERATE_HPP

#include <functional>

#include "seri/rational.hpp"
#include "seri/samplers.hpp"
#include "seri/tree_record.hpp"
#include "seri/weights.hpp"

namespace seri {

/// Visits every attachment history up to time n_max (each state once, with the
/// exact probability of reaching it) under the given convention.
inline void for_each_history(std::uint64_t n_max, Convention c, const Rational& delta,
                             const std::function<void(const TreeRecord&, const Rational&)>& visit) {
  std::function<void(TreeRecord&, const Rational&)> rec = [&](TreeRecord& t, const Rational& prob) {
    visit(t, prob);
    if (t.n() == n_max) return;
    const auto p = attach_probabilities<Rational>(t, c, delta);
    for (std::size_t target = 0; target < p.size(); ++target) {
      TreeRecord next = t;
      next.attach(static_cast<Vertex>(target));
      rec(next, prob * p[target]);
    }
  };
  TreeRecord t(static_cast<double>(delta));
  t.attach(0);
  rec(t, Rational(1));
}

struct EquivalenceResult {
  std::uint64_t states = 0;
  std::uint64_t mismatches = 0;
};

/// Compares the fast sampler's induced probabilities with the weight ratios on
/// every state reachable up to n_max, in exact arithmetic.
inline EquivalenceResult sampler_equivalence(std::uint64_t n_max, Convention c, const Rational& delta) {
  EquivalenceResult r;
  for_each_history(n_max, c, delta, [&](const TreeRecord& t, const Rational&) {
    ++r.states;
    if (fast_sampler_probabilities<Rational>(t, c, delta) != attach_probabilities<Rational>(t, c, delta)) ++r.mismatches;
  });
  return r;
}

}  // namespace seri

#endif  // SERI_ENUMERATE_HPP
