#ifndef SERI_POINT_PROCESS_HPP
#define SERI_POINT_PROCESS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "seri/errors.hpp"
#include "seri/exponents.hpp"
#include "seri/rng.hpp"

// The offspring point process with memory. The k-th inter-arrival time has hazard
//
//   h_k(x) = c (1 + delta) (1 - e^{-(x + s_{k-1})})
//          + c sum_{j=1}^{k-1} (1 - e^{-(s_{k-1} - s_j + x)}),   c = 1/(1 + delta/2),
//
// given the previous arrival times s_1 < ... < s_{k-1} (s_0 = 0).

namespace seri {

struct ArrivalSequence {
  std::vector<double> sigmas;  // strictly increasing arrival times
  double delta = 0;
  double horizon = std::numeric_limits<double>::infinity();  // time at which observation stopped

  std::size_t count_by(double t) const {
    std::size_t k = 0;
    while (k < sigmas.size() && sigmas[k] <= t) ++k;
    return k;
  }
};

/// When to stop a simulation of the limit processes.
struct StopRule {
  enum class Kind { time, count, exp1_time };
  Kind kind = Kind::time;
  double t_max = 0;
  std::uint64_t count_max = 0;

  static StopRule at_time(double t) { return {Kind::time, t, 0}; }
  static StopRule at_count(std::uint64_t k) { return {Kind::count, std::numeric_limits<double>::infinity(), k}; }
  /// Stop at an independent rate-1 exponential time drawn from the same stream.
  static StopRule at_exp1() { return {Kind::exp1_time, 0, 0}; }

  void validate() const {
    if (kind == Kind::time) require(t_max >= 0.0 && !std::isnan(t_max), "stop time must be >= 0");
    if (kind == Kind::count) require(count_max >= 1, "stop count must be >= 1");
  }
};

namespace detail {

inline double check_prefix(std::size_t k, std::span<const double> prefix, double x) {
  require(k >= 1, "arrival index k must be >= 1");
  require(prefix.size() == k - 1, "hazard for arrival k needs exactly k-1 previous arrivals");
  require(x >= 0.0, "hazard argument must be >= 0");
  return prefix.empty() ? 0.0 : prefix.back();
}

}  // namespace detail

/// h_k(x) for the k-th arrival given the first k-1 arrival times.
inline double hazard(std::size_t k, std::span<const double> prefix, double x, double delta) {
  const double last = detail::check_prefix(k, prefix, x);
  const double c = rate_scale(delta);
  double h = c * (1.0 + delta) * (-std::expm1(-(x + last)));
  for (double s : prefix) h += c * (-std::expm1(-(last - s + x)));
  return h;
}

/// Integral of h_k over [0, x].
inline double cumulative_hazard(std::size_t k, std::span<const double> prefix, double x, double delta) {
  const double last = detail::check_prefix(k, prefix, x);
  const double c = rate_scale(delta);
  // int_0^x (1 - e^{-(y + b)}) dy = x - e^{-b} (1 - e^{-x})
  const double one_minus = -std::expm1(-x);
  double total = c * (1.0 + delta) * (x - std::exp(-last) * one_minus);
  for (double s : prefix) total += c * (x - std::exp(-(last - s)) * one_minus);
  return total;
}

/// Samples arrival times by thinning: the k-th inter-arrival uses the constant
/// bound c (k + delta) >= h_k. Hazard evaluation is O(1) through the running sum
/// sum_j e^{-(s_last - s_j)}.
template <class Rng>
ArrivalSequence sample_arrivals(double delta, StopRule stop, Rng& rng) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  stop.validate();
  ArrivalSequence seq;
  seq.delta = delta;
  double t_max = stop.t_max;
  if (stop.kind == StopRule::Kind::exp1_time) t_max = rng.exp1();
  seq.horizon = t_max;
  const std::uint64_t count_max =
      stop.kind == StopRule::Kind::count ? stop.count_max : std::numeric_limits<std::uint64_t>::max();

  const double c = rate_scale(delta);
  double last = 0.0;
  double root_decay = 1.0;  // e^{-last}
  double child_sum = 0.0;   // sum_j e^{-(last - s_j)}
  while (seq.sigmas.size() < count_max) {
    const double k = static_cast<double>(seq.sigmas.size() + 1);
    const double bound = c * (k + delta);
    double x = 0.0;
    for (;;) {
      x += rng.exp1() / bound;
      if (last + x > t_max) return seq;
      const double decay = std::exp(-x);
      const double h = c * (1.0 + delta) * (1.0 - root_decay * decay) + c * ((k - 1.0) - child_sum * decay);
      if (rng.uniform() * bound < h) break;
    }
    const double decay = std::exp(-x);
    last += x;
    root_decay *= decay;
    child_sum = child_sum * decay + 1.0;
    seq.sigmas.push_back(last);
  }
  return seq;
}

}  // namespace seri

#endif  // SERI_POINT_PROCESS_HPP
