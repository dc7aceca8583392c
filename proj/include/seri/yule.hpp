#ifndef SERI_YULE_HPP
#define SERI_YULE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "seri/errors.hpp"
#include "seri/rng.hpp"

namespace seri {

enum class YuleVariant { exact_chain, simplified };

inline YuleVariant parse_yule_variant(const std::string& s) {
  if (s == "exact" || s == "exact_chain" || s == "exact-chain") return YuleVariant::exact_chain;
  if (s == "simplified") return YuleVariant::simplified;
  throw ValidationError("unknown yule variant '" + s + "' (expected exact-chain|simplified)");
}

struct YuleState {
  double t = 0;
  std::uint64_t Y = 2;
  std::uint64_t D = 1;
  std::uint64_t W = 0;
};

/// Mark probability at a birth from pre-birth state (Y, D, W).
inline double yule_mark_probability(const YuleState& s, double delta, YuleVariant v) {
  const double gamma = 2.0 / (2.0 + delta);
  const double y = static_cast<double>(s.Y);
  const double d = static_cast<double>(s.D);
  const double w = static_cast<double>(s.W);
  if (v == YuleVariant::exact_chain) return gamma * ((d + delta) / (y + 1.0) - w / (y * (y + 1.0)));
  return gamma * ((d + delta) / y - w / (y * y));
}

/// Rate-1 Yule process from Y = 2 with marked births tracking the degree D of a
/// fixed vertex. W accumulates Y (after the birth) at each mark. Returns the
/// state at t = 0 and after every jump up to t_max.
template <class Rng>
std::vector<YuleState> yule_marked_simulate(double delta, double t_max, Rng& rng,
                                            YuleVariant variant = YuleVariant::exact_chain) {
  require(delta > -1.0, "delta must satisfy delta > -1");
  require(t_max > 0.0, "t_max must be > 0");
  std::vector<YuleState> traj;
  YuleState s;
  traj.push_back(s);
  for (;;) {
    const double hold = rng.exponential(static_cast<double>(s.Y));
    if (s.t + hold > t_max) break;
    const double p = yule_mark_probability(s, delta, variant);
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
      throw ConsistencyError("mark probability " + std::to_string(p) + " outside [0,1]");
    s.t += hold;
    ++s.Y;
    if (rng.bernoulli(p)) {
      ++s.D;
      s.W += s.Y;
    }
    traj.push_back(s);
  }
  return traj;
}

/// D(t) of a trajectory: value after the last jump at or before t.
inline std::uint64_t yule_D_at(const std::vector<YuleState>& traj, double t) {
  std::uint64_t d = traj.front().D;
  for (const auto& s : traj) {
    if (s.t > t) break;
    d = s.D;
  }
  return d;
}

/// CSV "t,Y,D,W".
inline void write_trajectory_csv(std::ostream& os, const std::vector<YuleState>& traj) {
  os << "t,Y,D,W\n";
  os.precision(17);
  for (const auto& s : traj) os << s.t << ',' << s.Y << ',' << s.D << ',' << s.W << '\n';
}

}  // namespace seri

#endif  // SERI_YULE_HPP
