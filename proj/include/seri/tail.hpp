#ifndef SERI_TAIL_HPP
#define SERI_TAIL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seri/errors.hpp"
#include "seri/pmf.hpp"

namespace seri {

struct CcdfPoint {
  std::uint64_t k;
  double p;  // P(degree >= k)
};

/// Complementary cdf on every integer k from 1 to the largest support point.
inline std::vector<CcdfPoint> tail_ccdf(const DegreePMF& pmf) {
  require(!pmf.p.empty(), "ccdf of an empty pmf");
  const std::uint64_t kmax = pmf.p.rbegin()->first;
  std::vector<CcdfPoint> out(kmax);
  double tail = 0.0;
  auto it = pmf.p.rbegin();
  for (std::uint64_t k = kmax; k >= 1; --k) {
    while (it != pmf.p.rend() && it->first >= k) {
      tail += it->second;
      ++it;
    }
    out[k - 1] = {k, tail};
  }
  // Summation order leaves P(>=1) a few ulps away from 1.
  for (auto& pt : out) pt.p = std::min(pt.p / out.front().p, 1.0);
  for (std::size_t i = 1; i < out.size(); ++i) out[i].p = std::min(out[i].p, out[i - 1].p);
  return out;
}

/// Empirical ccdf of a degree sample (all degrees >= 1, so P(>=1) = 1).
inline std::vector<CcdfPoint> tail_ccdf(std::span<const std::uint32_t> degrees) {
  require(!degrees.empty(), "ccdf of an empty sample");
  std::uint32_t kmax = 0;
  for (auto d : degrees) {
    require(d >= 1, "degrees must be >= 1");
    kmax = std::max(kmax, d);
  }
  std::vector<std::uint64_t> at_least(static_cast<std::size_t>(kmax) + 2, 0);
  for (auto d : degrees) ++at_least[d];
  for (std::size_t k = kmax; k-- > 1;) at_least[k] += at_least[k + 1];
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(degrees.size());
  for (std::uint64_t k = 1; k <= kmax; ++k)
    out.push_back({k, static_cast<double>(at_least[k]) / n});
  return out;
}

struct WindowPolicy {
  double p_max = 0.1;                 // k_min: smallest k with P(>=k) <= p_max
  double min_tail_samples = 50;       // k_max: largest k with N * P(>=k) >= this
  std::uint64_t k_min = 0, k_max = 0;  // explicit window when both > 0
  double points_per_decade = 10;      // log-spaced fit points; 0 = every integer k
};

struct TailFit {
  double slope = 0;
  double intercept = 0;
  double stderr_ = 0;
  std::uint64_t k_min = 0;
  std::uint64_t k_max = 0;
  double r_squared = 0;
  std::size_t n_tail_points = 0;
};

struct LinearFit {
  double slope, intercept, stderr_, r_squared;
};

/// Ordinary least squares y = a + b x with the usual slope standard error.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "least squares needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0, "least squares needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.stderr_ = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  f.r_squared = syy > 0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return f;
}

/// Least squares of log P(>=k) on log k over the window. `n_samples` is the
/// sample size behind the ccdf (0 for an exact ccdf: k_max = last positive point).
inline TailFit fit_power_tail(const std::vector<CcdfPoint>& ccdf, const WindowPolicy& policy = {},
                              std::uint64_t n_samples = 0) {
  require(!ccdf.empty(), "empty ccdf");
  TailFit fit;
  if (policy.k_min > 0 && policy.k_max > 0) {
    fit.k_min = policy.k_min;
    fit.k_max = policy.k_max;
  } else {
    for (const auto& pt : ccdf)
      if (pt.p <= policy.p_max) {
        fit.k_min = pt.k;
        break;
      }
    for (const auto& pt : ccdf) {
      const bool enough = n_samples == 0 ? pt.p > 0 : pt.p * static_cast<double>(n_samples) >= policy.min_tail_samples;
      if (enough) fit.k_max = pt.k;
    }
  }
  require(fit.k_min > 0 && fit.k_max > fit.k_min,
          "tail window is empty (k_min = " + std::to_string(fit.k_min) + ", k_max = " + std::to_string(fit.k_max) + ")");

  std::vector<std::uint64_t> ks;
  if (policy.points_per_decade <= 0) {
    for (std::uint64_t k = fit.k_min; k <= fit.k_max; ++k) ks.push_back(k);
  } else {
    const double step = std::pow(10.0, 1.0 / policy.points_per_decade);
    for (double x = static_cast<double>(fit.k_min); x <= static_cast<double>(fit.k_max) * (1 + 1e-12); x *= step) {
      const auto k = static_cast<std::uint64_t>(std::llround(x));
      if (ks.empty() || k != ks.back()) ks.push_back(k);
    }
    if (ks.back() != fit.k_max) ks.push_back(fit.k_max);
  }
  std::vector<double> x, y;
  for (auto k : ks) {
    if (k > ccdf.size()) break;
    const double p = ccdf[k - 1].p;
    if (p <= 0) continue;
    x.push_back(std::log(static_cast<double>(k)));
    y.push_back(std::log(p));
  }
  require(x.size() >= 8, "tail window has " + std::to_string(x.size()) + " points (need >= 8)");
  const auto lf = least_squares(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.stderr_ = lf.stderr_;
  fit.r_squared = lf.r_squared;
  fit.n_tail_points = x.size();
  return fit;
}

/// Fits over the default window and two neighbours (wider and narrower).
inline std::vector<TailFit> tail_sensitivity(const std::vector<CcdfPoint>& ccdf, std::uint64_t n_samples,
                                             const WindowPolicy& base = {}) {
  std::vector<TailFit> out;
  WindowPolicy wide = base, narrow = base;
  wide.p_max = base.p_max * 2;
  wide.min_tail_samples = base.min_tail_samples / 2;
  narrow.p_max = base.p_max / 2;
  narrow.min_tail_samples = base.min_tail_samples * 2;
  for (const auto& w : {base, wide, narrow}) out.push_back(fit_power_tail(ccdf, w, n_samples));
  return out;
}

}  // namespace seri

#endif  // SERI_TAIL_HPP
