#ifndef SERI_COMPARE_HPP
#define SERI_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "seri/errors.hpp"
#include "seri/fringe.hpp"
#include "seri/pmf.hpp"

namespace seri {

struct Comparison {
  double tv = 0;
  double chi_square = 0;
  std::size_t dof = 0;
  double p_value = 1;
  std::size_t bins = 0;  // after pooling
};

inline constexpr double kMinExpected = 5.0;

inline double chi_square_p_value(double stat, std::size_t dof) {
  if (dof == 0) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * std::max(stat, 0.0));
}

template <class K>
double tv_distance(const std::map<K, double>& p, const std::map<K, double>& q) {
  require(!p.empty() && !q.empty(), "total variation of empty distributions");
  double s = 0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) s += std::abs(v);
  return 0.5 * s;
}

template <class K>
std::map<K, double> normalize(const std::map<K, std::uint64_t>& counts) {
  double n = 0;
  for (const auto& [k, c] : counts) n += static_cast<double>(c);
  require(n > 0, "empty counts");
  std::map<K, double> out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / n;
  return out;
}

namespace detail {

/// Groups bin indices so that every group's `weight` is >= kMinExpected: all
/// light bins go to one pooled group, which joins the lightest remaining bin if
/// it is still too light.
inline std::vector<std::vector<std::size_t>> pool_bins(const std::vector<double>& weight) {
  std::vector<std::size_t> order(weight.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] < weight[b]; });
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> pooled;
  double pooled_w = 0;
  for (auto i : order) {
    if (weight[i] < kMinExpected) {
      pooled.push_back(i);
      pooled_w += weight[i];
    } else {
      groups.push_back({i});
    }
  }
  if (!pooled.empty()) {
    if (pooled_w < kMinExpected && !groups.empty()) {
      groups.front().insert(groups.front().end(), pooled.begin(), pooled.end());
    } else {
      groups.push_back(pooled);
    }
  }
  return groups;
}

}  // namespace detail

/// Observed counts against exact probabilities.
template <class K>
Comparison goodness_of_fit(const std::map<K, std::uint64_t>& observed, const std::map<K, double>& expected) {
  require(!observed.empty() && !expected.empty(), "goodness of fit needs nonempty inputs");
  Comparison out;
  const auto p_obs = normalize(observed);
  out.tv = tv_distance(p_obs, expected);
  double n = 0;
  for (const auto& [k, c] : observed) n += static_cast<double>(c);
  std::vector<K> keys;
  for (const auto& [k, v] : expected) keys.push_back(k);
  for (const auto& [k, c] : observed)
    if (!expected.count(k)) keys.push_back(k);
  std::vector<double> e(keys.size()), o(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto ie = expected.find(keys[i]);
    auto io = observed.find(keys[i]);
    e[i] = ie == expected.end() ? 0.0 : n * ie->second;
    o[i] = io == observed.end() ? 0.0 : static_cast<double>(io->second);
  }
  for (const auto& g : detail::pool_bins(e)) {
    double eg = 0, og = 0;
    for (auto i : g) {
      eg += e[i];
      og += o[i];
    }
    if (eg > 0) out.chi_square += (og - eg) * (og - eg) / eg;
    else if (og > 0) out.chi_square = HUGE_VAL;
    ++out.bins;
  }
  out.dof = out.bins > 0 ? out.bins - 1 : 0;
  out.p_value = chi_square_p_value(out.chi_square, out.dof);
  return out;
}

/// Two independent samples: chi-square test of homogeneity on the 2 x K table.
template <class K>
Comparison two_sample(const std::map<K, std::uint64_t>& a, const std::map<K, std::uint64_t>& b) {
  require(!a.empty() && !b.empty(), "two-sample comparison needs nonempty inputs");
  Comparison out;
  out.tv = tv_distance(normalize(a), normalize(b));
  std::map<K, std::pair<double, double>> table;
  double na = 0, nb = 0;
  for (const auto& [k, c] : a) {
    table[k].first = static_cast<double>(c);
    na += static_cast<double>(c);
  }
  for (const auto& [k, c] : b) {
    table[k].second = static_cast<double>(c);
    nb += static_cast<double>(c);
  }
  const double fa = na / (na + nb), fb = nb / (na + nb);
  std::vector<std::pair<double, double>> cells;
  std::vector<double> weight;
  for (const auto& [k, ab] : table) {
    cells.push_back(ab);
    weight.push_back(std::min(fa, fb) * (ab.first + ab.second));
  }
  for (const auto& g : detail::pool_bins(weight)) {
    double oa = 0, ob = 0;
    for (auto i : g) {
      oa += cells[i].first;
      ob += cells[i].second;
    }
    const double tot = oa + ob;
    const double ea = fa * tot, eb = fb * tot;
    if (ea > 0) out.chi_square += (oa - ea) * (oa - ea) / ea;
    if (eb > 0) out.chi_square += (ob - eb) * (ob - eb) / eb;
    ++out.bins;
  }
  out.dof = out.bins > 0 ? out.bins - 1 : 0;
  out.p_value = chi_square_p_value(out.chi_square, out.dof);
  return out;
}

namespace detail {

inline std::map<std::uint64_t, std::uint64_t> pmf_counts(const DegreePMF& p) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (const auto& [k, v] : p.p) {
    const auto c = static_cast<std::uint64_t>(std::llround(v * static_cast<double>(p.n_samples)));
    if (c > 0) out[k] = c;
  }
  return out;
}

inline std::map<std::string, std::uint64_t> histogram_counts(const FringeHistogram& h) {
  std::map<std::string, std::uint64_t> out(h.counts.begin(), h.counts.end());
  if (h.other > 0) out[kOtherKey] = h.other;
  return out;
}

}  // namespace detail

/// Two sampled pmfs: two-sample test. One exact pmf (n_samples = 0): goodness
/// of fit of the sampled one. Both exact: TV only.
inline Comparison compare_distributions(const DegreePMF& p, const DegreePMF& q) {
  require(!p.p.empty() && !q.p.empty(), "cannot compare empty distributions");
  if (p.n_samples > 0 && q.n_samples > 0) return two_sample(detail::pmf_counts(p), detail::pmf_counts(q));
  if (p.n_samples > 0) return goodness_of_fit(detail::pmf_counts(p), q.p);
  if (q.n_samples > 0) return goodness_of_fit(detail::pmf_counts(q), p.p);
  Comparison out;
  out.tv = tv_distance(p.p, q.p);
  return out;
}

inline Comparison compare_distributions(const FringeHistogram& a, const FringeHistogram& b) {
  require(a.total > 0 && b.total > 0, "cannot compare empty histograms");
  return two_sample(detail::histogram_counts(a), detail::histogram_counts(b));
}

/// Collapses a histogram onto classes of at most `max_size` vertices plus "other".
inline FringeHistogram coarsen(const FringeHistogram& h, std::size_t max_size) {
  FringeHistogram out;
  out.truncation = std::min(max_size, h.truncation);
  out.k = h.k;
  out.total = h.total;
  out.other = h.other;
  out.excluded_shallow = h.excluded_shallow;
  for (const auto& [key, c] : h.counts) {
    std::size_t size = 0;
    for (char ch : key)
      if (ch == '(') ++size;
    if (size <= max_size) out.counts[key] += c;
    else out.other += c;
  }
  return out;
}

}  // namespace seri

#endif  // SERI_COMPARE_HPP
