#ifndef SERI_SPECTRUM_HPP
#define SERI_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "seri/errors.hpp"
#include "seri/tree_record.hpp"

namespace seri {

inline constexpr std::size_t kSpectrumCap = 2049;  // vertices, i.e. n <= 2048

/// Dense symmetric matrix, row-major.
struct SymMatrix {
  std::size_t n = 0;
  std::vector<double> a;
  explicit SymMatrix(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline double off_diagonal_norm(const SymMatrix& m) {
  double s = 0;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = i + 1; j < m.n; ++j) s += 2.0 * m(i, j) * m(i, j);
  return std::sqrt(s);
}

/// Eigenvalues by cyclic Jacobi rotations until the off-diagonal Frobenius norm
/// is <= tol. Only the upper triangle is read and updated. The first sweeps skip
/// entries below a small threshold; later sweeps zero entries that are
/// negligible against both diagonal entries. Sorted ascending.
inline std::vector<double> jacobi_eigenvalues(SymMatrix m, double tol = 1e-10, int max_sweeps = 100) {
  // Only the upper triangle is read and written.
  const std::size_t n = m.n;
  double* a = m.a.data();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = off_diagonal_norm(m);
    if (off <= tol) break;
    const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      double* rp = a + p * n;
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = rp[q];
        if (apq == 0.0) continue;
        double* rq = a + q * n;
        const double app = rp[p], aqq = rq[q];
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          rp[q] = 0.0;
          continue;
        }
        if (std::abs(apq) <= thresh) continue;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        const double tau = s / (1.0 + c);
        rp[p] = app - t * apq;
        rq[q] = aqq + t * apq;
        rp[q] = 0.0;
        auto rot = [s, tau](double& x, double& y) {
          const double x0 = x, y0 = y;
          x = x0 - s * (y0 + tau * x0);
          y = y0 + s * (x0 - tau * y0);
        };
        for (std::size_t k = 0; k < p; ++k) rot(a[k * n + p], a[k * n + q]);
        for (std::size_t k = p + 1; k < q; ++k) rot(rp[k], a[k * n + q]);
        for (std::size_t k = q + 1; k < n; ++k) rot(rp[k], rq[k]);
      }
    }
  }
  if (off_diagonal_norm(m) > tol) throw ConsistencyError("Jacobi iteration did not converge");
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

struct SpectrumHistogram {
  double lo = 0, hi = 0;
  std::vector<std::uint64_t> counts;
};

struct Atom {
  double value;
  std::size_t multiplicity;
};

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  SpectrumHistogram histogram;
  double zero_mass = 0;  // fraction of eigenvalues with |x| <= 1e-8
  std::vector<Atom> atoms;  // largest multiplicities first
};

inline SymMatrix adjacency_matrix(const TreeRecord& t) {
  SymMatrix m(t.vertex_count());
  for (std::uint64_t v = 1; v <= t.n(); ++v) {
    m(v, t.parent(v)) = 1.0;
    m(t.parent(v), v) = 1.0;
  }
  return m;
}

/// Adjacency matrix after rotating out sibling leaves. k >= 2 leaves under one
/// parent span k - 1 exact null vectors (differences of leaf indicators) that are
/// orthogonal to the rest, so they are split off as zeros and the group is kept as
/// one leaf joined by an edge of weight sqrt(k). This is an orthogonal similarity.
struct DeflatedAdjacency {
  SymMatrix matrix;
  std::size_t null_count = 0;
};

inline DeflatedAdjacency deflate_sibling_leaves(const TreeRecord& t) {
  const auto deg = t.degrees();
  const std::size_t n1 = t.vertex_count();
  std::vector<std::size_t> leaf_children(n1, 0);
  for (std::uint64_t v = 1; v <= t.n(); ++v)
    if (deg[v] == 1) ++leaf_children[t.parent(v)];

  constexpr std::size_t kDropped = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n1, kDropped);
  std::vector<bool> seen(n1, false);  // parent already has its representative leaf
  std::size_t m = 0;
  DeflatedAdjacency out;
  for (std::uint64_t v = 0; v < n1; ++v) {
    if (v >= 1 && deg[v] == 1 && leaf_children[t.parent(v)] >= 2) {
      if (seen[t.parent(v)]) {
        ++out.null_count;
        continue;
      }
      seen[t.parent(v)] = true;
    }
    index[v] = m++;
  }
  out.matrix = SymMatrix(m);
  for (std::uint64_t v = 1; v <= t.n(); ++v) {
    if (index[v] == kDropped) continue;
    const Vertex p = t.parent(v);
    const bool merged = deg[v] == 1 && leaf_children[p] >= 2;
    const double w = merged ? std::sqrt(static_cast<double>(leaf_children[p])) : 1.0;
    out.matrix(index[v], index[p]) = w;
    out.matrix(index[p], index[v]) = w;
  }
  return out;
}

/// Groups sorted eigenvalues equal within `tol` into atoms.
inline std::vector<Atom> spectral_atoms(const std::vector<double>& sorted, double tol = 1e-8, std::size_t top = 10) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] - sorted[i] <= tol) ++j;
    atoms.push_back({sorted[i + (j - i) / 2], j - i});
    i = j;
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.multiplicity > b.multiplicity; });
  if (atoms.size() > top) atoms.resize(top);
  return atoms;
}

/// Empirical spectral distribution of the adjacency matrix (dense path). With
/// `deflate` the Jacobi solver only sees the matrix left after sibling-leaf deflation.
inline Spectrum adjacency_spectrum(const TreeRecord& t, std::size_t bins = 64, bool deflate = true) {
  require(t.vertex_count() <= kSpectrumCap,
          "adjacency_spectrum supports n <= " + std::to_string(kSpectrumCap - 1) + " (got n = " + std::to_string(t.n()) + ")");
  require(bins >= 1, "need at least one histogram bin");
  Spectrum s;
  if (deflate) {
    auto d = deflate_sibling_leaves(t);
    s.eigenvalues = jacobi_eigenvalues(std::move(d.matrix));
    s.eigenvalues.insert(s.eigenvalues.end(), d.null_count, 0.0);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  } else {
    s.eigenvalues = jacobi_eigenvalues(adjacency_matrix(t));
  }
  const double r = std::max(std::abs(s.eigenvalues.front()), std::abs(s.eigenvalues.back()));
  s.histogram.lo = -r;
  s.histogram.hi = r;
  s.histogram.counts.assign(bins, 0);
  std::size_t zeros = 0;
  for (double x : s.eigenvalues) {
    if (std::abs(x) <= 1e-8) ++zeros;
    auto b = r > 0 ? static_cast<std::size_t>((x + r) / (2 * r) * static_cast<double>(bins)) : 0;
    ++s.histogram.counts[std::min(b, bins - 1)];
  }
  s.zero_mass = static_cast<double>(zeros) / static_cast<double>(s.eigenvalues.size());
  s.atoms = spectral_atoms(s.eigenvalues);
  return s;
}

/// Size of a maximum matching of a tree (greedy from the leaves up).
inline std::size_t tree_maximum_matching(const TreeRecord& t) {
  std::vector<bool> matched(t.vertex_count(), false);
  std::size_t size = 0;
  for (std::uint64_t v = t.n(); v >= 1; --v) {
    const Vertex p = t.parent(v);
    if (!matched[v] && !matched[p]) {
      matched[v] = matched[p] = true;
      ++size;
    }
  }
  return size;
}

/// CSV "eigenvalue".
inline void write_spectrum_csv(std::ostream& os, const std::vector<double>& eigenvalues) {
  os << "eigenvalue\n";
  os.precision(17);
  for (double x : eigenvalues) os << x << '\n';
}

}  // namespace seri

#endif  // SERI_SPECTRUM_HPP
