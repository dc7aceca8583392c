#ifndef SERI_FRINGE_HPP
#define SERI_FRINGE_HPP

#include <algorithm>
#include <limits>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "seri/branching.hpp"
#include "seri/errors.hpp"
#include "seri/replicas.hpp"
#include "seri/tree_record.hpp"

namespace seri {

/// Canonical balanced-parenthesis code of a rooted unordered tree: a vertex is
/// "(" + its children's codes in ascending lexicographic order + ")".
using FringeKey = std::string;

inline std::size_t key_size(const FringeKey& k) { return static_cast<std::size_t>(std::count(k.begin(), k.end(), '(')); }

/// Rooted tree as a parent array with parent[i] < i and root 0, plus CSR children.
class RootedTree {
 public:
  RootedTree() = default;

  explicit RootedTree(std::vector<std::int64_t> parent) : parent_(std::move(parent)) {
    require(!parent_.empty() && parent_[0] == -1, "rooted tree needs root 0 with parent -1");
    const std::size_t n = parent_.size();
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 1; i < n; ++i) {
      require(parent_[i] >= 0 && static_cast<std::size_t>(parent_[i]) < i, "parents must precede their children");
      ++offsets_[static_cast<std::size_t>(parent_[i]) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    kids_.resize(n - 1);
    auto fill = offsets_;
    for (std::size_t i = 1; i < n; ++i) kids_[fill[static_cast<std::size_t>(parent_[i])]++] = static_cast<std::uint32_t>(i);
  }

  static RootedTree from_record(const TreeRecord& t) {
    std::vector<std::int64_t> p(t.vertex_count());
    p[0] = -1;
    for (std::uint64_t m = 1; m < p.size(); ++m) p[m] = t.parent(m);
    return RootedTree(std::move(p));
  }

  static RootedTree from_branching(const BranchingTree& b) { return RootedTree(b.parents()); }

  std::size_t size() const noexcept { return parent_.size(); }
  std::int64_t parent(std::size_t v) const { return parent_[v]; }
  std::span<const std::uint32_t> children(std::size_t v) const {
    return {kids_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t depth(std::size_t v) const {
    std::size_t d = 0;
    while (parent_[v] >= 0) {
      v = static_cast<std::size_t>(parent_[v]);
      ++d;
    }
    return d;
  }

 private:
  std::vector<std::int64_t> parent_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> kids_;
};

/// Parses a parenthesis code (any child order) into a RootedTree in preorder.
inline RootedTree decode_key(const std::string& key) {
  require(key.size() >= 2 && key.front() == '(', "fringe key must start with '('");
  std::vector<std::int64_t> parent;
  std::vector<std::int64_t> stack;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char ch = key[i];
    if (ch == '(') {
      require(!(stack.empty() && !parent.empty()), "fringe key has more than one root");
      parent.push_back(stack.empty() ? -1 : stack.back());
      stack.push_back(static_cast<std::int64_t>(parent.size() - 1));
    } else if (ch == ')') {
      require(!stack.empty(), "unbalanced fringe key");
      stack.pop_back();
    } else {
      throw ValidationError(std::string("invalid character in fringe key: '") + ch + "'");
    }
  }
  require(stack.empty(), "unbalanced fringe key");
  return RootedTree(std::move(parent));
}

/// Isomorphism classes of all subtrees of a tree. Class ids are interned by the
/// sorted multiset of child class ids, bottom-up, so equal ids <=> isomorphic
/// fringes. Codes are built lazily and memoized.
class FringeIndex {
 public:
  explicit FringeIndex(const RootedTree& t) : tree_(&t) {
    const std::size_t n = t.size();
    class_of_.assign(n, 0);
    size_of_.assign(n, 1);
    std::vector<std::uint32_t> ids;
    for (std::size_t v = n; v-- > 0;) {
      ids.clear();
      for (auto c : t.children(v)) {
        ids.push_back(class_of_[c]);
        size_of_[v] += size_of_[c];
      }
      class_of_[v] = intern(ids);
    }
  }

  std::uint32_t class_of(std::size_t v) const { return class_of_[v]; }
  std::size_t subtree_size(std::size_t v) const { return size_of_[v]; }
  std::size_t class_size(std::uint32_t id) const { return classes_[id].size; }
  std::size_t class_count() const noexcept { return classes_.size(); }

  /// Class id of a multiset of child classes (interned on demand).
  std::uint32_t intern(std::vector<std::uint32_t> child_ids) {
    std::sort(child_ids.begin(), child_ids.end());
    auto [it, inserted] = lookup_.try_emplace(child_ids, static_cast<std::uint32_t>(classes_.size()));
    if (inserted) {
      std::size_t sz = 1;
      for (auto c : child_ids) sz += classes_[c].size;
      classes_.push_back({child_ids, sz, {}, false});
    }
    return it->second;
  }

  const FringeKey& key_of_class(std::uint32_t id) {
    auto& cl = classes_[id];
    if (!cl.has_code) {
      std::vector<std::string> parts;
      parts.reserve(cl.children.size());
      for (auto c : classes_[id].children) parts.push_back(key_of_class(c));
      std::sort(parts.begin(), parts.end());
      std::string code = "(";
      for (const auto& p : parts) code += p;
      code += ')';
      classes_[id].code = std::move(code);
      classes_[id].has_code = true;
    }
    return classes_[id].code;
  }

  const FringeKey& key(std::size_t v) { return key_of_class(class_of_[v]); }

  /// Class of the fringe of u with the branch through child `skip` removed.
  std::uint32_t class_without(std::size_t u, std::size_t skip) {
    std::vector<std::uint32_t> ids;
    for (auto c : tree_->children(u))
      if (c != skip) ids.push_back(class_of_[c]);
    return intern(std::move(ids));
  }

 private:
  struct ClassInfo {
    std::vector<std::uint32_t> children;
    std::size_t size;
    std::string code;
    bool has_code;
  };
  const RootedTree* tree_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::size_t> size_of_;
  std::vector<ClassInfo> classes_;
  std::map<std::vector<std::uint32_t>, std::uint32_t> lookup_;
};

inline FringeKey canonical_key(const RootedTree& t) {
  FringeIndex idx(t);
  return idx.key(0);
}

inline FringeKey canonicalize(const std::string& key) { return canonical_key(decode_key(key)); }

inline bool is_canonical(const std::string& key) {
  try {
    return canonicalize(key) == key;
  } catch (const ValidationError&) {
    return false;
  }
}

/// Fringe of v: its descendant subtree rooted at v.
inline FringeKey fringe(const RootedTree& t, std::size_t v) {
  require(v < t.size(), "vertex out of range");
  std::vector<std::int64_t> parent;
  // Preorder walk keeps parents before children.
  std::vector<std::pair<std::uint32_t, std::int64_t>> todo{{static_cast<std::uint32_t>(v), -1}};
  while (!todo.empty()) {
    auto [u, p] = todo.back();
    todo.pop_back();
    const auto me = static_cast<std::int64_t>(parent.size());
    parent.push_back(p);
    for (auto c : t.children(u)) todo.push_back({c, me});
  }
  return canonical_key(RootedTree(std::move(parent)));
}

inline FringeKey fringe(const TreeRecord& t, Vertex v) { return fringe(RootedTree::from_record(t), v); }

/// Extended fringe (f_0, ..., f_k) of v: f_0 is the fringe of v and f_j is the
/// fringe of the j-th ancestor with the branch towards v removed.
inline std::vector<FringeKey> extended_fringe(const RootedTree& t, std::size_t v, std::size_t k) {
  require(v < t.size(), "vertex out of range");
  require(t.depth(v) >= k, "vertex depth " + std::to_string(t.depth(v)) + " is smaller than k = " + std::to_string(k));
  FringeIndex idx(t);
  std::vector<FringeKey> out{idx.key(v)};
  std::size_t below = v;
  for (std::size_t j = 1; j <= k; ++j) {
    const auto up = static_cast<std::size_t>(t.parent(below));
    out.push_back(idx.key_of_class(idx.class_without(up, below)));
    below = up;
  }
  return out;
}

/// Top-level child codes of a canonical key.
inline std::vector<std::string> child_keys(const FringeKey& canonical) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 1; i + 1 < canonical.size(); ++i) {
    if (canonical[i] == '(') {
      if (depth == 0) start = i;
      ++depth;
    } else if (--depth == 0) {
      out.push_back(canonical.substr(start, i - start + 1));
    }
  }
  return out;
}

/// Number of root-children subtrees of s isomorphic to t.
inline std::uint64_t q_count(const std::string& s, const std::string& t) {
  const auto cs = canonicalize(s);
  const auto ct = canonicalize(t);
  std::uint64_t n = 0;
  for (const auto& c : child_keys(cs))
    if (c == ct) ++n;
  return n;
}

/// Counts per fringe key; fringes above `truncation` vertices go to `other`.
struct FringeHistogram {
  std::map<FringeKey, std::uint64_t> counts;
  std::uint64_t other = 0;
  std::uint64_t total = 0;
  std::size_t truncation = 12;
  std::size_t k = 0;
  std::uint64_t excluded_shallow = 0;  // vertices of depth < k, not scanned

  double frequency(const FringeKey& key) const {
    auto it = counts.find(key);
    return it == counts.end() || total == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  }

  void add(const FringeKey& key, std::size_t size) {
    ++total;
    if (size > truncation) ++other;
    else ++counts[key];
  }

  void merge(const FringeHistogram& h) {
    require(h.truncation == truncation && h.k == k, "cannot merge histograms with different truncation or k");
    for (const auto& [key, c] : h.counts) counts[key] += c;
    other += h.other;
    total += h.total;
    excluded_shallow += h.excluded_shallow;
  }
};

inline constexpr const char* kOtherKey = "other";

/// Fringe histogram over all vertices. For k > 0 the key is the extended fringe
/// "f_0|f_1|...|f_k" and the size is that of the k-th ancestor's fringe;
/// vertices of depth < k are excluded and counted in excluded_shallow.
inline FringeHistogram empirical_fringe_distribution(const RootedTree& t, std::size_t k = 0, std::size_t truncation = 12) {
  FringeHistogram h;
  h.truncation = truncation;
  h.k = k;
  FringeIndex idx(t);
  if (k == 0) {
    std::map<std::uint32_t, std::uint64_t> by_class;
    for (std::size_t v = 0; v < t.size(); ++v) {
      ++h.total;
      if (idx.subtree_size(v) > truncation) ++h.other;
      else ++by_class[idx.class_of(v)];
    }
    for (const auto& [id, c] : by_class) h.counts[idx.key_of_class(id)] += c;
    return h;
  }
  std::vector<std::size_t> depth(t.size(), 0);
  for (std::size_t v = 1; v < t.size(); ++v) depth[v] = depth[static_cast<std::size_t>(t.parent(v))] + 1;
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (depth[v] < k) {
      ++h.excluded_shallow;
      continue;
    }
    std::size_t top = v;
    for (std::size_t j = 0; j < k; ++j) top = static_cast<std::size_t>(t.parent(top));
    if (idx.subtree_size(top) > truncation) {
      ++h.total;
      ++h.other;
      continue;
    }
    std::string key = idx.key(v);
    std::size_t below = v;
    for (std::size_t j = 1; j <= k; ++j) {
      const auto up = static_cast<std::size_t>(t.parent(below));
      key += '|';
      key += idx.key_of_class(idx.class_without(up, below));
      below = up;
    }
    h.add(key, idx.subtree_size(top));
  }
  return h;
}

inline FringeHistogram empirical_fringe_distribution(const TreeRecord& t, std::size_t k = 0, std::size_t truncation = 12) {
  return empirical_fringe_distribution(RootedTree::from_record(t), k, truncation);
}

/// CSV "key,count,frequency"; the truncated tail is the row "other".
inline void write_fringe_csv(std::ostream& os, const FringeHistogram& h) {
  os << "key,count,frequency\n";
  os.precision(17);
  const double tot = static_cast<double>(h.total);
  for (const auto& [key, c] : h.counts) os << key << ',' << c << ',' << static_cast<double>(c) / tot << '\n';
  os << kOtherKey << ',' << h.other << ',' << static_cast<double>(h.other) / tot << '\n';
}

/// Genealogy of the branching process run to an independent exp(1) time.
template <class Rng>
BranchingTree bp_fringe_tree(double delta, Rng& rng, GenealogyMethod method = GenealogyMethod::nested_arrivals,
                             std::size_t node_cap = kDefaultNodeCap,
                             std::size_t size_limit = std::numeric_limits<std::size_t>::max()) {
  const double horizon = rng.exp1();
  return sample_bp_seri(delta, horizon, rng, method, node_cap, size_limit);
}

template <class Rng>
FringeKey bp_fringe_sample(double delta, Rng& rng, GenealogyMethod method = GenealogyMethod::nested_arrivals,
                           std::size_t node_cap = kDefaultNodeCap) {
  return canonical_key(RootedTree::from_branching(bp_fringe_tree(delta, rng, method, node_cap)));
}

/// One branching-process fringe sample seen through its root: the keys of the
/// root's child subtrees (kOtherKey above `size_limit` vertices) and the whole
/// key when every child subtree is small. Each child's descendants are an
/// independent copy run for the remaining time, so the cost stays bounded.
struct RootView {
  std::vector<FringeKey> children;
  FringeKey whole;  // kOtherKey when some child subtree was cut
};

template <class Rng>
RootView bp_fringe_root_view(double delta, Rng& rng, std::size_t size_limit,
                             GenealogyMethod method = GenealogyMethod::nested_arrivals) {
  require(size_limit >= 1, "size limit must be >= 1");
  const double horizon = rng.exp1();
  const auto ages = sample_arrivals(delta, StopRule::at_time(horizon), rng).sigmas;
  RootView out;
  bool complete = true;
  for (double a : ages) {
    const auto sub = sample_bp_seri(delta, horizon - a, rng, method, kDefaultNodeCap, size_limit);
    if (sub.truncated) {
      complete = false;
      out.children.emplace_back(kOtherKey);
    } else {
      out.children.push_back(canonical_key(RootedTree::from_branching(sub)));
    }
  }
  if (complete) {
    auto parts = out.children;
    std::sort(parts.begin(), parts.end());
    out.whole = "(";
    for (const auto& k : parts) out.whole += k;
    out.whole += ')';
  } else {
    out.whole = kOtherKey;
  }
  return out;
}

/// Histogram of `reps` branching-process fringe samples (replica r uses
/// stream_seed(seed, r)).
inline FringeHistogram bp_fringe_distribution(double delta, std::uint64_t reps, std::uint64_t seed,
                                              std::size_t truncation = 12,
                                              GenealogyMethod method = GenealogyMethod::nested_arrivals,
                                              std::size_t node_cap = kDefaultNodeCap) {
  require(reps >= 1, "reps must be >= 1");
  const auto keys = run_replicas<std::string>(reps, seed, [&](std::uint64_t, CounterRng& rng) {
    const auto tree = bp_fringe_tree(delta, rng, method, node_cap, truncation);
    if (tree.truncated || tree.size() > truncation) return std::string(kOtherKey);
    return canonical_key(RootedTree::from_branching(tree));
  });
  FringeHistogram h;
  h.truncation = truncation;
  for (const auto& key : keys) {
    ++h.total;
    if (key == kOtherKey) ++h.other;
    else ++h.counts[key];
  }
  return h;
}

/// N_k(n): number of vertices of degree k.
inline std::map<std::uint64_t, std::uint64_t> degree_counts(const TreeRecord& t) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (auto d : t.degrees()) ++out[d];
  return out;
}

}  // namespace seri

#endif  // SERI_FRINGE_HPP
