#include <algorithm>
#include <numbers>
#include <set>

#include "catch_amalgamated.hpp"

#include "seri/compare.hpp"
#include "seri/fringe.hpp"
#include "seri/growth.hpp"
#include "support.hpp"

using namespace seri;

namespace {

TreeRecord from_parents(std::vector<Vertex> parents) { return TreeRecord::from_parents(0.0, parents); }

/// All parent arrays with parent[i] < i on `size` vertices (every rooted tree
/// shape appears at least once).
void all_recursive_trees(std::size_t size, const std::function<void(const RootedTree&)>& visit) {
  std::vector<std::int64_t> p(size, -1);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == size) {
      visit(RootedTree(p));
      return;
    }
    for (std::size_t q = 0; q < i; ++q) {
      p[i] = static_cast<std::int64_t>(q);
      rec(i + 1);
    }
  };
  rec(1);
}

/// Root-preserving isomorphism by trying every matching of children.
bool isomorphic(const RootedTree& a, std::size_t u, const RootedTree& b, std::size_t v) {
  const auto ca = a.children(u);
  const auto cb = b.children(v);
  if (ca.size() != cb.size()) return false;
  std::vector<std::size_t> perm(cb.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < ca.size() && ok; ++i) ok = isomorphic(a, ca[i], b, cb[perm[i]]);
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST_CASE("fringe keys") {
  const auto star = from_parents({0, 0});
  CHECK(fringe(star, 1) == "()");
  CHECK(fringe(star, 0) == "(()())");
  CHECK(fringe(from_parents({0, 1}), 0) == "((()))");
  for (const auto& t : {from_parents({0, 0}), from_parents({0, 1})}) CHECK(key_size(fringe(t, 0)) == 3);
  CHECK(fringe(from_parents({0, 1, 0}), 0) == "((())())");  // children in byte order, '(' before ')'

  SECTION("decode and re-encode is a fixed point") {
    for (const std::string k : {"()", "(())", "(()())", "((())())", "(()(()))"}) {
      CHECK(canonicalize(k) == canonicalize(canonicalize(k)));
    }
    CHECK(canonicalize("(()(()))") == "((())())");
    CHECK(is_canonical("((())())"));
    CHECK_FALSE(is_canonical("(()(()))"));
    CHECK_FALSE(is_canonical("(()"));
    CHECK_FALSE(is_canonical("()()"));
    CHECK_THROWS_AS(decode_key("(x)"), ValidationError);
  }
}

TEST_CASE("canonical keys are sound and complete on small trees") {
  std::size_t expected_classes[] = {0, 1, 1, 2, 4, 9, 20, 48};
  for (std::size_t size = 1; size <= 7; ++size) {
    std::vector<RootedTree> trees;
    all_recursive_trees(size, [&](const RootedTree& t) { trees.push_back(t); });
    std::vector<std::string> keys;
    std::set<std::string> distinct;
    for (const auto& t : trees) {
      keys.push_back(canonical_key(t));
      distinct.insert(keys.back());
      REQUIRE(is_canonical(keys.back()));
      REQUIRE(key_size(keys.back()) == size);
    }
    CHECK(distinct.size() == expected_classes[size]);
    CounterRng rng(size);
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const std::size_t partners = size <= 6 ? trees.size() : 40;
      for (std::size_t r = 0; r < partners; ++r) {
        const std::size_t j = size <= 6 ? r : rng.below(trees.size());
        REQUIRE((keys[i] == keys[j]) == isomorphic(trees[i], 0, trees[j], 0));
      }
    }
  }
}

TEST_CASE("extended fringe") {
  // root 0 - 1 - 2 (leaf), plus leaf 3 under 1 and leaf 4 under 0.
  const auto t = RootedTree::from_record(from_parents({0, 1, 1, 0}));
  const auto f0 = extended_fringe(t, 2, 0);
  REQUIRE(f0.size() == 1);
  CHECK(f0[0] == fringe(t, 2));
  const auto f = extended_fringe(t, 2, 2);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == "()");
  CHECK(f[1] == "(())");   // vertex 1 without the branch through 2: keeps leaf 3
  CHECK(f[2] == "(())");   // root without the branch through 1: keeps leaf 4
  std::size_t total = 0;
  for (const auto& k : f) total += key_size(k);
  CHECK(total == t.size());
  CHECK_THROWS_AS(extended_fringe(t, 1, 2), ValidationError);

  SECTION("partition property on grown trees") {
    GrowthParams p;
    p.n_final = 300;
    p.seed = 5;
    const auto rt = RootedTree::from_record(grow(p).tree);
    FringeIndex idx(rt);
    for (std::size_t v = 1; v < rt.size(); v += 7) {
      const auto depth = rt.depth(v);
      const auto ef = extended_fringe(rt, v, depth);
      std::size_t sum = 0;
      for (const auto& k : ef) sum += key_size(k);
      CHECK(sum == rt.size());
      // k = 1: sizes add up to the parent's fringe.
      const auto e1 = extended_fringe(rt, v, 1);
      CHECK(key_size(e1[0]) + key_size(e1[1]) == idx.subtree_size(static_cast<std::size_t>(rt.parent(v))));
    }
  }
}

TEST_CASE("q_count") {
  CHECK(q_count("(()())", "()") == 2);
  CHECK(q_count("((()))", "()") == 0);
  CHECK(q_count("((()))", "(())") == 1);
  CHECK(q_count("()", "()") == 0);
  CHECK(q_count("((())())", "(())") == 1);  // non-canonical input is accepted

  SECTION("counts over all child classes sum to the root degree") {
    for (std::size_t size = 2; size <= 6; ++size)
      all_recursive_trees(size, [&](const RootedTree& t) {
        const auto key = canonical_key(t);
        std::set<std::string> classes;
        for (auto c : t.children(0)) classes.insert(fringe(t, c));
        std::uint64_t sum = 0;
        for (const auto& c : classes) sum += q_count(key, c);
        REQUIRE(sum == t.children(0).size());
      });
  }
}

TEST_CASE("empirical fringe distribution") {
  const auto star = from_parents({0, 0, 0});
  const auto h = empirical_fringe_distribution(star);
  CHECK(h.total == 4);
  CHECK(h.counts.size() == 2);
  CHECK(h.counts.at("()") == 3);
  CHECK(h.counts.at("(()()())") == 1);
  CHECK(h.other == 0);

  SECTION("truncation and extended keys") {
    GrowthParams p;
    p.n_final = 2000;
    p.seed = 8;
    const auto tree = grow(p).tree;
    const auto h0 = empirical_fringe_distribution(tree, 0, 5);
    std::uint64_t sum = h0.other;
    for (const auto& [k, c] : h0.counts) {
      CHECK(key_size(k) <= 5);
      sum += c;
    }
    CHECK(sum == h0.total);
    CHECK(h0.total == tree.n() + 1);

    const auto h1 = empirical_fringe_distribution(tree, 1, 12);
    CHECK(h1.excluded_shallow == 1);
    CHECK(h1.total == tree.n());
    for (const auto& [k, c] : h1.counts) CHECK(std::count(k.begin(), k.end(), '|') == 1);
  }
  SECTION("leaf fraction at n = 1e5") {
    GrowthParams p;
    p.n_final = 100000;
    p.seed = 2;
    const auto h5 = empirical_fringe_distribution(grow(p).tree);
    CHECK(std::abs(h5.frequency("()") - 0.718) <= 0.01);
  }
  SECTION("histograms merge") {
    auto a = empirical_fringe_distribution(star);
    a.merge(empirical_fringe_distribution(from_parents({0})));
    CHECK(a.total == 6);
    CHECK(a.counts.at("()") == 4);
    CHECK(a.counts.at("(())") == 1);
  }
}

TEST_CASE("branching-process fringe samples") {
  const double kE2 = std::numbers::e - 2.0;
  const std::uint64_t reps = 100000;
  const auto sizes = run_replicas<std::string>(reps, 555, [](std::uint64_t, CounterRng& r) {
    return bp_fringe_sample(0.0, r);
  });
  double single = 0, size_sum = 0, size_sq = 0;
  for (const auto& k : sizes) {
    REQUIRE(is_canonical(k));
    const double s = static_cast<double>(key_size(k));
    single += s == 1;
    size_sum += s - 1;
    size_sq += (s - 1) * (s - 1);
  }
  const double n = static_cast<double>(reps);
  const double p1 = single / n;
  CHECK(testing::within_sigmas(p1, kE2, std::sqrt(p1 * (1 - p1) / n)));
  // Root offspring count has mean 1; the whole genealogy is bigger, so check
  // the root's children only.
  double kids = 0, kids_sq = 0;
  for (const auto& k : sizes) {
    const double c = static_cast<double>(child_keys(k).size());
    kids += c;
    kids_sq += c * c;
  }
  const double km = kids / n;
  CHECK(testing::within_sigmas(km, 1.0, std::sqrt((kids_sq / n - km * km) / n)));

  SECTION("a size limit only cuts realizations above it") {
    for (auto method : {GenealogyMethod::nested_arrivals, GenealogyMethod::edge_bp}) {
      std::size_t cut = 0;
      for (std::uint64_t s = 0; s < 3000; ++s) {
        CounterRng r1(stream_seed(77, s)), r2(stream_seed(77, s));
        const auto full = bp_fringe_tree(1.0, r1, method);
        const auto lim = bp_fringe_tree(1.0, r2, method, kDefaultNodeCap, 6);
        if (full.size() > 6) {
          REQUIRE(lim.truncated);
          ++cut;
        } else {
          REQUIRE_FALSE(lim.truncated);
          REQUIRE(lim.size() == full.size());
          for (std::size_t i = 0; i < full.size(); ++i) REQUIRE(lim.nodes[i].birth_time == full.nodes[i].birth_time);
        }
      }
      CHECK(cut > 0);
    }
  }
  SECTION("root view matches full samples in law and satisfies stationarity") {
    const std::uint64_t m = 40000;
    const auto views = run_replicas<RootView>(m, 91, [](std::uint64_t, CounterRng& r) { return bp_fringe_root_view(0.0, r, 3); });
    FringeHistogram h;
    h.truncation = 4;
    for (const auto& v : views) {
      ++h.total;
      if (v.whole == kOtherKey || key_size(v.whole) > 4) ++h.other;
      else ++h.counts[v.whole];
    }
    CHECK(compare_distributions(h, coarsen(bp_fringe_distribution(0.0, m, 92), 4)).p_value > 0.01);
    for (const std::string t : {"()", "(())"}) {
      double sum = 0, sq = 0;
      for (const auto& v : views) {
        const double x = static_cast<double>(std::count(v.children.begin(), v.children.end(), t)) - (v.whole == t ? 1.0 : 0.0);
        sum += x;
        sq += x * x;
      }
      const double mean = sum / static_cast<double>(m);
      CHECK(testing::within_sigmas(mean, 0.0, std::sqrt((sq / static_cast<double>(m) - mean * mean) / static_cast<double>(m))));
    }
  }
  SECTION("both genealogy constructions give the same law") {
    const auto a = coarsen(bp_fringe_distribution(1.0, 20000, 1, 12, GenealogyMethod::nested_arrivals), 4);
    const auto b = coarsen(bp_fringe_distribution(1.0, 20000, 2, 12, GenealogyMethod::edge_bp), 4);
    CHECK(compare_distributions(a, b).p_value > 0.01);
  }
}

TEST_CASE("degree counts") {
  const auto star = degree_counts(from_parents({0, 0, 0}));
  CHECK(star == std::map<std::uint64_t, std::uint64_t>{{1, 3}, {3, 1}});
  CHECK(degree_counts(from_parents({0})) == std::map<std::uint64_t, std::uint64_t>{{1, 2}});
  GrowthParams p;
  p.n_final = 50000;
  p.seed = 10;
  p.delta = 1.5;
  const auto c = degree_counts(grow(p).tree);
  std::uint64_t vertices = 0, half_edges = 0;
  for (const auto& [k, v] : c) {
    vertices += v;
    half_edges += k * v;
  }
  CHECK(vertices == 50001);
  CHECK(half_edges == 100000);
}
