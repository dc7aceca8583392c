// Grow a tree, print its degree counts at a few checkpoints and the tail fit.
#include <cstdio>

#include "seri/exponents.hpp"
#include "seri/growth.hpp"
#include "seri/pmf.hpp"
#include "seri/tail.hpp"

int main(int argc, char** argv) {
  seri::GrowthParams p;
  p.delta = argc > 1 ? std::atof(argv[1]) : 0.0;
  p.n_final = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 200000;
  p.seed = 7;

  const auto run = seri::grow(p, {1000, 10000, p.n_final});
  std::printf("delta = %g, phi = %.4f\n", p.delta, seri::phi(p.delta));
  for (const auto& s : run.snapshots) {
    const auto pmf = seri::pmf_from_degree_vector(s.degree_counts);
    std::printf("n = %8llu  p(1) = %.4f  p(2) = %.4f  max degree = %u  d(v1) = %u\n",
                static_cast<unsigned long long>(s.n), pmf.at(1), pmf.at(2), s.max_degree, s.tracked.back().second);
  }
  const auto fit = seri::fit_power_tail(seri::tail_ccdf(run.tree.degrees()), {}, run.tree.vertex_count());
  std::printf("ccdf slope %.3f on [%llu, %llu] (limit exponent -%.3f)\n", fit.slope,
              static_cast<unsigned long long>(fit.k_min), static_cast<unsigned long long>(fit.k_max), seri::phi(p.delta));
}
