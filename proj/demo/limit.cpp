// Limit objects: degree pmf by Monte Carlo, p(1) by quadrature, and one
// branching-process fringe sample.
#include <cstdio>

#include "seri/fringe.hpp"
#include "seri/limit_pmf.hpp"

int main() {
  for (double delta : {-0.5, 0.0, 1.0, 4.0}) {
    const auto pmf = seri::limit_degree_pmf_mc(delta, 50000, 1);
    const auto q = seri::limit_p1_quadrature(delta);
    std::printf("delta = %4.1f  p(1): MC %.4f +- %.4f, quadrature %.6f;  p(2) %.4f  p(3) %.4f\n", delta, pmf.at(1),
                pmf.stderr_at(1), q.value, pmf.at(2), pmf.at(3));
  }
  seri::CounterRng rng(3);
  for (int i = 0; i < 5; ++i) std::printf("fringe sample: %s\n", seri::bp_fringe_sample(0.0, rng).c_str());
}
