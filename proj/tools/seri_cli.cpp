// seri: command-line front end for the growth, limit and analysis pipelines.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "seri/branching.hpp"
#include "seri/compare.hpp"
#include "seri/enumerate.hpp"
#include "seri/exponents.hpp"
#include "seri/fringe.hpp"
#include "seri/growth.hpp"
#include "seri/growth_fit.hpp"
#include "seri/limit_pmf.hpp"
#include "seri/marked.hpp"
#include "seri/quadrature.hpp"
#include "seri/replicas.hpp"
#include "seri/spectrum.hpp"
#include "seri/tail.hpp"
#include "seri/tree_io.hpp"
#include "seri/yule.hpp"

using json = nlohmann::json;
using namespace seri;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kManifestVersion = "1";

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kResourceCap = 3 };

struct Opts {
  double delta = 0;
  std::uint64_t n = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 1;
  double tolerance = 0;
  std::string sampler = "fast";
  std::string convention = "exact";
  std::string checkpoints;
  std::string out;
  std::string format = "csv";
  std::string report;
  std::string manifest;
  std::string csv;
  std::string method = "nested";
  std::string variant = "exact-chain";
  std::string trajectory;
  std::uint64_t vertex = 1;
  std::uint64_t n_min = 1000;
  std::uint64_t node_cap = kDefaultNodeCap;
  std::size_t max_size = 4;
  std::size_t truncation = 12;
  std::size_t bins = 64;
  int order = 1;
  double t_min = 6, t_max = 12;
  double root_mark = 0.3, child_mark = 0.7;
  double phi_perturbation = 0;
};

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Every option of the subcommand with its resolved value, keyed by long name.
json collect_flags(const CLI::App& sub) {
  json flags = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    std::string value;
    if (opt->count() > 0) value = opt->results().back();
    else value = opt->get_default_str();
    if (!value.empty()) flags[names.front()] = value;
  }
  return flags;
}

struct Context {
  std::string command;
  json flags;
  Opts o;

  json manifest(const std::string& count_key, std::uint64_t count) const {
    return json{{"format_version", kManifestVersion},
                {"command", command},
                {"delta", o.delta},
                {count_key, count},
                {"seed", o.seed},
                {"convention", o.convention},
                {"timestamp", iso_timestamp()},
                {"tool_version", kToolVersion},
                {"flags", flags}};
  }
};

template <class Fn>
void write_file(const std::string& path, Fn&& fn, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode | std::ios::trunc);
  require(static_cast<bool>(os), "cannot open " + path + " for writing");
  fn(os);
  require(static_cast<bool>(os), "failed writing " + path);
}

/// Reports go to --report when given, else stdout. The manifest travels inside.
void emit_report(const Context& ctx, json report, const json& manifest) {
  report["manifest"] = manifest;
  if (ctx.o.report.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    write_file(ctx.o.report, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  }
}

int verdict(bool pass) { return pass ? kOk : kCheckFailed; }

double sample_mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double mean_stderr(const std::vector<double>& x) {
  const double m = sample_mean(x);
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

GrowthParams growth_params(const Opts& o) {
  GrowthParams p;
  p.delta = o.delta;
  p.n_final = o.n;
  p.seed = o.seed;
  p.sampler = parse_sampler(o.sampler);
  p.convention = parse_convention(o.convention);
  return p;
}

std::vector<std::uint64_t> parse_checkpoints(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    require(!item.empty() && item.find_first_not_of("0123456789") == std::string::npos,
            "checkpoints must be a comma-separated list of positive integers");
    out.push_back(std::stoull(item));
  }
  return out;
}

GenealogyMethod parse_method(const std::string& s) {
  if (s == "nested") return GenealogyMethod::nested_arrivals;
  if (s == "edge-bp") return GenealogyMethod::edge_bp;
  throw ValidationError("method must be nested or edge-bp, got '" + s + "'");
}

// ---------------------------------------------------------------------------

int cmd_grow(Context& ctx) {
  auto& o = ctx.o;
  if (!o.manifest.empty()) {
    std::ifstream is(o.manifest);
    require(static_cast<bool>(is), "cannot read manifest " + o.manifest);
    const json m = json::parse(is);
    const auto p = io::params_from_manifest(m);
    o.delta = p.delta;
    o.n = p.n_final;
    o.seed = p.seed;
    o.sampler = to_string(p.sampler);
    o.convention = to_string(p.convention);
    if (m.contains("flags") && m["flags"].contains("checkpoints")) o.checkpoints = m["flags"]["checkpoints"];
    ctx.flags["delta"] = json(o.delta).dump();
    ctx.flags["n"] = std::to_string(o.n);
    ctx.flags["seed"] = std::to_string(o.seed);
    ctx.flags["sampler"] = o.sampler;
    ctx.flags["convention"] = o.convention;
    ctx.flags["checkpoints"] = o.checkpoints;
    ctx.flags.erase("manifest");
  }
  const auto params = growth_params(o);
  const auto cps = parse_checkpoints(o.checkpoints);
  require(o.format == "csv" || o.format == "bin", "format must be csv or bin");
  const auto result = grow(params, cps);

  json files = json::array();
  const std::string tree_path = o.out + (o.format == "csv" ? ".csv" : ".bin");
  if (o.format == "csv") {
    write_file(tree_path, [&](std::ostream& os) { io::write_tree_csv(os, result.tree); });
  } else {
    write_file(tree_path, [&](std::ostream& os) { io::write_tree_binary(os, result.tree); }, std::ios::out | std::ios::binary);
  }
  files.push_back(tree_path);
  if (!cps.empty()) {
    const std::string cp_path = o.out + ".checkpoints.csv";
    write_file(cp_path, [&](std::ostream& os) {
      os << "n,max_degree,N1,degree_v0,degree_v1\n";
      for (const auto& s : result.snapshots) {
        os << s.n << ',' << s.max_degree << ',' << (s.degree_counts.size() > 1 ? s.degree_counts[1] : 0);
        for (Vertex v : {Vertex{0}, Vertex{1}}) {
          os << ',';
          for (const auto& [tv, d] : s.tracked)
            if (tv == v) os << d;
        }
        os << '\n';
      }
    });
    files.push_back(cp_path);
  }
  json m = io::tree_manifest(params, params.n_final);
  const json run = ctx.manifest("n", params.n_final);
  for (const auto& [k, v] : run.items())
    if (!m.contains(k)) m[k] = v;
  m["files"] = files;
  write_file(o.out + ".manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
  return kOk;
}

int cmd_limit_pmf(Context& ctx) {
  const auto& o = ctx.o;
  const auto pmf = limit_degree_pmf_mc(o.delta, o.reps, o.seed);
  const auto quad = limit_p1_quadrature(o.delta);
  const bool closed = o.delta == 0.0;
  const double target = closed ? std::numbers::e - 2.0 : quad.value;
  const double est = pmf.at(1);
  const double se = pmf.stderr_at(1);
  const bool pass = std::abs(est - target) <= o.tolerance * se;
  json p = json::array();
  for (const auto& [k, v] : pmf.p) p.push_back({{"k", k}, {"probability", v}, {"stderr", pmf.stderr_at(k)}});
  const auto m = ctx.manifest("reps", o.reps);
  if (!o.csv.empty()) write_file(o.csv, [&](std::ostream& os) { write_pmf_csv(os, pmf); });
  emit_report(ctx,
              {{"p1_estimate", est},
               {"estimate", est},
               {"stderr", se},
               {"target", target},
               {"target_kind", closed ? "closed-form" : "quadrature"},
               {"quadrature", quad.value},
               {"quadrature_error", quad.error},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "stderr"},
               {"pass", pass},
               {"pmf", p}},
              m);
  return verdict(pass);
}

json fit_json(const TailFit& f) {
  return {{"slope", f.slope},
          {"stderr", f.stderr_},
          {"window", {f.k_min, f.k_max}},
          {"r_squared", f.r_squared},
          {"points", f.n_tail_points}};
}

int cmd_tail(Context& ctx) {
  const auto& o = ctx.o;
  const auto tree = grow(growth_params(o)).tree;
  const auto ccdf = tail_ccdf(tree.degrees());
  const auto fits = tail_sensitivity(ccdf, tree.vertex_count());
  const double target = -phi(o.delta);
  const bool pass = std::abs(fits[0].slope - target) <= o.tolerance;
  json sens = json::array();
  for (const auto& f : fits) sens.push_back(fit_json(f));
  json r = fit_json(fits[0]);
  r["estimate"] = fits[0].slope;
  r["target"] = target;
  r["tolerance"] = o.tolerance;
  r["tolerance_unit"] = "absolute";
  r["pass"] = pass;
  r["sensitivity"] = sens;
  if (!o.csv.empty())
    write_file(o.csv, [&](std::ostream& os) {
      os << "k,ccdf\n";
      os.precision(17);
      for (const auto& c : ccdf) os << c.k << ',' << c.p << '\n';
    });
  emit_report(ctx, r, ctx.manifest("n", o.n));
  return verdict(pass);
}

int cmd_growth(Context& ctx) {
  const auto& o = ctx.o;
  auto params = growth_params(o);
  const auto fit = fit_degree_growth(params, static_cast<Vertex>(o.vertex), geometric_checkpoints(o.n_min, o.n, std::sqrt(10.0)), o.reps);
  const double target = 1.0 / phi(o.delta);
  const bool pass = std::abs(fit.slope - target) <= o.tolerance;
  json cps = json::array();
  for (const auto& [n, d] : fit.checkpoints) cps.push_back({{"n", n}, {"degree", d}});
  emit_report(ctx,
              {{"vertex", fit.vertex},
               {"slope", fit.slope},
               {"estimate", fit.slope},
               {"stderr", fit.stderr_},
               {"spread", fit.spread},
               {"seed_slopes", fit.seed_slopes},
               {"checkpoints", cps},
               {"target", target},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "absolute"},
               {"pass", pass}},
              ctx.manifest("reps", o.reps));
  return verdict(pass);
}

json histogram_json(const FringeHistogram& h) {
  json classes = json::object();
  for (const auto& [k, c] : h.counts) classes[k] = h.frequency(k);
  classes[kOtherKey] = h.total ? static_cast<double>(h.other) / static_cast<double>(h.total) : 0.0;
  return {{"total", h.total}, {"frequencies", classes}};
}

int cmd_fringe_compare(Context& ctx) {
  const auto& o = ctx.o;
  const auto tree = grow(growth_params(o)).tree;
  const auto emp = coarsen(empirical_fringe_distribution(tree, 0, o.truncation), o.max_size);
  const auto bp = coarsen(bp_fringe_distribution(o.delta, o.reps, stream_seed(o.seed, 1), o.truncation,
                                                 parse_method(o.method), o.node_cap),
                          o.max_size);
  const auto cmp = compare_distributions(emp, bp);
  const bool pass = cmp.tv <= o.tolerance;
  if (!o.csv.empty()) write_file(o.csv, [&](std::ostream& os) { write_fringe_csv(os, emp); });
  emit_report(ctx,
              {{"tv", cmp.tv},
               {"estimate", cmp.tv},
               {"stderr", nullptr},
               {"target", 0.0},
               {"chi_square", cmp.chi_square},
               {"dof", cmp.dof},
               {"p_value", cmp.p_value},
               {"empirical", histogram_json(emp)},
               {"branching", histogram_json(bp)},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "total-variation"},
               {"pass", pass}},
              ctx.manifest("n", o.n));
  return verdict(pass);
}

int cmd_spectrum(Context& ctx) {
  const auto& o = ctx.o;
  const auto tree = grow(growth_params(o)).tree;
  const auto s = adjacency_spectrum(tree, o.bins);
  double sum = 0, sum_sq = 0, asym = 0;
  for (double x : s.eigenvalues) {
    sum += x;
    sum_sq += x * x;
  }
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    asym = std::max(asym, std::abs(s.eigenvalues[i] + s.eigenvalues[s.eigenvalues.size() - 1 - i]));
  const double expected_zero = static_cast<double>(tree.vertex_count() - 2 * tree_maximum_matching(tree)) /
                               static_cast<double>(tree.vertex_count());
  const bool pass = std::abs(sum) <= o.tolerance && std::abs(sum_sq - 2.0 * static_cast<double>(tree.n())) <= o.tolerance &&
                    asym <= 1e-8;

  const std::string csv = o.out + ".csv";
  write_file(csv, [&](std::ostream& os) { write_spectrum_csv(os, s.eigenvalues); });
  json atoms = json::array();
  for (const auto& a : s.atoms) atoms.push_back({{"value", a.value}, {"multiplicity", a.multiplicity}});
  auto m = ctx.manifest("n", o.n);
  m["files"] = {csv};
  write_file(o.out + ".manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
  emit_report(ctx,
              {{"eigenvalues_csv", csv},
               {"trace", sum},
               {"sum_squares", sum_sq},
               {"max_asymmetry", asym},
               {"zero_mass", s.zero_mass},
               {"estimate", s.zero_mass},
               {"stderr", nullptr},
               {"target", expected_zero},
               {"target_kind", "matching"},
               {"atoms", atoms},
               {"histogram", {{"lo", s.histogram.lo}, {"hi", s.histogram.hi}, {"counts", s.histogram.counts}}},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "absolute"},
               {"pass", pass}},
              m);
  return verdict(pass);
}

int cmd_localcheck(Context& ctx) {
  const auto& o = ctx.o;
  const auto t = MarkedTree::from_marks({-1, 0}, {o.root_mark, o.child_mark});
  const double limit = limit_neighborhood_density(t, o.delta);
  const double log_p = marked_neighborhood_log_prob_uniform_root(o.n, t.discretize(o.n), o.delta, parse_convention(o.convention));
  const double scaled = std::exp(log_p + 2.0 * std::log(static_cast<double>(o.n)));
  const double rel = std::abs(scaled / limit - 1.0);

  // Duality: both evaluators of the limit density on random trees.
  CounterRng rng(o.seed);
  double worst = 0;
  for (std::uint64_t r = 0; r < o.reps; ++r) {
    const auto rt = random_marked_tree(1 + rng.below(5), rng);
    const double a = detail::density_discrete_limit(rt, o.delta);
    const double b = detail::density_hazard_product(rt, o.delta);
    worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
  }
  const bool pass = rel <= o.tolerance && worst <= 1e-10;
  emit_report(ctx,
              {{"estimate", scaled},
               {"stderr", nullptr},
               {"target", limit},
               {"relative_error", rel},
               {"log_probability", log_p},
               {"duality", {{"trees", o.reps}, {"max_relative_difference", worst}}},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "relative"},
               {"pass", pass}},
              ctx.manifest("n", o.n));
  return verdict(pass);
}

int cmd_mean_one(Context& ctx) {
  const auto& o = ctx.o;
  const auto sizes = run_replicas<double>(o.reps, o.seed, [&](std::uint64_t, CounterRng& r) {
    return static_cast<double>(sample_edge_bp(o.delta, StopRule::at_exp1(), r, o.node_cap).size());
  });
  const double est = sample_mean(sizes), se = mean_stderr(sizes);
  const bool pass = std::abs(est - 2.0) <= o.tolerance * se;
  emit_report(ctx,
              {{"estimate", est},
               {"stderr", se},
               {"target", 2.0},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "stderr"},
               {"pass", pass}},
              ctx.manifest("reps", o.reps));
  return verdict(pass);
}

/// l-th cumulant estimate from a sample, l <= 3.
double cumulant(const std::vector<double>& x, int l) {
  const double m = sample_mean(x);
  if (l == 1) return m;
  double m2 = 0, m3 = 0;
  for (double v : x) {
    m2 += (v - m) * (v - m);
    m3 += (v - m) * (v - m) * (v - m);
  }
  const double n = static_cast<double>(x.size());
  return l == 2 ? m2 / n : m3 / n;
}

int cmd_cumulant(Context& ctx) {
  const auto& o = ctx.o;
  require(o.order >= 1 && o.order <= 3, "order must be 1, 2 or 3");
  require(o.reps >= 100, "reps must be >= 100");
  const auto z = run_replicas<double>(o.reps, o.seed, [&](std::uint64_t, CounterRng& r) { return sample_zeta_hat(o.delta, r); });
  const double est = cumulant(z, o.order);
  // Standard error from 100 equal batches.
  std::vector<double> batch;
  const std::size_t per = z.size() / 100;
  for (std::size_t b = 0; b < 100; ++b)
    batch.push_back(cumulant(std::vector<double>(z.begin() + static_cast<std::ptrdiff_t>(b * per),
                                                 z.begin() + static_cast<std::ptrdiff_t>((b + 1) * per)),
                             o.order));
  const double se = mean_stderr(batch) * std::sqrt(static_cast<double>(per) * 100.0 / static_cast<double>(z.size()));
  const double target = zeta_hat_cumulant(o.delta, o.order);
  const bool pass = std::abs(est - target) <= o.tolerance * se;
  emit_report(ctx,
              {{"order", o.order},
               {"estimate", est},
               {"stderr", se},
               {"target", target},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "stderr"},
               {"pass", pass}},
              ctx.manifest("reps", o.reps));
  return verdict(pass);
}

int cmd_yule(Context& ctx) {
  const auto& o = ctx.o;
  require(o.t_min > 0 && o.t_max > o.t_min, "need 0 < t-min < t-max");
  require(o.reps >= 10, "reps must be >= 10");
  const auto variant = parse_yule_variant(o.variant);
  std::vector<double> grid;
  for (double t = o.t_min; t <= o.t_max + 1e-9; t += 0.5) grid.push_back(t);
  const auto paths = run_replicas<std::vector<double>>(o.reps, o.seed, [&](std::uint64_t, CounterRng& r) {
    const auto traj = yule_marked_simulate(o.delta, o.t_max, r, variant);
    std::vector<double> d;
    for (double t : grid) d.push_back(static_cast<double>(yule_D_at(traj, t)));
    return d;
  });
  auto slope_of = [&](std::size_t from, std::size_t to) {
    std::vector<double> y(grid.size(), 0.0);
    for (std::size_t r = from; r < to; ++r)
      for (std::size_t j = 0; j < grid.size(); ++j) y[j] += paths[r][j];
    for (auto& v : y) v = std::log(v / static_cast<double>(to - from));
    return least_squares(grid, y).slope;
  };
  const double est = slope_of(0, paths.size());
  std::vector<double> groups;
  const std::size_t g = paths.size() / 10;
  for (std::size_t b = 0; b < 10; ++b) groups.push_back(slope_of(b * g, (b + 1) * g));
  const double se = mean_stderr(groups) * std::sqrt(10.0 * static_cast<double>(g) / static_cast<double>(paths.size()));
  const double target = 1.0 / phi(o.delta);
  const bool pass = std::abs(est - target) <= o.tolerance;
  auto m = ctx.manifest("reps", o.reps);
  if (!o.trajectory.empty()) {
    CounterRng r(stream_seed(o.seed, 0));
    const auto traj = yule_marked_simulate(o.delta, o.t_max, r, variant);
    write_file(o.trajectory, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  }
  emit_report(ctx,
              {{"slope", est},
               {"estimate", est},
               {"stderr", se},
               {"target", target},
               {"tolerance", o.tolerance},
               {"tolerance_unit", "absolute"},
               {"pass", pass}},
              m);
  return verdict(pass);
}

int cmd_selftest(const Opts& o) {
  bool all = true;
  auto line = [&](const std::string& name, bool ok, const std::string& detail) {
    all = all && ok;
    std::cout << (ok ? "PASS  " : "FAIL  ") << name << "  " << detail << '\n';
  };

  struct Case {
    Convention c;
    Rational delta;
  };
  for (const Case& k : {Case{Convention::exact, make_rational(0)}, Case{Convention::exact, make_rational(1)},
                        Case{Convention::exact, make_rational(5, 2)}, Case{Convention::exact, make_rational(-3, 10)},
                        Case{Convention::paper_total, make_rational(1)}}) {
    const auto r = sampler_equivalence(6, k.c, k.delta);
    std::ostringstream name;
    name << "sampler-equivalence[" << to_string(k.c) << ", delta=" << k.delta << "]";
    line(name.str(), r.mismatches == 0, std::to_string(r.states) + " states, " + std::to_string(r.mismatches) + " mismatches");
  }

  {
    CounterRng rng(20240);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const double d = -0.9 + 5.0 * rng.uniform();
      const auto t = random_marked_tree(1 + rng.below(5), rng);
      const double a = detail::density_discrete_limit(t, d);
      const double b = detail::density_hazard_product(t, d);
      worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    }
    std::ostringstream detail;
    detail << "1000 trees, max relative difference " << worst;
    line("density-duality", worst <= 1e-10, detail.str());
  }

  for (double d : {0.0, 1.0, 2.0}) {
    bool ok = true;
    std::string what = "ok";
    try {
      exponents(d, o.phi_perturbation);
    } catch (const ConsistencyError& e) {
      ok = false;
      what = e.what();
    }
    line("exponent-identities[delta=" + json(d).dump() + "]", ok, what);

    // int_0^inf e^{-lambda t} c (1 - e^{-t}) dt = c / (lambda (lambda + 1)) must equal 1.
    const double c = rate_scale(d);
    const double lam = 1.0 / (phi(d) + o.phi_perturbation);
    // Substituting u = lambda t keeps the integrand under e^{-u}.
    const auto q = integrate_half_line([&](double u) { return std::exp(-u) * c * -std::expm1(-u / lam) / lam; }, c / lam, 1e-13);
    std::ostringstream detail;
    detail.precision(15);
    detail << "integral " << q.value;
    line("malthusian-quadrature[delta=" + json(d).dump() + "]", std::abs(q.value - 1.0) <= 1e-9, detail.str());
  }

  {
    const auto q = limit_p1_quadrature(0.0);
    std::ostringstream detail;
    detail.precision(15);
    detail << "p(1) " << q.value;
    line("p1-quadrature", std::abs(q.value - (std::numbers::e - 2.0)) <= 1e-9, detail.str());
  }
  return all ? kOk : kCheckFailed;
}

int run(std::vector<std::string> args);

int cmd_replay(const std::string& path, const std::string& out, const std::string& report) {
  std::ifstream is(path);
  require(static_cast<bool>(is), "cannot read manifest " + path);
  const json m = json::parse(is);
  require(m.contains("command") && m.contains("flags"), "manifest lacks command or flags");
  json flags = m.at("flags");
  if (!out.empty()) flags["out"] = out;
  if (!report.empty()) flags["report"] = report;
  std::vector<std::string> args{m.at("command").get<std::string>()};
  for (const auto& [k, v] : flags.items()) {
    args.push_back("--" + k);
    args.push_back(v.get<std::string>());
  }
  return run(std::move(args));
}

int run(std::vector<std::string> args) {
  CLI::App app{"Self-reinforced preferential attachment: growth, limit objects and analysis"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::map<std::string, Opts> store;  // one option set per subcommand

  auto delta_opt = [](CLI::App* s, Opts& o) { return s->add_option("--delta", o.delta, "affine offset, delta > -1 (no default)"); };
  auto tree_opts = [](CLI::App* s, Opts& o, std::uint64_t n) {
    o.n = n;
    s->add_option("--n", o.n, "tree size");
    s->add_option("--sampler", o.sampler, "fast|naive")->check(CLI::IsMember({"fast", "naive"}));
    s->add_option("--convention", o.convention, "exact|paper-total")->check(CLI::IsMember({"exact", "paper-total"}));
  };
  auto tolerance = [](CLI::App* s, Opts& o, double d, const std::string& unit) {
    o.tolerance = d;
    s->add_option("--tolerance", o.tolerance, "pass threshold (" + unit + ")");
  };
  auto reps = [](CLI::App* s, Opts& o, std::uint64_t r, const std::string& what) {
    o.reps = r;
    s->add_option("--reps", o.reps, what);
  };

  Opts& go = store["grow"];
  auto* g = app.add_subcommand("grow", "grow one tree and write it with its manifest");
  auto* g_delta = delta_opt(g, go);
  g->add_option("--seed", go.seed, "master seed");
  tree_opts(g, go, 1000);
  g->add_option("--checkpoints", go.checkpoints, "comma-separated checkpoint times");
  go.out = "tree";
  g->add_option("--out", go.out, "output prefix");
  g->add_option("--format", go.format, "csv|bin")->check(CLI::IsMember({"csv", "bin"}));
  g->add_option("--manifest", go.manifest, "replay the parameters of an earlier grow manifest");

  using Setup = std::function<void(CLI::App*, Opts&)>;
  const std::vector<std::tuple<std::string, std::string, Setup>> commands{
      {"limit-pmf", "Monte Carlo limit degree pmf and p(1)",
       [&](CLI::App* s, Opts& o) {
         reps(s, o, 100000, "replicas");
         s->add_option("--csv", o.csv, "write the pmf as CSV");
         tolerance(s, o, 3, "standard errors");
       }},
      {"tail", "degree ccdf tail exponent of one grown tree",
       [&](CLI::App* s, Opts& o) {
         tree_opts(s, o, 1000000);
         reps(s, o, 1, "unused; a tail fit uses one tree");
         s->add_option("--csv", o.csv, "write the ccdf as CSV");
         tolerance(s, o, 0.15, "absolute, on the slope");
       }},
      {"growth", "root-degree growth exponent over seeds",
       [&](CLI::App* s, Opts& o) {
         tree_opts(s, o, 1000000);
         s->add_option("--n-min", o.n_min, "first checkpoint");
         s->add_option("--vertex", o.vertex, "tracked vertex");
         reps(s, o, 20, "number of seeds");
         tolerance(s, o, 0.05, "absolute, on the slope");
       }},
      {"fringe-compare", "empirical fringe law against branching-process samples",
       [&](CLI::App* s, Opts& o) {
         tree_opts(s, o, 100000);
         reps(s, o, 100000, "branching-process samples");
         s->add_option("--max-size", o.max_size, "classes above this size are pooled");
         s->add_option("--truncation", o.truncation, "histogram truncation");
         s->add_option("--method", o.method, "nested|edge-bp")->check(CLI::IsMember({"nested", "edge-bp"}));
         s->add_option("--node-cap", o.node_cap, "node cap per branching sample");
         s->add_option("--csv", o.csv, "write the empirical histogram as CSV");
         tolerance(s, o, 0.02, "total variation");
       }},
      {"spectrum", "adjacency spectrum of one grown tree",
       [&](CLI::App* s, Opts& o) {
         tree_opts(s, o, 512);
         reps(s, o, 1, "unused; one tree");
         s->add_option("--bins", o.bins, "histogram bins");
         o.out = "spectrum";
         s->add_option("--out", o.out, "output prefix");
         tolerance(s, o, 1e-6, "absolute, on trace and sum of squares");
       }},
      {"localcheck", "discrete neighborhood probability against the limit density",
       [&](CLI::App* s, Opts& o) {
         o.n = 10000;
         s->add_option("--n", o.n, "discrete time");
         s->add_option("--convention", o.convention)->check(CLI::IsMember({"exact", "paper-total"}));
         s->add_option("--root-mark", o.root_mark);
         s->add_option("--child-mark", o.child_mark);
         reps(s, o, 1000, "random trees for the duality check");
         tolerance(s, o, 0.05, "relative");
       }},
      {"mean-one", "mean size of the edge branching process at an exp(1) time",
       [&](CLI::App* s, Opts& o) {
         reps(s, o, 100000, "replicas");
         s->add_option("--node-cap", o.node_cap);
         tolerance(s, o, 3, "standard errors");
       }},
      {"cumulant", "cumulants of the discounted edge offspring sum",
       [&](CLI::App* s, Opts& o) {
         reps(s, o, 100000, "replicas");
         s->add_option("--order", o.order, "1, 2 or 3");
         tolerance(s, o, 3, "standard errors");
       }},
      {"yule", "log-growth of the marked Yule process",
       [&](CLI::App* s, Opts& o) {
         reps(s, o, 1000, "trajectories");
         s->add_option("--t-min", o.t_min);
         s->add_option("--t-max", o.t_max);
         s->add_option("--variant", o.variant, "exact-chain|simplified")
             ->check(CLI::IsMember({"exact-chain", "simplified"}));
         s->add_option("--trajectory", o.trajectory, "write one trajectory as CSV");
         tolerance(s, o, 0.05, "absolute, on the slope");
       }},
  };
  for (const auto& [name, about, fn] : commands) {
    Opts& o = store[name];
    auto* s = app.add_subcommand(name, about);
    delta_opt(s, o)->required();
    s->add_option("--seed", o.seed, "master seed");
    s->add_option("--report", o.report, "JSON report path (default stdout)");
    fn(s, o);
  }

  auto* st = app.add_subcommand("selftest", "exact and deterministic consistency checks");
  st->add_option("--phi-perturbation", store["selftest"].phi_perturbation)->group("");

  std::string replay_path, replay_out, replay_report;
  auto* rp = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  rp->add_option("manifest", replay_path)->required();
  rp->add_option("--out", replay_out, "override the output prefix");
  rp->add_option("--report", replay_report, "override the report path");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "selftest") return cmd_selftest(store["selftest"]);
  if (name == "replay") return cmd_replay(replay_path, replay_out, replay_report);

  Context ctx{name, collect_flags(*sub), store.at(name)};
  if (name == "grow") {
    require(g_delta->count() > 0 || !ctx.o.manifest.empty(), "--delta is required (it has no default)");
    return cmd_grow(ctx);
  }
  if (name == "limit-pmf") return cmd_limit_pmf(ctx);
  if (name == "tail") return cmd_tail(ctx);
  if (name == "growth") return cmd_growth(ctx);
  if (name == "fringe-compare") return cmd_fringe_compare(ctx);
  if (name == "spectrum") return cmd_spectrum(ctx);
  if (name == "localcheck") return cmd_localcheck(ctx);
  if (name == "mean-one") return cmd_mean_one(ctx);
  if (name == "cumulant") return cmd_cumulant(ctx);
  if (name == "yule") return cmd_yule(ctx);
  throw ValidationError("unknown command " + name);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(std::move(args));
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: bad manifest: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceCapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResourceCap;
  } catch (const ConsistencyError& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}
