// Acceptance checks, one criterion per invocation:  acceptance --criterion N
// Prints one PASS/FAIL line per check plus a runtime line; exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lorgh/lorgh.hpp"

using namespace lorgh;

namespace {

struct Line {
  std::string what;
  double value;
  std::string bound;
  bool pass;
};

using Lines = std::vector<Line>;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

FinitePOM random_pom(std::size_t n, std::uint64_t seed, double density) {
  Rng rng(seed);
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  for (Index i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  FinitePOM p;
  p.points = default_ids(n);
  p.leq = BitMatrix(n);
  for (Index i = 0; i < n; ++i) p.leq.set(i, i);
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (rng.uniform(0, 1) < density) p.leq.set(perm[a], perm[b]);
  transitive_closure_inplace(p.leq);
  for (Index i = 0; i < n; ++i) p.mu.push_back(rng.uniform(0.1, 2.0));
  return p;
}

Index nearest_label(const FiniteLorentzSpace& s, const Coords& c) { return detail::nearest_to(*s.labels, c); }

void add_report(Lines& out, const ExperimentReport& rep) {
  for (const auto& c : rep.checks) out.push_back({rep.name + ": " + c.name, c.value, c.bound, c.pass});
}

// median, 90th percentile and max of |a − b| / b over pairs at separation >= cut * max separation
struct RelErr {
  double median = 0, p90 = 0, max = 0;
  std::size_t pairs = 0, infinite = 0;
};

RelErr relative_errors(const SquareMatrix<double>& got, const SquareMatrix<double>& want, double cut) {
  double mx = 0;
  for (double v : want.data()) mx = std::max(mx, v);
  std::vector<double> e;
  RelErr r;
  for (Index i = 0; i < got.size(); ++i)
    for (Index j = i + 1; j < got.size(); ++j) {
      if (want(i, j) < cut * mx || want(i, j) <= 0) continue;
      if (!std::isfinite(got(i, j))) {
        ++r.infinite;
        e.push_back(kInf);
        continue;
      }
      e.push_back(std::abs(got(i, j) - want(i, j)) / want(i, j));
    }
  std::sort(e.begin(), e.end());
  r.pairs = e.size();
  if (!e.empty()) {
    r.median = e[e.size() / 2];
    r.p90 = e[e.size() * 9 / 10];
    r.max = e.back();
  }
  return r;
}

// ------------------------------------------------------------------ criteria

Lines criterion_1() {
  Lines out;
  std::size_t valid = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    FiniteLorentzSpace s;
    switch (seed % 6) {
      case 0: s = sprinkle_n(Region::diamond(1 + seed % 3, 2.0), 60, seed); break;
      case 1: s = sprinkle_n(Region::slab(1 + seed % 2, 1, 1), 60, seed); break;
      case 2: s = lattice(1 + static_cast<int>(seed % 4), 1, 1); break;
      case 3: s = causal_cylinder(circle_net(3 + seed % 9), {0, 0.25, 0.5 + 0.01 * static_cast<double>(seed)}); break;
      case 4: {
        Rng rng(seed);
        std::vector<Coords> ys;
        for (int k = 0; k < 3; ++k) ys.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        s = product(sprinkle_n(Region::diamond(1, 2.0), 15, seed), euclidean_metric(ys));
        break;
      }
      default: s = scale(sprinkle_n(Region::diamond(2, 2.0), 50, seed), 0.5 + 0.05 * static_cast<double>(seed % 20));
    }
    valid += validate_lorentz(s, 1e-9).ok();
  }
  out.push_back({"random model outputs valid (of 100)", static_cast<double>(valid), "== 100", valid == 100});

  // sequences of valid spaces converging entrywise; the limits carry null pairs (lattice)
  // or generic pairs (sprinkle), and must be valid again
  std::size_t seq_ok = 0, limits_ok = 0, sequences = 0;
  double last_gap = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<Coords> base;
    if (seed % 2 == 0) {
      base = *lattice(2 + static_cast<int>(seed % 3), 1, 1).labels;
    } else {
      Rng rng(seed);
      base = uniform_points(Region::diamond(1, 2.0), 40, rng);
    }
    Rng rng(seed + 100);
    std::vector<Coords> dir(base.size());
    for (auto& d : dir) d = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto limit = space_from_coords(base, 1.0);
    bool all_valid = true, converging = true;
    double prev = kInf;
    for (int k = 1; k <= (1 << 20); k *= 4) {
      auto pts = base;
      for (Index i = 0; i < pts.size(); ++i)
        for (int c = 0; c < 2; ++c) pts[i][c] += dir[i][c] / k;
      const auto sk = space_from_coords(pts, 1.0);
      all_valid = all_valid && validate_lorentz(sk, 1e-9).ok();
      double gap = 0;
      for (Index i = 0; i < base.size(); ++i)
        for (Index j = 0; j < base.size(); ++j) gap = std::max(gap, std::abs(sk.sigma(i, j) - limit.sigma(i, j)));
      converging = converging && gap <= prev;
      prev = gap;
    }
    last_gap = std::max(last_gap, prev);
    ++sequences;
    seq_ok += all_valid && converging;
    limits_ok += validate_lorentz(limit, 1e-9).ok();
  }
  out.push_back({"perturbation sequences valid and converging", static_cast<double>(seq_ok), "== 10", seq_ok == sequences});
  out.push_back({"largest entrywise gap at the last step", last_gap, "< 1e-2", last_gap < 1e-2});
  out.push_back({"limits valid", static_cast<double>(limits_ok), "== 10", limits_ok == sequences});
  return out;
}

Lines criterion_2() {
  double worst_rec = 0, worst_harvest = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = random_pom(5 + seed % 46, seed, 0.05 + 0.01 * static_cast<double>(seed % 30));
    const auto c = cones_of(p);
    for (Index a = 0; a < p.size(); ++a)
      for (Index b = 0; b < p.size(); ++b) {
        const auto r = check_recovery_identity(c, a, b);
        worst_rec = std::max({worst_rec, r.plus, r.minus});
        worst_harvest = std::max(worst_harvest, harvest_value(c, a, b).residual());
      }
  }
  return {{"recovery identity worst residual", worst_rec, "< 1e-9", worst_rec < 1e-9},
          {"harvest identity worst residual", worst_harvest, "< 1e-9", worst_harvest < 1e-9}};
}

Lines criterion_3() {
  const auto s = sprinkle_n(Region::diamond(1, 2.0), 500, 3);
  const auto I = chronological_pairs(s);
  const auto det = detect_chron_all(s);
  std::size_t errors = 0, missed_links = 0, related = 0;
  for (Index a = 0; a < s.size(); ++a)
    for (Index b = a + 1; b < s.size(); ++b) {
      const bool truth = I.test(a, b) || I.test(b, a);
      related += truth;
      if (det.test(a, b) != truth) {
        ++errors;
        bool inner = false;
        for (Index z = 0; z < s.size() && !inner; ++z)
          inner = (I.test(a, z) && I.test(z, b)) || (I.test(b, z) && I.test(z, a));
        missed_links += truth && !inner;
      }
    }
  return {{"unordered pairs misclassified", static_cast<double>(errors), "== 0", errors == 0},
          {"(of which related pairs with an empty open interval)", static_cast<double>(missed_links), "info", true},
          {"(related pairs)", static_cast<double>(related), "info", true}};
}

Lines criterion_4() {
  Rng rng(4);
  auto random_space = [&](std::size_t max_n) {
    const std::size_t n = 1 + rng.index(max_n);
    return sprinkle_n(Region::diamond(1 + rng.index(2), 2.0), n, rng.next());
  };
  std::size_t allgh = 0;
  double worst = -kInf;
  for (int k = 0; k < 100; ++k) {
    const auto X = random_space(4), Y = random_space(4);
    const double plus = ghdist_plus(X, Y, GhMethod::Exact).value;
    const double minus = ghdist_minus_exact(X, Y).value;
    worst = std::max(worst, plus - 2 * minus);
    allgh += plus <= 2 * minus + 1e-12;
  }
  std::size_t tri = 0;
  double worst_tri = -kInf;
  for (int k = 0; k < 50; ++k) {
    const auto X = random_space(3), Y = random_space(3), Z = random_space(3);
    const double xz = ghdist_minus_exact(X, Z).value;
    const double xy = ghdist_minus_exact(X, Y).value, yz = ghdist_minus_exact(Y, Z).value;
    worst_tri = std::max(worst_tri, xz - xy - yz);
    tri += xz <= xy + yz + 1e-12;
  }
  return {{"ghdist_plus <= 2 ghdist_minus (of 100 pairs)", static_cast<double>(allgh), "== 100", allgh == 100},
          {"largest ghdist_plus - 2 ghdist_minus", worst, "<= 1e-12", worst <= 1e-12},
          {"triangle inequality (of 50 triples)", static_cast<double>(tri), "== 50", tri == 50},
          {"largest triangle excess", worst_tri, "<= 1e-12", worst_tri <= 1e-12}};
}

Lines criterion_5() {
  Lines out;
  add_report(out, run_experiment({{"name", "lattice-convergence"}}));
  return out;
}

Lines criterion_6() {
  Lines out;
  add_report(out, run_experiment({{"name", "cylinder-convergence"}, {"params", {{"sizes", {8, 16, 32}}}}}));
  return out;
}

Lines criterion_7() {
  Lines out;
  add_report(out, run_experiment({{"name", "dm-recovery"}, {"params", {{"spatial_dims", {1, 2}}, {"counts", {20000, 20000}}}}}));
  DmOptions o;
  o.balance_tol = 0;
  for (double D : {2.0, 3.0}) {
    const auto st = analytic_stub(D, 5);
    const double e = dm_dimension(st.pom, st.b, 4, o).estimate;
    out.push_back({"analytic stub D=" + fmt(D) + " |Dm - D|", std::abs(e - D), "<= 1e-9", std::abs(e - D) <= 1e-9});
  }
  return out;
}

Lines criterion_8() {
  Lines out;
  const std::size_t n = 6;
  BitMatrix chain_order(n), anti = BitMatrix::identity(4);
  for (Index a = 0; a < n; ++a)
    for (Index b = a; b < n; ++b) chain_order.set(a, b);
  const int dc = dushnik_miller(chain_order).dimension;
  const int da = dushnik_miller(anti).dimension;
  const auto bl = dushnik_miller(boolean_lattice(3));
  out.push_back({"dushnik_miller(chain of 6)", double(dc), "== 1", dc == 1});
  out.push_back({"dushnik_miller(antichain of 4)", double(da), "== 2", da == 2});
  out.push_back({"dushnik_miller(Boolean lattice 2^3)", double(bl.dimension), "== 3",
                 bl.dimension == 3 && verify_realizer(boolean_lattice(3), bl.realizer)});
  const auto L = lattice(3, 1, 1);
  const int h = horismoticity(L, nearest_label(L, {0, 0}), 4).value;
  out.push_back({"horismoticity at the centre of a 2D lattice diamond", double(h), "== 2", h == 2});
  return out;
}

Lines criterion_9() {
  Lines out;
  const double tau = 1.0, delta = 0.1 * tau;
  const std::size_t count = 1000;
  const auto s = sprinkle_n(Region::diamond(1, tau), count, 9);
  std::vector<Index> all(count);
  std::iota(all.begin(), all.end(), Index{0});
  const auto bad = uncoverable_points(s, all, delta);
  std::vector<char> skip(count, 0);
  for (Index b : bad) skip[b] = 1;
  std::vector<Index> A;
  for (Index i = 0; i < count; ++i)
    if (!skip[i]) A.push_back(i);
  const auto r = mu_n_delta(s, A, 2, delta, CoverMode::Greedy);
  const double target = tau * tau / 2, rel = std::abs(r.value - target) / target;
  out.push_back({"mu_{2,0.1 tau} relative error against tau^2/2 (value " + fmt(r.value) + ")", rel, "<= 0.15",
                 rel <= 0.15});
  out.push_back({"(points in no admissible diamond, left out)", static_cast<double>(bad.size()), "info", true});
  const double w1 = std::abs(omega(1) - 1), w2 = std::abs(omega(2) - 0.5), w4 = std::abs(omega(4) - M_PI / 24);
  out.push_back({"|omega(1) - 1|", w1, "<= 1e-12", w1 <= 1e-12});
  out.push_back({"|omega(2) - 1/2|", w2, "<= 1e-12", w2 <= 1e-12});
  out.push_back({"|omega(4) - pi/24|", w4, "<= 1e-12", w4 <= 1e-12});
  return out;
}

Lines criterion_10() {
  Lines out;
  add_report(out, run_experiment({{"name", "reconstruction"}, {"params", {{"count", 5000}}}}));
  return out;
}

Lines criterion_11() {
  Lines out;
  const Tolerances tol;
  {
    // dense strip |t| <= 1/2, Noldus^1 intrinsified at 3x the mean nearest-neighbour distance
    const Region R = Region::slab(1, 0.5, 1.0);
    Rng rng(21);
    const auto pts = uniform_points(R, 2000, rng);
    const auto s = space_from_coords(pts, R.volume() / 2000);
    const auto D = noldus_metric(s, 1);
    const auto I = intrinsify(D, 3 * mean_nearest_neighbor(D));
    const auto e = relative_errors(I.d, euclidean_metric(pts).d, tol.slice_cut);
    out.push_back({"intrinsified Noldus^1 vs Euclidean, median relative error", e.median, "<= " + fmt(tol.noldus_rel),
                   e.median <= tol.noldus_rel});
    out.push_back({"(p90 / max relative error)", e.p90, "info max " + fmt(e.max), true});
  }
  {
    const Region R = Region::slab(1, 0.5, 1.0);
    Rng rng(3);
    const std::size_t count = 4000;
    const auto ss = embed_slice(uniform_points(R, count, rng), 0.0, -1.0, 1.0, std::sqrt(R.volume() / count));
    const auto s = space_from_coords(ss.coords, R.volume() / count);
    const auto dS = chain_diamond_metric(s, CauchySubset{ss.slice});
    std::vector<Coords> xs;
    for (Index v : ss.slice) xs.push_back({ss.coords[v][1]});
    const auto e = relative_errors(dS.d, euclidean_metric(xs).d, tol.slice_cut);
    out.push_back({"flat slice d_S vs Euclidean, median relative error", e.median, "<= " + fmt(tol.slice_rel),
                   e.median <= tol.slice_rel && e.infinite == 0});
    out.push_back({"(p90 / max relative error)", e.p90, "info max " + fmt(e.max), true});
  }
  {
    // conformal factor 1/|t|; the slice t = 0 sits on the pole
    const Region R = Region::slab(1, 1.0, 1.0);
    Rng rng(31);
    const std::size_t count = 2000;
    const auto ss = embed_slice(uniform_points(R, count, rng), 0.0, -1.0, 1.0, std::sqrt(R.volume() / count));
    const auto s = space_from_coords(ss.coords, pole_sigma, R.volume() / count);
    const auto dS = chain_diamond_metric(s, CauchySubset{ss.slice});
    const std::size_t m = ss.slice.size();
    SquareMatrix<double> claimed(m), single(m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) {
        const double t = std::abs(ss.coords[ss.slice[a]][1] - ss.coords[ss.slice[b]][1]);
        claimed(a, b) = 2 * std::sqrt(t);
        single(a, b) = 2 * std::sqrt(2 * t);  // one diamond with apexes at (∓t/2, midpoint)
      }
    const auto e = relative_errors(dS.d, claimed, tol.slice_cut);
    const auto e2 = relative_errors(dS.d, single, tol.slice_cut);
    out.push_back({"pole slice d_S vs 2 sqrt(t), median relative error", e.median, "<= " + fmt(tol.pole_rel),
                   e.median <= tol.pole_rel});
    out.push_back({"(same against 2 sqrt(2t), median)", e2.median, "info p90 " + fmt(e2.p90), true});
  }
  return out;
}

Lines criterion_12() {
  const auto run = rcf_run(2000, 7);
  return {{"slice is Cauchy (" + std::to_string(run.points) + " points)", double(run.cauchy), "true", run.cauchy},
          {"zero locus equals S", double(run.zero_locus), "true", run.zero_locus},
          {"anti-Lipschitz violations", static_cast<double>(run.anti_lipschitz.violations), "== 0",
           run.anti_lipschitz.ok},
          {"rushing violations", static_cast<double>(run.rushing.violations), "== 0", run.rushing.ok},
          {"strictly increasing along maximal chains", double(run.increasing), "true", run.increasing},
          {"(compactness correction C)", run.report.correction, "info", true}};
}

Lines criterion_13() {
  Lines out;
  const std::vector<double> eps{1.0, 0.5};
  std::vector<FiniteLorentzSpace> bounded;
  // members coarser than n = 8 have a d^+ mesh comparable to eps and saturate N(eps)
  for (int n : {8, 12, 16}) bounded.push_back(lattice(n, 1, 1));
  const auto a = precompactness_predicates(bounded, eps, 2.0);
  out.push_back({"lattice family: diameter bound", double(a.diameter_ok), "true", a.diameter_ok});
  out.push_back({"lattice family: eps-approximants audited, N(eps) stable (max/min)", a.stability, "<= 1.5",
                 a.approximants_ok});
  for (std::size_t e = 0; e < eps.size(); ++e)
    out.push_back({"(N(" + fmt(eps[e]) + ") over the family)", static_cast<double>(a.max_n[e]), "info", true});
  std::vector<FiniteLorentzSpace> scaled;
  const auto X = lattice(8, 1, 1);
  for (double r : {1.0, 2.0, 4.0, 8.0}) scaled.push_back(scale(X, r));
  const auto b = precompactness_predicates(scaled, eps, 2.0);
  out.push_back({"scaled family fails the diameter bound", double(!b.diameter_ok), "true", !b.diameter_ok});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int k = 0;
  app.add_option("--criterion", k, "criterion number 1-13")->required()->check(CLI::Range(1, 13));
  CLI11_PARSE(app, argc, argv);

  static const std::vector<std::function<Lines()>> fns{criterion_1,  criterion_2,  criterion_3, criterion_4,
                                                       criterion_5,  criterion_6,  criterion_7, criterion_8,
                                                       criterion_9,  criterion_10, criterion_11, criterion_12,
                                                       criterion_13};
  static const double budget[] = {10, 10, 30, 300, 120, 120, 300, 60, 60, 300, 300, 120, 120};

  const auto t0 = std::chrono::steady_clock::now();
  Lines lines;
  try {
    lines = fns[static_cast<std::size_t>(k - 1)]();
  } catch (const std::exception& e) {
    std::cout << "criterion " << k << ": FAIL error: " << e.what() << "\n";
    return 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  lines.push_back({"runtime seconds", secs, "< " + fmt(budget[k - 1]), secs < budget[k - 1]});

  bool all = true;
  for (const auto& l : lines) {
    const bool info = l.bound.rfind("info", 0) == 0;
    all = all && l.pass;
    std::cout << "criterion " << k << ": " << (info ? "INFO" : (l.pass ? "PASS" : "FAIL")) << "  " << l.what << " = "
              << fmt(l.value) << "  [" << l.bound << "]\n";
  }
  std::cout << "criterion " << k << ": " << (all ? "PASSED" : "FAILED") << "\n";
  return all ? 0 : 1;
}
