#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lorgh/cauchy.hpp"
#include "lorgh/core.hpp"
#include "lorgh/gh.hpp"
#include "lorgh/io.hpp"
#include "lorgh/mcs.hpp"
#include "lorgh/models.hpp"
#include "lorgh/tolerances.hpp"

namespace lorgh {

inline constexpr const char* kSummarySchema = "lorgh.experiment/1";

struct Check {
  std::string name;
  double value = 0;
  std::string bound;  // human-readable condition, e.g. "in [0.3, 0.7]"
  bool pass = false;
};

// Small CSV builder; numbers are written with 17 significant digits.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  Table& row(std::vector<double> v) {
    rows_.push_back(std::move(v));
    return *this;
  }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::string csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t k = 0; k < header_.size(); ++k) os << (k ? "," : "") << header_[k];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        os << (k ? "," : "");
        if (std::isinf(r[k])) os << (r[k] > 0 ? "inf" : "-inf");
        else os << r[k];
      }
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct ExperimentReport {
  std::string name;
  json params;
  std::map<std::string, Table> tables;
  std::vector<Check> checks;
  json extra = json::object();
  double seconds = 0;  // wall time; kept out of the summary so reruns compare byte for byte

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  void check(std::string what, double value, std::string bound, bool ok) {
    checks.push_back({std::move(what), value, std::move(bound), ok});
  }
  void check_range(std::string what, double value, double lo, double hi) {
    std::ostringstream b;
    b << "in [" << lo << ", " << hi << "]";
    check(std::move(what), value, b.str(), value >= lo && value <= hi);
  }
};

inline json summary_json(const ExperimentReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                      {"bound", c.bound}, {"pass", c.pass}});
  json tables = json::array();
  for (const auto& [k, v] : r.tables) tables.push_back(k);
  return {{"schema", kSummarySchema}, {"name", r.name},   {"params", r.params}, {"checks", checks},
          {"tables", tables},         {"extra", r.extra}, {"pass", r.pass()}};
}

namespace detail {

template <typename T>
T param(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("experiment parameter '") + key + "': " + e.what());
  }
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return !v.empty();
}

inline Index nearest_to(const std::vector<Coords>& pts, const Coords& c) {
  Index best = 0;
  double bd = kInf;
  for (Index i = 0; i < pts.size(); ++i) {
    double s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += (pts[i][k] - c[k]) * (pts[i][k] - c[k]);
    if (s < bd) bd = s, best = i;
  }
  return best;
}

// Relates each point of a fine circle net to the nearest points of a coarse one.
inline Correspondence circle_net_correspondence(std::size_t coarse, std::size_t fine, double radius) {
  const double circ = 2 * std::numbers::pi * radius;
  Correspondence R{coarse, fine, {}};
  for (Index i = 0; i < coarse; ++i)
    for (Index j = 0; j < fine; ++j) {
      double d = std::abs(static_cast<double>(i) / coarse - static_cast<double>(j) / fine);
      d = std::min(d, 1 - d) * circ;
      if (d <= circ / (2.0 * static_cast<double>(coarse)) + 1e-12) R.pairs.emplace_back(i, j);
    }
  R.normalize();
  return R;
}

}  // namespace detail

// ------------------------------------------------------------ experiments

// dist_minus of the ball correspondence between lattice(n, r, s) and a finer lattice,
// as n doubles; then at fixed n with growing spatial truncation s.
inline ExperimentReport lattice_convergence(const json& p, const Tolerances& tol) {
  ExperimentReport rep;
  rep.name = "lattice-convergence";
  const auto ns = detail::param<std::vector<int>>(p, "ns", {4, 8, 16});
  const double r = detail::param(p, "r", 1.0), s = detail::param(p, "s", 1.0);
  const int ref_n = detail::param(p, "reference_n", 32);
  const int cn = detail::param(p, "contrast_n", 4);
  const auto cs = detail::param<std::vector<double>>(p, "contrast_s", {1, 2, 4});
  const int cref = detail::param(p, "contrast_reference_n", 16);
  rep.params = {{"ns", ns}, {"r", r}, {"s", s}, {"reference_n", ref_n}, {"contrast_n", cn}, {"contrast_s", cs},
                {"contrast_reference_n", cref}};

  Table decay({"n", "points", "pairs", "dist_minus", "ratio"});
  std::vector<double> vals;
  {
    const auto ref = lattice(ref_n, r, s);
    for (int n : ns) {
      const auto lc = lattice_correspondence(n, r, s, ref);
      const double d = dist_minus(lc.R, lc.lattice, ref);
      const double ratio = vals.empty() ? kInf : d / vals.back();
      vals.push_back(d);
      decay.row({static_cast<double>(n), static_cast<double>(lc.lattice.size()),
                 static_cast<double>(lc.R.pairs.size()), d, vals.size() > 1 ? ratio : 0.0});
    }
  }
  for (std::size_t k = 1; k < vals.size(); ++k)
    rep.check_range("ratio n=" + std::to_string(ns[k]) + "/" + std::to_string(ns[k - 1]), vals[k] / vals[k - 1],
                    tol.lattice_ratio_lo, tol.lattice_ratio_hi);
  rep.check("distortion strictly decreasing", vals.empty() ? 0 : vals.back(), "decreasing in n",
            detail::strictly_decreasing(vals));

  Table contrast({"s", "points", "dist_minus"});
  std::vector<double> cvals;
  for (double sv : cs) {
    const auto ref = lattice(cref, r, sv);
    const auto lc = lattice_correspondence(cn, r, sv, ref);
    cvals.push_back(dist_minus(lc.R, lc.lattice, ref));
    contrast.row({sv, static_cast<double>(lc.lattice.size()), cvals.back()});
  }
  if (cvals.size() >= 2) {
    const double q = cvals.back() / cvals.front();
    std::ostringstream b;
    b << ">= " << tol.contrast_decay;
    rep.check("no decay as s grows (last/first)", q, b.str(), q >= tol.contrast_decay);
  }
  rep.tables.emplace("decay", std::move(decay));
  rep.tables.emplace("contrast", std::move(contrast));
  return rep;
}

// Cylinders over circle nets against a cylinder over a fine net, related by the lifted
// nearest-point correspondence (identity on the time grid).
inline ExperimentReport cylinder_convergence(const json& p, const Tolerances&) {
  ExperimentReport rep;
  rep.name = "cylinder-convergence";
  const auto sizes = detail::param<std::vector<std::size_t>>(p, "sizes", {8, 16, 32});
  const std::size_t ref_k = detail::param<std::size_t>(p, "reference_size", 64);
  const double radius = detail::param(p, "radius", 1.0 / (2 * std::numbers::pi));
  const std::size_t nt = detail::param<std::size_t>(p, "time_steps", 5);
  const double T = detail::param(p, "duration", 1.0);
  rep.params = {{"sizes", sizes}, {"reference_size", ref_k}, {"radius", radius}, {"time_steps", nt}, {"duration", T}};
  if (nt < 2) throw InvalidArgument("cylinder-convergence: need at least two time steps");
  std::vector<double> times(nt);
  for (std::size_t a = 0; a < nt; ++a) times[a] = T * static_cast<double>(a) / static_cast<double>(nt - 1);
  const double circ = 2 * std::numbers::pi * radius;
  auto cylinder = [&](std::size_t k) {
    auto c = causal_cylinder(circle_net(k, radius), times);
    c.mu = std::vector<double>(c.size(), (T / static_cast<double>(nt)) * circ / static_cast<double>(k));
    return c;
  };
  const auto ref = cylinder(ref_k);
  Table t({"size", "points", "dist_minus", "dist_times"});
  std::vector<double> dm, dt;
  for (std::size_t k : sizes) {
    const auto c = cylinder(k);
    const auto R = product_correspondence(identity_correspondence(nt), detail::circle_net_correspondence(k, ref_k, radius));
    require_valid(R, c.size(), ref.size());
    dm.push_back(dist_minus(R, c, ref));
    dt.push_back(dist_times(R, c, ref));
    t.row({static_cast<double>(k), static_cast<double>(c.size()), dm.back(), dt.back()});
  }
  rep.check("dist_minus strictly decreasing", dm.empty() ? 0 : dm.back(), "decreasing in net size",
            detail::strictly_decreasing(dm));
  rep.check("dist_times strictly decreasing", dt.empty() ? 0 : dt.back(), "decreasing in net size",
            detail::strictly_decreasing(dt));
  rep.tables.emplace("convergence", std::move(t));
  return rep;
}

// Identity correspondence between X and scale(X, r): distortion |r − 1| max|σ|.
inline ExperimentReport scaling(const json& p, const Tolerances& tol) {
  ExperimentReport rep;
  rep.name = "scaling";
  const auto rs = detail::param<std::vector<double>>(p, "rs", {0.5, 1.0, 2.0});
  const std::size_t count = detail::param<std::size_t>(p, "count", 40);
  const std::size_t tiny = detail::param<std::size_t>(p, "exact_size", 4);
  const auto seed = detail::param<std::uint64_t>(p, "seed", 1);
  rep.params = {{"rs", rs}, {"count", count}, {"exact_size", tiny}, {"seed", seed}};
  const auto X = sprinkle_n(Region::diamond(1, 2.0), count, seed);
  const auto small = sprinkle_n(Region::diamond(1, 2.0), tiny, seed + 1);
  double smax = 0;
  for (double v : X.sigma.data()) smax = std::max(smax, std::abs(v));
  double small_max = 0;
  for (double v : small.sigma.data()) small_max = std::max(small_max, std::abs(v));
  Table t({"r", "identity_distortion", "predicted", "exact_gh_tiny", "bound_tiny"});
  for (double r : rs) {
    const double d = dist_minus(identity_correspondence(X.size()), X, scale(X, r));
    const double pred = std::abs(r - 1) * smax;
    const double gh = ghdist_minus_exact(small, scale(small, r)).value;
    const double bound = std::abs(r - 1) * small_max / 2;
    t.row({r, d, pred, gh, bound});
    rep.check("identity distortion r=" + std::to_string(r), std::abs(d - pred), "<= 1e-12 * max|sigma|",
              std::abs(d - pred) <= 1e-12 * std::max(1.0, smax));
    rep.check("exact GH below identity bound r=" + std::to_string(r), gh - bound, "<= tol", gh <= bound + tol.axiom);
    if (r == 1.0) rep.check("r = 1 gives 0", d, "== 0", d == 0);
  }
  rep.tables.emplace("scaling", std::move(t));
  return rep;
}

struct DmRun {
  std::size_t spatial_dim = 1, points = 0;
  DmEstimate estimate;
};

inline DmRun dm_run(std::size_t spatial_dim, std::size_t count, std::size_t levels, std::uint64_t seed,
                    const DmOptions& o = {}) {
  const Region R = Region::diamond(spatial_dim, 2.0);
  Rng rng(seed);
  const auto pts = uniform_points(R, count, rng);
  const auto pom = pom_from_coords(pts, R.volume() / static_cast<double>(count));
  const Index b = detail::nearest_to(pts, Coords(spatial_dim + 1, 0.0));
  return {spatial_dim, count, dm_dimension(pom, b, levels, o)};
}

inline ExperimentReport dm_recovery(const json& p, const Tolerances& tol) {
  ExperimentReport rep;
  rep.name = "dm-recovery";
  const auto dims = detail::param<std::vector<std::size_t>>(p, "spatial_dims", {1, 2});
  const auto counts = detail::param<std::vector<std::size_t>>(p, "counts", {20000, 20000});
  const std::size_t levels = detail::param<std::size_t>(p, "levels", 6);
  const auto seed = detail::param<std::uint64_t>(p, "seed", 5);
  if (dims.size() != counts.size()) throw MalformedInput("dm-recovery: spatial_dims and counts differ in length");
  rep.params = {{"spatial_dims", dims}, {"counts", counts}, {"levels", levels}, {"seed", seed}};
  Table summary({"dimension", "points", "estimate", "slope", "extrapolated"});
  Table lv({"dimension", "level", "target", "volume", "points", "phi", "level_dimension"});
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const auto run = dm_run(dims[k], counts[k], levels, seed + k);
    const double D = static_cast<double>(dims[k] + 1);
    summary.row({D, static_cast<double>(counts[k]), run.estimate.estimate, run.estimate.slope, run.estimate.extrapolated});
    for (std::size_t l = 0; l < run.estimate.levels.size(); ++l) {
      const auto& L = run.estimate.levels[l];
      lv.row({D, static_cast<double>(l), L.target, L.volume, static_cast<double>(L.points), L.phi, L.dimension});
    }
    if (dims[k] == 1) rep.check_range("Dm in 1+1", run.estimate.estimate, tol.dm2_lo, tol.dm2_hi);
    else if (dims[k] == 2) rep.check_range("Dm in 1+2", run.estimate.estimate, tol.dm3_lo, tol.dm3_hi);
  }
  rep.tables.emplace("summary", std::move(summary));
  rep.tables.emplace("levels", std::move(lv));
  return rep;
}

struct ReconstructionRun {
  std::size_t points = 0, pairs = 0;
  double dimension = 0;
  double median = 0, mean = 0, p90 = 0, signed_median = 0;
  std::vector<std::array<double, 4>> bins;  // lo, hi, pairs, median relative error
};

inline ReconstructionRun reconstruction_run(std::size_t count, std::uint64_t seed, std::size_t noise_floor, double cut,
                                            double dimension = -1) {
  const Region R = Region::diamond(1, 2.0);
  Rng rng(seed);
  const auto pts = uniform_points(R, count, rng);
  const auto pom = pom_from_coords(pts, R.volume() / static_cast<double>(count));
  ReconstructionRun run;
  run.points = count;
  if (dimension <= 0) {
    const Index b = detail::nearest_to(pts, {0.0, 0.0});
    dimension = dm_dimension(pom, b, 6).estimate;
  }
  run.dimension = dimension;
  const std::vector<double> dm(count, dimension);
  const auto rec = reconstruct_sigma(pom, dm, noise_floor);
  double smax = 0;
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < count; ++j) smax = std::max(smax, minkowski_sigma(pts[i], pts[j]));
  std::vector<double> err, signed_err;
  constexpr int kBins = 8;
  std::vector<std::vector<double>> by_bin(kBins);
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < count; ++j) {
      const double s = minkowski_sigma(pts[i], pts[j]);
      if (s < cut * smax || s <= 0) continue;
      const double e = (rec.sigma(i, j) - s) / s;
      err.push_back(std::abs(e));
      signed_err.push_back(e);
      const int b = std::min(kBins - 1, static_cast<int>((s / smax - cut) / (1 - cut) * kBins));
      by_bin[b].push_back(std::abs(e));
    }
  auto median = [](std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  run.pairs = err.size();
  run.median = median(err);
  run.signed_median = median(signed_err);
  run.mean = err.empty() ? 0 : std::accumulate(err.begin(), err.end(), 0.0) / static_cast<double>(err.size());
  if (!err.empty()) {
    std::vector<double> v = err;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() * 9 / 10), v.end());
    run.p90 = v[v.size() * 9 / 10];
  }
  for (int b = 0; b < kBins; ++b) {
    const double lo = cut + (1 - cut) * b / kBins, hi = cut + (1 - cut) * (b + 1) / kBins;
    run.bins.push_back({lo * smax, hi * smax, static_cast<double>(by_bin[b].size()), median(by_bin[b])});
  }
  return run;
}

inline ExperimentReport reconstruction(const json& p, const Tolerances& tol) {
  ExperimentReport rep;
  rep.name = "reconstruction";
  const std::size_t count = detail::param<std::size_t>(p, "count", 5000);
  const auto seed = detail::param<std::uint64_t>(p, "seed", 11);
  const std::size_t floor = detail::param<std::size_t>(p, "noise_floor", 32);
  rep.params = {{"count", count}, {"seed", seed}, {"noise_floor", floor}, {"cut", tol.reconstruction_cut}};
  const auto run = reconstruction_run(count, seed, floor, tol.reconstruction_cut);
  Table t({"sigma_lo", "sigma_hi", "pairs", "median_rel_error"});
  for (const auto& b : run.bins) t.row({b[0], b[1], b[2], b[3]});
  rep.extra = {{"dimension_used", run.dimension}, {"pairs", run.pairs}, {"mean", run.mean}, {"p90", run.p90},
               {"signed_median", run.signed_median}};
  std::ostringstream b;
  b << "< " << tol.reconstruction_median;
  rep.check("median relative error", run.median, b.str(), run.median < tol.reconstruction_median);
  rep.tables.emplace("errors", std::move(t));
  return rep;
}

// Cylinders over shrinking circles: the level sets shrink to points and the whole
// cylinder approaches the time interval.
inline ExperimentReport collapse(const json& p, const Tolerances&) {
  ExperimentReport rep;
  rep.name = "collapse";
  const auto radii = detail::param<std::vector<double>>(p, "radii", {0.2, 0.1, 0.05, 0.025});
  const std::size_t k = detail::param<std::size_t>(p, "net_size", 16);
  const std::size_t nt = detail::param<std::size_t>(p, "time_steps", 9);
  const auto levels = detail::param<std::vector<double>>(p, "levels", {0.25, 0.5, 0.75});
  const auto seed = detail::param<std::uint64_t>(p, "seed", 3);
  rep.params = {{"radii", radii}, {"net_size", k}, {"time_steps", nt}, {"levels", levels}, {"seed", seed}};
  if (nt < 2) throw InvalidArgument("collapse: need at least two time steps");
  std::vector<double> times(nt);
  for (std::size_t a = 0; a < nt; ++a) times[a] = static_cast<double>(a) / static_cast<double>(nt - 1);
  const auto interval = causal_cylinder(circle_net(1), times);
  const auto interval_d = noldus_metric(interval, 1);
  Table t({"radius", "max_level_diameter", "level_gh_max", "gh_to_interval_bound"});
  std::vector<double> diam, gh;
  AnnealOptions ao;
  ao.seed = seed;
  for (double rad : radii) {
    const auto cyl = causal_cylinder(circle_net(k, rad), times);
    std::vector<double> tf(cyl.size());
    for (Index i = 0; i < cyl.size(); ++i) tf[i] = (*cyl.labels)[i][0];
    const auto D = noldus_metric(cyl, 1);
    const auto fam = level_set_family(cyl, tf, levels, 1e-9, 1, -1, ao, &D);
    double dmax = 0;
    for (const auto& L : fam.levels)
      for (double v : L.restricted.d.data()) dmax = std::max(dmax, v);
    double lg = 0;
    for (double v : fam.gh) lg = std::max(lg, v);
    diam.push_back(dmax);
    // upper bound on the GH distance through the projection (t, m) -> t
    Correspondence proj{cyl.size(), nt, {}};
    for (Index i = 0; i < cyl.size(); ++i) proj.pairs.emplace_back(i, i / k);
    gh.push_back(distortion(proj, D.d, interval_d.d) / 2);
    t.row({rad, dmax, lg, gh.back()});
  }
  rep.check("level diameters shrink", diam.empty() ? 0 : diam.back(), "decreasing in radius",
            detail::strictly_decreasing(diam));
  rep.check("GH distance to the interval shrinks", gh.empty() ? 0 : gh.back(), "decreasing in radius",
            detail::strictly_decreasing(gh));
  rep.tables.emplace("collapse", std::move(t));
  return rep;
}

struct RcfRun {
  std::size_t points = 0, slice = 0;
  bool cauchy = false, zero_locus = false, increasing = false;
  PairAudit anti_lipschitz, rushing;
  GeneralizedCauchyAudit generalized;
  CauchyTimeReport report;
};

// Sprinkled 1+1 slab with an embedded slice at t = 0, time function built on it.
inline RcfRun rcf_run(std::size_t count, std::uint64_t seed, double a = 1.0, double half_width = 1.0) {
  const Region R = Region::slab(1, a, half_width);
  Rng rng(seed);
  auto pts = uniform_points(R, count, rng);
  const double spacing = std::sqrt(R.volume() / static_cast<double>(count));
  const auto ss = embed_slice(std::move(pts), 0.0, -half_width, half_width, spacing);
  const auto sp = space_from_coords(ss.coords, R.volume() / static_cast<double>(count));
  const CauchySubset S{ss.slice};
  RcfRun run;
  run.points = sp.size();
  run.slice = S.idx.size();
  run.cauchy = audit_cauchy(sp, S).ok();
  const auto res = build_cauchy_time(sp, S);
  const auto& T = res.time.values;
  std::vector<char> in(sp.size(), 0);
  for (Index v : S.idx) in[v] = 1;
  run.zero_locus = true;
  for (Index x = 0; x < sp.size(); ++x) run.zero_locus = run.zero_locus && ((T[x] == 0.0) == static_cast<bool>(in[x]));
  run.anti_lipschitz = is_anti_lipschitz(sp, T, *res.time.metric);
  run.rushing = is_rushing(sp, T);
  run.generalized = is_generalized_cauchy(sp, T);
  // maximal chains are link paths; strict increase on every link covers them all
  const BitMatrix link = hasse_links(derived_causal(sp));
  run.increasing = true;
  for (Index x = 0; x < sp.size(); ++x)
    link.for_each_in_row(x, [&](Index y) { run.increasing = run.increasing && T[y] > T[x]; });
  run.report = res.report;
  return run;
}

inline ExperimentReport rcf_audit(const json& p, const Tolerances&) {
  ExperimentReport rep;
  rep.name = "rcf-audit";
  const std::size_t count = detail::param<std::size_t>(p, "count", 2000);
  const auto seed = detail::param<std::uint64_t>(p, "seed", 7);
  rep.params = {{"count", count}, {"seed", seed}};
  const auto run = rcf_run(count, seed);
  rep.extra = {{"points", run.points},
               {"slice", run.slice},
               {"correction", run.report.correction},
               {"cover_pairs", run.report.cover_pairs},
               {"uncovered", run.report.uncovered},
               {"weight_iterations", run.report.iterations},
               {"recipe_violations", run.report.recipe_audit.violations},
               {"recipe_worst", run.report.recipe_audit.worst},
               {"generalized_cauchy_past_band", run.generalized.past_band},
               {"generalized_cauchy_future_band", run.generalized.future_band}};
  rep.check("slice is Cauchy", run.cauchy, "true", run.cauchy);
  rep.check("zero locus equals S", run.zero_locus, "true", run.zero_locus);
  rep.check("anti-Lipschitz violations", static_cast<double>(run.anti_lipschitz.violations), "== 0",
            run.anti_lipschitz.ok);
  rep.check("rushing violations", static_cast<double>(run.rushing.violations), "== 0", run.rushing.ok);
  rep.check("generalized Cauchy", run.generalized.ok, "true", run.generalized.ok);
  rep.check("strictly increasing along maximal chains", run.increasing, "true", run.increasing);
  return rep;
}

// ------------------------------------------------------- precompactness

struct ApproximantRow {
  std::size_t member = 0;
  double eps = 0;
  std::size_t size = 0;      // N(eps) for this member
  double dist_minus = 0;     // audited distortion of the nearest-point correspondence
  bool audit = false;        // dist_minus < ratio * eps
};

struct PrecompactnessReport {
  std::vector<double> diameters;  // diam^- per member
  double diameter_bound = 0;
  bool diameter_ok = false;
  std::vector<ApproximantRow> approximants;
  std::vector<double> eps;
  std::vector<std::size_t> max_n;  // sup over members of N(eps), per eps
  double stability = 0;            // worst max/min of N(eps) across members
  bool approximants_ok = false;
  bool ok() const { return diameter_ok && approximants_ok; }
};

// Greedy farthest-point eps-net of X in the sup metric of σ; the nearest-point
// correspondence to the net has σ-distortion at most twice the covering radius.
inline std::vector<Index> eps_approximant(const SquareMatrix<double>& dplus, double eps) {
  const std::size_t n = dplus.size();
  if (n == 0) return {};
  std::vector<Index> net{0};
  std::vector<double> cover(dplus.row(0).begin(), dplus.row(0).end());
  while (true) {
    const auto it = std::max_element(cover.begin(), cover.end());
    if (*it <= eps) break;
    const Index far = static_cast<Index>(it - cover.begin());
    net.push_back(far);
    for (Index x = 0; x < n; ++x) cover[x] = std::min(cover[x], dplus(far, x));
  }
  return net;
}

inline PrecompactnessReport precompactness_predicates(const std::vector<FiniteLorentzSpace>& family,
                                                      const std::vector<double>& eps, double diameter_bound,
                                                      double stability_limit = 1.5,
                                                      const Tolerances& tol = {}) {
  PrecompactnessReport rep;
  rep.eps = eps;
  rep.diameter_bound = diameter_bound;
  rep.diameter_ok = true;
  for (const auto& X : family) {
    rep.diameters.push_back(diam_minus(X));
    rep.diameter_ok = rep.diameter_ok && rep.diameters.back() <= diameter_bound;
  }
  rep.approximants_ok = true;
  std::vector<std::vector<std::size_t>> sizes(eps.size());
  for (std::size_t m = 0; m < family.size(); ++m) {
    const auto& X = family[m];
    const auto dplus = sup_metric(X.sigma);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const auto net = eps_approximant(dplus, eps[e]);
      Correspondence R{X.size(), net.size(), {}};
      for (Index x = 0; x < X.size(); ++x) {
        Index best = 0;
        for (Index k = 1; k < net.size(); ++k)
          if (dplus(x, net[k]) < dplus(x, net[best])) best = k;
        R.pairs.emplace_back(x, best);
      }
      for (Index k = 0; k < net.size(); ++k) R.pairs.emplace_back(net[k], k);
      R.normalize();
      const double d = dist_minus(R, X, subspace(X, net));
      const bool audit = d <= tol.precompact_eps_ratio * eps[e];
      rep.approximants.push_back({m, eps[e], net.size(), d, audit});
      rep.approximants_ok = rep.approximants_ok && audit;
      sizes[e].push_back(net.size());
    }
  }
  for (const auto& v : sizes) {
    if (v.empty()) continue;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    rep.max_n.push_back(*hi);
    rep.stability = std::max(rep.stability, static_cast<double>(*hi) / static_cast<double>(std::max<std::size_t>(1, *lo)));
  }
  rep.approximants_ok = rep.approximants_ok && rep.stability <= stability_limit;
  return rep;
}

// ------------------------------------------------------------- dispatch

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"lattice-convergence", "cylinder-convergence", "scaling", "dm-recovery",
                                              "reconstruction",      "collapse",             "rcf-audit"};
  return names;
}

// spec: {"name": ..., "params": {...}, "tolerances": {...}}
inline ExperimentReport run_experiment(const json& spec) {
  if (!spec.is_object() || !spec.contains("name") || !spec["name"].is_string())
    throw MalformedInput("experiment spec needs a string 'name'");
  for (auto it = spec.begin(); it != spec.end(); ++it)
    if (it.key() != "name" && it.key() != "params" && it.key() != "tolerances" && it.key() != "output")
      throw MalformedInput("unknown experiment spec key: " + it.key());
  const std::string name = spec["name"];
  const json params = spec.value("params", json::object());
  if (!params.is_object()) throw MalformedInput("experiment 'params' must be an object");
  const Tolerances tol = tolerances_from_json(spec.value("tolerances", json::object()));
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (name == "lattice-convergence") rep = lattice_convergence(params, tol);
  else if (name == "cylinder-convergence") rep = cylinder_convergence(params, tol);
  else if (name == "scaling") rep = scaling(params, tol);
  else if (name == "dm-recovery") rep = dm_recovery(params, tol);
  else if (name == "reconstruction") rep = reconstruction(params, tol);
  else if (name == "collapse") rep = collapse(params, tol);
  else if (name == "rcf-audit") rep = rcf_audit(params, tol);
  else throw InvalidArgument("unknown experiment: " + name);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace lorgh
