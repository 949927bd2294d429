// lorgh command line: model generation, distances, dimensions, Cauchy tools and
// the named experiments. Exit codes: 0 success (and every declared tolerance met),
// 1 a check or tolerance failed, 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "lorgh/lorgh.hpp"

using namespace lorgh;
namespace fs = std::filesystem;

namespace {

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

std::vector<Index> parse_indices(const std::string& s) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0) throw InvalidArgument("bad index list entry: " + tok);
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(tok, &pos));
    if (pos != tok.size()) throw InvalidArgument("bad number: " + tok);
  }
  return out;
}

json audit_json(const PairAudit& a) {
  json w = json::array();
  for (auto [x, y] : a.witnesses) w.push_back({x, y});
  return {{"ok", a.ok}, {"violations", a.violations}, {"worst", a.worst}, {"witnesses", w}};
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string model = "sprinkle", region = "diamond", out;
  std::size_t dim = 1, count = 0, net = 8;
  double density = 0, tau = 2, a = 1, half_width = 1, radius = 1;
  int n = 4;
  double r = 1, s = 1;
  std::string times = "0,0.5,1";
  std::uint64_t seed = 1;
  std::vector<double> box{0.05, 1.05, -0.5, 0.5};
};

FiniteLorentzSpace generate(const GenArgs& g) {
  if (g.model == "lattice") return lattice(g.n, g.r, g.s, g.dim);
  if (g.model == "cylinder") return causal_cylinder(circle_net(g.net, g.radius), parse_reals(g.times));
  Region R;
  if (g.model == "pole") {
    if (g.box.size() != 4) throw InvalidArgument("--box needs t_lo t_hi x_lo x_hi");
    R = Region::box({{g.box[0], g.box[1]}, {g.box[2], g.box[3]}});
  } else if (g.model == "sprinkle") {
    if (g.region == "diamond") R = Region::diamond(g.dim, g.tau);
    else if (g.region == "slab") R = Region::slab(g.dim, g.a, g.half_width);
    else throw InvalidArgument("unknown region: " + g.region);
  } else {
    throw InvalidArgument("unknown model: " + g.model);
  }
  std::vector<Coords> pts;
  double w;
  if (g.count > 0) {
    Rng rng(g.seed);
    pts = uniform_points(R, g.count, rng);
    w = R.volume() / static_cast<double>(g.count);
  } else {
    if (!(g.density > 0)) throw InvalidArgument("give --count or --density");
    pts = sprinkle_coords(R, g.density, g.seed);
    w = 1.0 / g.density;
  }
  if (g.model == "pole") return space_from_coords(pts, pole_sigma, w);
  return space_from_coords(pts, w);
}

// --- experiments -------------------------------------------------------------

int run_experiment_cmd(const std::string& name, const std::string& params, const std::string& tol_file,
                       const std::string& spec_file, const std::string& outdir, long seed) {
  json spec = spec_file.empty() ? json{{"name", name}} : read_json_file(spec_file);
  if (!name.empty()) spec["name"] = name;
  if (!params.empty()) {
    json p = json::parse(params, nullptr, false);
    if (p.is_discarded() || !p.is_object()) throw MalformedInput("--params must be a JSON object");
    json& dst = spec["params"];
    if (!dst.is_object()) dst = json::object();
    for (auto it = p.begin(); it != p.end(); ++it) dst[it.key()] = it.value();
  }
  if (seed >= 0) spec["params"]["seed"] = seed;
  if (!tol_file.empty()) spec["tolerances"] = read_json_file(tol_file);
  const ExperimentReport rep = run_experiment(spec);
  const json summary = summary_json(rep);
  if (!outdir.empty()) {
    fs::create_directories(outdir);
    write_text_file((fs::path(outdir) / (rep.name + ".summary.json")).string(), summary.dump(1) + "\n");
    for (const auto& [k, t] : rep.tables)
      write_text_file((fs::path(outdir) / (rep.name + "." + k + ".csv")).string(), t.csv());
  }
  std::cout << summary.dump(1) << "\n";
  for (const auto& c : rep.checks)
    std::fprintf(stderr, "%s  %s = %.6g (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.bound.c_str());
  std::fprintf(stderr, "%s finished in %.2f s\n", rep.name.c_str(), rep.seconds);
  return rep.pass() ? 0 : 1;
}

CauchySubset slice_from(const FiniteLorentzSpace& s, const std::string& indices, double level, double band) {
  if (!indices.empty()) return {parse_indices(indices)};
  if (!s.labels) throw InvalidArgument("give --slice indices, or a space with coordinate labels and --level/--band");
  CauchySubset S;
  for (Index x = 0; x < s.size(); ++x)
    if (std::abs((*s.labels)[x][0] - level) <= band) S.idx.push_back(x);
  if (S.idx.empty()) throw ResolutionError("no point within the band around the level");
  return S;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lorgh: Lorentzian Gromov-Hausdorff toolkit for finite models"};
  app.require_subcommand(1);
  int rc = 0;

  // gen
  GenArgs g;
  auto* gen = app.add_subcommand("gen", "generate a model space as JSON");
  gen->add_option("--model", g.model, "sprinkle | lattice | cylinder | pole")->capture_default_str();
  gen->add_option("--region", g.region, "diamond | slab (sprinkle)")->capture_default_str();
  gen->add_option("--dim", g.dim, "spatial dimension")->capture_default_str();
  gen->add_option("--count", g.count, "exact number of points");
  gen->add_option("--density", g.density, "Poisson density");
  gen->add_option("--tau", g.tau, "diamond proper time")->capture_default_str();
  gen->add_option("--a", g.a, "slab half height")->capture_default_str();
  gen->add_option("--half-width", g.half_width, "slab half width")->capture_default_str();
  gen->add_option("--n", g.n, "lattice refinement")->capture_default_str();
  gen->add_option("--r", g.r, "lattice time truncation")->capture_default_str();
  gen->add_option("--s", g.s, "lattice space truncation")->capture_default_str();
  gen->add_option("--net", g.net, "cylinder: points on the circle")->capture_default_str();
  gen->add_option("--radius", g.radius, "cylinder: circle radius")->capture_default_str();
  gen->add_option("--times", g.times, "cylinder: comma separated times")->capture_default_str();
  gen->add_option("--box", g.box, "pole: t_lo t_hi x_lo x_hi")->expected(4);
  gen->add_option("--seed", g.seed)->capture_default_str();
  gen->add_option("-o,--output", g.out, "output file (default stdout)");
  gen->callback([&] { emit(g.out, to_json(generate(g)).dump() + "\n"); });

  // validate
  std::string in1, in2, out;
  double tol = kTol;
  auto* val = app.add_subcommand("validate", "check the Lorentzian distance axioms");
  val->add_option("space", in1)->required();
  val->add_option("--tol", tol)->capture_default_str();
  val->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    const auto r = validate_lorentz(s, tol);
    json v = json::array();
    for (const auto& x : r.violations) v.push_back({{"axiom", to_string(x.axiom)}, {"tuple", x.tuple}, {"amount", x.amount}});
    std::cout << json{{"ok", r.ok()}, {"total", r.total}, {"violations", v}}.dump(1) << "\n";
    rc = r.ok() ? 0 : 1;
  });

  // ghdist
  std::string gh_mode = "minus", gh_method = "exact";
  AnnealOptions ao;
  double budget = kDefaultExactBudget;
  auto* gh = app.add_subcommand("ghdist", "Gromov-Hausdorff distance between two spaces");
  gh->add_option("X", in1)->required();
  gh->add_option("Y", in2)->required();
  gh->add_option("--mode", gh_mode, "minus | plus")->capture_default_str();
  gh->add_option("--method", gh_method, "exact | anneal")->capture_default_str();
  gh->add_option("--budget", budget, "exact search budget")->capture_default_str();
  gh->add_option("--steps", ao.steps, "annealing steps per chain")->capture_default_str();
  gh->add_option("--cooling", ao.cooling)->capture_default_str();
  gh->add_option("--chains", ao.chains)->capture_default_str();
  gh->add_option("--seed", ao.seed)->capture_default_str();
  gh->callback([&] {
    const auto X = space_from_json(read_json_file(in1)), Y = space_from_json(read_json_file(in2));
    const bool exact = gh_method == "exact";
    if (!exact && gh_method != "anneal") throw InvalidArgument("unknown method: " + gh_method);
    GhResult r;
    if (gh_mode == "minus") r = exact ? ghdist_minus_exact(X, Y, budget) : ghdist_minus_anneal(X, Y, ao);
    else if (gh_mode == "plus") r = ghdist_plus(X, Y, exact ? GhMethod::Exact : GhMethod::Anneal, budget, ao);
    else throw InvalidArgument("unknown mode: " + gh_mode);
    std::cout << json{{"mode", gh_mode}, {"method", r.method}, {"value", r.value}, {"witness", r.witness.pairs},
                      {"budget", r.budget}}
                     .dump(1)
              << "\n";
  });

  // drfamily
  double rr = 0;
  auto* dr = app.add_subcommand("drfamily", "D_r metric of a weighted space");
  dr->add_option("space", in1)->required();
  dr->add_option("--r", rr, "r in [-1, 1]")->capture_default_str();
  dr->add_option("-o,--output", out, "CSV output (default stdout)");
  dr->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    const auto d = d_r(s, rr);
    emit(out, matrix_csv(d.d, s.points));
  });

  // detect
  auto* det = app.add_subcommand("detect", "recover the symmetrized chronological relation from D_r values");
  det->add_option("space", in1)->required();
  det->add_option("-o,--output", out, "CSV output of the detected relation");
  det->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    const BitMatrix found = detect_chron_all(s);
    const BitMatrix truth = chronological_pairs(s);
    const BitMatrix truth_t = truth.transposed();
    std::size_t errors = 0, links = 0;
    for (Index x = 0; x < s.size(); ++x)
      for (Index y = 0; y < s.size(); ++y) {
        if (found.test(x, y) == (truth.test(x, y) || truth.test(y, x))) continue;
        ++errors;
        // a chronological pair with nothing strictly between its ends carries no measure
        const Index lo = truth.test(x, y) ? x : y, hi = lo == x ? y : x;
        if ((truth.test(x, y) || truth.test(y, x)) && !and_any(truth.row(lo), truth_t.row(hi))) ++links;
      }
    if (!out.empty()) emit(out, relation_csv(found, s.points));
    std::cout << json{{"points", s.size()}, {"errors_vs_sigma", errors}, {"errors_on_empty_intervals", links}}.dump(1)
              << "\n";
  });

  // dim
  std::string dim_method = "dm";
  Index point = 0;
  std::size_t levels = 5;
  int max_k = 6;
  auto* dim = app.add_subcommand("dim", "dimension estimates at a point or of an order");
  dim->add_option("space", in1)->required();
  dim->add_option("--method", dim_method, "dm | dushnik-miller | horismoticity | blumenthal")->capture_default_str();
  dim->add_option("--point", point)->capture_default_str();
  dim->add_option("--levels", levels)->capture_default_str();
  dim->add_option("--max", max_k, "search bound")->capture_default_str();
  double dist_tol = 1e-9;
  dim->add_option("--tol", dist_tol, "blumenthal: distances closer than this count as equal (use ~h/4 on grid nets)")
      ->capture_default_str();
  dim->callback([&] {
    const json j = read_json_file(in1);
    if (dim_method == "dm") {
      const auto est = dm_dimension(pom_from_json(j), point, levels);
      json lv = json::array();
      for (const auto& L : est.levels)
        lv.push_back({{"volume", L.volume}, {"points", L.points}, {"phi", L.phi}, {"dimension", L.dimension}});
      std::cout << json{{"estimate", est.estimate}, {"slope", est.slope}, {"extrapolated", est.extrapolated},
                        {"levels", lv}}
                       .dump(1)
                << "\n";
    } else if (dim_method == "dushnik-miller") {
      const auto r = dushnik_miller(pom_from_json(j).leq, max_k);
      std::cout << json{{"dimension", r.dimension}, {"realizer", r.realizer.orders}}.dump(1) << "\n";
    } else if (dim_method == "horismoticity") {
      const auto r = horismoticity(space_from_json(j), point, max_k);
      std::cout << json{{"horismoticity", r.value}, {"witness", r.witness}}.dump(1) << "\n";
    } else if (dim_method == "blumenthal") {
      const auto r = blumenthal_dim(metric_from_json(j), point, max_k, dist_tol);
      std::cout << json{{"blumenthal", r.value}, {"witness", r.witness}}.dump(1) << "\n";
    } else {
      throw InvalidArgument("unknown method: " + dim_method);
    }
  });

  // reconstruct
  double dm_value = -1;
  std::size_t floor = 32;
  auto* rec = app.add_subcommand("reconstruct", "rebuild sigma from a weighted order");
  rec->add_option("pom", in1)->required();
  rec->add_option("-o,--output", out, "output space JSON (default stdout)");
  rec->add_option("--dm", dm_value, "dimension used on every point (default: dm estimate at --point)");
  rec->add_option("--point", point)->capture_default_str();
  rec->add_option("--noise-floor", floor)->capture_default_str();
  rec->callback([&] {
    const auto p = pom_from_json(read_json_file(in1));
    const double D = dm_value > 0 ? dm_value : dm_dimension(p, point, 6).estimate;
    const std::vector<double> dm(p.size(), D);
    emit(out, to_json(reconstruct_sigma(p, dm, floor)).dump() + "\n");
  });

  // cauchy
  std::string slice;
  double level = 0, band = 0.05, pp = 1, radius = -1, level_band = 0.05;
  std::string level_list = "-0.5,0,0.5";
  auto* cau = app.add_subcommand("cauchy", "Cauchy slice metrics and time functions");
  cau->require_subcommand(1);
  auto add_common = [&](CLI::App* c, bool needs_slice) {
    c->add_option("space", in1)->required();
    c->add_option("--p", pp, "power p >= 1")->capture_default_str();
    c->add_option("-o,--output", out, "output file (default stdout)");
    if (needs_slice) {
      c->add_option("--slice", slice, "comma separated indices of S");
      c->add_option("--level", level, "with labels: S = points with |t - level| <= band")->capture_default_str();
      c->add_option("--band", band)->capture_default_str();
    }
  };
  auto* noldus = cau->add_subcommand("noldus", "Noldus metric, optionally intrinsified");
  add_common(noldus, false);
  noldus->add_option("--radius", radius, "intrinsify with this connect radius (> 0)");
  noldus->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    auto m = noldus_metric(s, pp);
    if (radius > 0) m = intrinsify(m, radius);
    emit(out, matrix_csv(m.d, s.points));
  });
  auto* ds = cau->add_subcommand("ds", "chain-diamond metric d_S on a Cauchy slice");
  add_common(ds, true);
  ds->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    const auto S = slice_from(s, slice, level, band);
    const auto m = chain_diamond_metric(s, S);
    emit(out, matrix_csv(m.d, m.points));
  });
  auto* tf = cau->add_subcommand("timefn", "Cauchy time function vanishing exactly on S, with audits");
  add_common(tf, true);
  tf->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    const auto S = slice_from(s, slice, level, band);
    const auto ca = audit_cauchy(s, S);
    CauchyTimeOptions o;
    o.p = pp;
    const auto res = build_cauchy_time(s, S, o);
    const auto& T = res.time.values;
    const auto al = is_anti_lipschitz(s, T, *res.time.metric);
    const auto ru = is_rushing(s, T);
    const auto gc = is_generalized_cauchy(s, T);
    json j{{"values", T},
           {"slice_is_cauchy", ca.ok()},
           {"anti_lipschitz", audit_json(al)},
           {"rushing", audit_json(ru)},
           {"generalized_cauchy", gc.ok},
           {"correction", res.report.correction},
           {"recipe_audit", audit_json(res.report.recipe_audit)}};
    emit(out, j.dump(1) + "\n");
    rc = ca.ok() && al.ok && ru.ok && gc.ok ? 0 : 1;
  });
  auto* lv = cau->add_subcommand("levels", "level sets of a time function and their GH profile");
  add_common(lv, true);
  lv->add_option("--levels", level_list, "comma separated levels")->capture_default_str();
  lv->add_option("--level-band", level_band, "half width of each level band")->capture_default_str();
  lv->callback([&] {
    const auto s = space_from_json(read_json_file(in1));
    const auto S = slice_from(s, slice, level, band);
    CauchyTimeOptions o;
    o.p = pp;
    const auto res = build_cauchy_time(s, S, o);
    const auto fam = level_set_family(s, res.time.values, parse_reals(level_list), level_band, pp);
    json L = json::array();
    for (const auto& l : fam.levels) L.push_back({{"level", l.level}, {"points", l.band.idx}});
    emit(out, json{{"levels", L}, {"gh_consecutive", fam.gh}}.dump(1) + "\n");
  });

  // experiment
  std::string ename, eparams, etol, espec, eout;
  long eseed = -1;
  auto* ex = app.add_subcommand("experiment", "run a named experiment; exit 0 iff every tolerance is met");
  ex->add_option("name", ename, "one of: lattice-convergence cylinder-convergence scaling dm-recovery "
                                "reconstruction collapse rcf-audit");
  ex->add_option("--spec", espec, "experiment spec JSON {name, params, tolerances}");
  ex->add_option("--params", eparams, "JSON object merged into params");
  ex->add_option("--tolerances", etol, "tolerance JSON file");
  ex->add_option("--seed", eseed, "overrides params.seed");
  ex->add_option("--out", eout, "directory for CSV tables and the JSON summary");
  ex->callback([&] {
    if (ename.empty() && espec.empty()) throw InvalidArgument("give an experiment name or --spec");
    rc = run_experiment_cmd(ename, eparams, etol, espec, eout, eseed);
  });

  // precompact
  std::string sizes = "4,8,16";
  double diam_bound = 4;
  std::string eps_list = "0.5,0.25";
  bool scaled = false;
  auto* pc = app.add_subcommand("precompact", "precompactness predicates on the lattice family");
  pc->add_option("--sizes", sizes, "lattice refinements n")->capture_default_str();
  pc->add_option("--eps", eps_list)->capture_default_str();
  pc->add_option("--diameter-bound", diam_bound)->capture_default_str();
  pc->add_flag("--scaled", scaled, "use scale(lattice(4,1,1), n) instead of lattice(n,1,1)");
  pc->callback([&] {
    std::vector<FiniteLorentzSpace> fam;
    for (Index n : parse_indices(sizes))
      fam.push_back(scaled ? scale(lattice(4, 1, 1), static_cast<double>(n)) : lattice(static_cast<int>(n), 1, 1));
    const auto r = precompactness_predicates(fam, parse_reals(eps_list), diam_bound);
    json rows = json::array();
    for (const auto& a : r.approximants)
      rows.push_back({{"member", a.member}, {"eps", a.eps}, {"size", a.size}, {"dist_minus", a.dist_minus}, {"ok", a.audit}});
    std::cout << json{{"diameters", r.diameters}, {"diameter_ok", r.diameter_ok}, {"approximants", rows},
                      {"max_n", r.max_n}, {"stability", r.stability}, {"approximants_ok", r.approximants_ok}}
                     .dump(1)
              << "\n";
    rc = r.diameter_ok && r.approximants_ok ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const lorgh::Error& e) {
    std::fprintf(stderr, "lorgh: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lorgh: %s\n", e.what());
    return 2;
  }
  return rc;
}
