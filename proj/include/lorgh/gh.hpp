#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lorgh/core.hpp"
#include "lorgh/models.hpp"
#include "lorgh/parallel.hpp"
#include "lorgh/rng.hpp"

namespace lorgh {

// Relation between {0..nx-1} and {0..ny-1}; valid when left- and right-total.
struct Correspondence {
  std::size_t nx = 0, ny = 0;
  std::vector<std::pair<Index, Index>> pairs;

  void normalize() {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  }
  bool operator==(const Correspondence&) const = default;
};

inline bool is_valid(const Correspondence& R) {
  std::vector<char> lx(R.nx, 0), ry(R.ny, 0);
  for (auto [x, y] : R.pairs) {
    if (x >= R.nx || y >= R.ny) return false;
    lx[x] = ry[y] = 1;
  }
  return std::all_of(lx.begin(), lx.end(), [](char c) { return c; }) &&
         std::all_of(ry.begin(), ry.end(), [](char c) { return c; });
}

inline void require_valid(const Correspondence& R, std::size_t nx, std::size_t ny) {
  if (R.nx != nx || R.ny != ny) throw InvalidArgument("correspondence sizes do not match the spaces");
  if (!is_valid(R)) throw InvalidArgument("relation is not a correspondence (not left- and right-total)");
}

inline Correspondence identity_correspondence(std::size_t n) {
  Correspondence R{n, n, {}};
  for (Index i = 0; i < n; ++i) R.pairs.emplace_back(i, i);
  return R;
}

// graph(f) together with the inverse of graph(g)
inline Correspondence from_maps(const std::vector<Index>& f, const std::vector<Index>& g) {
  Correspondence R{f.size(), g.size(), {}};
  for (Index x = 0; x < f.size(); ++x) R.pairs.emplace_back(x, f[x]);
  for (Index y = 0; y < g.size(); ++y) R.pairs.emplace_back(g[y], y);
  R.normalize();
  return R;
}

namespace detail {
inline double gap(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
  return std::abs(a - b);
}
}  // namespace detail

// sup over related pairs (x,y), (x',y') of |dx(x,x') - dy(y,y')|.
// Per x, column extrema of dy over R(x) are tabulated once, so the cost is
// O(|R|·|Y| + |X|·|R|) rather than O(|R|^2).
inline double distortion(const Correspondence& R, const SquareMatrix<double>& dx, const SquareMatrix<double>& dy) {
  require_valid(R, dx.size(), dy.size());
  const std::size_t nx = dx.size(), ny = dy.size();
  std::vector<std::vector<Index>> img(nx);
  for (auto [x, y] : R.pairs) img[x].push_back(y);
  std::vector<double> best(nx, 0.0);
  parallel_for(0, nx, [&](Index x) {
    std::vector<double> lo(ny, kInf), hi(ny, -kInf);
    for (Index y : img[x]) {
      auto row = dy.row(y);
      for (Index y2 = 0; y2 < ny; ++y2) {
        lo[y2] = std::min(lo[y2], row[y2]);
        hi[y2] = std::max(hi[y2], row[y2]);
      }
    }
    double b = 0;
    for (Index x2 = 0; x2 < nx; ++x2) {
      const double v = dx(x, x2);
      for (Index y2 : img[x2]) b = std::max({b, detail::gap(v, lo[y2]), detail::gap(v, hi[y2])});
    }
    best[x] = b;
  });
  return *std::max_element(best.begin(), best.end());
}

inline double dist_minus(const Correspondence& R, const FiniteLorentzSpace& X, const FiniteLorentzSpace& Y) {
  return distortion(R, X.sigma, Y.sigma);
}

// d^+(x,x') = max_z |sigma(x,z) - sigma(x',z)|
inline SquareMatrix<double> sup_metric(const SquareMatrix<double>& sigma) {
  const std::size_t n = sigma.size();
  SquareMatrix<double> d(n);
  parallel_for(0, n, [&](Index i) {
    auto ri = sigma.row(i);
    for (Index j = i + 1; j < n; ++j) {
      auto rj = sigma.row(j);
      double m = 0;
      for (Index z = 0; z < n; ++z) m = std::max(m, std::abs(ri[z] - rj[z]));
      d(i, j) = m;
    }
  });
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) d(i, j) = d(j, i);
  return d;
}

inline FiniteMetricSpace sup_metric_space(const FiniteLorentzSpace& X) {
  return {X.points, sup_metric(X.sigma)};
}

inline double dist_plus(const Correspondence& R, const FiniteLorentzSpace& X, const FiniteLorentzSpace& Y) {
  return distortion(R, sup_metric(X.sigma), sup_metric(Y.sigma));
}

inline Correspondence compose(const Correspondence& R1, const Correspondence& R2) {
  if (R1.ny != R2.nx) throw InvalidArgument("compose: middle spaces differ");
  std::vector<std::vector<Index>> next(R2.nx);
  for (auto [y, z] : R2.pairs) next[y].push_back(z);
  Correspondence R{R1.nx, R2.ny, {}};
  for (auto [x, y] : R1.pairs)
    for (Index z : next[y]) R.pairs.emplace_back(x, z);
  R.normalize();
  return R;
}

// Correspondence between a product of spaces and a product of their partners.
inline Correspondence product_correspondence(const Correspondence& RX, const Correspondence& RY) {
  Correspondence R{RX.nx * RY.nx, RX.ny * RY.ny, {}};
  for (auto [x, a] : RX.pairs)
    for (auto [y, b] : RY.pairs) R.pairs.emplace_back(x * RY.nx + y, a * RY.ny + b);
  R.normalize();
  return R;
}

struct GhResult {
  double value = 0;  // half the distortion of the witness
  Correspondence witness;
  std::string method;
  double budget = 0;
  double evaluated = 0;
};

inline constexpr double kDefaultExactBudget = 1e8;

// Exact 1/2 min distortion over correspondences graph(f) ∪ graph(g)^{-1}.
// Adding pairs never lowers distortion, so a minimizer of this form exists.
// Ties keep the lexicographically first (f, g).
inline GhResult gh_exact(const SquareMatrix<double>& dx, const SquareMatrix<double>& dy,
                         double budget = kDefaultExactBudget) {
  const std::size_t m = dx.size(), k = dy.size();
  GhResult res;
  res.method = "exact";
  res.budget = budget;
  if (m == 0 || k == 0) {
    if (m != k) throw InvalidArgument("no correspondence between an empty and a nonempty space");
    res.witness = {0, 0, {}};
    return res;
  }
  const double nf = std::pow(static_cast<double>(k), static_cast<double>(m));
  const double ng = std::pow(static_cast<double>(m), static_cast<double>(k));
  if (nf * ng > budget)
    throw BoundExceeded("exact search needs " + std::to_string(nf * ng) + " evaluations, budget " +
                        std::to_string(budget) + "; use the annealing heuristic");
  const auto NF = static_cast<std::size_t>(nf), NG = static_cast<std::size_t>(ng);

  auto decode = [](std::size_t code, std::size_t len, std::size_t base, std::vector<Index>& out) {
    out.resize(len);
    for (std::size_t i = len; i-- > 0;) {
      out[i] = code % base;
      code /= base;
    }
  };
  // distortion of g alone, tabulated
  std::vector<double> pg(NG);
  {
    std::vector<Index> g;
    for (std::size_t c = 0; c < NG; ++c) {
      decode(c, k, m, g);
      double v = 0;
      for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) v = std::max(v, detail::gap(dx(g[a], g[b]), dy(a, b)));
      pg[c] = v;
    }
  }
  struct Best {
    double v = kInf;
    std::size_t f = 0, g = 0;
  };
  // Split the f range into contiguous blocks; each block keeps its first best.
  const std::size_t blocks = std::min<std::size_t>(NF, 64);
  std::vector<Best> bests(blocks);
  std::vector<double> evals(blocks, 0);
  parallel_for(0, blocks, [&](std::size_t blk) {
    const std::size_t lo = NF * blk / blocks, hi = NF * (blk + 1) / blocks;
    std::vector<Index> f, g;
    Best b;
    double ev = 0;
    for (std::size_t fc = lo; fc < hi; ++fc) {
      decode(fc, m, k, f);
      double vf = 0;
      for (Index a = 0; a < m && vf < b.v; ++a)
        for (Index c = 0; c < m; ++c) vf = std::max(vf, detail::gap(dx(a, c), dy(f[a], f[c])));
      if (vf >= b.v) continue;
      for (std::size_t gc = 0; gc < NG; ++gc) {
        ev += 1;
        double v = std::max(vf, pg[gc]);
        if (v >= b.v) continue;
        decode(gc, k, m, g);
        for (Index a = 0; a < m && v < b.v; ++a)
          for (Index y = 0; y < k; ++y) {
            v = std::max(v, detail::gap(dx(a, g[y]), dy(f[a], y)));
            v = std::max(v, detail::gap(dx(g[y], a), dy(y, f[a])));
          }
        if (v < b.v) b = {v, fc, gc};
      }
    }
    bests[blk] = b;
    evals[blk] = ev;
  });
  Best best;
  for (const Best& b : bests)
    if (b.v < best.v) best = b;
  std::vector<Index> f, g;
  decode(best.f, m, k, f);
  decode(best.g, k, m, g);
  res.value = best.v / 2;
  res.witness = from_maps(f, g);
  for (double e : evals) res.evaluated += e;
  return res;
}

struct AnnealOptions {
  std::uint64_t steps = 100000;  // per chain
  double cooling = 0.999;        // geometric factor per step
  double t0 = -1;                // initial temperature; <= 0 picks 0.1 x the largest |entry|
  std::uint64_t seed = 0;
  unsigned chains = 4;
};

namespace detail {

// One annealing chain over (f, g). Elements 0..m-1 are pairs (x, f(x)),
// elements m..m+k-1 are pairs (g(y), y). E(u,v) is the mismatch of two
// elements; the energy is the max of E, kept through per-row maxima.
class AnnealChain {
 public:
  AnnealChain(const SquareMatrix<double>& dx, const SquareMatrix<double>& dy, std::uint64_t seed)
      : dx_(dx), dy_(dy), m_(dx.size()), k_(dy.size()), N_(m_ + k_), rng_(seed),
        a_(N_), b_(N_), E_(N_), rowmax_(N_, 0), rowarg_(N_, 0) {
    for (Index x = 0; x < m_; ++x) a_[x] = x, b_[x] = rng_.index(k_);
    for (Index y = 0; y < k_; ++y) a_[m_ + y] = rng_.index(m_), b_[m_ + y] = y;
    for (Index u = 0; u < N_; ++u)
      for (Index v = 0; v < N_; ++v) E_(u, v) = term(u, v, a_[u], b_[u]);
    for (Index u = 0; u < N_; ++u) refresh_row(u);
  }

  double energy() const { return *std::max_element(rowmax_.begin(), rowmax_.end()); }

  // Moves are accepted on max + mean of the row maxima: the plain max is flat under most
  // single-point moves, the mean gives the walk a slope. The best state is tracked on max.
  double run(const AnnealOptions& o, double t0, std::vector<Index>& best_f, std::vector<Index>& best_g) {
    double e = energy();
    double score = e + mean_rowmax();
    double best = e;
    snapshot(best_f, best_g);
    double T = t0;
    std::vector<double> row(N_);
    for (std::uint64_t step = 0; step < o.steps; ++step) {
      const Index u = rng_.index(N_);
      Index na = a_[u], nb = b_[u];
      if (u < m_) {
        if (k_ < 2) continue;
        nb = (b_[u] + 1 + rng_.index(k_ - 1)) % k_;
      } else {
        if (m_ < 2) continue;
        na = (a_[u] + 1 + rng_.index(m_ - 1)) % m_;
      }
      double rmax = 0;
      for (Index v = 0; v < N_; ++v) {
        row[v] = term(u, v, na, nb);
        rmax = std::max(rmax, row[v]);
      }
      double ne = rmax, sum = rmax;
      for (Index v = 0; v < N_; ++v) {
        if (v == u) continue;
        double base = rowmax_[v];
        if (rowarg_[v] == u) {
          base = 0;
          for (Index w = 0; w < N_; ++w)
            if (w != u) base = std::max(base, E_(v, w));
        }
        const double nv = std::max(base, row[v]);
        sum += nv;
        ne = std::max(ne, nv);
      }
      const double nscore = ne + sum / static_cast<double>(N_);
      const double de = nscore - score;
      if (de <= 0 || (T > 0 && rng_.uniform01() < std::exp(-de / T))) {
        apply(u, na, nb, row);
        e = ne;
        score = nscore;
        if (e < best) {
          best = e;
          snapshot(best_f, best_g);
        }
      }
      T *= o.cooling;
      if (T < t0 * 1e-6) T = t0;  // reheat: cyclic geometric schedule
    }
    return best;
  }

 private:
  double term(Index u, Index v, Index au, Index bu) const {
    const Index av = v == u ? au : a_[v], bv = v == u ? bu : b_[v];
    return std::max(gap(dx_(au, av), dy_(bu, bv)), gap(dx_(av, au), dy_(bv, bu)));
  }
  void refresh_row(Index u) {
    double mx = -1;
    Index arg = 0;
    for (Index v = 0; v < N_; ++v)
      if (E_(u, v) > mx) mx = E_(u, v), arg = v;
    rowmax_[u] = mx, rowarg_[u] = arg;
  }
  void apply(Index u, Index na, Index nb, const std::vector<double>& row) {
    a_[u] = na, b_[u] = nb;
    for (Index v = 0; v < N_; ++v) E_(u, v) = E_(v, u) = row[v];
    refresh_row(u);
    for (Index v = 0; v < N_; ++v) {
      if (v == u) continue;
      if (row[v] > rowmax_[v]) rowmax_[v] = row[v], rowarg_[v] = u;
      else if (rowarg_[v] == u) refresh_row(v);
    }
  }
  double mean_rowmax() const {
    double t = 0;
    for (double v : rowmax_) t += v;
    return t / static_cast<double>(N_);
  }
  void snapshot(std::vector<Index>& f, std::vector<Index>& g) const {
    f.assign(b_.begin(), b_.begin() + static_cast<std::ptrdiff_t>(m_));
    g.assign(a_.begin() + static_cast<std::ptrdiff_t>(m_), a_.end());
  }

  const SquareMatrix<double>& dx_;
  const SquareMatrix<double>& dy_;
  std::size_t m_, k_, N_;
  Rng rng_;
  std::vector<Index> a_, b_;
  SquareMatrix<double> E_;
  std::vector<double> rowmax_;
  std::vector<Index> rowarg_;
};

}  // namespace detail

// Seeded simulated annealing over (f, g); returns an upper bound with its witness.
inline GhResult gh_anneal(const SquareMatrix<double>& dx, const SquareMatrix<double>& dy,
                          const AnnealOptions& opt = {}) {
  const std::size_t m = dx.size(), k = dy.size();
  GhResult res;
  res.method = "anneal";
  res.budget = static_cast<double>(opt.steps) * std::max(1U, opt.chains);
  if (m == 0 || k == 0) {
    if (m != k) throw InvalidArgument("no correspondence between an empty and a nonempty space");
    res.witness = {0, 0, {}};
    return res;
  }
  double t0 = opt.t0;
  if (t0 <= 0) {
    double s = 0;
    for (double v : dx.data())
      if (std::isfinite(v)) s = std::max(s, std::abs(v));
    for (double v : dy.data())
      if (std::isfinite(v)) s = std::max(s, std::abs(v));
    t0 = 0.1 * (s > 0 ? s : 1.0);
  }
  const unsigned chains = std::max(1U, opt.chains);
  std::vector<double> val(chains);
  std::vector<std::vector<Index>> fs(chains), gs(chains);
  parallel_for(0, chains, [&](Index c) {
    detail::AnnealChain chain(dx, dy, Rng::mix(opt.seed * 1000003ULL + c));
    val[c] = chain.run(opt, t0, fs[c], gs[c]);
  });
  Index bc = 0;
  for (Index c = 1; c < chains; ++c)
    if (val[c] < val[bc]) bc = c;
  res.value = val[bc] / 2;
  res.witness = from_maps(fs[bc], gs[bc]);
  res.evaluated = res.budget;
  return res;
}

inline GhResult ghdist_minus_exact(const FiniteLorentzSpace& X, const FiniteLorentzSpace& Y,
                                   double budget = kDefaultExactBudget) {
  return gh_exact(X.sigma, Y.sigma, budget);
}

inline GhResult ghdist_minus_anneal(const FiniteLorentzSpace& X, const FiniteLorentzSpace& Y,
                                    const AnnealOptions& opt = {}) {
  return gh_anneal(X.sigma, Y.sigma, opt);
}

enum class GhMethod { Exact, Anneal };

inline GhResult ghdist_plus(const FiniteLorentzSpace& X, const FiniteLorentzSpace& Y, GhMethod method,
                            double budget = kDefaultExactBudget, const AnnealOptions& opt = {}) {
  const auto dx = sup_metric(X.sigma), dy = sup_metric(Y.sigma);
  return method == GhMethod::Exact ? gh_exact(dx, dy, budget) : gh_anneal(dx, dy, opt);
}

// Pairs whose coordinate labels lie at Euclidean distance < radius.
inline Correspondence ball_correspondence(const std::vector<Coords>& A, const std::vector<Coords>& B, double radius) {
  Correspondence R{A.size(), B.size(), {}};
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = 0; j < B.size(); ++j) {
      double s = 0;
      for (std::size_t c = 0; c < A[i].size(); ++c) s += (A[i][c] - B[j][c]) * (A[i][c] - B[j][c]);
      if (std::sqrt(s) < radius) R.pairs.emplace_back(i, j);
    }
  return R;
}

struct LatticeCorrespondence {
  FiniteLorentzSpace lattice;
  Correspondence R;  // lattice -> reference
};

// Relates lattice(n, r, s) to a labelled reference model through balls of radius 2/n.
inline LatticeCorrespondence lattice_correspondence(int n, double r, double s, const FiniteLorentzSpace& reference,
                                                    std::size_t spatial_dim = 1) {
  if (!reference.labels) throw InvalidArgument("lattice_correspondence: reference carries no coordinate labels");
  LatticeCorrespondence out{lattice(n, r, s, spatial_dim), {}};
  out.R = ball_correspondence(*out.lattice.labels, *reference.labels, 2.0 / n);
  require_valid(out.R, out.lattice.size(), reference.size());
  return out;
}

inline std::vector<Index> k_epsilon_indices(const FiniteLorentzSpace& X, double eps, double tol = kTol) {
  const TimeDiameter td = tdiam(X, tol);
  if (!(eps > 0) || !(eps < td.value / 2))
    throw InvalidArgument("k_epsilon: eps must lie in (0, tdiam/2) = (0, " + std::to_string(td.value / 2) + ")");
  const BoundarySets b = boundary_sets(X, tol);
  std::vector<Index> keep;
  for (Index p = 0; p < X.size(); ++p) {
    double fut = 0, past = 0;
    for (Index y : b.future) fut = std::max(fut, X.sigma(p, y));
    for (Index x : b.past) past = std::max(past, X.sigma(x, p));
    if (fut >= eps && past >= eps) keep.push_back(p);
  }
  return keep;
}

inline FiniteLorentzSpace k_epsilon(const FiniteLorentzSpace& X, double eps, double tol = kTol) {
  return subspace(X, k_epsilon_indices(X, eps, tol));
}

}  // namespace lorgh
