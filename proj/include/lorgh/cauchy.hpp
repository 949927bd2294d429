#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "lorgh/core.hpp"
#include "lorgh/gh.hpp"
#include "lorgh/parallel.hpp"

namespace lorgh {

inline double signed_power(double x, double p) {
  return x > 0 ? std::pow(x, p) : (x < 0 ? -std::pow(-x, p) : 0.0);
}

struct CauchySubset {
  std::vector<Index> idx;
};

struct TimeFunctionCandidate {
  std::vector<double> values;
  std::shared_ptr<const FiniteMetricSpace> metric;  // D used by the anti-Lipschitz audit
};

// ------------------------------------------------------------------ metrics

// D_p^A(x,y) = max over r in A of |σ^p(x,r) − σ^p(y,r)|.
inline FiniteMetricSpace dpa_metric(const FiniteLorentzSpace& s, const std::vector<Index>& A, double p) {
  if (!(p >= 1)) throw InvalidArgument("dpa_metric: p must be at least 1");
  if (A.empty()) throw InvalidArgument("dpa_metric: empty reference set");
  const std::size_t n = s.size(), m = A.size();
  for (Index r : A)
    if (r >= n) throw InvalidArgument("dpa_metric: reference index out of range");
  std::vector<double> P(n * m);
  for (Index x = 0; x < n; ++x)
    for (std::size_t k = 0; k < m; ++k) P[x * m + k] = p == 1 ? s.sigma(x, A[k]) : signed_power(s.sigma(x, A[k]), p);
  FiniteMetricSpace out{s.points, SquareMatrix<double>(n)};
  parallel_for(0, n, [&](Index x) {
    const double* px = P.data() + x * m;
    for (Index y = x + 1; y < n; ++y) {
      const double* py = P.data() + y * m;
      double best = 0;
      for (std::size_t k = 0; k < m; ++k) best = std::max(best, std::abs(px[k] - py[k]));
      out.d(x, y) = best;
    }
  });
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < x; ++y) out.d(x, y) = out.d(y, x);
  return out;
}

inline FiniteMetricSpace noldus_metric(const FiniteLorentzSpace& s, double p) {
  std::vector<Index> all(s.size());
  std::iota(all.begin(), all.end(), Index{0});
  if (all.empty()) {
    if (!(p >= 1)) throw InvalidArgument("noldus_metric: p must be at least 1");
    return {};
  }
  return dpa_metric(s, all, p);
}

// Shortest paths over the graph of pairs with d <= radius.
inline FiniteMetricSpace intrinsify(const FiniteMetricSpace& M, double radius) {
  if (!(radius > 0)) throw InvalidArgument("intrinsify: connect radius must be positive");
  const std::size_t n = M.size();
  std::vector<std::vector<std::pair<Index, double>>> adj(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && M.d(i, j) <= radius) adj[i].emplace_back(j, M.d(i, j));
  FiniteMetricSpace out{M.points, SquareMatrix<double>(n, kInf)};
  parallel_for(0, n, [&](Index src) {
    auto row = out.d.row(src);
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    row[src] = 0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > row[u]) continue;
      for (const auto& [v, w] : adj[u])
        if (d + w < row[v]) {
          row[v] = d + w;
          pq.emplace(row[v], v);
        }
    }
  });
  // symmetrize against rounding in the summation order
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out.d(i, j) = out.d(j, i) = std::min(out.d(i, j), out.d(j, i));
  return out;
}

inline double mean_nearest_neighbor(const FiniteMetricSpace& M) {
  const std::size_t n = M.size();
  if (n < 2) return 0;
  double sum = 0;
  for (Index i = 0; i < n; ++i) {
    double best = kInf;
    for (Index j = 0; j < n; ++j)
      if (j != i && M.d(i, j) > 0) best = std::min(best, M.d(i, j));
    sum += std::isfinite(best) ? best : 0.0;
  }
  return sum / static_cast<double>(n);
}

// ------------------------------------------------------------ Cauchy subsets

// Covering relations of a partial order.
inline BitMatrix hasse_links(const BitMatrix& leq) {
  const BitMatrix lt = strict_part(leq);
  const BitMatrix gt = lt.transposed();
  BitMatrix link(leq.size());
  for (Index x = 0; x < leq.size(); ++x)
    lt.for_each_in_row(x, [&](Index y) {
      if (!and_any(lt.row(x), gt.row(y))) link.set(x, y);
    });
  return link;
}

struct CauchyAudit {
  bool antichain = true;
  std::pair<Index, Index> comparable_pair{0, 0};
  std::vector<Index> avoiding_chain;  // a maximal chain missing S, empty if none
  bool ok() const { return antichain && avoiding_chain.empty(); }
};

// S is Cauchy iff it is an antichain and every maximal chain (a link path from a
// minimal to a maximal element) meets it.
inline CauchyAudit audit_cauchy(const BitMatrix& leq, const CauchySubset& S) {
  const std::size_t n = leq.size();
  CauchyAudit a;
  std::vector<char> in(n, 0);
  for (Index s : S.idx) {
    if (s >= n) throw InvalidArgument("audit_cauchy: index out of range");
    in[s] = 1;
  }
  for (Index u : S.idx) {
    for (Index v : S.idx)
      if (u != v && leq.test(u, v)) {
        a.antichain = false;
        a.comparable_pair = {u, v};
        break;
      }
    if (!a.antichain) break;
  }
  const BitMatrix link = hasse_links(leq);
  std::vector<char> has_pred(n, 0), has_succ(n, 0);
  for (Index x = 0; x < n; ++x)
    link.for_each_in_row(x, [&](Index y) {
      has_succ[x] = 1;
      has_pred[y] = 1;
    });
  std::vector<Index> parent(n, n);
  std::vector<char> seen(n, 0);
  std::vector<Index> queue;
  for (Index x = 0; x < n; ++x)
    if (!has_pred[x] && !in[x]) {
      seen[x] = 1;
      queue.push_back(x);
    }
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const Index x = queue[h];
    if (!has_succ[x]) {
      for (Index v = x; v != n; v = parent[v]) a.avoiding_chain.push_back(v);
      std::reverse(a.avoiding_chain.begin(), a.avoiding_chain.end());
      break;
    }
    link.for_each_in_row(x, [&](Index y) {
      if (!seen[y] && !in[y]) {
        seen[y] = 1;
        parent[y] = x;
        queue.push_back(y);
      }
    });
  }
  return a;
}

inline CauchyAudit audit_cauchy(const FiniteLorentzSpace& s, const CauchySubset& S, double tol = kTol) {
  return audit_cauchy(derived_causal(s, tol), S);
}

// ------------------------------------------------------------------- audits

struct PairAudit {
  bool ok = true;
  std::size_t violations = 0;
  double worst = 0;  // largest shortfall
  std::vector<std::pair<Index, Index>> witnesses;  // first few violating pairs
};

namespace detail {

template <typename Need>
PairAudit audit_causal_pairs(const BitMatrix& J, const std::vector<double>& t, Need need, double tol,
                             std::size_t max_listed) {
  PairAudit a;
  for (Index x = 0; x < J.size(); ++x)
    J.for_each_in_row(x, [&](Index y) {
      if (x == y) return;
      const double gap = need(x, y) - (t[y] - t[x]);
      if (gap > tol) {
        a.ok = false;
        ++a.violations;
        a.worst = std::max(a.worst, gap);
        if (a.witnesses.size() < max_listed) a.witnesses.emplace_back(x, y);
      }
    });
  return a;
}

}  // namespace detail

// t(y) − t(x) >= σ(x,y) for every causal x <= y.
inline PairAudit is_rushing(const FiniteLorentzSpace& s, const std::vector<double>& t, double tol = kTol,
                            std::size_t max_listed = 20) {
  if (t.size() != s.size()) throw InvalidArgument("is_rushing: size mismatch");
  return detail::audit_causal_pairs(derived_causal(s, tol), t, [&](Index x, Index y) { return s.sigma(x, y); },
                                    tol, max_listed);
}

// t(y) − t(x) >= D(x,y) for every causal x <= y.
inline PairAudit is_anti_lipschitz(const FiniteLorentzSpace& s, const std::vector<double>& t,
                                   const FiniteMetricSpace& D, double tol = kTol, std::size_t max_listed = 20) {
  if (t.size() != s.size() || D.size() != s.size()) throw InvalidArgument("is_anti_lipschitz: size mismatch");
  return detail::audit_causal_pairs(derived_causal(s, tol), t, [&](Index x, Index y) { return D.d(x, y); }, tol,
                                    max_listed);
}

struct GeneralizedCauchyAudit {
  bool ok = true;
  std::vector<std::pair<Index, Index>> witnesses;  // (endpoint, point on a chain through it beating it)
  double past_band = 0;    // spread of t over minimal elements
  double future_band = 0;  // spread of t over maximal elements
  bool endpoints_on_boundary = true;  // minimal/maximal elements have no chronological past/future
};

// Finite surrogate: along every maximal chain, t is smallest at the starting point
// and largest at the end point (within tol).
inline GeneralizedCauchyAudit is_generalized_cauchy(const FiniteLorentzSpace& s, const std::vector<double>& t,
                                                    double tol = kTol) {
  if (t.size() != s.size()) throw InvalidArgument("is_generalized_cauchy: size mismatch");
  const BitMatrix J = derived_causal(s, tol);
  const BitMatrix Jt = J.transposed();
  GeneralizedCauchyAudit a;
  double lo_min = kInf, lo_max = -kInf, hi_min = kInf, hi_max = -kInf;
  for (Index x = 0; x < s.size(); ++x) {
    const bool minimal = Jt.count_row(x) == 1, maximal = J.count_row(x) == 1;
    if (minimal) {
      lo_min = std::min(lo_min, t[x]);
      lo_max = std::max(lo_max, t[x]);
      if (has_past(s, x, tol)) a.endpoints_on_boundary = false;
      J.for_each_in_row(x, [&](Index y) {
        if (t[y] < t[x] - tol) {
          a.ok = false;
          if (a.witnesses.size() < 20) a.witnesses.emplace_back(x, y);
        }
      });
    }
    if (maximal) {
      hi_min = std::min(hi_min, t[x]);
      hi_max = std::max(hi_max, t[x]);
      if (has_future(s, x, tol)) a.endpoints_on_boundary = false;
      Jt.for_each_in_row(x, [&](Index y) {
        if (t[y] > t[x] + tol) {
          a.ok = false;
          if (a.witnesses.size() < 20) a.witnesses.emplace_back(x, y);
        }
      });
    }
  }
  a.past_band = lo_max - lo_min;
  a.future_band = hi_max - hi_min;
  return a;
}

// ------------------------------------------------------- distances from S

namespace detail {

// +1 in the causal future of S, −1 in its past, 0 on S.
inline std::vector<int> side_of(const BitMatrix& J, const CauchySubset& S) {
  const std::size_t n = J.size();
  std::vector<int> side(n, 2);
  std::vector<char> up(n, 0), down(n, 0);
  for (Index s : S.idx) {
    if (s >= n) throw InvalidArgument("Cauchy subset index out of range");
    J.for_each_in_row(s, [&](Index y) { up[y] = 1; });
  }
  const BitMatrix Jt = J.transposed();
  for (Index s : S.idx) Jt.for_each_in_row(s, [&](Index y) { down[y] = 1; });
  for (Index s : S.idx) side[s] = 0;
  std::string lost, both;
  for (Index x = 0; x < n; ++x) {
    if (side[x] == 0) continue;
    if (up[x] && down[x]) both += " " + std::to_string(x);
    else if (up[x]) side[x] = 1;
    else if (down[x]) side[x] = -1;
    else lost += " " + std::to_string(x);
  }
  if (!both.empty()) throw InvalidArgument("points both above and below S (S is not an antichain):" + both);
  if (!lost.empty()) throw InvalidArgument("sign of the distance to S is ambiguous; points incomparable to S:" + lost);
  return side;
}

// order compatible with J: the number of causal predecessors strictly grows along x < y
inline std::vector<Index> topological_order(const BitMatrix& J) {
  const BitMatrix Jt = J.transposed();
  std::vector<std::size_t> past(J.size());
  for (Index x = 0; x < J.size(); ++x) past[x] = Jt.count_row(x);
  std::vector<Index> order(J.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return past[a] < past[b]; });
  return order;
}

}  // namespace detail

// Signed min D-distance to S; negative in the past of S.
inline std::vector<double> delta_s(const FiniteLorentzSpace& s, const CauchySubset& S, const FiniteMetricSpace& D,
                                   double tol = kTol) {
  const auto side = detail::side_of(derived_causal(s, tol), S);
  std::vector<double> out(s.size(), 0.0);
  for (Index x = 0; x < s.size(); ++x) {
    if (side[x] == 0) continue;
    double best = kInf;
    for (Index v : S.idx) best = std::min(best, D.d(x, v));
    out[x] = side[x] * best;
  }
  return out;
}

// Signed length of the D-longest causal chain between S and x; negative in the past
// of S. Increments along a causal pair are at least D of that pair.
inline std::vector<double> chain_distance_to_s(const FiniteLorentzSpace& s, const CauchySubset& S,
                                               const FiniteMetricSpace& D, double tol = kTol) {
  const BitMatrix J = derived_causal(s, tol);
  const BitMatrix Jt = J.transposed();
  const auto side = detail::side_of(J, S);
  const auto order = detail::topological_order(J);
  std::vector<double> L(s.size(), 0.0);
  for (Index x : order) {
    if (side[x] != 1) continue;
    double best = -kInf;
    Jt.for_each_in_row(x, [&](Index y) {
      if (y != x && side[y] >= 0) best = std::max(best, L[y] + D.d(y, x));
    });
    L[x] = best;
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Index x = *it;
    if (side[x] != -1) continue;
    double best = -kInf;
    J.for_each_in_row(x, [&](Index y) {
      if (y != x && side[y] <= 0) best = std::max(best, -L[y] + D.d(x, y));
    });
    L[x] = -best;
  }
  return L;
}

// u(σ(p,x)) · max{ D(y,x) : p <= y <= x }, with u(s) = min(s/σ(p,q)², 1/σ(p,q)).
inline std::vector<double> tau_pq(const FiniteLorentzSpace& s, Index p, Index q, const FiniteMetricSpace& D,
                                  const BitMatrix& J, double tol = kTol) {
  const double spq = s.sigma(p, q);
  if (!(spq > tol)) throw InvalidArgument("tau_pq: p is not chronologically before q");
  std::vector<double> out(s.size(), 0.0);
  const auto& fut = J.row_indices(p);
  for (Index x : fut) {
    const double u = std::min(std::max(s.sigma(p, x), 0.0) / (spq * spq), 1.0 / spq);
    if (u == 0) continue;
    double sup = 0;
    for (Index y : fut)
      if (J.test(y, x)) sup = std::max(sup, D.d(y, x));
    out[x] = u * sup;
  }
  return out;
}

inline std::vector<double> tau_pq(const FiniteLorentzSpace& s, Index p, Index q, const FiniteMetricSpace& D,
                                  double tol = kTol) {
  return tau_pq(s, p, q, D, derived_causal(s, tol), tol);
}

struct FatConeCover {
  std::vector<std::pair<Index, Index>> pairs;
  std::vector<Index> uncovered;  // points of S outside every I^+(q_i)
};

namespace detail {

inline FatConeCover fat_cone_cover_partial(const FiniteLorentzSpace& s, const BitMatrix& I, const BitMatrix& J,
                                           const CauchySubset& lower, const CauchySubset& S) {
  const std::size_t n = s.size();
  for (Index z : S.idx)
    for (Index y : lower.idx)
      if (z != y && J.test(z, y)) throw InvalidArgument("fat_cone_cover: S is not in the future of S'");
  std::vector<char> above(n, 0);  // I^+(S')
  for (Index y : lower.idx) I.for_each_in_row(y, [&](Index x) { above[x] = 1; });
  // candidate q needs some p in I^+(S') with p << q; take the one with the least σ(p,q)
  std::vector<Index> partner(n, n);
  for (Index q = 0; q < n; ++q) {
    if (!above[q]) continue;
    double best = kInf;
    for (Index p = 0; p < n; ++p)
      if (above[p] && I.test(p, q) && s.sigma(p, q) < best) {
        best = s.sigma(p, q);
        partner[q] = p;
      }
  }
  std::vector<char> covered(S.idx.size(), 0);
  FatConeCover out;
  std::size_t left = S.idx.size();
  while (left > 0) {
    Index best_q = n;
    std::size_t best_gain = 0;
    for (Index q = 0; q < n; ++q) {
      if (partner[q] == n) continue;
      std::size_t gain = 0;
      for (std::size_t k = 0; k < S.idx.size(); ++k)
        if (!covered[k] && I.test(q, S.idx[k])) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best_q = q;
      }
    }
    if (best_q == n) break;
    out.pairs.emplace_back(partner[best_q], best_q);
    for (std::size_t k = 0; k < S.idx.size(); ++k)
      if (!covered[k] && I.test(best_q, S.idx[k])) {
        covered[k] = 1;
        --left;
      }
  }
  for (std::size_t k = 0; k < S.idx.size(); ++k)
    if (!covered[k]) out.uncovered.push_back(S.idx[k]);
  return out;
}

}  // namespace detail

// Greedy pairs p_i << q_i in I^+(S') whose futures I^+(q_i) cover S.
inline std::vector<std::pair<Index, Index>> fat_cone_cover(const FiniteLorentzSpace& s, const CauchySubset& lower,
                                                           const CauchySubset& S, double tol = kTol) {
  auto c = detail::fat_cone_cover_partial(s, chronological_pairs(s, tol), derived_causal(s, tol), lower, S);
  if (!c.uncovered.empty()) {
    std::string list;
    for (Index u : c.uncovered) list += " " + std::to_string(u);
    throw ResolutionError("fat_cone_cover: no cone reaches these points of S:" + list);
  }
  return c.pairs;
}

// ------------------------------------------------------ time-function builder

struct CauchyTimeOptions {
  double p = 1;
  std::vector<Index> reference;  // A; empty means the whole space
  double inner_quantile = 1.0 / 3;  // S^± sit at this quantile of |chain distance| on their side
  double outer_quantile = 2.0 / 3;  // S^±±
  std::size_t max_iterations = 20;
  double tol = kTol;
};

struct CauchyTimeReport {
  std::size_t s_minus_minus = 0, s_minus = 0, s_plus = 0, s_plus_plus = 0;  // auxiliary set sizes
  std::size_t cover_pairs = 0;
  std::size_t uncovered = 0;    // auxiliary-set points no cone reached
  std::size_t iterations = 0;   // weight updates spent on the one-sided sums
  std::size_t repaired = 0;     // points where θ^∓ was pinned on the far side of S
  double correction = 0;        // C in T = recipe + C · chain distance
  PairAudit recipe_audit;       // anti-Lipschitz audit before the correction
};

struct CauchyTime {
  TimeFunctionCandidate time;
  CauchyTimeReport report;
};

namespace detail {

inline FiniteLorentzSpace time_reversed(const FiniteLorentzSpace& s) {
  FiniteLorentzSpace r;
  r.points = s.points;
  r.sigma = SquareMatrix<double>(s.size());
  for (Index x = 0; x < s.size(); ++x)
    for (Index y = 0; y < s.size(); ++y) r.sigma(x, y) = s.sigma(y, x);
  if (s.causal) r.causal = s.causal->transposed();
  r.mu = s.mu;
  return r;
}

// Σ c_i τ_i over a fat cone cover of Z above Y; weights grow by (1 + worst violation)
// until the sum is anti-Lipschitz on J^+(Z) or stops improving, then it is scaled to
// exceed 1 on J^+(Z) where it is positive.
inline std::vector<double> theta_check_plus(const FiniteLorentzSpace& s, const BitMatrix& I, const BitMatrix& J,
                                            const FiniteMetricSpace& D, const CauchySubset& Y,
                                            const CauchySubset& Z, const CauchyTimeOptions& o,
                                            CauchyTimeReport& rep) {
  const std::size_t n = s.size();
  const auto cover = fat_cone_cover_partial(s, I, J, Y, Z);
  rep.cover_pairs += cover.pairs.size();
  rep.uncovered += cover.uncovered.size();
  std::vector<std::vector<double>> taus;
  for (const auto& [p, q] : cover.pairs) taus.push_back(tau_pq(s, p, q, D, J, o.tol));
  std::vector<double> c(taus.size(), 1.0);
  std::vector<char> region(n, 0);  // J^+(Z)
  for (Index z : Z.idx) J.for_each_in_row(z, [&](Index x) { region[x] = 1; });
  auto sum = [&] {
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 0; i < taus.size(); ++i)
      for (Index x = 0; x < n; ++x) f[x] += c[i] * taus[i][x];
    return f;
  };
  std::vector<double> f = sum();
  for (std::size_t it = 0; it < o.max_iterations; ++it) {
    // per-term violation: the worst shortfall over pairs in the region where τ_i moves
    std::vector<double> viol(taus.size(), 0.0);
    bool any = false;
    for (Index x = 0; x < n; ++x) {
      if (!region[x]) continue;
      J.for_each_in_row(x, [&](Index y) {
        if (y == x) return;
        const double gap = D.d(x, y) - (f[y] - f[x]);
        if (gap <= o.tol) return;
        any = true;
        for (std::size_t i = 0; i < taus.size(); ++i)
          if (taus[i][y] - taus[i][x] > 0) viol[i] = std::max(viol[i], gap);
      });
    }
    if (!any) break;
    bool changed = false;
    for (std::size_t i = 0; i < taus.size(); ++i)
      if (viol[i] > 0) {
        c[i] *= 1 + viol[i];
        changed = true;
      }
    ++rep.iterations;
    if (!changed) break;
    f = sum();
  }
  double lo = kInf;
  for (Index x = 0; x < n; ++x)
    if (region[x] && f[x] > 0) lo = std::min(lo, f[x]);
  if (std::isfinite(lo) && lo <= 1)
    for (double& v : f) v *= 1.01 / lo;
  return f;
}

// Minimal elements of {x : side(x) = +1, L(x) >= h}, or maximal elements of
// {x : side(x) = −1, L(x) <= −h} for the past.
inline CauchySubset quantile_front(const BitMatrix& J, const std::vector<double>& L, const std::vector<int>& side,
                                   int sign, double quantile) {
  std::vector<double> mags;
  for (Index x = 0; x < L.size(); ++x)
    if (side[x] == sign) mags.push_back(std::abs(L[x]));
  if (mags.empty()) throw ResolutionError("build_cauchy_time: no points on one side of S");
  std::sort(mags.begin(), mags.end());
  const double h = mags[std::min(mags.size() - 1, static_cast<std::size_t>(quantile * static_cast<double>(mags.size())))];
  std::vector<char> in(L.size(), 0);
  for (Index x = 0; x < L.size(); ++x) in[x] = side[x] == sign && std::abs(L[x]) >= h;
  const BitMatrix Jt = J.transposed();
  CauchySubset out;
  for (Index x = 0; x < L.size(); ++x) {
    if (!in[x]) continue;
    bool extreme = true;
    (sign > 0 ? Jt : J).for_each_in_row(x, [&](Index y) {
      if (y != x && in[y]) extreme = false;
    });
    if (extreme) out.idx.push_back(x);
  }
  if (out.idx.empty()) throw ResolutionError("build_cauchy_time: empty auxiliary set");
  return out;
}

}  // namespace detail

// T = θ̌^-_{S^-,S} + θ + θ̌^+_{S,S^+}, plus C times the chain distance to S when the
// assembled sum still falls short of anti-Lipschitzness on some causal pair.
inline CauchyTime build_cauchy_time(const FiniteLorentzSpace& s, const CauchySubset& S,
                                    std::shared_ptr<const FiniteMetricSpace> D, const CauchyTimeOptions& o = {}) {
  const std::size_t n = s.size();
  if (!D || D->size() != n) throw InvalidArgument("build_cauchy_time: metric size mismatch");
  if (S.idx.empty()) throw InvalidArgument("build_cauchy_time: empty Cauchy subset");
  const BitMatrix J = derived_causal(s, o.tol);
  const BitMatrix I = chronological_pairs(s, o.tol);
  if (auto audit = audit_cauchy(J, S); !audit.ok())
    throw InvalidArgument(audit.antichain ? "build_cauchy_time: a maximal chain misses S"
                                          : "build_cauchy_time: S is not an antichain");
  const auto side = detail::side_of(J, S);
  const auto L = chain_distance_to_s(s, S, *D, o.tol);
  CauchyTime out;
  auto& rep = out.report;

  const auto Spp = detail::quantile_front(J, L, side, +1, o.outer_quantile);
  const auto Sp = detail::quantile_front(J, L, side, +1, o.inner_quantile);
  const auto Sm = detail::quantile_front(J, L, side, -1, o.inner_quantile);
  const auto Smm = detail::quantile_front(J, L, side, -1, o.outer_quantile);
  rep.s_minus_minus = Smm.idx.size();
  rep.s_minus = Sm.idx.size();
  rep.s_plus = Sp.idx.size();
  rep.s_plus_plus = Spp.idx.size();

  const FiniteLorentzSpace rev = detail::time_reversed(s);
  const BitMatrix Jr = J.transposed(), Ir = I.transposed();
  auto check_plus = [&](const CauchySubset& Y, const CauchySubset& Z) {
    return detail::theta_check_plus(s, I, J, *D, Y, Z, o, rep);
  };
  auto check_minus = [&](const CauchySubset& Y, const CauchySubset& Z) {
    auto f = detail::theta_check_plus(rev, Ir, Jr, *D, Z, Y, o, rep);
    for (double& v : f) v = -v;
    return f;
  };
  auto clamp01 = [](std::vector<double> f) {
    for (double& v : f) v = std::clamp(v, 0.0, 1.0);
    return f;
  };

  auto theta_minus = clamp01(check_plus(Smm, Sm));
  auto theta_plus = clamp01(check_plus(Sp, Spp));
  // the construction presumes S ⊂ J^+(S^-) and S ⊂ J^-(S^+); a finite sample can leave
  // gaps, so θ^- is pinned to 1 on J^+(S) and θ^+ to 0 on J^-(S)
  for (Index x = 0; x < n; ++x) {
    if (side[x] >= 0 && theta_minus[x] != 1.0) {
      theta_minus[x] = 1.0;
      ++rep.repaired;
    }
    if (side[x] <= 0 && theta_plus[x] != 0.0) {
      theta_plus[x] = 0.0;
      ++rep.repaired;
    }
  }
  double lmax = 0;
  for (double v : L) lmax = std::max(lmax, std::abs(v));
  std::vector<double> T(n, 0.0);
  const auto lower = check_minus(Sm, S);
  const auto upper = check_plus(S, Sp);
  for (Index x = 0; x < n; ++x) {
    const double d = lmax > 0 ? L[x] / (2 * lmax) : 0.0;  // |d| <= 1/2 keeps the denominator >= 1/2
    const double theta = 2 * (d + 1) * theta_minus[x] / ((d + 1) - theta_plus[x] + 1) - 1;
    T[x] = lower[x] + theta + upper[x];
  }
  for (Index v : S.idx) T[v] = 0.0;  // exact: both one-sided sums vanish on S and θ = 0 there

  rep.recipe_audit = detail::audit_causal_pairs(J, T, [&](Index x, Index y) { return D->d(x, y); }, o.tol, 20);
  // compactness step: T + C·L with C = max (D − ΔT)/ΔL; ΔL >= D > 0 on causal pairs
  double C = 0;
  for (Index x = 0; x < n; ++x)
    J.for_each_in_row(x, [&](Index y) {
      if (y == x) return;
      const double need = D->d(x, y) - (T[y] - T[x]);
      if (need <= 0) return;
      const double dl = L[y] - L[x];
      if (!(dl > 0)) throw ResolutionError("build_cauchy_time: causal pair " + std::to_string(x) + " <= " +
                                           std::to_string(y) + " has zero D-increment");
      C = std::max(C, need / dl);
    });
  if (C > 0) {
    C *= 1 + 1e-12;
    for (Index x = 0; x < n; ++x) T[x] += C * L[x];
  }
  rep.correction = C;
  out.time.values = std::move(T);
  out.time.metric = std::move(D);
  return out;
}

inline CauchyTime build_cauchy_time(const FiniteLorentzSpace& s, const CauchySubset& S,
                                    const CauchyTimeOptions& o = {}) {
  std::vector<Index> A = o.reference;
  if (A.empty()) {
    A.resize(s.size());
    std::iota(A.begin(), A.end(), Index{0});
  }
  return build_cauchy_time(s, S, std::make_shared<const FiniteMetricSpace>(dpa_metric(s, A, o.p)), o);
}

// ------------------------------------------------------- chain of diamonds

// d_S: shortest paths over S where a hop u -> v costs the least σ(p⁻,p⁺) over diamonds
// J(p⁻,p⁺) containing both. σ(p⁻,p⁺) only shrinks as p⁻ moves up or p⁺ moves down, so
// maximal common-past and minimal common-future points suffice.
inline FiniteMetricSpace chain_diamond_metric(const FiniteLorentzSpace& s, const CauchySubset& S,
                                              double tol = kTol) {
  const BitMatrix J = derived_causal(s, tol);
  const BitMatrix Jt = J.transposed();
  const std::size_t m = S.idx.size(), W = J.words_per_row();
  std::vector<std::string> ids;
  for (Index v : S.idx) ids.push_back(s.points.empty() ? std::to_string(v) : s.points[v]);
  FiniteMetricSpace out{ids, SquareMatrix<double>(m, kInf)};
  parallel_for(0, m, [&](Index a) {
    const Index u = S.idx[a];
    std::vector<BitMatrix::Word> past(W), fut(W);
    for (Index b = a + 1; b < m; ++b) {
      const Index v = S.idx[b];
      auto pu = Jt.row(u), pv = Jt.row(v), fu = J.row(u), fv = J.row(v);
      bool any_p = false, any_f = false;
      for (std::size_t w = 0; w < W; ++w) {
        past[w] = pu[w] & pv[w];
        fut[w] = fu[w] & fv[w];
        any_p = any_p || past[w];
        any_f = any_f || fut[w];
      }
      if (!any_p || !any_f) continue;
      auto members = [&](const std::vector<BitMatrix::Word>& bits) {
        std::vector<Index> r;
        for (std::size_t w = 0; w < W; ++w)
          for (BitMatrix::Word x = bits[w]; x; x &= x - 1) r.push_back(w * 64 + static_cast<Index>(std::countr_zero(x)));
        return r;
      };
      const auto P = members(past), F = members(fut);
      // extremes of the common past (maximal) and common future (minimal)
      std::vector<Index> top, bottom;
      for (Index x : P) {
        bool maximal = true;
        for (Index y : P)
          if (y != x && J.test(x, y)) {
            maximal = false;
            break;
          }
        if (maximal) top.push_back(x);
      }
      for (Index x : F) {
        bool minimal = true;
        for (Index y : F)
          if (y != x && J.test(y, x)) {
            minimal = false;
            break;
          }
        if (minimal) bottom.push_back(x);
      }
      double best = kInf;
      for (Index x : top)
        for (Index y : bottom) best = std::min(best, s.sigma(x, y));
      out.d(a, b) = best;
    }
  });
  for (Index a = 0; a < m; ++a) {
    out.d(a, a) = 0;
    for (Index b = 0; b < a; ++b) out.d(a, b) = out.d(b, a);
  }
  for (Index k = 0; k < m; ++k)
    for (Index i = 0; i < m; ++i) {
      const double dik = out.d(i, k);
      if (!std::isfinite(dik)) continue;
      for (Index j = 0; j < m; ++j) out.d(i, j) = std::min(out.d(i, j), dik + out.d(k, j));
    }
  return out;
}

// ---------------------------------------------------------- level sets

struct LevelSet {
  double level = 0;
  CauchySubset band;
  FiniteMetricSpace restricted;   // Ď_p on the band
  FiniteMetricSpace intrinsified;
};

struct LevelSetFamily {
  std::vector<LevelSet> levels;
  std::vector<double> gh;  // GH distance between consecutive restricted metrics
};

// Banded level sets {|t − a| <= band} with their restricted and intrinsified Ď_p metrics.
// connect_radius <= 0 selects 3x the mean nearest-neighbour distance of each band.
inline LevelSetFamily level_set_family(const FiniteLorentzSpace& s, const std::vector<double>& t,
                                       const std::vector<double>& levels, double band, double p = 1,
                                       double connect_radius = -1, const AnnealOptions& anneal = {},
                                       const FiniteMetricSpace* noldus = nullptr) {
  if (t.size() != s.size()) throw InvalidArgument("level_set_family: size mismatch");
  FiniteMetricSpace own;
  if (!noldus) {
    own = noldus_metric(s, p);
    noldus = &own;
  }
  LevelSetFamily fam;
  for (double a : levels) {
    LevelSet L;
    L.level = a;
    for (Index x = 0; x < s.size(); ++x)
      if (std::abs(t[x] - a) <= band) L.band.idx.push_back(x);
    if (L.band.idx.empty()) throw ResolutionError("level_set_family: empty band at level " + std::to_string(a));
    L.restricted = submetric(*noldus, L.band.idx);
    const double r = connect_radius > 0 ? connect_radius : 3 * mean_nearest_neighbor(L.restricted);
    L.intrinsified = r > 0 ? intrinsify(L.restricted, r) : L.restricted;
    fam.levels.push_back(std::move(L));
  }
  for (std::size_t k = 1; k < fam.levels.size(); ++k) {
    const auto& A = fam.levels[k - 1].restricted;
    const auto& B = fam.levels[k].restricted;
    fam.gh.push_back(A.d == B.d ? 0.0 : gh_anneal(A.d, B.d, anneal).value);
  }
  return fam;
}

}  // namespace lorgh
