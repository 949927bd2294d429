#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lorgh/core.hpp"
#include "lorgh/parallel.hpp"

namespace lorgh {

// Weighted cone indicators: fut(p,z) means z in I^+(p), past(p,z) means z in I^-(p).
struct Cones {
  BitMatrix fut, past;
  std::vector<double> mu;
  std::size_t size() const { return fut.size(); }
};

inline Cones cones_of(const FiniteLorentzSpace& s, double tol = kTol) {
  if (!s.mu) throw InvalidArgument("L2 profiles need weights (mu)");
  Cones c{chronological_pairs(s, tol), {}, *s.mu};
  c.past = c.fut.transposed();
  return c;
}

// On a bare order the strict order plays the chronological relation.
inline Cones cones_of(const FinitePOM& p) {
  Cones c{strict_part(p.leq), {}, p.mu};
  c.past = c.fut.transposed();
  return c;
}

inline double weight_of(const std::vector<double>& mu, const BitMatrix& m, Index row) {
  double s = 0;
  m.for_each_in_row(row, [&](Index z) { s += mu[z]; });
  return s;
}

// weighted size of a ∩ b for two bit rows
inline double weight_and(const std::vector<double>& mu, std::span<const BitMatrix::Word> a,
                         std::span<const BitMatrix::Word> b) {
  double s = 0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    BitMatrix::Word x = a[w] & b[w];
    while (x) {
      s += mu[w * 64 + static_cast<std::size_t>(std::countr_zero(x))];
      x &= x - 1;
    }
  }
  return s;
}

enum class Norm { L2, Sup };

using RealFn = std::function<double(double)>;

// d(x,y) = |f∘sigma_x − f∘sigma_y| in weighted L2 (sum over points in index order) or sup norm.
inline FiniteMetricSpace phi_fp(const FiniteLorentzSpace& s, const RealFn& f, Norm norm) {
  const std::size_t n = s.size();
  if (norm == Norm::L2 && !s.mu) throw InvalidArgument("phi_fp with p = 2 needs weights (mu)");
  SquareMatrix<double> prof(n);
  for (Index i = 0; i < n; ++i)
    for (Index z = 0; z < n; ++z) prof(i, z) = f(s.sigma(i, z));
  FiniteMetricSpace out{s.points, SquareMatrix<double>(n)};
  parallel_for(0, n, [&](Index i) {
    auto a = prof.row(i);
    for (Index j = i + 1; j < n; ++j) {
      auto b = prof.row(j);
      double acc = 0;
      if (norm == Norm::L2) {
        const auto& mu = *s.mu;
        for (Index z = 0; z < n; ++z) acc += mu[z] * (a[z] - b[z]) * (a[z] - b[z]);
        acc = std::sqrt(acc);
      } else {
        for (Index z = 0; z < n; ++z) acc = std::max(acc, std::abs(a[z] - b[z]));
      }
      out.d(i, j) = acc;
    }
  });
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) out.d(i, j) = out.d(j, i);
  return out;
}

// F_r = −(1/2 − r/2)·χ_(−∞,0) + (1/2 + r/2)·χ_(0,∞), with both indicators 0 at 0.
inline RealFn f_r(double r, double tol = kTol) {
  if (!(r >= -1 && r <= 1)) throw InvalidArgument("r must lie in [-1, 1]");
  const double up = 0.5 + r / 2, down = 0.5 - r / 2;
  return [=](double s) { return s > tol ? up : (s < -tol ? -down : 0.0); };
}

inline FiniteMetricSpace d_r(const FiniteLorentzSpace& s, double r, double tol = kTol) {
  if (!s.mu) throw InvalidArgument("d_r needs weights (mu)");
  return phi_fp(s, f_r(r, tol), Norm::L2);
}

// D_r on a bare order via the cone indicators.
inline FiniteMetricSpace d_r(const FinitePOM& p, double r) {
  if (!(r >= -1 && r <= 1)) throw InvalidArgument("r must lie in [-1, 1]");
  const Cones c = cones_of(p);
  const std::size_t n = p.size();
  const double up = 0.5 + r / 2, down = 0.5 - r / 2;
  FiniteMetricSpace out{p.points, SquareMatrix<double>(n)};
  parallel_for(0, n, [&](Index i) {
    for (Index j = i + 1; j < n; ++j) {
      double acc = 0;
      for (Index z = 0; z < n; ++z) {
        const double a = c.fut.test(i, z) ? up : (c.past.test(i, z) ? -down : 0.0);
        const double b = c.fut.test(j, z) ? up : (c.past.test(j, z) ? -down : 0.0);
        acc += c.mu[z] * (a - b) * (a - b);
      }
      out.d(i, j) = std::sqrt(acc);
    }
  });
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) out.d(i, j) = out.d(j, i);
  return out;
}

namespace detail {

// D_r(p,q)^2 summed term by term from F_r, for a single pair
inline double dr2_pair(const Cones& c, Index p, Index q, double r) {
  const double up = 0.5 + r / 2, down = 0.5 - r / 2;
  double acc = 0;
  for (Index z = 0; z < c.size(); ++z) {
    const double a = c.fut.test(p, z) ? up : (c.past.test(p, z) ? -down : 0.0);
    const double b = c.fut.test(q, z) ? up : (c.past.test(q, z) ? -down : 0.0);
    acc += c.mu[z] * (a - b) * (a - b);
  }
  return acc;
}

// <κ_a^s, κ_b^t> for cone signs s, t
inline double kappa_dot(const Cones& c, Index a, bool a_fut, Index b, bool b_fut) {
  return weight_and(c.mu, (a_fut ? c.fut : c.past).row(a), (b_fut ? c.fut : c.past).row(b));
}

}  // namespace detail

struct RecoveryResidual {
  double plus = 0;   // | |u^+|^2 − (D_{-1/2}^2 + 3 D_{1/2}^2 − 3 D_0^2) |
  double minus = 0;  // | |u^-|^2 − (D_{1/2}^2 + 3 D_{-1/2}^2 − 3 D_0^2) |
};

// |u^±|^2 is the weighted size of the symmetric difference of the future (past) cones,
// computed from the indicators; the D_r side is summed independently from F_r.
inline RecoveryResidual check_recovery_identity(const Cones& c, Index p, Index q) {
  const double dm = detail::dr2_pair(c, p, q, -0.5), d0 = detail::dr2_pair(c, p, q, 0.0),
               dp = detail::dr2_pair(c, p, q, 0.5);
  double up = 0, um = 0;
  for (Index z = 0; z < c.size(); ++z) {
    const double a = (c.fut.test(p, z) ? 1.0 : 0.0) - (c.fut.test(q, z) ? 1.0 : 0.0);
    const double b = (c.past.test(p, z) ? 1.0 : 0.0) - (c.past.test(q, z) ? 1.0 : 0.0);
    up += c.mu[z] * a * a;
    um += c.mu[z] * b * b;
  }
  return {std::abs(up - (dm + 3 * dp - 3 * d0)), std::abs(um - (dp + 3 * dm - 3 * d0))};
}

inline RecoveryResidual check_recovery_identity(const FiniteLorentzSpace& s, Index p, Index q, double tol = kTol) {
  return check_recovery_identity(cones_of(s, tol), p, q);
}

struct Harvest {
  double value = 0;       // 4 D_0^2 − D_{-1}^2 − D_1^2
  double direct = 0;      // 2(<κ_q^+,κ_p^-> + <κ_p^+,κ_q^->) − 2(<κ_p^+,κ_p^-> + <κ_q^+,κ_q^->)
  double self_cross = 0;  // <κ_p^+,κ_p^-> + <κ_q^+,κ_q^->, zero on chronology-irreflexive input
  double residual() const { return std::abs(value - direct); }
};

inline Harvest harvest_value(const Cones& c, Index p, Index q) {
  Harvest h;
  h.value = 4 * detail::dr2_pair(c, p, q, 0.0) - detail::dr2_pair(c, p, q, -1.0) - detail::dr2_pair(c, p, q, 1.0);
  using detail::kappa_dot;
  h.self_cross = kappa_dot(c, p, true, p, false) + kappa_dot(c, q, true, q, false);
  h.direct = 2 * (kappa_dot(c, q, true, p, false) + kappa_dot(c, p, true, q, false)) - 2 * h.self_cross;
  return h;
}

inline Harvest harvest_value(const FiniteLorentzSpace& s, Index p, Index q, double tol = kTol) {
  return harvest_value(cones_of(s, tol), p, q);
}

inline bool detect_chron(const Cones& c, Index p, Index q, double tol = kTol) {
  if (p == q) return false;
  return harvest_value(c, p, q).value > tol;
}

inline bool detect_chron(const FiniteLorentzSpace& s, Index p, Index q, double tol = kTol) {
  return detect_chron(cones_of(s, tol), p, q, tol);
}

// Whole relation from the three D_r matrices; symmetric by construction.
inline BitMatrix detect_chron_all(const FiniteLorentzSpace& s, double tol = kTol) {
  const auto d0 = d_r(s, 0.0, tol), dm = d_r(s, -1.0, tol), dp = d_r(s, 1.0, tol);
  const std::size_t n = s.size();
  BitMatrix out(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double h = 4 * d0.d(i, j) * d0.d(i, j) - dm.d(i, j) * dm.d(i, j) - dp.d(i, j) * dp.d(i, j);
      if (h > tol) out.set(i, j);
    }
  return out;
}

enum class Orientation { Future, Past };

// Orientation from the past-cone weight profile along a chain of mutually related points.
inline Orientation orient_chain(const Cones& c, const BitMatrix& leq, const CausalChain& chain) {
  if (chain.idx.size() < 2) throw InvalidArgument("orient_chain: a chain of fewer than two points has no orientation");
  std::vector<double> prof;
  for (std::size_t k = 0; k < chain.idx.size(); ++k) {
    const Index v = chain.idx[k];
    if (k > 0) {
      const Index u = chain.idx[k - 1];
      if (u == v || !(leq.test(u, v) || leq.test(v, u)))
        throw InvalidArgument("orient_chain: consecutive points are not related");
    }
    prof.push_back(weight_of(c.mu, c.past, v));
  }
  bool up = true, down = true;
  for (std::size_t k = 1; k < prof.size(); ++k) {
    if (prof[k] < prof[k - 1]) up = false;
    if (prof[k] > prof[k - 1]) down = false;
  }
  if (up == down) throw InvalidArgument("orient_chain: ambiguous orientation (past-measure profile not strictly monotone in one direction)");
  return up ? Orientation::Future : Orientation::Past;
}

inline Orientation orient_chain(const FiniteLorentzSpace& s, const CausalChain& chain, double tol = kTol) {
  return orient_chain(cones_of(s, tol), derived_causal(s, tol), chain);
}

// x β y iff x <= y and some x < u < v < y has J(u,v) not totally ordered.
inline BitMatrix beta_relation(const BitMatrix& leq) {
  const std::size_t n = leq.size();
  const BitMatrix lt = strict_part(leq);
  const BitMatrix gt = lt.transposed();
  const BitMatrix geq = leq.transposed();
  BitMatrix wide(n);  // wide(u,v): J(u,v) contains an incomparable pair
  std::vector<BitMatrix::Word> members(leq.words_per_row());
  for (Index u = 0; u < n; ++u)
    lt.for_each_in_row(u, [&](Index v) {
      auto a = leq.row(u), b = geq.row(v);
      for (std::size_t w = 0; w < members.size(); ++w) members[w] = a[w] & b[w];
      bool found = false;
      for (std::size_t w = 0; w < members.size() && !found; ++w) {
        BitMatrix::Word x = members[w];
        while (x && !found) {
          const Index z = w * 64 + static_cast<Index>(std::countr_zero(x));
          x &= x - 1;
          auto up = leq.row(z), dn = geq.row(z);
          for (std::size_t k = 0; k < members.size(); ++k)
            if (members[k] & ~(up[k] | dn[k])) {
              found = true;
              break;
            }
        }
      }
      if (found) wide.set(u, v);
    });
  BitMatrix out(n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      if (!lt.test(x, y)) continue;
      bool ok = false;
      lt.for_each_in_row(x, [&](Index u) {
        if (!ok && lt.test(u, y) && and_any(wide.row(u), gt.row(y))) ok = true;
      });
      if (ok) out.set(x, y);
    }
  return out;
}

// p γ q iff (∀a > p ∃b: a > b > p, b <= q) and (∀c < q ∃d: c < d < q, p <= d).
inline BitMatrix gamma_relation(const BitMatrix& leq) {
  const std::size_t n = leq.size();
  const BitMatrix lt = strict_part(leq);
  const BitMatrix gt = lt.transposed();
  const BitMatrix geq = leq.transposed();
  std::vector<BitMatrix::Word> tmp(leq.words_per_row());
  BitMatrix out(n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      bool ok = true;
      // b ranges over lt(p, ·) ∩ geq(q, ·) [b <= q], and must satisfy b < a
      for (std::size_t w = 0; w < tmp.size(); ++w) tmp[w] = lt.row(p)[w] & geq.row(q)[w];
      lt.for_each_in_row(p, [&](Index a) {
        if (ok && !and_any(tmp, gt.row(a))) ok = false;
      });
      if (!ok) continue;
      for (std::size_t w = 0; w < tmp.size(); ++w) tmp[w] = gt.row(q)[w] & leq.row(p)[w];
      gt.for_each_in_row(q, [&](Index c) {
        if (ok && !and_any(tmp, lt.row(c))) ok = false;
      });
      if (ok) out.set(p, q);
    }
  return out;
}

// Every β-related pair spans an order interval of positive measure.
inline bool pomc_check(const FinitePOM& p) {
  const BitMatrix beta = beta_relation(p.leq);
  const BitMatrix geq = p.leq.transposed();
  for (Index x = 0; x < p.size(); ++x) {
    bool ok = true;
    beta.for_each_in_row(x, [&](Index y) {
      if (ok && !(weight_and(p.mu, p.leq.row(x), geq.row(y)) > 0)) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace lorgh
