#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lorgh/error.hpp"
#include "lorgh/matrix.hpp"

namespace lorgh {

inline constexpr double kTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Index = std::size_t;
using Coords = std::vector<double>;

inline std::vector<std::string> default_ids(std::size_t n, const std::string& prefix = "p") {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = prefix + std::to_string(i);
  return ids;
}

// Point set with signed Lorentzian distance. sigma(x,y) > 0 means x lies in the
// chronological past of y; unrelated pairs carry 0. Null relations can only be
// expressed through the optional causal matrix.
struct FiniteLorentzSpace {
  std::vector<std::string> points;
  SquareMatrix<double> sigma;
  std::optional<BitMatrix> causal;
  std::optional<std::vector<double>> mu;
  std::optional<std::vector<Coords>> labels;  // ground truth only, never read by algorithms

  std::size_t size() const { return sigma.size(); }
};

struct FinitePOM {
  std::vector<std::string> points;
  BitMatrix leq;  // reflexive partial order
  std::vector<double> mu;

  std::size_t size() const { return leq.size(); }
};

// Metric matrix; kInf marks pairs in different components of an intrinsified metric.
struct FiniteMetricSpace {
  std::vector<std::string> points;
  SquareMatrix<double> d;

  std::size_t size() const { return d.size(); }
};

struct CausalChain {
  std::vector<Index> idx;
};

// ---------------------------------------------------------------- validation

enum class Axiom {
  Antisymmetry,
  ZeroDiagonal,
  ReverseTriangle,
  CausalReflexive,
  CausalAntisymmetric,
  CausalTransitive,
  CausalMissesChronology,
};

inline const char* to_string(Axiom a) {
  switch (a) {
    case Axiom::Antisymmetry: return "antisymmetry";
    case Axiom::ZeroDiagonal: return "zero-diagonal";
    case Axiom::ReverseTriangle: return "reverse-triangle";
    case Axiom::CausalReflexive: return "causal-reflexive";
    case Axiom::CausalAntisymmetric: return "causal-antisymmetric";
    case Axiom::CausalTransitive: return "causal-transitive";
    case Axiom::CausalMissesChronology: return "causal-contains-chronology";
  }
  return "?";
}

struct Violation {
  Axiom axiom;
  std::vector<Index> tuple;
  double amount = 0;  // size of the violation, 0 for boolean axioms
};

struct ValidationReport {
  std::vector<Violation> violations;  // first max_listed violations
  std::size_t total = 0;               // all violations found
  bool ok() const { return total == 0; }
};

inline void check_shape(const FiniteLorentzSpace& s) {
  const std::size_t n = s.sigma.size();
  if (s.sigma.data().size() != n * n) throw MalformedInput("sigma is not square");
  if (!s.points.empty() && s.points.size() != n) throw MalformedInput("points and sigma sizes differ");
  for (double v : s.sigma.data())
    if (!std::isfinite(v)) throw MalformedInput("sigma has a non-finite entry");
  if (s.causal && s.causal->size() != n) throw MalformedInput("causal matrix size differs from sigma");
  if (s.mu) {
    if (s.mu->size() != n) throw MalformedInput("mu size differs from sigma");
    for (double w : *s.mu)
      if (!std::isfinite(w) || w < 0) throw MalformedInput("mu must be finite and nonnegative");
  }
}

inline BitMatrix chronological_pairs(const FiniteLorentzSpace& s, double tol = kTol) {
  const std::size_t n = s.size();
  BitMatrix c(n);
  for (Index i = 0; i < n; ++i) {
    auto r = s.sigma.row(i);
    for (Index j = 0; j < n; ++j)
      if (r[j] > tol) c.set(i, j);
  }
  return c;
}

inline ValidationReport validate_lorentz(const FiniteLorentzSpace& s, double tol = kTol,
                                         std::size_t max_listed = 1000) {
  check_shape(s);
  ValidationReport rep;
  auto add = [&](Axiom a, std::vector<Index> t, double amount) {
    ++rep.total;
    if (rep.violations.size() < max_listed) rep.violations.push_back({a, std::move(t), amount});
  };
  const std::size_t n = s.size();
  const auto& sg = s.sigma;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(sg(i, i)) > tol) add(Axiom::ZeroDiagonal, {i}, std::abs(sg(i, i)));
    for (Index j = i + 1; j < n; ++j) {
      const double e = std::abs(sg(i, j) + sg(j, i));
      if (e > tol) add(Axiom::Antisymmetry, {i, j}, e);
    }
  }
  const BitMatrix chron = chronological_pairs(s, tol);
  for (Index x = 0; x < n; ++x) {
    chron.for_each_in_row(x, [&](Index y) {
      const double sxy = sg(x, y);
      chron.for_each_in_row(y, [&](Index z) {
        const double gap = sxy + sg(y, z) - sg(x, z);
        if (gap > tol) add(Axiom::ReverseTriangle, {x, y, z}, gap);
      });
    });
  }
  if (s.causal) {
    const BitMatrix& c = *s.causal;
    for (Index i = 0; i < n; ++i) {
      if (!c.test(i, i)) add(Axiom::CausalReflexive, {i}, 0);
      for (Index j = 0; j < n; ++j) {
        if (i != j && i < j && c.test(i, j) && c.test(j, i)) add(Axiom::CausalAntisymmetric, {i, j}, 0);
        if (chron.test(i, j) && !c.test(i, j)) add(Axiom::CausalMissesChronology, {i, j}, 0);
      }
    }
    for (Index i = 0; i < n; ++i) {
      c.for_each_in_row(i, [&](Index j) {
        if (j == i) return;
        c.for_each_in_row(j, [&](Index k) {
          if (!c.test(i, k)) add(Axiom::CausalTransitive, {i, j, k}, 0);
        });
      });
    }
  }
  return rep;
}

// Empty string when m is a reflexive partial order, otherwise a description.
inline std::string partial_order_defect(const BitMatrix& m) {
  const std::size_t n = m.size();
  for (Index i = 0; i < n; ++i)
    if (!m.test(i, i)) return "not reflexive at " + std::to_string(i);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (m.test(i, j) && m.test(j, i))
        return "not antisymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")";
  BitMatrix closed = m;
  transitive_closure_inplace(closed);
  if (!(closed == m)) return "not transitive";
  return {};
}

inline BitMatrix derived_causal(const FiniteLorentzSpace& s, double tol = kTol) {
  const BitMatrix chron = chronological_pairs(s, tol);
  if (s.causal) {
    const BitMatrix& c = *s.causal;
    if (c.size() != s.size()) throw MalformedInput("causal matrix size differs from sigma");
    if (auto d = partial_order_defect(c); !d.empty()) throw MalformedInput("supplied causal matrix " + d);
    for (Index i = 0; i < s.size(); ++i)
      chron.for_each_in_row(i, [&](Index j) {
        if (!c.test(i, j)) throw MalformedInput("supplied causal matrix misses a chronological pair");
      });
    return c;
  }
  BitMatrix c = chron;
  for (Index i = 0; i < s.size(); ++i) c.set(i, i);
  transitive_closure_inplace(c);
  return c;
}

inline BitMatrix strict_part(const BitMatrix& leq) {
  BitMatrix s = leq;
  for (Index i = 0; i < s.size(); ++i) s.set(i, i, false);
  return s;
}

inline FiniteLorentzSpace subspace(const FiniteLorentzSpace& s, const std::vector<Index>& keep) {
  FiniteLorentzSpace out;
  const std::size_t m = keep.size();
  out.sigma = SquareMatrix<double>(m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) out.sigma(a, b) = s.sigma(keep[a], keep[b]);
  for (Index k : keep) out.points.push_back(s.points.empty() ? std::to_string(k) : s.points[k]);
  if (s.causal) {
    BitMatrix c(m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b)
        if (s.causal->test(keep[a], keep[b])) c.set(a, b);
    out.causal = std::move(c);
  }
  if (s.mu) {
    std::vector<double> w;
    for (Index k : keep) w.push_back((*s.mu)[k]);
    out.mu = std::move(w);
  }
  if (s.labels) {
    std::vector<Coords> l;
    for (Index k : keep) l.push_back((*s.labels)[k]);
    out.labels = std::move(l);
  }
  return out;
}

inline FiniteMetricSpace submetric(const FiniteMetricSpace& m, const std::vector<Index>& keep) {
  FiniteMetricSpace out;
  out.d = SquareMatrix<double>(keep.size());
  for (Index a = 0; a < keep.size(); ++a) {
    out.points.push_back(m.points.empty() ? std::to_string(keep[a]) : m.points[keep[a]]);
    for (Index b = 0; b < keep.size(); ++b) out.d(a, b) = m.d(keep[a], keep[b]);
  }
  return out;
}

inline bool has_future(const FiniteLorentzSpace& s, Index i, double tol) {
  for (double v : s.sigma.row(i))
    if (v > tol) return true;
  return false;
}
inline bool has_past(const FiniteLorentzSpace& s, Index i, double tol) {
  for (double v : s.sigma.row(i))
    if (v < -tol) return true;
  return false;
}

inline std::vector<Index> underline_indices(const FiniteLorentzSpace& s, double tol = kTol) {
  std::vector<Index> keep;
  for (Index i = 0; i < s.size(); ++i)
    if (has_future(s, i, tol) && has_past(s, i, tol)) keep.push_back(i);
  return keep;
}

inline FiniteLorentzSpace restrict_underline(const FiniteLorentzSpace& s, double tol = kTol) {
  return subspace(s, underline_indices(s, tol));
}

struct BoundarySets {
  std::vector<Index> past;    // empty chronological past
  std::vector<Index> future;  // empty chronological future
};

inline BoundarySets boundary_sets(const FiniteLorentzSpace& s, double tol = kTol) {
  BoundarySets b;
  for (Index i = 0; i < s.size(); ++i) {
    if (!has_past(s, i, tol)) b.past.push_back(i);
    if (!has_future(s, i, tol)) b.future.push_back(i);
  }
  return b;
}

struct TimeDiameter {
  double value = 0;  // inf over the future boundary of sup over the past boundary
  double dual = 0;   // inf over the past boundary of sup over the future boundary
};

inline TimeDiameter tdiam(const FiniteLorentzSpace& s, double tol = kTol) {
  const BoundarySets b = boundary_sets(s, tol);
  if (b.past.empty() || b.future.empty()) throw InvalidArgument("tdiam: empty boundary set");
  TimeDiameter t{kInf, kInf};
  for (Index y : b.future) {
    double sup = 0;
    for (Index x : b.past) sup = std::max(sup, s.sigma(x, y));
    t.value = std::min(t.value, sup);
  }
  for (Index x : b.past) {
    double sup = 0;
    for (Index y : b.future) sup = std::max(sup, s.sigma(x, y));
    t.dual = std::min(t.dual, sup);
  }
  return t;
}

inline double diam_minus(const FiniteLorentzSpace& s) {
  double m = 0;
  for (double v : s.sigma.data()) m = std::max(m, std::abs(v));
  return m;
}

inline FinitePOM to_pom(const FiniteLorentzSpace& s, double tol = kTol) {
  if (!s.mu) throw InvalidArgument("space carries no weights");
  FinitePOM p;
  p.points = s.points.empty() ? default_ids(s.size()) : s.points;
  p.leq = derived_causal(s, tol);
  p.mu = *s.mu;
  return p;
}

inline void check_pom(const FinitePOM& p) {
  if (p.mu.size() != p.size()) throw MalformedInput("mu size differs from order size");
  for (double w : p.mu)
    if (!std::isfinite(w) || w < 0) throw MalformedInput("mu must be finite and nonnegative");
  if (auto d = partial_order_defect(p.leq); !d.empty()) throw MalformedInput("order " + d);
}

inline void check_metric(const FiniteMetricSpace& m, double tol = kTol) {
  const std::size_t n = m.size();
  for (Index i = 0; i < n; ++i) {
    if (m.d(i, i) != 0) throw MalformedInput("metric diagonal is not zero");
    for (Index j = 0; j < n; ++j) {
      const double v = m.d(i, j);
      if (std::isnan(v) || v < 0) throw MalformedInput("metric entry negative or NaN");
      if (std::abs(v - m.d(j, i)) > tol && !(std::isinf(v) && std::isinf(m.d(j, i))))
        throw MalformedInput("metric is not symmetric");
    }
  }
}

// Largest violation of the triangle inequality (0 for a pseudometric).
inline double triangle_defect(const FiniteMetricSpace& m) {
  const std::size_t n = m.size();
  double worst = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        const double lhs = m.d(i, k), rhs = m.d(i, j) + m.d(j, k);
        if (std::isinf(rhs)) continue;
        worst = std::max(worst, lhs - rhs);
      }
  return worst;
}

}  // namespace lorgh
