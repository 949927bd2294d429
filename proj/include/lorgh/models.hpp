#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lorgh/core.hpp"
#include "lorgh/rng.hpp"

namespace lorgh {

using SigmaFn = std::function<double(std::span<const double>, std::span<const double>)>;

// Signed Minkowski distance; coordinates are (t, x_1, ..., x_n).
inline double minkowski_sigma(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) throw InvalidArgument("minkowski_sigma: dimension mismatch");
  const double dt = q[0] - p[0];
  double dx2 = 0;
  for (std::size_t i = 1; i < p.size(); ++i) dx2 += (q[i] - p[i]) * (q[i] - p[i]);
  const double s2 = dt * dt - dx2;
  if (s2 <= 0 || dt == 0) return 0.0;
  return dt > 0 ? std::sqrt(s2) : -std::sqrt(s2);
}

inline double unit_ball_volume(std::size_t n) {
  const double h = static_cast<double>(n) / 2.0;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

struct Region {
  enum class Kind { Slab, Diamond, Box };
  Kind kind = Kind::Diamond;
  std::size_t dim = 1;  // spatial dimension
  double a = 1;         // slab: t in [-a, a]
  double half_width = 1;  // slab: |x_i| <= half_width
  double tau = 1;         // diamond: |t| + |x| <= tau / 2
  std::vector<std::pair<double, double>> bounds;  // box: bounds[0] is time
  Coords center;                                  // translation applied to samples

  static Region slab(std::size_t dim, double a, double half_width) {
    if (a <= 0 || half_width <= 0) throw InvalidArgument("slab extents must be positive");
    Region r;
    r.kind = Kind::Slab, r.dim = dim, r.a = a, r.half_width = half_width;
    return r;
  }
  static Region diamond(std::size_t dim, double tau) {
    if (tau <= 0) throw InvalidArgument("diamond tau must be positive");
    Region r;
    r.kind = Kind::Diamond, r.dim = dim, r.tau = tau;
    return r;
  }
  static Region box(std::vector<std::pair<double, double>> b) {
    if (b.empty()) throw InvalidArgument("box needs a time axis");
    for (auto [lo, hi] : b)
      if (!(hi > lo)) throw InvalidArgument("box extents must be positive");
    Region r;
    r.kind = Kind::Box, r.dim = b.size() - 1, r.bounds = std::move(b);
    return r;
  }

  Region translated(Coords c) const {
    Region r = *this;
    r.center = std::move(c);
    return r;
  }

  double volume() const {
    switch (kind) {
      case Kind::Slab: return 2 * a * std::pow(2 * half_width, static_cast<double>(dim));
      case Kind::Diamond:
        return 2 * unit_ball_volume(dim) * std::pow(tau / 2, static_cast<double>(dim + 1)) /
               static_cast<double>(dim + 1);
      case Kind::Box: {
        double v = 1;
        for (auto [lo, hi] : bounds) v *= hi - lo;
        return v;
      }
    }
    return 0;
  }

  // bounding box of the untranslated region
  std::vector<std::pair<double, double>> bbox() const {
    switch (kind) {
      case Kind::Slab: {
        std::vector<std::pair<double, double>> b{{-a, a}};
        for (std::size_t i = 0; i < dim; ++i) b.emplace_back(-half_width, half_width);
        return b;
      }
      case Kind::Diamond: return std::vector<std::pair<double, double>>(dim + 1, {-tau / 2, tau / 2});
      case Kind::Box: return bounds;
    }
    return {};
  }

  // membership of an untranslated point
  bool contains_local(std::span<const double> x) const {
    if (kind != Kind::Diamond) return true;  // bounding box is exact
    double r2 = 0;
    for (std::size_t i = 1; i < x.size(); ++i) r2 += x[i] * x[i];
    return std::abs(x[0]) + std::sqrt(r2) <= tau / 2;
  }
};

// Uniform points in the region, `count` of them exactly.
inline std::vector<Coords> uniform_points(const Region& region, std::size_t count, Rng& rng) {
  const auto box = region.bbox();
  std::vector<Coords> pts;
  pts.reserve(count);
  Coords x(box.size());
  while (pts.size() < count) {
    for (std::size_t k = 0; k < box.size(); ++k) x[k] = rng.uniform(box[k].first, box[k].second);
    if (!region.contains_local(x)) continue;
    Coords y = x;
    for (std::size_t k = 0; k < region.center.size() && k < y.size(); ++k) y[k] += region.center[k];
    pts.push_back(std::move(y));
  }
  return pts;
}

// Poisson process of the given density in the region.
inline std::vector<Coords> sprinkle_coords(const Region& region, double density, std::uint64_t seed) {
  if (!(density > 0)) throw InvalidArgument("density must be positive");
  Rng rng(seed);
  const auto count = static_cast<std::size_t>(rng.poisson(density * region.volume()));
  return uniform_points(region, count, rng);
}

inline FiniteLorentzSpace space_from_coords(const std::vector<Coords>& pts, const SigmaFn& sigma_fn,
                                            std::optional<double> weight = std::nullopt) {
  const std::size_t n = pts.size();
  FiniteLorentzSpace s;
  s.points = default_ids(n, "s");
  s.sigma = SquareMatrix<double>(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double v = sigma_fn(pts[i], pts[j]);
      s.sigma(i, j) = v;
      s.sigma(j, i) = -v;
    }
  if (weight) s.mu = std::vector<double>(n, *weight);
  s.labels = pts;
  return s;
}

inline FiniteLorentzSpace space_from_coords(const std::vector<Coords>& pts,
                                            std::optional<double> weight = std::nullopt) {
  return space_from_coords(pts, minkowski_sigma, weight);
}

// Minkowski causal order straight from coordinates, without a dense sigma matrix.
// Relation: x < y iff sigma(x,y) > tol, which is already transitive.
inline FinitePOM pom_from_coords(const std::vector<Coords>& pts, double weight, double tol = kTol) {
  const std::size_t n = pts.size();
  FinitePOM p;
  p.points = default_ids(n, "s");
  p.leq = BitMatrix(n);
  p.mu.assign(n, weight);
  const double tol2 = tol * tol;
  for (Index i = 0; i < n; ++i) {
    p.leq.set(i, i);
    const Coords& a = pts[i];
    for (Index j = 0; j < n; ++j) {
      const Coords& b = pts[j];
      const double dt = b[0] - a[0];
      if (dt <= 0) continue;
      double s2 = dt * dt;
      for (std::size_t k = 1; k < a.size(); ++k) s2 -= (b[k] - a[k]) * (b[k] - a[k]);
      if (s2 > tol2) p.leq.set(i, j);
    }
  }
  return p;
}

inline FiniteLorentzSpace sprinkle(const Region& region, double density, std::uint64_t seed) {
  return space_from_coords(sprinkle_coords(region, density, seed), 1.0 / density);
}

// Fixed-size sample; weights are volume / count.
inline FiniteLorentzSpace sprinkle_n(const Region& region, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  return space_from_coords(uniform_points(region, count, rng), region.volume() / static_cast<double>(count));
}

// Lattice (1/n) Z^{1,d} with |t| <= r and |x_i| <= s (closed truncation), exact causal matrix.
inline FiniteLorentzSpace lattice(int n, double r, double s, std::size_t spatial_dim = 1) {
  if (n < 1) throw InvalidArgument("lattice: n must be >= 1");
  if (r < 0 || s < 0) throw InvalidArgument("lattice: truncations must be nonnegative");
  const long T = static_cast<long>(std::floor(r * n + 1e-9));
  const long X = static_cast<long>(std::floor(s * n + 1e-9));
  std::vector<std::vector<long>> ip;
  std::vector<long> cur(spatial_dim + 1);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == cur.size()) {
      ip.push_back(cur);
      return;
    }
    const long lim = k == 0 ? T : X;
    for (long v = -lim; v <= lim; ++v) {
      cur[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  const std::size_t m = ip.size();
  FiniteLorentzSpace out;
  out.sigma = SquareMatrix<double>(m);
  BitMatrix causal(m);
  std::vector<Coords> labels(m);
  const double inv = 1.0 / n;
  for (Index a = 0; a < m; ++a) {
    std::string id = "L(";
    for (std::size_t k = 0; k < ip[a].size(); ++k) {
      labels[a].push_back(static_cast<double>(ip[a][k]) * inv);
      id += (k ? "," : "") + std::to_string(ip[a][k]);
    }
    out.points.push_back(id + ")");
  }
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      const long dt = ip[b][0] - ip[a][0];
      long dx2 = 0;
      for (std::size_t k = 1; k < ip[a].size(); ++k) dx2 += (ip[b][k] - ip[a][k]) * (ip[b][k] - ip[a][k]);
      const long s2 = dt * dt - dx2;
      if (dt >= 0 && s2 >= 0) causal.set(a, b);
      if (s2 > 0 && dt != 0) out.sigma(a, b) = (dt > 0 ? 1.0 : -1.0) * std::sqrt(static_cast<double>(s2)) * inv;
    }
  }
  out.causal = std::move(causal);
  out.mu = std::vector<double>(m, std::pow(inv, static_cast<double>(spatial_dim + 1)));
  out.labels = std::move(labels);
  return out;
}

// Causal cylinder R x M restricted to the given times; point (times[a], m) has index a*|M| + m.
inline FiniteLorentzSpace causal_cylinder(const FiniteMetricSpace& M, const std::vector<double>& times) {
  const std::size_t k = M.size(), nt = times.size(), n = k * nt;
  FiniteLorentzSpace out;
  out.sigma = SquareMatrix<double>(n);
  BitMatrix causal(n);
  std::vector<Coords> labels(n);
  for (Index a = 0; a < nt; ++a)
    for (Index p = 0; p < k; ++p) {
      const Index i = a * k + p;
      out.points.push_back("(" + std::to_string(times[a]) + "," +
                           (M.points.empty() ? std::to_string(p) : M.points[p]) + ")");
      labels[i] = {times[a], static_cast<double>(p)};
    }
  for (Index a = 0; a < nt; ++a)
    for (Index b = 0; b < nt; ++b) {
      const double dt = times[b] - times[a];
      for (Index p = 0; p < k; ++p)
        for (Index q = 0; q < k; ++q) {
          const Index i = a * k + p, j = b * k + q;
          if (i == j) {
            causal.set(i, i);
            continue;
          }
          const double d = M.d(p, q);
          if (!(dt > 0) || std::isinf(d)) continue;
          if (dt >= d - 1e-12 * std::max(1.0, dt)) causal.set(i, j);
          const double s2 = dt * dt - d * d;
          const double v = s2 > 0 ? std::sqrt(s2) : 0.0;
          if (v > kTol) {
            out.sigma(i, j) = v;
            out.sigma(j, i) = -v;
          }
        }
    }
  out.causal = std::move(causal);
  out.labels = std::move(labels);
  return out;
}

// Product (X x Y, p(sigma, d)); point (x, y) has index x*|Y| + y.
inline FiniteLorentzSpace product(const FiniteLorentzSpace& X, const FiniteMetricSpace& Y) {
  const std::size_t nx = X.size(), ny = Y.size(), n = nx * ny;
  FiniteLorentzSpace out;
  out.sigma = SquareMatrix<double>(n);
  for (Index x = 0; x < nx; ++x)
    for (Index y = 0; y < ny; ++y)
      out.points.push_back((X.points.empty() ? std::to_string(x) : X.points[x]) + "|" +
                           (Y.points.empty() ? std::to_string(y) : Y.points[y]));
  for (Index x1 = 0; x1 < nx; ++x1)
    for (Index x2 = 0; x2 < nx; ++x2) {
      const double s = X.sigma(x1, x2);
      for (Index y1 = 0; y1 < ny; ++y1)
        for (Index y2 = 0; y2 < ny; ++y2) {
          const double d = Y.d(y1, y2);
          double v = 0;
          if (std::abs(s) > d) v = (s > 0 ? 1.0 : -1.0) * std::sqrt(s * s - d * d);
          out.sigma(x1 * ny + y1, x2 * ny + y2) = v;
        }
    }
  return out;
}

inline FiniteLorentzSpace scale(const FiniteLorentzSpace& X, double r) {
  if (!(r > 0)) throw InvalidArgument("scale factor must be positive");
  FiniteLorentzSpace out = X;
  for (double& v : out.sigma.data()) v *= r;
  return out;
}

// n equally spaced points on a circle of the given radius with arc-length metric.
inline FiniteMetricSpace circle_net(std::size_t n, double radius = 1.0) {
  FiniteMetricSpace m;
  m.points = default_ids(n, "c");
  m.d = SquareMatrix<double>(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const std::size_t k = i > j ? i - j : j - i;
      const std::size_t steps = std::min(k, n - k);
      m.d(i, j) = radius * 2 * std::numbers::pi * static_cast<double>(steps) / static_cast<double>(n);
    }
  return m;
}

// Grid points of spacing h inside the disc of the given radius, Euclidean metric.
inline FiniteMetricSpace disc_grid_net(double h, double radius = 1.0) {
  std::vector<std::pair<double, double>> pts;
  const long k = static_cast<long>(std::floor(radius / h));
  for (long i = -k; i <= k; ++i)
    for (long j = -k; j <= k; ++j) {
      const double x = static_cast<double>(i) * h, y = static_cast<double>(j) * h;
      if (x * x + y * y <= radius * radius + 1e-12) pts.emplace_back(x, y);
    }
  FiniteMetricSpace m;
  m.points = default_ids(pts.size(), "g");
  m.d = SquareMatrix<double>(pts.size());
  for (Index i = 0; i < pts.size(); ++i)
    for (Index j = 0; j < pts.size(); ++j)
      m.d(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  return m;
}

inline FiniteMetricSpace euclidean_metric(const std::vector<Coords>& pts) {
  FiniteMetricSpace m;
  m.points = default_ids(pts.size(), "e");
  m.d = SquareMatrix<double>(pts.size());
  for (Index i = 0; i < pts.size(); ++i)
    for (Index j = 0; j < pts.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      m.d(i, j) = std::sqrt(s);
    }
  return m;
}

// ------------------------------------------------------------ conformal pole
//
// 1+1 metric |t|^{-1} (-dt^2 + dx^2). Light cones are the Minkowski ones; the
// longest curve between related points has conserved momentum k, and the two
// integrals below give its length and spatial displacement over a time span
// T measured from the pole.

namespace pole_detail {

inline double length_from_pole(double k, double T) {
  const double w = k * std::sqrt(T);
  if (w < 1e-6) return 2 * std::sqrt(T) * (1 - w * w / 6);
  return 2 * std::asinh(w) / k;
}

inline double shift_from_pole(double k, double T) {
  const double w = k * std::sqrt(T);
  if (w < 1e-4) return (2.0 / 3.0) * k * T * std::sqrt(T) * (1 - 0.3 * w * w);
  return (w * std::sqrt(1 + w * w) - std::asinh(w)) / (k * k);
}

// integral over [t1, t2] split at the pole
template <typename G>
double span_integral(G g, double k, double t1, double t2) {
  if (t1 >= 0) return g(k, t2) - g(k, t1);
  if (t2 <= 0) return g(k, -t1) - g(k, -t2);
  return g(k, -t1) + g(k, t2);
}

}  // namespace pole_detail

inline double pole_sigma(std::span<const double> p, std::span<const double> q) {
  if (p.size() != 2 || q.size() != 2) throw InvalidArgument("pole_sigma is 1+1 dimensional");
  double t1 = p[0], t2 = q[0];
  double sign = 1;
  if (t2 < t1) std::swap(t1, t2), sign = -1;
  const double dx = std::abs(q[1] - p[1]);
  const double dt = t2 - t1;
  if (!(dt > dx)) return 0.0;
  using namespace pole_detail;
  auto shift = [&](double k) { return span_integral(shift_from_pole, k, t1, t2); };
  double lo = 0, hi = 1;
  while (shift(hi) < dx) hi *= 2;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shift(mid) < dx ? lo : hi) = mid;
  }
  return sign * span_integral(length_from_pole, 0.5 * (lo + hi), t1, t2);
}

// --------------------------------------------------------- embedded slices
//
// Adds spacelike points on {t = level} (1+1, Minkowski cones) so that the
// slice meets every maximal chain: first a regular row with the given spacing,
// then one repair point inside every crossing pair whose interval misses it.

struct SlicedSample {
  std::vector<Coords> coords;
  std::vector<Index> slice;  // indices of the slice points in coords
};

inline SlicedSample embed_slice(std::vector<Coords> bulk, double level, double x_lo, double x_hi,
                                double spacing) {
  if (!(spacing > 0) || !(x_hi > x_lo)) throw InvalidArgument("embed_slice: bad extents");
  std::vector<double> xs;
  const auto nrow = static_cast<std::size_t>(std::floor((x_hi - x_lo) / spacing));
  for (std::size_t i = 0; i <= nrow; ++i) xs.push_back(x_lo + spacing * static_cast<double>(i));
  std::vector<Index> below, above;
  for (Index i = 0; i < bulk.size(); ++i) {
    if (bulk[i].size() != 2) throw InvalidArgument("embed_slice is 1+1 dimensional");
    if (bulk[i][0] < level) below.push_back(i);
    else if (bulk[i][0] > level) above.push_back(i);
  }
  std::sort(xs.begin(), xs.end());
  auto hits = [&](double lo, double hi) {
    auto it = std::lower_bound(xs.begin(), xs.end(), lo);
    return it != xs.end() && *it <= hi;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (Index i : below)
      for (Index j : above) {
        const Coords &a = bulk[i], &b = bulk[j];
        const double da = level - a[0], db = b[0] - level;
        const double lo = std::max(a[1] - da, b[1] - db), hi = std::min(a[1] + da, b[1] + db);
        if (!(hi > lo) || hits(lo, hi)) continue;
        xs.insert(std::lower_bound(xs.begin(), xs.end(), 0.5 * (lo + hi)), 0.5 * (lo + hi));
        changed = true;
      }
  }
  SlicedSample out;
  out.coords = std::move(bulk);
  for (double x : xs) {
    out.slice.push_back(out.coords.size());
    out.coords.push_back({level, x});
  }
  return out;
}

}  // namespace lorgh
