#pragma once

// d-dimensional polytope kernel: frames (extreme points), hull membership,
// exact centroids by simplicial decomposition, and component extrema.
//
// Point sets are Eigen matrices with one point per column. All routines are
// templated on the scalar type; `double` aliases are provided at the bottom.
//
// Tolerances are relative to the diameter of the point set being processed,
// because consensus runs shrink every configuration towards a point and an
// absolute epsilon would eventually swallow the whole polytope.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "consensus/errors.hpp"

namespace consensus {

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using PointSetT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct GeometryTolerances {
  Scalar duplicate = Scalar(1e-9);   // points closer than this * scale are merged
  Scalar membership = Scalar(1e-9);  // distance slack for hull membership
  Scalar rank = Scalar(1e-9);        // singular values below this * scale are zero
};

/// Supporting half-space normal . x <= offset (normal has unit length).
template <typename Scalar>
struct Facet {
  PointT<Scalar> normal;
  Scalar offset = 0;
  std::vector<int> members;  // indices of points lying on the hyperplane
};

template <typename Scalar>
struct Polytope {
  PointSetT<Scalar> vertices;  // frame, one vertex per column, lexicographic order
  int dim_ambient = 0;
  int dim_affine = 0;
  Scalar scale = 0;  // diameter of the frame

  // Affine hull: x = origin + basis * y with y in R^dim_affine.
  PointT<Scalar> origin;
  PointSetT<Scalar> basis;
  PointSetT<Scalar> affine_coords;          // frame in affine coordinates
  std::vector<Facet<Scalar>> affine_facets;  // facets in affine coordinates

  // Ambient half-spaces, populated only when dim_affine == dim_ambient.
  std::vector<Facet<Scalar>> facets;

  GeometryTolerances<Scalar> tol;

  int vertex_count() const { return static_cast<int>(vertices.cols()); }
};

template <typename Scalar>
struct CentroidResult {
  PointT<Scalar> centroid;
  Scalar volume = 0;  // measured in dim_affine dimensions
};

namespace detail {

template <typename Scalar>
void require_finite(const PointSetT<Scalar>& points, const char* what) {
  if (!points.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
}

template <typename Scalar>
Scalar diameter(const PointSetT<Scalar>& points) {
  Scalar best = 0;
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    for (Eigen::Index j = i + 1; j < points.cols(); ++j)
      best = std::max(best, (points.col(i) - points.col(j)).norm());
  return best;
}

template <typename Scalar>
bool lex_less(const PointT<Scalar>& a, const PointT<Scalar>& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (b(i) < a(i)) return false;
  }
  return false;
}

/// Lexicographically sorted columns with near-duplicates removed.
template <typename Scalar>
PointSetT<Scalar> canonical_points(const PointSetT<Scalar>& points, Scalar merge_distance) {
  std::vector<PointT<Scalar>> cols;
  cols.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) cols.emplace_back(points.col(j));
  std::sort(cols.begin(), cols.end(), lex_less<Scalar>);
  std::vector<PointT<Scalar>> kept;
  for (const auto& c : cols) {
    bool dup = false;
    for (const auto& k : kept) {
      if ((c - k).norm() <= merge_distance) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(c);
  }
  PointSetT<Scalar> out(points.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = kept[j];
  return out;
}

inline bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

inline double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Facets of a full-dimensional point set in R^r (r >= 2), by enumerating
/// r-subsets that span a supporting hyperplane. Exhaustive but robust to
/// non-simplicial faces; point counts here are at most a few dozen.
template <typename Scalar>
std::vector<Facet<Scalar>> enumerate_facets(const PointSetT<Scalar>& pts, Scalar rank_tol,
                                             Scalar plane_tol) {
  const int r = static_cast<int>(pts.rows());
  const int m = static_cast<int>(pts.cols());
  if (r < 2 || m < r + 1) throw GeometryError("enumerate_facets: need r >= 2 and m > r");
  if (binomial(m, r) > 2e7) {
    throw GeometryError("enumerate_facets: " + std::to_string(m) + " points in dimension " +
                        std::to_string(r) + " exceeds the exhaustive facet budget");
  }
  std::vector<Facet<Scalar>> facets;
  std::set<std::vector<int>> seen;
  std::vector<int> idx(static_cast<std::size_t>(r));
  std::iota(idx.begin(), idx.end(), 0);
  PointSetT<Scalar> edges(r - 1, r);
  do {
    bool known = false;
    for (const auto& f : facets) {
      if (std::includes(f.members.begin(), f.members.end(), idx.begin(), idx.end())) {
        known = true;
        break;
      }
    }
    if (known) continue;
    const auto base = pts.col(idx[0]);
    for (int j = 1; j < r; ++j) edges.row(j - 1) = (pts.col(idx[static_cast<std::size_t>(j)]) - base).transpose();
    Eigen::JacobiSVD<PointSetT<Scalar>> svd(edges, Eigen::ComputeFullV);
    if (svd.singularValues()(r - 2) <= rank_tol) continue;
    PointT<Scalar> normal = svd.matrixV().col(r - 1);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> side = pts.transpose() * normal;
    side.array() -= normal.dot(base);
    if (side.maxCoeff() <= plane_tol) {
      // outward already
    } else if (side.minCoeff() >= -plane_tol) {
      normal = -normal;
      side = -side;
    } else {
      continue;
    }
    Facet<Scalar> f;
    for (int k = 0; k < m; ++k)
      if (std::abs(side(k)) <= plane_tol) f.members.push_back(k);
    if (!seen.insert(f.members).second) continue;
    f.normal = normal;
    f.offset = (pts.transpose() * normal).maxCoeff();
    facets.push_back(std::move(f));
  } while (next_combination(idx, m));

  // Tolerance can make one hyperplane show up with nested member sets.
  std::vector<Facet<Scalar>> maximal;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    bool contained = false;
    for (std::size_t j = 0; j < facets.size() && !contained; ++j) {
      if (i == j || facets[j].members.size() <= facets[i].members.size()) continue;
      contained = std::includes(facets[j].members.begin(), facets[j].members.end(),
                                facets[i].members.begin(), facets[i].members.end());
    }
    if (!contained) maximal.push_back(facets[i]);
  }
  return maximal;
}

/// Indices of points whose active facet normals span R^r, i.e. vertices.
template <typename Scalar>
std::vector<int> vertex_indices(const PointSetT<Scalar>& pts, const std::vector<Facet<Scalar>>& facets) {
  const int r = static_cast<int>(pts.rows());
  std::vector<int> result;
  for (int k = 0; k < pts.cols(); ++k) {
    std::vector<const Facet<Scalar>*> active;
    for (const auto& f : facets)
      if (std::binary_search(f.members.begin(), f.members.end(), k)) active.push_back(&f);
    if (static_cast<int>(active.size()) < r) continue;
    PointSetT<Scalar> normals(static_cast<Eigen::Index>(active.size()), r);
    for (std::size_t i = 0; i < active.size(); ++i) normals.row(static_cast<Eigen::Index>(i)) = active[i]->normal.transpose();
    Eigen::JacobiSVD<PointSetT<Scalar>> svd(normals);
    if (svd.singularValues()(r - 1) > Scalar(1e-9)) result.push_back(k);
  }
  return result;
}

/// Orthonormal basis (r x (r-1)) of the hyperplane orthogonal to `normal`.
template <typename Scalar>
PointSetT<Scalar> hyperplane_basis(const PointT<Scalar>& normal) {
  const Eigen::Index r = normal.size();
  const PointSetT<Scalar> column = normal;
  Eigen::HouseholderQR<PointSetT<Scalar>> qr(column);
  PointSetT<Scalar> q = qr.householderQ() * PointSetT<Scalar>::Identity(r, r);
  return q.rightCols(r - 1);
}

/// Simplices (r x (r+1) each) tiling the full-dimensional polytope whose
/// vertices are the columns of `pts`. The fan apex is the vertex average;
/// non-simplicial facets are tiled recursively in their own hyperplane.
template <typename Scalar>
void fan_simplices(const PointSetT<Scalar>& pts, const std::vector<Facet<Scalar>>* known_facets,
                   const GeometryTolerances<Scalar>& tol, std::vector<PointSetT<Scalar>>& out) {
  const Eigen::Index r = pts.rows();
  const Eigen::Index m = pts.cols();
  if (r == 1) {
    PointSetT<Scalar> s(1, 2);
    s << pts.minCoeff(), pts.maxCoeff();
    out.push_back(std::move(s));
    return;
  }
  if (m == r + 1) {
    out.push_back(pts);
    return;
  }
  const Scalar scale = diameter<Scalar>(pts);
  std::vector<Facet<Scalar>> local;
  if (known_facets == nullptr) {
    local = enumerate_facets<Scalar>(pts, tol.rank * scale, tol.membership * scale);
    known_facets = &local;
  }
  const PointT<Scalar> apex = pts.rowwise().mean();
  for (const auto& f : *known_facets) {
    const Eigen::Index k = static_cast<Eigen::Index>(f.members.size());
    PointSetT<Scalar> face(r, k);
    for (Eigen::Index j = 0; j < k; ++j) face.col(j) = pts.col(f.members[static_cast<std::size_t>(j)]);
    if (k == r) {
      PointSetT<Scalar> s(r, r + 1);
      s.col(0) = apex;
      s.rightCols(r) = face;
      out.push_back(std::move(s));
      continue;
    }
    const PointSetT<Scalar> basis = hyperplane_basis<Scalar>(f.normal);
    const PointT<Scalar> centre = face.rowwise().mean();
    const PointSetT<Scalar> projected = basis.transpose() * (face.colwise() - centre);
    std::vector<PointSetT<Scalar>> sub;
    fan_simplices<Scalar>(projected, nullptr, tol, sub);
    for (const auto& s : sub) {
      PointSetT<Scalar> lifted(r, r + 1);
      lifted.col(0) = apex;
      lifted.rightCols(r) = (basis * s).colwise() + centre;
      out.push_back(std::move(lifted));
    }
  }
}

inline double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Frame of a finite point set: the extreme points of its convex hull,
/// together with the affine hull and (when full-dimensional) the facets.
template <typename Scalar>
Polytope<Scalar> convex_hull(const PointSetT<Scalar>& points,
                             const GeometryTolerances<Scalar>& tol = {}) {
  if (points.cols() == 0) throw std::invalid_argument("convex_hull: empty point set");
  if (points.rows() == 0) throw std::invalid_argument("convex_hull: zero-dimensional points");
  detail::require_finite<Scalar>(points, "convex_hull");
  const int d = static_cast<int>(points.rows());
  const Scalar input_scale = detail::diameter<Scalar>(points);
  // Rounding noise of the coordinates themselves: once a set has shrunk to a
  // few ulps of its magnitude its shape is noise and it collapses to a point.
  const Scalar noise = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * points.cwiseAbs().maxCoeff();
  const Scalar merge_tol = std::max<Scalar>(tol.duplicate * input_scale, noise);
  const PointSetT<Scalar> pts = detail::canonical_points<Scalar>(points, merge_tol);

  Polytope<Scalar> poly;
  poly.dim_ambient = d;
  poly.tol = tol;
  poly.origin = pts.rowwise().mean();

  const PointSetT<Scalar> centered = pts.colwise() - poly.origin;
  Eigen::JacobiSVD<PointSetT<Scalar>> svd(centered, Eigen::ComputeThinU);
  int rank = 0;
  if (pts.cols() > 1) {
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > std::max<Scalar>(tol.rank * input_scale, noise)) ++rank;
    rank = std::min<int>(rank, static_cast<int>(pts.cols()) - 1);
  }
  poly.dim_affine = rank;
  poly.basis = svd.matrixU().leftCols(rank);
  const PointSetT<Scalar> coords = poly.basis.transpose() * centered;

  std::vector<int> frame;
  std::vector<Facet<Scalar>> facets;
  if (rank == 0) {
    frame = {0};
  } else if (rank == 1) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    coords.row(0).minCoeff(&lo);
    coords.row(0).maxCoeff(&hi);
    frame = {static_cast<int>(std::min(lo, hi)), static_cast<int>(std::max(lo, hi))};
  } else {
    facets = detail::enumerate_facets<Scalar>(coords, std::max<Scalar>(tol.rank * input_scale, noise),
                                              std::max<Scalar>(tol.membership * input_scale, noise));
    frame = detail::vertex_indices<Scalar>(coords, facets);
    if (static_cast<int>(frame.size()) < rank + 1) {
      throw GeometryError("convex_hull: found " + std::to_string(frame.size()) +
                          " vertices for a " + std::to_string(rank) + "-dimensional hull");
    }
  }

  const Eigen::Index k = static_cast<Eigen::Index>(frame.size());
  poly.vertices.resize(d, k);
  poly.affine_coords.resize(rank, k);
  std::vector<int> remap(static_cast<std::size_t>(pts.cols()), -1);
  for (Eigen::Index j = 0; j < k; ++j) {
    poly.vertices.col(j) = pts.col(frame[static_cast<std::size_t>(j)]);
    poly.affine_coords.col(j) = coords.col(frame[static_cast<std::size_t>(j)]);
    remap[static_cast<std::size_t>(frame[static_cast<std::size_t>(j)])] = static_cast<int>(j);
  }
  for (auto& f : facets) {
    std::vector<int> kept;
    for (int idx : f.members)
      if (remap[static_cast<std::size_t>(idx)] >= 0) kept.push_back(remap[static_cast<std::size_t>(idx)]);
    f.members = std::move(kept);
  }
  poly.affine_facets = std::move(facets);
  poly.scale = detail::diameter<Scalar>(poly.vertices);

  if (rank == d) {
    if (rank == 1) {
      // Segment on the line; vertices are sorted, so column 0 is the lower end.
      const PointT<Scalar> up = PointT<Scalar>::Ones(1);
      poly.facets = {Facet<Scalar>{up, poly.vertices(0, 1), {1}},
                     Facet<Scalar>{-up, -poly.vertices(0, 0), {0}}};
    } else {
      for (const auto& f : poly.affine_facets) {
        Facet<Scalar> g;
        g.normal = poly.basis * f.normal;
        g.offset = f.offset + g.normal.dot(poly.origin);
        g.members = f.members;
        poly.facets.push_back(std::move(g));
      }
    }
  }
  return poly;
}

template <typename Scalar>
Polytope<Scalar> convex_hull(const std::vector<PointT<Scalar>>& points,
                             const GeometryTolerances<Scalar>& tol = {}) {
  if (points.empty()) throw std::invalid_argument("convex_hull: empty point set");
  PointSetT<Scalar> m(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != m.rows()) throw std::invalid_argument("convex_hull: mixed dimensions");
    m.col(static_cast<Eigen::Index>(j)) = points[j];
  }
  return convex_hull<Scalar>(m, tol);
}

/// Euclidean distance from x to the convex hull of the columns of `vertices`
/// (Wolfe's minimum-norm-point method). Returns early once the distance is
/// known to be at most `stop_below`.
template <typename Scalar>
Scalar hull_distance(const PointSetT<Scalar>& vertices, const PointT<Scalar>& x,
                     Scalar stop_below = Scalar(0)) {
  if (vertices.cols() == 0) throw std::invalid_argument("hull_distance: empty vertex set");
  if (vertices.rows() != x.size()) throw std::invalid_argument("hull_distance: dimension mismatch");
  const PointSetT<Scalar> p = vertices.colwise() - x;
  const Eigen::Index m = p.cols();
  const Scalar max_sq = p.colwise().squaredNorm().maxCoeff();
  const Scalar eps_opt = Scalar(1e-13) * max_sq;
  const Scalar eps_zero = Scalar(1e-14);

  Eigen::Index start = 0;
  p.colwise().squaredNorm().minCoeff(&start);
  std::vector<Eigen::Index> active{start};
  std::vector<Scalar> lambda{Scalar(1)};
  PointT<Scalar> w = p.col(start);

  auto affine_minimizer = [&](std::vector<Scalar>& mu) {
    const Eigen::Index s = static_cast<Eigen::Index>(active.size());
    PointSetT<Scalar> kkt = PointSetT<Scalar>::Zero(s + 1, s + 1);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = 0; j < s; ++j) kkt(i, j) = p.col(active[i]).dot(p.col(active[j]));
      kkt(i, s) = 1;
      kkt(s, i) = 1;
    }
    PointT<Scalar> rhs = PointT<Scalar>::Zero(s + 1);
    rhs(s) = 1;
    const PointT<Scalar> sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    mu.assign(sol.data(), sol.data() + s);
  };

  const int max_iter = 100 + 20 * static_cast<int>(m);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (w.norm() <= stop_below) return w.norm();
    Eigen::Index j = 0;
    const Scalar best = (w.transpose() * p).minCoeff(&j);
    if (w.squaredNorm() - best <= eps_opt) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lambda.push_back(0);
    for (int minor = 0; minor < max_iter; ++minor) {
      std::vector<Scalar> mu;
      affine_minimizer(mu);
      bool interior = true;
      for (Scalar v : mu) interior = interior && v > eps_zero;
      if (interior) {
        lambda = mu;
        break;
      }
      Scalar theta = 1;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] <= eps_zero) {
          const Scalar denom = lambda[i] - mu[i];
          if (denom > 0) theta = std::min(theta, lambda[i] / denom);
        }
      }
      for (std::size_t i = 0; i < mu.size(); ++i) lambda[i] = theta * mu[i] + (1 - theta) * lambda[i];
      std::vector<Eigen::Index> next_active;
      std::vector<Scalar> next_lambda;
      for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > eps_zero) {
          next_active.push_back(active[i]);
          next_lambda.push_back(lambda[i]);
        }
      }
      if (next_active.empty()) {
        next_active.push_back(active.back());
        next_lambda.push_back(1);
      }
      active = std::move(next_active);
      lambda = std::move(next_lambda);
      const Scalar total = std::accumulate(lambda.begin(), lambda.end(), Scalar(0));
      for (auto& l : lambda) l /= total;
    }
    w.setZero();
    for (std::size_t i = 0; i < active.size(); ++i) w += lambda[i] * p.col(active[i]);
  }
  return w.norm();
}

/// Default membership slack for `poly`: relative tolerance times its diameter.
template <typename Scalar>
Scalar membership_tolerance(const Polytope<Scalar>& poly) {
  return poly.tol.membership * poly.scale;
}

/// True iff x lies within distance `tol` of the hull.
template <typename Scalar>
bool contains(const Polytope<Scalar>& poly, const PointT<Scalar>& x, Scalar tol) {
  if (x.size() != poly.dim_ambient) throw std::invalid_argument("contains: dimension mismatch");
  if (!poly.facets.empty()) {
    Scalar worst = -std::numeric_limits<Scalar>::infinity();
    for (const auto& f : poly.facets) worst = std::max(worst, f.normal.dot(x) - f.offset);
    if (worst <= 0) return true;
    if (worst > tol) return false;  // a violated half-space bounds the distance from below
  }
  return hull_distance<Scalar>(poly.vertices, x, tol) <= tol;
}

template <typename Scalar>
bool contains(const Polytope<Scalar>& poly, const PointT<Scalar>& x) {
  return contains<Scalar>(poly, x, membership_tolerance(poly));
}

/// Centroid of the uniform measure on the hull, in the hull's own dimension.
template <typename Scalar>
CentroidResult<Scalar> centroid(const Polytope<Scalar>& poly) {
  if (poly.vertices.cols() == 0) throw std::invalid_argument("centroid: empty polytope");
  const int r = poly.dim_affine;
  CentroidResult<Scalar> result;
  if (r == 0) {
    result.centroid = poly.vertices.col(0);
    result.volume = 0;
    return result;
  }
  std::vector<PointSetT<Scalar>> simplices;
  detail::fan_simplices<Scalar>(poly.affine_coords, r >= 2 ? &poly.affine_facets : nullptr, poly.tol,
                                simplices);
  PointT<Scalar> weighted = PointT<Scalar>::Zero(r);
  Scalar volume = 0;
  const Scalar norm = static_cast<Scalar>(detail::factorial(r));
  for (const auto& s : simplices) {
    const PointSetT<Scalar> spans = s.rightCols(r).colwise() - s.col(0);
    const Scalar vol = std::abs(spans.determinant()) / norm;
    weighted += vol * s.rowwise().mean();
    volume += vol;
  }
  if (!(volume > 0) || !std::isfinite(static_cast<double>(volume))) {
    throw GeometryError("centroid: simplicial decomposition has zero volume (" +
                        std::to_string(simplices.size()) + " simplices, dim " + std::to_string(r) + ")");
  }
  result.centroid = poly.origin + poly.basis * (weighted / volume);
  result.volume = volume;
  return result;
}

/// Per-coordinate minimum and maximum over the columns.
template <typename Scalar>
std::pair<PointT<Scalar>, PointT<Scalar>> component_extrema(const PointSetT<Scalar>& points) {
  if (points.cols() == 0) throw std::invalid_argument("component_extrema: empty point set");
  return {points.rowwise().minCoeff(), points.rowwise().maxCoeff()};
}

/// Pyramid with apex at the origin over the (d-1)-cube of edge `theta`
/// centred on the first axis at x_1 = L.
template <typename Scalar>
Polytope<Scalar> build_hyperpyramid(int d, Scalar L, Scalar theta) {
  if (d < 1 || !(L > 0) || !(theta > 0))
    throw std::invalid_argument("build_hyperpyramid: need d >= 1, L > 0, theta > 0");
  const Eigen::Index base = Eigen::Index{1} << (d - 1);
  PointSetT<Scalar> pts = PointSetT<Scalar>::Zero(d, base + 1);
  for (Eigen::Index b = 0; b < base; ++b) {
    pts(0, b + 1) = L;
    for (int i = 1; i < d; ++i) pts(i, b + 1) = ((b >> (i - 1)) & 1) ? theta / 2 : -theta / 2;
  }
  return convex_hull<Scalar>(pts);
}

template <typename Scalar>
struct MonteCarloCentroid {
  PointT<Scalar> mean;
  PointT<Scalar> standard_error;
  std::size_t accepted = 0;
  std::size_t samples = 0;
};

/// Rejection-sampling estimate of the centroid of a full-dimensional hull.
template <typename Scalar>
MonteCarloCentroid<Scalar> centroid_oracle_mc(const PointSetT<Scalar>& points, std::size_t samples,
                                              std::uint64_t seed) {
  if (samples < 10000) throw std::invalid_argument("centroid_oracle_mc: need at least 1e4 samples");
  const Polytope<Scalar> poly = convex_hull<Scalar>(points);
  if (poly.dim_affine != poly.dim_ambient)
    throw std::invalid_argument("centroid_oracle_mc: hull is not full-dimensional");
  const int d = poly.dim_ambient;
  const PointT<Scalar> lo = poly.vertices.rowwise().minCoeff();
  const PointT<Scalar> hi = poly.vertices.rowwise().maxCoeff();
  const Scalar tol = membership_tolerance(poly);

  std::mt19937_64 rng(seed);
  PointT<Scalar> sum = PointT<Scalar>::Zero(d);
  PointT<Scalar> sum_sq = PointT<Scalar>::Zero(d);
  PointT<Scalar> x(d);
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) {
      const Scalar u = static_cast<Scalar>(static_cast<double>(rng() >> 11) * 0x1.0p-53);
      x(i) = lo(i) + u * (hi(i) - lo(i));
    }
    if (!contains<Scalar>(poly, x, tol)) continue;
    ++accepted;
    sum += x;
    sum_sq += x.cwiseProduct(x);
  }
  const double rate = static_cast<double>(accepted) / static_cast<double>(samples);
  if (rate < 1e-3 || accepted < 2) {
    throw OracleUnreliable("centroid_oracle_mc: acceptance rate " + std::to_string(rate) +
                           " below 1e-3");
  }
  MonteCarloCentroid<Scalar> out;
  const Scalar count = static_cast<Scalar>(accepted);
  out.mean = sum / count;
  const PointT<Scalar> var =
      ((sum_sq / count) - out.mean.cwiseProduct(out.mean)).cwiseMax(Scalar(0)) * (count / (count - 1));
  out.standard_error = (var / count).cwiseSqrt();
  out.accepted = accepted;
  out.samples = samples;
  return out;
}

using Point = PointT<double>;
using PointSet = PointSetT<double>;
using Polytoped = Polytope<double>;

/// Columns from a list of points (all of the same dimension).
inline PointSet to_point_set(const std::vector<Point>& points) {
  if (points.empty()) return PointSet();
  PointSet m(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != m.rows()) throw std::invalid_argument("to_point_set: mixed dimensions");
    m.col(static_cast<Eigen::Index>(j)) = points[j];
  }
  return m;
}

}  // namespace consensus
