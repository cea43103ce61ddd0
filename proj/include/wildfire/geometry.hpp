#pragma once

// Closed polylines in the plane: measures, intersections, resampling and
// removal of self-intersection loops.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "wildfire/error.hpp"
#include "wildfire/vec.hpp"

namespace wildfire {

/// Fire front: ordered vertices; closed fronts run counterclockwise with the
/// burned region on the left.
struct FrontPolyline {
  std::vector<Point> points;
  bool closed = true;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Point& operator[](std::size_t i) const { return points[i]; }
  std::size_t edge_count() const {
    if (points.size() < 2) return 0;
    return closed ? points.size() : points.size() - 1;
  }
  std::pair<Point, Point> edge(std::size_t i) const {
    return {points[i], points[(i + 1) % points.size()]};
  }
};

inline double signed_area(const FrontPolyline& f) {
  const auto& p = f.points;
  const std::size_t n = p.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = p[i];
    const Point& b = p[(i + 1) % n];
    s += (a.x - b.x) * (a.y + b.y);
  }
  return 0.5 * s;
}

inline double perimeter(const FrontPolyline& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.edge_count(); ++i) {
    const auto [a, b] = f.edge(i);
    s += distance(a, b);
  }
  return s;
}

inline bool is_counterclockwise(const FrontPolyline& f) { return signed_area(f) > 0.0; }

struct BoundingBox {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void add(Point p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  double diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }
};

inline BoundingBox bounding_box(const std::vector<Point>& pts) {
  BoundingBox b;
  for (const Point& p : pts) b.add(p);
  return b;
}

/// Closed fronts need >= 3 points and no coincident consecutive points.
inline void validate_front(const FrontPolyline& f) {
  if (f.closed && f.size() < 3) throw GeometryError("closed front needs at least 3 points");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i].x) || !std::isfinite(f[i].y)) {
      throw GeometryError("front vertex " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < f.edge_count(); ++i) {
    const auto [a, b] = f.edge(i);
    if (distance(a, b) <= 1e-12)
      throw GeometryError("front vertices " + std::to_string(i) + " and " +
                          std::to_string((i + 1) % f.size()) + " coincide");
  }
}

/// Drops consecutive duplicates (within tol), including the closing wrap.
inline FrontPolyline remove_duplicate_points(const FrontPolyline& f, double tol = 1e-12) {
  FrontPolyline out;
  out.closed = f.closed;
  for (const Point& p : f.points)
    if (out.points.empty() || distance(out.points.back(), p) > tol) out.points.push_back(p);
  while (f.closed && out.points.size() > 1 && distance(out.points.front(), out.points.back()) <= tol)
    out.points.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Segments

inline double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

struct SegmentHit {
  double t = 0.0;  // parameter along the first segment
  double u = 0.0;  // parameter along the second segment
  Point p;
};

/// Intersection of closed segments [a, b] and [c, d]. Collinear overlaps are
/// reported through `overlap` and return nullopt.
inline std::optional<SegmentHit> segment_intersection(Point a, Point b, Point c, Point d,
                                                      bool* overlap = nullptr) {
  if (overlap) *overlap = false;
  const TangentVector r = b - a;
  const TangentVector s = d - c;
  const double denom = cross(r, s);
  const TangentVector ca = c - a;
  if (denom == 0.0) {
    if (cross(ca, r) != 0.0) return std::nullopt;  // parallel, disjoint
    const double rr = dot(r, r);
    if (rr == 0.0) return std::nullopt;
    const double t0 = dot(ca, r) / rr;
    const double t1 = dot(d - a, r) / rr;
    if (std::max(t0, t1) >= 0.0 && std::min(t0, t1) <= 1.0 && overlap) *overlap = true;
    return std::nullopt;
  }
  const double t = cross(ca, s) / denom;
  const double u = cross(ca, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return SegmentHit{t, u, {a.x + t * r.v1, a.y + t * r.v2}};
}

inline double point_segment_distance(Point p, Point a, Point b) {
  const TangentVector ab = b - a;
  const double L2 = dot(ab, ab);
  if (L2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / L2, 0.0, 1.0);
  return distance(p, {a.x + t * ab.v1, a.y + t * ab.v2});
}

inline double distance_to_polyline(Point p, const FrontPolyline& f) {
  if (f.size() == 1) return distance(p, f[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.edge_count(); ++i) {
    const auto [a, b] = f.edge(i);
    best = std::min(best, point_segment_distance(p, a, b));
  }
  return best;
}

/// Symmetric Hausdorff distance between the two polylines (vertex-to-curve).
inline double hausdorff_distance(const FrontPolyline& A, const FrontPolyline& B) {
  double h = 0.0;
  for (const Point& p : A.points) h = std::max(h, distance_to_polyline(p, B));
  for (const Point& p : B.points) h = std::max(h, distance_to_polyline(p, A));
  return h;
}

/// Even-odd crossing test. Points on the boundary may go either way.
inline bool point_in_polygon(Point p, const FrontPolyline& f) {
  bool inside = false;
  const std::size_t n = f.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = f[i];
    const Point& b = f[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

/// True when every vertex of `inner` lies inside `outer` or within tol of it.
inline bool contains(const FrontPolyline& outer, const FrontPolyline& inner, double tol) {
  for (const Point& p : inner.points)
    if (!point_in_polygon(p, outer) && distance_to_polyline(p, outer) > tol) return false;
  return true;
}

struct EdgeCrossing {
  std::size_t i = 0;
  std::size_t j = 0;
  SegmentHit hit;
};

namespace detail {

inline bool edges_adjacent(std::size_t i, std::size_t j, std::size_t n_edges, bool closed) {
  if (i == j) return true;
  if (j == i + 1 || i == j + 1) return true;
  if (closed && ((i == 0 && j == n_edges - 1) || (j == 0 && i == n_edges - 1))) return true;
  return false;
}

/// All intersections between non-adjacent edges; edges are swept in x order.
inline std::vector<EdgeCrossing> find_crossings(const FrontPolyline& f, bool throw_on_overlap) {
  const std::size_t m = f.edge_count();
  std::vector<std::size_t> order(m);
  std::vector<double> lo(m), hi(m);
  for (std::size_t i = 0; i < m; ++i) {
    order[i] = i;
    const auto [a, b] = f.edge(i);
    lo[i] = std::min(a.x, b.x);
    hi[i] = std::max(a.x, b.x);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lo[a] != lo[b] ? lo[a] < lo[b] : a < b;
  });
  std::vector<EdgeCrossing> out;
  for (std::size_t oi = 0; oi < m; ++oi) {
    const std::size_t i = order[oi];
    const auto [a, b] = f.edge(i);
    for (std::size_t oj = oi + 1; oj < m && lo[order[oj]] <= hi[i]; ++oj) {
      const std::size_t j = order[oj];
      if (edges_adjacent(i, j, m, f.closed)) continue;
      const auto [c, d] = f.edge(j);
      if (std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y))
        continue;
      bool overlap = false;
      const auto hit = segment_intersection(a, b, c, d, &overlap);
      if (overlap && throw_on_overlap) {
        throw GeometryError("collinear overlapping edges " + std::to_string(std::min(i, j)) +
                            " and " + std::to_string(std::max(i, j)));
      }
      if (!hit) continue;
      if (i < j) out.push_back({i, j, *hit});
      else out.push_back({j, i, SegmentHit{hit->u, hit->t, hit->p}});
    }
  }
  std::sort(out.begin(), out.end(), [](const EdgeCrossing& x, const EdgeCrossing& y) {
    return x.i != y.i ? x.i < y.i : x.j < y.j;
  });
  return out;
}

}  // namespace detail

/// Pairs of non-adjacent edges that touch or cross.
inline std::vector<EdgeCrossing> self_intersections(const FrontPolyline& f) {
  return detail::find_crossings(f, false);
}

inline bool is_simple(const FrontPolyline& f) { return self_intersections(f).empty(); }

// ---------------------------------------------------------------------------
// Resampling

/// Equal arc-length resampling of a closed front starting at its first
/// vertex. A front whose edges are all within 10% of the spacing is returned
/// unchanged.
inline FrontPolyline resample(const FrontPolyline& f, double spacing) {
  if (!(spacing > 0.0)) throw InvalidInput("spacing", "must be positive");
  if (!f.closed) throw GeometryError("resample expects a closed front");
  if (f.size() < 3) throw GeometryError("closed front needs at least 3 points");
  const double L = perimeter(f);
  if (spacing > L) {
    std::ostringstream os;
    os << "spacing " << spacing << " exceeds the front perimeter " << L;
    throw GeometryError(os.str());
  }
  const auto n = std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(L / spacing)));
  const double step = L / static_cast<double>(n);
  // Already equidistributed fronts are a fixed point, which keeps repeated
  // resampling from drifting.
  auto all_edges_near = [&](double target) {
    for (std::size_t i = 0; i < f.edge_count(); ++i) {
      const auto [a, b] = f.edge(i);
      if (std::abs(distance(a, b) - target) > 0.1 * target) return false;
    }
    return true;
  };
  if (all_edges_near(spacing) || (f.size() == n && all_edges_near(step))) return f;
  FrontPolyline out;
  out.closed = true;
  out.points.reserve(n);
  out.points.push_back(f[0]);
  std::size_t e = 0;
  double edge_start = 0.0;  // arc length at the start of edge e
  double edge_len = distance(f.edge(0).first, f.edge(0).second);
  for (std::size_t k = 1; k < n; ++k) {
    const double s = step * static_cast<double>(k);
    while (edge_start + edge_len < s && e + 1 < f.edge_count()) {
      edge_start += edge_len;
      ++e;
      edge_len = distance(f.edge(e).first, f.edge(e).second);
    }
    const auto [a, b] = f.edge(e);
    const double t = edge_len > 0.0 ? std::clamp((s - edge_start) / edge_len, 0.0, 1.0) : 0.0;
    out.points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return remove_duplicate_points(out);
}

// ---------------------------------------------------------------------------
// Untangling

/// Outer boundary of a closed, possibly self-intersecting front: the walk
/// around the unbounded face of the arrangement of its edges, returned
/// counterclockwise. Loops (swallowtails) and inner crossings are dropped.
/// A front with no self-intersections is returned unchanged.
inline FrontPolyline untangle(const FrontPolyline& f) {
  if (!f.closed) throw GeometryError("untangle expects a closed front");
  const FrontPolyline src = remove_duplicate_points(f);
  validate_front(src);
  const auto crossings = detail::find_crossings(src, true);
  if (crossings.empty()) return f;

  const std::size_t n = src.size();
  const double tol = 1e-12 * std::max(1.0, bounding_box(src.points).diagonal());

  // Nodes: original vertices, then crossing points.
  std::vector<Point> nodes = src.points;
  // Per edge: (parameter, node) split points.
  std::vector<std::vector<std::pair<double, std::size_t>>> splits(n);
  auto node_for = [&](std::size_t edge, double t, Point p) -> std::size_t {
    if (t <= 1e-12 || distance(p, src[edge]) <= tol) return edge;
    if (t >= 1.0 - 1e-12 || distance(p, src[(edge + 1) % n]) <= tol) return (edge + 1) % n;
    for (const auto& [tt, id] : splits[edge])
      if (distance(nodes[id], p) <= tol) return id;
    return std::numeric_limits<std::size_t>::max();
  };
  for (const EdgeCrossing& c : crossings) {
    std::size_t a = node_for(c.i, c.hit.t, c.hit.p);
    std::size_t b = node_for(c.j, c.hit.u, c.hit.p);
    std::size_t id = a != std::numeric_limits<std::size_t>::max() ? a : b;
    if (id == std::numeric_limits<std::size_t>::max()) {
      id = nodes.size();
      nodes.push_back(c.hit.p);
    }
    if (id != c.i && id != (c.i + 1) % n) splits[c.i].push_back({c.hit.t, id});
    if (id != c.j && id != (c.j + 1) % n) splits[c.j].push_back({c.hit.u, id});
  }

  // Undirected adjacency.
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  auto link = [&](std::size_t u, std::size_t v) {
    if (u == v) return;
    if (std::find(adj[u].begin(), adj[u].end(), v) == adj[u].end()) adj[u].push_back(v);
    if (std::find(adj[v].begin(), adj[v].end(), u) == adj[v].end()) adj[v].push_back(u);
  };
  for (std::size_t e = 0; e < n; ++e) {
    auto& s = splits[e];
    std::sort(s.begin(), s.end());
    std::size_t prev = e;
    for (const auto& [t, id] : s) {
      link(prev, id);
      prev = id;
    }
    link(prev, (e + 1) % n);
  }

  std::size_t start = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].x < nodes[start].x || (nodes[i].x == nodes[start].x && nodes[i].y < nodes[start].y))
      start = i;
  }

  // Turn as far right as possible at every node: the exterior stays on the
  // right, so the walk traces the outer face counterclockwise.
  auto next_node = [&](std::size_t at, TangentVector incoming) {
    const double back = std::atan2(-incoming.v2, -incoming.v1);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_angle = std::numeric_limits<double>::infinity();
    for (std::size_t nb : adj[at]) {
      const TangentVector d = nodes[nb] - nodes[at];
      double ang = std::atan2(d.v2, d.v1) - back;
      while (ang <= 0.0) ang += 2.0 * std::numbers::pi;
      while (ang > 2.0 * std::numbers::pi) ang -= 2.0 * std::numbers::pi;
      if (ang < best_angle) {
        best_angle = ang;
        best = nb;
      }
    }
    if (best == std::numeric_limits<std::size_t>::max())
      throw GeometryError("untangle reached an isolated node");
    return best;
  };

  FrontPolyline out;
  out.closed = true;
  std::size_t cur = start;
  std::size_t nxt = next_node(start, {0.0, -1.0});
  const std::size_t first_next = nxt;
  const std::size_t limit = 4 * (nodes.size() + crossings.size()) + 16;
  for (std::size_t steps = 0;; ++steps) {
    if (steps > limit) throw GeometryError("untangle walk did not close");
    out.points.push_back(nodes[cur]);
    const TangentVector d = nodes[nxt] - nodes[cur];
    cur = nxt;
    nxt = next_node(cur, d);
    if (cur == start && nxt == first_next) break;
  }
  out = remove_duplicate_points(out);
  if (out.size() < 3) throw GeometryError("untangled front collapsed");
  return out;
}

}  // namespace wildfire
