#include "cavernsim/mesher.hpp"

#include "cavernsim/error.hpp"
#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

namespace cavernsim {

using detail::orient2d;

// ---------------------------------------------------------------------------
// CavernProfile

CavernProfile CavernProfile::capsule(double radius, double height)
{
  if (!(radius > 0.0) || !(height >= 2.0 * radius)) {
    throw ValidationError("profile", "capsule needs radius > 0 and height >= 2 * radius");
  }
  std::vector<Vec2> pts;
  constexpr int arc_segments = 48;
  for (int i = 0; i <= arc_segments; ++i) {
    const double t = 0.5 * std::numbers::pi * i / arc_segments;
    pts.push_back({radius * std::sin(t), radius - radius * std::cos(t)});
  }
  for (int i = 0; i <= arc_segments; ++i) {
    const double t = 0.5 * std::numbers::pi * i / arc_segments;
    const Vec2 p{radius * std::cos(t), height - radius + radius * std::sin(t)};
    if (i == 0 && std::abs(p.y - pts.back().y) < 1e-12) {
      continue;
    }
    pts.push_back(p);
  }
  pts.back() = {0.0, height};
  CavernProfile profile;
  profile.points_ = std::move(pts);
  return profile;
}

CavernProfile CavernProfile::from_points(std::vector<Vec2> points)
{
  if (points.size() < 3) {
    throw ValidationError("profile", "needs at least three points");
  }
  if (points.front().x != 0.0 || points.back().x != 0.0 || points.front().y != 0.0) {
    throw ValidationError("profile", "must start at (0, 0) and end on the axis (radius 0)");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].y >= points[i - 1].y) || (points[i].y == points[i - 1].y && points[i].x == points[i - 1].x)) {
      throw ValidationError("profile", "depth must be non-decreasing without repeated points");
    }
    if (i + 1 < points.size() && !(points[i].x > 0.0)) {
      throw ValidationError("profile", "interior points need a positive radius");
    }
  }
  if (!(points.back().y > 0.0)) {
    throw ValidationError("profile", "height must be positive");
  }
  CavernProfile profile;
  profile.points_ = std::move(points);
  return profile;
}

double CavernProfile::height() const
{
  return points_.empty() ? 0.0 : points_.back().y;
}

double CavernProfile::max_radius() const
{
  double r = 0.0;
  for (const auto& p : points_) {
    r = std::max(r, p.x);
  }
  return r;
}

double CavernProfile::depth_of_max_radius() const
{
  // midpoint of the plateau when the maximum is attained on a straight run
  const double r = max_radius();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : points_) {
    if (p.x >= r * (1.0 - 1e-12)) {
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
  }
  return 0.5 * (lo + hi);
}

double CavernProfile::revolved_volume() const
{
  // frustum per segment: pi/3 * h * (r1^2 + r1 r2 + r2^2)
  double v = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double r1 = points_[i - 1].x;
    const double r2 = points_[i].x;
    const double h = points_[i].y - points_[i - 1].y;
    v += std::numbers::pi / 3.0 * h * (r1 * r1 + r1 * r2 + r2 * r2);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Domain layouts

DomainSpec single_cavern_domain(const CavernProfile& profile,
                                double top_depth,
                                double roof_thickness,
                                double floor_thickness,
                                double width)
{
  DomainSpec spec;
  spec.width = width;
  spec.top_depth = top_depth;
  const double roof = top_depth + roof_thickness;
  spec.bottom_depth = roof + profile.height() + floor_thickness;
  spec.caverns.push_back({profile, 0.0, roof});
  return spec;
}

DomainSpec twin_cavern_domain(const CavernProfile& profile,
                              double ctc,
                              double top_depth,
                              double roof_thickness,
                              double floor_thickness,
                              double far_margin)
{
  const double r = profile.max_radius();
  DomainSpec spec = single_cavern_domain(profile, top_depth, roof_thickness, floor_thickness, 0.0);
  const double center = r + ctc + r;
  spec.caverns.push_back({profile, center, spec.caverns.front().roof_depth});
  spec.width = center + r + far_margin;
  return spec;
}

namespace {

struct Polyline
{
  std::vector<Vec2> pts;
  BoundaryTag tag = BoundaryTag::FarField;
};

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly)
{
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

/// Wall polyline of a placed cavern in domain coordinates (y = -depth).
/// Half caverns run from roof apex to floor apex on the right side; full
/// caverns are closed loops without a repeated end point.
std::vector<Vec2> wall_polyline(const CavernPlacement& c)
{
  std::vector<Vec2> right;
  for (const auto& p : c.profile.points()) {
    right.push_back({c.center_x + p.x, -(c.roof_depth + p.y)});
  }
  if (c.center_x == 0.0) {
    return right;
  }
  std::vector<Vec2> loop = right;
  for (auto it = c.profile.points().rbegin() + 1; it + 1 != c.profile.points().rend(); ++it) {
    loop.push_back({c.center_x - it->x, -(c.roof_depth + it->y)});
  }
  return loop;
}

class SpatialHash
{
public:
  explicit SpatialHash(double cell)
    : cell_(cell)
  {}

  void insert(int id, const Vec2& p) { cells_[key(p)].push_back(id); }

  template <typename F>
  void for_each_near(const Vec2& p, double radius, F&& f) const
  {
    const long long r = static_cast<long long>(std::ceil(radius / cell_));
    const auto [cx, cy] = coords(p);
    for (long long i = cx - r; i <= cx + r; ++i) {
      for (long long j = cy - r; j <= cy + r; ++j) {
        const auto it = cells_.find(pack(i, j));
        if (it != cells_.end()) {
          for (int id : it->second) {
            f(id);
          }
        }
      }
    }
  }

private:
  std::pair<long long, long long> coords(const Vec2& p) const
  {
    return {static_cast<long long>(std::floor(p.x / cell_)), static_cast<long long>(std::floor(p.y / cell_))};
  }
  static long long pack(long long i, long long j) { return (i << 32) ^ (j & 0xffffffffLL); }
  long long key(const Vec2& p) const
  {
    const auto [i, j] = coords(p);
    return pack(i, j);
  }

  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

class DomainBuilder
{
public:
  explicit DomainBuilder(const DomainSpec& spec)
    : spec_(spec)
  {
    check_feasible();
    h_far_ = spec.far_size;
    h_wall_ = spec.far_size / std::max(spec.refinement, 1.0);
    build_curves();
  }

  Mesh build()
  {
    double scale = 1.0;
    std::vector<Vec2> interior;
    for (int attempt = 0; attempt < 12; ++attempt) {
      discretize_boundary(scale);
      interior = sample_interior(scale);
      remove_encroaching(interior);
      if (!spec_.target_elements) {
        break;
      }
      const int wanted = wanted_interior();
      if (static_cast<int>(interior.size()) >= wanted && wanted >= 0) {
        if (static_cast<int>(interior.size()) - wanted <= std::max(4, wanted / 12)) {
          thin_to(interior, wanted);
          break;
        }
        scale *= std::sqrt(static_cast<double>(interior.size()) / wanted) * 1.0;
      } else {
        const double ratio = wanted > 0 ? static_cast<double>(interior.size()) / wanted : 0.5;
        scale *= std::sqrt(std::max(ratio, 0.25)) * 0.97;
      }
      if (attempt == 11) {
        throw ValidationError("mesh.target_elements", "could not reach the requested element count");
      }
    }
    return triangulate(interior);
  }

private:
  void check_feasible() const
  {
    if (!(spec_.width > 0.0) || !(spec_.bottom_depth > spec_.top_depth)) {
      throw ValidationError("mesh", "domain needs positive width and height");
    }
    if (!(spec_.far_size > 0.0) || !(spec_.refinement >= 1.0)) {
      throw ValidationError("mesh", "far_size must be positive and refinement >= 1");
    }
    int half = 0;
    for (std::size_t i = 0; i < spec_.caverns.size(); ++i) {
      const auto& c = spec_.caverns[i];
      const double r = c.profile.max_radius();
      if (c.center_x == 0.0) {
        ++half;
      }
      const bool fits_x = c.center_x - (c.center_x == 0.0 ? 0.0 : r) >= 0.0 && c.center_x + r < spec_.width;
      const bool fits_y = c.roof_depth > spec_.top_depth && c.roof_depth + c.profile.height() < spec_.bottom_depth;
      if (!fits_x || !fits_y || (c.center_x != 0.0 && c.center_x - r <= 0.0)) {
        throw ValidationError("mesh.caverns[" + std::to_string(i) + "]", "cavern does not fit inside the domain");
      }
      for (std::size_t j = 0; j < i; ++j) {
        const auto& o = spec_.caverns[j];
        const double gap = std::abs(c.center_x - o.center_x) - r - o.profile.max_radius();
        const bool overlap_y = c.roof_depth < o.roof_depth + o.profile.height() &&
                               o.roof_depth < c.roof_depth + c.profile.height();
        if (overlap_y && gap <= 0.0) {
          throw ValidationError("mesh.caverns[" + std::to_string(i) + "]",
                                "cavern-to-cavern distance smaller than the sum of radii");
        }
      }
    }
    if (half > 1) {
      throw ValidationError("mesh.caverns", "at most one cavern may sit on the symmetry axis");
    }
  }

  void build_curves()
  {
    const double x1 = spec_.width;
    const double ytop = -spec_.top_depth;
    const double ybot = -spec_.bottom_depth;

    const CavernPlacement* axis_cavern = nullptr;
    for (const auto& c : spec_.caverns) {
      const auto wall = wall_polyline(c);
      walls_.push_back(wall);
      if (c.center_x == 0.0) {
        axis_cavern = &c;
      } else {
        holes_.push_back({wall, BoundaryTag::CavernWall});
      }
    }

    outer_.push_back({{{0.0, ybot}, {x1, ybot}}, BoundaryTag::Bottom});
    outer_.push_back({{{x1, ybot}, {x1, ytop}}, BoundaryTag::FarField});
    outer_.push_back({{{x1, ytop}, {0.0, ytop}}, BoundaryTag::Top});
    if (axis_cavern != nullptr) {
      const auto wall = wall_polyline(*axis_cavern);
      outer_.push_back({{{0.0, ytop}, wall.front()}, BoundaryTag::SymmetryAxis});
      outer_.push_back({wall, BoundaryTag::CavernWall});
      outer_.push_back({{wall.back(), {0.0, ybot}}, BoundaryTag::SymmetryAxis});
    } else {
      outer_.push_back({{{0.0, ytop}, {0.0, ybot}}, BoundaryTag::SymmetryAxis});
    }

    outer_polygon_.clear();
    for (const auto& c : outer_) {
      outer_polygon_.insert(outer_polygon_.end(), c.pts.begin(), c.pts.end() - 1);
    }
  }

  double wall_distance(const Vec2& p) const
  {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < walls_.size(); ++k) {
      const auto& w = walls_[k];
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        d = std::min(d, dist_point_segment(p, w[i], w[i + 1]));
      }
      if (spec_.caverns[k].center_x != 0.0) {
        d = std::min(d, dist_point_segment(p, w.back(), w.front()));
      }
    }
    return d;
  }

  double size_at(const Vec2& p, double scale) const
  {
    if (walls_.empty()) {
      return h_far_ * scale;
    }
    return scale * std::min(h_far_, h_wall_ + spec_.grading * wall_distance(p));
  }

  bool inside_domain(const Vec2& p) const
  {
    if (!point_in_polygon(p, outer_polygon_)) {
      return false;
    }
    for (const auto& h : holes_) {
      if (point_in_polygon(p, h.pts)) {
        return false;
      }
    }
    return true;
  }

  int add_boundary_point(const Vec2& p)
  {
    for (int i = 0; i < static_cast<int>(bpts_.size()); ++i) {
      if (std::abs(bpts_[i].x - p.x) < 1e-9 && std::abs(bpts_[i].y - p.y) < 1e-9) {
        return i;
      }
    }
    bpts_.push_back(p);
    return static_cast<int>(bpts_.size()) - 1;
  }

  /// Splits at sharp corners, then spaces points so that each gap is about
  /// the local element size.
  std::vector<Vec2> resample(const std::vector<Vec2>& line, double scale, bool closed) const
  {
    std::vector<Vec2> pts = line;
    if (closed) {
      pts.push_back(line.front());
    }
    std::vector<std::size_t> corners{0};
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double ax = pts[i].x - pts[i - 1].x;
      const double ay = pts[i].y - pts[i - 1].y;
      const double bx = pts[i + 1].x - pts[i].x;
      const double by = pts[i + 1].y - pts[i].y;
      const double cosang = (ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by));
      if (cosang < std::cos(25.0 * std::numbers::pi / 180.0)) {
        corners.push_back(i);
      }
    }
    corners.push_back(pts.size() - 1);

    std::vector<Vec2> out;
    for (std::size_t c = 0; c + 1 < corners.size(); ++c) {
      // fine walk along the piece, integrating 1/h
      std::vector<Vec2> fine;
      std::vector<double> cum{0.0};
      fine.push_back(pts[corners[c]]);
      const double hmin = h_wall_ * scale;
      for (std::size_t i = corners[c]; i < corners[c + 1]; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[i + 1];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int sub = std::max(1, static_cast<int>(std::ceil(len / (0.1 * hmin))));
        for (int k = 1; k <= sub; ++k) {
          const double t = static_cast<double>(k) / sub;
          const Vec2 q{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
          const Vec2& prev = fine.back();
          const Vec2 mid{0.5 * (prev.x + q.x), 0.5 * (prev.y + q.y)};
          cum.push_back(cum.back() + std::hypot(q.x - prev.x, q.y - prev.y) / size_at(mid, scale));
          fine.push_back(q);
        }
      }
      const int n = std::max(1, static_cast<int>(std::lround(cum.back())));
      if (c == 0) {
        out.push_back(fine.front());
      }
      std::size_t j = 0;
      for (int k = 1; k < n; ++k) {
        const double target = cum.back() * k / n;
        while (cum[j + 1] < target) {
          ++j;
        }
        const double t = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push_back({fine[j].x + t * (fine[j + 1].x - fine[j].x), fine[j].y + t * (fine[j + 1].y - fine[j].y)});
      }
      out.push_back(fine.back());
    }
    if (closed) {
      out.pop_back();
    }
    return out;
  }

  void discretize_boundary(double scale)
  {
    bpts_.clear();
    segments_.clear();
    for (const auto& curve : outer_) {
      const auto pts = resample(curve.pts, scale, false);
      int prev = add_boundary_point(pts.front());
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const int cur = add_boundary_point(pts[i]);
        segments_.push_back({prev, cur, curve.tag});
        prev = cur;
      }
    }
    for (const auto& hole : holes_) {
      const auto pts = resample(hole.pts, scale, true);
      const int first = static_cast<int>(bpts_.size());
      for (const auto& p : pts) {
        bpts_.push_back(p);
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const int a = first + static_cast<int>(i);
        const int b = first + static_cast<int>((i + 1) % pts.size());
        segments_.push_back({a, b, BoundaryTag::CavernWall});
      }
    }
    split_encroached_segments();
  }

  /// Boundary points strictly inside another segment's diametral circle
  /// would keep that segment out of the Delaunay triangulation; split it.
  void split_encroached_segments()
  {
    for (int pass = 0; pass < 30; ++pass) {
      bool split = false;
      std::vector<BoundarySegment> next;
      for (const auto& s : segments_) {
        const Vec2 a = bpts_[s.a];
        const Vec2 b = bpts_[s.b];
        const Vec2 m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        const double r2 = 0.25 * ((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y));
        bool encroached = false;
        for (int i = 0; i < static_cast<int>(bpts_.size()) && !encroached; ++i) {
          if (i == s.a || i == s.b) {
            continue;
          }
          const double d2 = (bpts_[i].x - m.x) * (bpts_[i].x - m.x) + (bpts_[i].y - m.y) * (bpts_[i].y - m.y);
          encroached = d2 < r2 * (1.0 - 1e-9);
        }
        if (encroached) {
          bpts_.push_back(m);
          const int mid = static_cast<int>(bpts_.size()) - 1;
          next.push_back({s.a, mid, s.tag});
          next.push_back({mid, s.b, s.tag});
          split = true;
        } else {
          next.push_back(s);
        }
      }
      segments_ = std::move(next);
      if (!split) {
        return;
      }
    }
    throw Error("mesh generation: boundary refinement did not terminate (angle too small?)");
  }

  double boundary_distance(const Vec2& p) const
  {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) {
      d = std::min(d, dist_point_segment(p, bpts_[s.a], bpts_[s.b]));
    }
    return d;
  }

  std::vector<Vec2> sample_interior(double scale) const
  {
    const double hmin = h_wall_ * scale;
    const double ytop = -spec_.top_depth;
    const double ybot = -spec_.bottom_depth;

    // Candidates on a triangular lattice of spacing hmin, thinned greedily
    // in order of increasing local size.
    struct Candidate
    {
      Vec2 p;
      double h;
      double key;
    };
    std::vector<Candidate> cands;
    std::mt19937 rng(spec_.seed);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    const double dy = hmin * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = ybot + 0.5 * dy; y < ytop; y += dy, ++row) {
      const double offset = (row % 2) * 0.5 * hmin;
      for (double x = offset + 0.25 * hmin; x < spec_.width; x += hmin) {
        Vec2 p{x + jitter(rng) * hmin, y + jitter(rng) * hmin};
        if (!inside_domain(p)) {
          continue;
        }
        const double h = size_at(p, scale);
        if (boundary_distance_fast(p) < 0.55 * h) {
          continue;
        }
        cands.push_back({p, h, h + 1e-6 * jitter(rng)});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.key < b.key; });

    SpatialHash hash(hmin);
    std::vector<Vec2> accepted;
    std::vector<double> sizes;
    const double alpha = 0.86;
    const double hmax = h_far_ * scale;
    for (const auto& c : cands) {
      bool ok = true;
      hash.for_each_near(c.p, alpha * hmax, [&](int id) {
        if (!ok) {
          return;
        }
        const double r = alpha * 0.5 * (c.h + sizes[id]);
        const Vec2& q = accepted[id];
        ok = (q.x - c.p.x) * (q.x - c.p.x) + (q.y - c.p.y) * (q.y - c.p.y) >= r * r;
      });
      if (ok) {
        hash.insert(static_cast<int>(accepted.size()), c.p);
        accepted.push_back(c.p);
        sizes.push_back(c.h);
      }
    }
    return accepted;
  }

  double boundary_distance_fast(const Vec2& p) const
  {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& curve : outer_) {
      for (std::size_t i = 0; i + 1 < curve.pts.size(); ++i) {
        d = std::min(d, dist_point_segment(p, curve.pts[i], curve.pts[i + 1]));
      }
    }
    for (const auto& h : holes_) {
      const std::size_t n = h.pts.size();
      for (std::size_t i = 0; i < n; ++i) {
        d = std::min(d, dist_point_segment(p, h.pts[i], h.pts[(i + 1) % n]));
      }
    }
    return d;
  }

  void remove_encroaching(std::vector<Vec2>& interior) const
  {
    SpatialHash hash(h_wall_);
    for (int i = 0; i < static_cast<int>(interior.size()); ++i) {
      hash.insert(i, interior[i]);
    }
    std::vector<char> drop(interior.size(), 0);
    for (const auto& s : segments_) {
      const Vec2 a = bpts_[s.a];
      const Vec2 b = bpts_[s.b];
      const Vec2 m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      const double r2 = 0.25 * ((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y));
      hash.for_each_near(m, std::sqrt(r2) + 1e-9, [&](int id) {
        const Vec2& p = interior[id];
        if ((p.x - m.x) * (p.x - m.x) + (p.y - m.y) * (p.y - m.y) < r2 * (1.0 + 1e-6)) {
          drop[id] = 1;
        }
      });
    }
    std::vector<Vec2> kept;
    for (std::size_t i = 0; i < interior.size(); ++i) {
      if (!drop[i]) {
        kept.push_back(interior[i]);
      }
    }
    interior = std::move(kept);
  }

  /// Interior vertex count giving the target element count through the
  /// Euler relation T = 2 V_interior + V_boundary - 2 + 2 holes. Adds one
  /// boundary point on the far field when the parity does not work out.
  int wanted_interior()
  {
    const int target = *spec_.target_elements;
    const int holes = static_cast<int>(holes_.size());
    int vb = static_cast<int>(bpts_.size());
    if ((target - vb + 2 - 2 * holes) % 2 != 0) {
      auto longest = segments_.end();
      double best = -1.0;
      for (auto it = segments_.begin(); it != segments_.end(); ++it) {
        if (it->tag != BoundaryTag::FarField && it->tag != BoundaryTag::Bottom && it->tag != BoundaryTag::Top) {
          continue;
        }
        const double len = std::hypot(bpts_[it->b].x - bpts_[it->a].x, bpts_[it->b].y - bpts_[it->a].y);
        if (len > best) {
          best = len;
          longest = it;
        }
      }
      const BoundarySegment s = *longest;
      bpts_.push_back({0.5 * (bpts_[s.a].x + bpts_[s.b].x), 0.5 * (bpts_[s.a].y + bpts_[s.b].y)});
      const int mid = static_cast<int>(bpts_.size()) - 1;
      *longest = {s.a, mid, s.tag};
      segments_.push_back({mid, s.b, s.tag});
      ++vb;
    }
    return (target - vb + 2 - 2 * holes) / 2;
  }

  /// Drops the most crowded interior points until `wanted` remain.
  static void thin_to(std::vector<Vec2>& interior, int wanted)
  {
    while (static_cast<int>(interior.size()) > wanted) {
      std::size_t worst = 0;
      double worst_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < interior.size(); ++i) {
        for (std::size_t j = i + 1; j < interior.size(); ++j) {
          const double d = std::hypot(interior[i].x - interior[j].x, interior[i].y - interior[j].y);
          if (d < worst_d) {
            worst_d = d;
            worst = i;
          }
        }
      }
      interior.erase(interior.begin() + static_cast<std::ptrdiff_t>(worst));
    }
  }

  Mesh triangulate(const std::vector<Vec2>& interior)
  {
    std::vector<Vec2> pts = bpts_;
    const int nb = static_cast<int>(pts.size());
    pts.insert(pts.end(), interior.begin(), interior.end());

    // insertion order: boundary as generated, interior in row-snake order
    std::vector<int> order(interior.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = nb + static_cast<int>(i);
    }
    const double cell = 2.0 * h_wall_;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto ra = static_cast<long long>(std::floor(pts[a].y / cell));
      const auto rb = static_cast<long long>(std::floor(pts[b].y / cell));
      if (ra != rb) {
        return ra < rb;
      }
      return (ra % 2 == 0) ? pts[a].x < pts[b].x : pts[a].x > pts[b].x;
    });
    std::vector<Vec2> ordered;
    std::vector<int> original;
    for (int i = 0; i < nb; ++i) {
      ordered.push_back(pts[i]);
      original.push_back(i);
    }
    for (int id : order) {
      ordered.push_back(pts[id]);
      original.push_back(id);
    }

    auto tris = detail::delaunay_triangulate(ordered);
    for (auto& t : tris) {
      for (int& v : t) {
        v = original[v];
      }
    }

    // keep triangles inside the discretised boundary
    const auto loops = boundary_loops(pts);
    std::vector<std::array<int, 3>> kept;
    for (const auto& t : tris) {
      const Vec2 c{(pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0, (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0};
      if (!point_in_polygon(c, loops.front())) {
        continue;
      }
      bool in_hole = false;
      for (std::size_t h = 1; h < loops.size() && !in_hole; ++h) {
        in_hole = point_in_polygon(c, loops[h]);
      }
      if (!in_hole) {
        kept.push_back(t);
      }
    }

    smooth(pts, kept, nb);

    std::vector<Element> elements;
    elements.reserve(kept.size());
    for (const auto& t : kept) {
      elements.push_back({t, spec_.material});
    }
    Mesh mesh(pts, std::move(elements), segments_);
    return mesh.with_probes(default_probes(mesh));
  }

  /// Boundary loops walked through the segment graph, outer loop first.
  std::vector<std::vector<Vec2>> boundary_loops(const std::vector<Vec2>& pts) const
  {
    std::map<int, int> next;
    for (const auto& s : segments_) {
      next[s.a] = s.b;
    }
    std::set<int> seen;
    std::vector<std::vector<Vec2>> loops;
    for (const auto& [start, unused] : next) {
      if (seen.contains(start)) {
        continue;
      }
      std::vector<Vec2> loop;
      int cur = start;
      while (!seen.contains(cur)) {
        seen.insert(cur);
        loop.push_back(pts[cur]);
        cur = next.at(cur);
      }
      loops.push_back(std::move(loop));
    }
    auto extent = [](const std::vector<Vec2>& l) {
      double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
      for (const auto& p : l) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
      }
      return (xmax - xmin) * (ymax - ymin);
    };
    std::stable_sort(loops.begin(), loops.end(), [&](const auto& a, const auto& b) { return extent(a) > extent(b); });
    return loops;
  }

  /// A few Laplacian passes over interior vertices; a move is kept only if
  /// every incident triangle stays well shaped.
  static void smooth(std::vector<Vec2>& pts, const std::vector<std::array<int, 3>>& tris, int n_boundary)
  {
    std::vector<std::vector<int>> incident(pts.size());
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      for (int v : tris[t]) {
        incident[v].push_back(t);
      }
    }
    auto quality = [&](const std::array<int, 3>& t) {
      const Vec2& a = pts[t[0]];
      const Vec2& b = pts[t[1]];
      const Vec2& c = pts[t[2]];
      const double area = 0.5 * orient2d(a, b, c);
      const double l2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) + (c.x - b.x) * (c.x - b.x) +
                        (c.y - b.y) * (c.y - b.y) + (a.x - c.x) * (a.x - c.x) + (a.y - c.y) * (a.y - c.y);
      return 4.0 * std::sqrt(3.0) * area / l2;
    };
    for (int pass = 0; pass < 4; ++pass) {
      for (int v = n_boundary; v < static_cast<int>(pts.size()); ++v) {
        if (incident[v].empty()) {
          continue;
        }
        std::set<int> nbrs;
        for (int t : incident[v]) {
          for (int w : tris[t]) {
            if (w != v) {
              nbrs.insert(w);
            }
          }
        }
        Vec2 avg;
        for (int w : nbrs) {
          avg.x += pts[w].x / static_cast<double>(nbrs.size());
          avg.y += pts[w].y / static_cast<double>(nbrs.size());
        }
        double before = 1.0;
        for (int t : incident[v]) {
          before = std::min(before, quality(tris[t]));
        }
        const Vec2 old = pts[v];
        pts[v] = avg;
        double after = 1.0;
        for (int t : incident[v]) {
          after = std::min(after, quality(tris[t]));
        }
        if (after < before) {
          pts[v] = old;
        }
      }
    }
  }

  const DomainSpec& spec_;
  double h_far_ = 0.0;
  double h_wall_ = 0.0;
  std::vector<Polyline> outer_;
  std::vector<Polyline> holes_;
  std::vector<std::vector<Vec2>> walls_;
  std::vector<Vec2> outer_polygon_;
  std::vector<Vec2> bpts_;
  std::vector<BoundarySegment> segments_;
};

} // namespace

Mesh generate_cavern_domain(const DomainSpec& spec)
{
  DomainBuilder builder(spec);
  return builder.build();
}

std::vector<Probe> default_probes(const Mesh& mesh)
{
  const auto loops = mesh.cavern_loops();
  if (loops.empty()) {
    return {};
  }
  const auto& loop = loops.front();
  std::vector<Vec2> line;
  for (int id : loop.nodes) {
    line.push_back(mesh.node(id));
  }
  if (loop.closed) {
    line.push_back(line.front());
  }
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < line.size(); ++i) {
    cum.push_back(cum.back() + std::hypot(line[i].x - line[i - 1].x, line[i].y - line[i - 1].y));
  }
  std::vector<Probe> probes;
  const std::string labels = "ABCDEFG";
  std::size_t j = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double s = cum.back() * static_cast<double>(k) / 6.0;
    while (j + 2 < cum.size() && cum[j + 1] < s) {
      ++j;
    }
    const double seg = cum[j + 1] - cum[j];
    const double t = seg > 0.0 ? std::clamp((s - cum[j]) / seg, 0.0, 1.0) : 0.0;
    probes.push_back({std::string(1, labels[k]),
                      {line[j].x + t * (line[j + 1].x - line[j].x), line[j].y + t * (line[j + 1].y - line[j].y)}});
  }
  return probes;
}

Mesh generate_rectangle(Vec2 origin,
                        double width,
                        double height,
                        int nx,
                        int ny,
                        const std::string& material,
                        RectangleTags tags)
{
  if (nx < 1 || ny < 1 || !(width > 0.0) || !(height > 0.0)) {
    throw ValidationError("mesh.rectangle", "needs positive size and at least one cell per direction");
  }
  std::vector<Vec2> nodes;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      nodes.push_back({origin.x + width * i / nx, origin.y + height * j / ny});
    }
  }
  std::vector<Element> elements;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      elements.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, material});
      elements.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, material});
    }
  }
  std::vector<BoundarySegment> boundary;
  for (int i = 0; i < nx; ++i) {
    boundary.push_back({id(i, 0), id(i + 1, 0), tags.bottom});
  }
  for (int j = 0; j < ny; ++j) {
    boundary.push_back({id(nx, j), id(nx, j + 1), tags.right});
  }
  for (int i = nx; i > 0; --i) {
    boundary.push_back({id(i, ny), id(i - 1, ny), tags.top});
  }
  for (int j = ny; j > 0; --j) {
    boundary.push_back({id(0, j), id(0, j - 1), tags.left});
  }
  return Mesh(std::move(nodes), std::move(elements), std::move(boundary));
}

Mesh assign_material_band(const Mesh& mesh, double y_min, double y_max, const std::string& material)
{
  std::vector<Element> elements = mesh.elements();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double y = mesh.centroid(e).y;
    if (y >= y_min && y <= y_max) {
      elements[e].material = material;
    }
  }
  return Mesh(mesh.nodes(), std::move(elements), mesh.boundary(), mesh.probes());
}

} // namespace cavernsim
