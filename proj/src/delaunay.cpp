#include "delaunay.hpp"

#include "cavernsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavernsim::detail {

namespace {

struct Tri
{
  std::array<int, 3> v{};
  // nb[k] is the neighbour across the edge opposite v[k]
  std::array<int, 3> nb{-1, -1, -1};
  bool alive = true;
};

long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
  const long double adx = static_cast<long double>(a.x) - d.x;
  const long double ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x;
  const long double bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x;
  const long double cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

class Triangulator
{
public:
  explicit Triangulator(const std::vector<Vec2>& input)
    : pts_(input)
  {
    double xmin = std::numeric_limits<double>::infinity();
    double ymin = xmin;
    double xmax = -xmin;
    double ymax = -xmin;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      ymin = std::min(ymin, p.y);
      xmax = std::max(xmax, p.x);
      ymax = std::max(ymax, p.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1.0});
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    n_real_ = static_cast<int>(pts_.size());
    pts_.push_back({cx - 20.0 * span, cy - 20.0 * span});
    pts_.push_back({cx + 20.0 * span, cy - 20.0 * span});
    pts_.push_back({cx, cy + 20.0 * span});
    tris_.push_back(Tri{{n_real_, n_real_ + 1, n_real_ + 2}});
  }

  void insert(int p)
  {
    const int start = locate(p);
    std::vector<int> cavity = grow_cavity(start, p);
    retriangulate(cavity, p);
  }

  std::vector<std::array<int, 3>> result() const
  {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (t.alive && t.v[0] < n_real_ && t.v[1] < n_real_ && t.v[2] < n_real_) {
        out.push_back(t.v);
      }
    }
    return out;
  }

private:
  int locate(int p)
  {
    const Vec2& q = pts_[p];
    int t = last_;
    if (!tris_[t].alive) {
      t = static_cast<int>(tris_.size()) - 1;
    }
    const int limit = static_cast<int>(tris_.size()) + 16;
    for (int steps = 0; steps < limit; ++steps) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const Vec2& a = pts_[tri.v[(k + 1) % 3]];
        const Vec2& b = pts_[tri.v[(k + 2) % 3]];
        if (orient2d(a, b, q) < 0.0 && tri.nb[k] >= 0) {
          next = tri.nb[k];
          break;
        }
      }
      if (next < 0) {
        return t;
      }
      t = next;
    }
    // Walking cycled on a degenerate configuration; fall back to a scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      const Tri& tri = tris_[i];
      if (!tri.alive) {
        continue;
      }
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k) {
        inside = orient2d(pts_[tri.v[(k + 1) % 3]], pts_[tri.v[(k + 2) % 3]], q) >= 0.0;
      }
      if (inside) {
        return i;
      }
    }
    throw Error("triangulation: point " + std::to_string(p) + " could not be located");
  }

  bool in_circle(int t, int p) const
  {
    const Tri& tri = tris_[t];
    return incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], pts_[p]) > 0.0L;
  }

  std::vector<int> grow_cavity(int start, int p)
  {
    std::vector<int> cavity{start};
    mark_.resize(tris_.size(), 0);
    ++stamp_;
    mark_[start] = stamp_;
    for (std::size_t i = 0; i < cavity.size(); ++i) {
      for (int nb : tris_[cavity[i]].nb) {
        if (nb >= 0 && mark_[nb] != stamp_ && in_circle(nb, p)) {
          mark_[nb] = stamp_;
          cavity.push_back(nb);
        }
      }
    }

    // Keep the cavity star-shaped around p: drop triangles whose outer edge
    // is not strictly visible (round-off near co-circular points).
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 1; i < cavity.size(); ++i) {
        const Tri& tri = tris_[cavity[i]];
        for (int k = 0; k < 3; ++k) {
          const int nb = tri.nb[k];
          if (nb >= 0 && mark_[nb] == stamp_) {
            continue;
          }
          const Vec2& a = pts_[tri.v[(k + 1) % 3]];
          const Vec2& b = pts_[tri.v[(k + 2) % 3]];
          if (orient2d(a, b, pts_[p]) <= 0.0) {
            mark_[cavity[i]] = 0;
            cavity.erase(cavity.begin() + static_cast<std::ptrdiff_t>(i));
            changed = true;
            break;
          }
        }
        if (changed) {
          break;
        }
      }
    }
    return cavity;
  }

  void retriangulate(const std::vector<int>& cavity, int p)
  {
    struct Rim
    {
      int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int c : cavity) {
      const Tri& tri = tris_[c];
      for (int k = 0; k < 3; ++k) {
        const int nb = tri.nb[k];
        if (nb < 0 || mark_[nb] != stamp_) {
          rim.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb});
        }
      }
    }
    for (int c : cavity) {
      tris_[c].alive = false;
    }

    // new triangle (a, b, p); index of the one starting at / ending at each vertex
    std::vector<std::pair<int, int>> by_start;
    std::vector<std::pair<int, int>> by_end;
    by_start.reserve(rim.size());
    by_end.reserve(rim.size());
    const int first = static_cast<int>(tris_.size());
    for (std::size_t i = 0; i < rim.size(); ++i) {
      const int id = first + static_cast<int>(i);
      Tri t{{rim[i].a, rim[i].b, p}};
      t.nb[2] = rim[i].outside;
      if (rim[i].outside >= 0) {
        Tri& o = tris_[rim[i].outside];
        for (int k = 0; k < 3; ++k) {
          const int oa = o.v[(k + 1) % 3];
          const int ob = o.v[(k + 2) % 3];
          if (oa == rim[i].b && ob == rim[i].a) {
            o.nb[k] = id;
          }
        }
      }
      tris_.push_back(t);
      by_start.emplace_back(rim[i].a, id);
      by_end.emplace_back(rim[i].b, id);
    }
    std::sort(by_start.begin(), by_start.end());
    std::sort(by_end.begin(), by_end.end());
    auto find = [](const std::vector<std::pair<int, int>>& v, int key) {
      const auto it = std::lower_bound(v.begin(), v.end(), std::pair{key, -1});
      return (it != v.end() && it->first == key) ? it->second : -1;
    };
    for (int id = first; id < static_cast<int>(tris_.size()); ++id) {
      Tri& t = tris_[id];
      // edge (b, p) is opposite a: shared with the triangle starting at b
      t.nb[0] = find(by_start, t.v[1]);
      // edge (p, a) is opposite b: shared with the triangle ending at a
      t.nb[1] = find(by_end, t.v[0]);
    }
    last_ = static_cast<int>(tris_.size()) - 1;
    mark_.resize(tris_.size(), 0);
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
  int n_real_ = 0;
};

} // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c)
{
  return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points)
{
  Triangulator tri(points);
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    tri.insert(i);
  }
  return tri.result();
}

} // namespace cavernsim::detail
