#include "cavernsim/mesh.hpp"

#include "cavernsim/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace cavernsim {

namespace {

constexpr std::array<std::pair<BoundaryTag, std::string_view>, 5> tag_names{{
  {BoundaryTag::CavernWall, "CavernWall"},
  {BoundaryTag::Bottom, "Bottom"},
  {BoundaryTag::SymmetryAxis, "SymmetryAxis"},
  {BoundaryTag::Top, "Top"},
  {BoundaryTag::FarField, "FarField"},
}};

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c)
{
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::pair<int, int> edge_key(int a, int b)
{
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace

std::string_view to_string(BoundaryTag tag)
{
  for (const auto& [t, name] : tag_names) {
    if (t == tag) {
      return name;
    }
  }
  return "?";
}

BoundaryTag boundary_tag_from_string(std::string_view name)
{
  for (const auto& [t, n] : tag_names) {
    if (n == name) {
      return t;
    }
  }
  throw ParseError("unknown boundary tag '" + std::string(name) + "'", 0);
}

Mesh::Mesh(std::vector<Vec2> nodes,
           std::vector<Element> elements,
           std::vector<BoundarySegment> boundary,
           std::vector<Probe> probes)
  : nodes_(std::move(nodes))
  , elements_(std::move(elements))
  , boundary_(std::move(boundary))
  , probes_(std::move(probes))
{
  validate_and_orient();
}

void Mesh::validate_and_orient()
{
  const int n = node_count();
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].y)) {
      throw TopologyError("node " + std::to_string(i) + " has non-finite coordinates");
    }
  }

  // Duplicate nodes: sort by x and compare neighbours within the tolerance.
  {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return nodes_[a].x < nodes_[b].x; });
    constexpr double tol = 1e-9;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        const Vec2& p = nodes_[order[i]];
        const Vec2& q = nodes_[order[j]];
        if (q.x - p.x > tol) {
          break;
        }
        if (std::abs(q.y - p.y) <= tol) {
          throw TopologyError("duplicate nodes " + std::to_string(order[i]) + " and " +
                              std::to_string(order[j]));
        }
      }
    }
  }

  std::map<std::pair<int, int>, std::vector<int>> edge_elements;
  for (int e = 0; e < element_count(); ++e) {
    auto& el = elements_[e];
    for (int id : el.nodes) {
      if (id < 0 || id >= n) {
        throw TopologyError("element " + std::to_string(e) + " references node " + std::to_string(id) +
                            " outside 0.." + std::to_string(n - 1));
      }
    }
    if (el.nodes[0] == el.nodes[1] || el.nodes[1] == el.nodes[2] || el.nodes[0] == el.nodes[2]) {
      throw TopologyError("element " + std::to_string(e) + " repeats a node");
    }
    const double a = signed_area(nodes_[el.nodes[0]], nodes_[el.nodes[1]], nodes_[el.nodes[2]]);
    if (std::abs(a) < degenerate_area) {
      throw TopologyError("element " + std::to_string(e) + " is degenerate (area " + std::to_string(a) + ")");
    }
    if (a < 0.0) {
      std::swap(el.nodes[1], el.nodes[2]);
    }
    for (int k = 0; k < 3; ++k) {
      edge_elements[edge_key(el.nodes[k], el.nodes[(k + 1) % 3])].push_back(e);
    }
  }

  std::map<std::pair<int, int>, int> tagged;
  for (int s = 0; s < static_cast<int>(boundary_.size()); ++s) {
    const auto& seg = boundary_[s];
    if (seg.a < 0 || seg.a >= n || seg.b < 0 || seg.b >= n || seg.a == seg.b) {
      throw TopologyError("boundary segment " + std::to_string(s) + " has invalid nodes");
    }
    if (!tagged.emplace(edge_key(seg.a, seg.b), s).second) {
      throw TopologyError("boundary edge " + std::to_string(seg.a) + "-" + std::to_string(seg.b) +
                          " is tagged more than once");
    }
  }

  segment_element_.assign(boundary_.size(), -1);
  for (const auto& [edge, owners] : edge_elements) {
    if (owners.size() > 2) {
      throw TopologyError("edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second) +
                          " is shared by more than two elements");
    }
    const auto it = tagged.find(edge);
    if (owners.size() == 1) {
      if (it == tagged.end()) {
        throw TopologyError("boundary edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second) +
                            " has no tag");
      }
      segment_element_[it->second] = owners.front();
    } else if (it != tagged.end()) {
      throw TopologyError("tagged edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second) +
                          " is interior");
    }
  }
  for (std::size_t s = 0; s < boundary_.size(); ++s) {
    if (segment_element_[s] < 0) {
      throw TopologyError("boundary segment " + std::to_string(s) + " is not an element edge");
    }
  }
}

double Mesh::element_area(int e) const
{
  const auto& el = element(e);
  return signed_area(nodes_[el.nodes[0]], nodes_[el.nodes[1]], nodes_[el.nodes[2]]);
}

Vec2 Mesh::centroid(int e) const
{
  const auto& el = element(e);
  Vec2 c;
  for (int id : el.nodes) {
    c.x += nodes_[id].x / 3.0;
    c.y += nodes_[id].y / 3.0;
  }
  return c;
}

double Mesh::diameter(int e) const
{
  const auto& el = element(e);
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2& p = nodes_[el.nodes[k]];
    const Vec2& q = nodes_[el.nodes[(k + 1) % 3]];
    d = std::max(d, std::hypot(q.x - p.x, q.y - p.y));
  }
  return d;
}

double Mesh::total_area() const
{
  double sum = 0.0;
  for (int e = 0; e < element_count(); ++e) {
    sum += element_area(e);
  }
  return sum;
}

std::vector<CavernLoop> Mesh::cavern_loops() const
{
  std::map<int, std::vector<int>> adjacency;
  for (const auto& seg : boundary_) {
    if (seg.tag == BoundaryTag::CavernWall) {
      adjacency[seg.a].push_back(seg.b);
      adjacency[seg.b].push_back(seg.a);
    }
  }

  std::set<int> visited;
  std::vector<CavernLoop> loops;
  auto walk = [&](int start) {
    CavernLoop loop;
    int prev = -1;
    int cur = start;
    while (true) {
      loop.nodes.push_back(cur);
      visited.insert(cur);
      int next = -1;
      for (int nb : adjacency[cur]) {
        if (nb != prev && !visited.contains(nb)) {
          next = nb;
          break;
        }
      }
      if (next < 0) {
        // closed when the last node links back to the start
        const auto& adj = adjacency[cur];
        loop.closed = loop.nodes.size() > 2 && std::find(adj.begin(), adj.end(), start) != adj.end();
        break;
      }
      prev = cur;
      cur = next;
    }
    return loop;
  };

  // Open chains first, starting from their upper end.
  std::vector<int> ends;
  for (const auto& [node, nbs] : adjacency) {
    if (nbs.size() == 1) {
      ends.push_back(node);
    }
  }
  std::sort(ends.begin(), ends.end(), [&](int a, int b) {
    if (nodes_[a].y != nodes_[b].y) {
      return nodes_[a].y > nodes_[b].y;
    }
    return nodes_[a].x < nodes_[b].x;
  });
  for (int end : ends) {
    if (!visited.contains(end)) {
      loops.push_back(walk(end));
    }
  }

  // Closed loops start at their highest node (lowest x on ties).
  std::vector<int> rest;
  for (const auto& [node, nbs] : adjacency) {
    if (!visited.contains(node)) {
      rest.push_back(node);
    }
  }
  std::sort(rest.begin(), rest.end(), [&](int a, int b) {
    if (nodes_[a].y != nodes_[b].y) {
      return nodes_[a].y > nodes_[b].y;
    }
    return nodes_[a].x < nodes_[b].x;
  });
  for (int start : rest) {
    if (!visited.contains(start)) {
      loops.push_back(walk(start));
    }
  }

  // Left-most cavern first.
  std::stable_sort(loops.begin(), loops.end(), [&](const CavernLoop& a, const CavernLoop& b) {
    auto min_x = [&](const CavernLoop& l) {
      double m = std::numeric_limits<double>::infinity();
      for (int id : l.nodes) {
        m = std::min(m, nodes_[id].x);
      }
      return m;
    };
    return min_x(a) < min_x(b);
  });
  return loops;
}

Mesh Mesh::with_probes(std::vector<Probe> probes) const
{
  Mesh copy = *this;
  copy.probes_ = std::move(probes);
  return copy;
}

ElementGeometry element_geometry(const Vec2& p1, const Vec2& p2, const Vec2& p3)
{
  ElementGeometry g;
  g.area = signed_area(p1, p2, p3);
  if (std::abs(g.area) < degenerate_area) {
    throw DegenerateElementError("degenerate triangle", -1);
  }
  const double inv2a = 1.0 / (2.0 * g.area);
  // dN_i/dx = (y_j - y_k)/2A, dN_i/dy = (x_k - x_j)/2A for (i, j, k) cyclic
  const std::array<const Vec2*, 3> p{&p1, &p2, &p3};
  g.B.setZero();
  for (int i = 0; i < 3; ++i) {
    const Vec2& pj = *p[(i + 1) % 3];
    const Vec2& pk = *p[(i + 2) % 3];
    const double dndx = (pj.y - pk.y) * inv2a;
    const double dndy = (pk.x - pj.x) * inv2a;
    g.B(0, 2 * i) = dndx;
    g.B(1, 2 * i + 1) = dndy;
    g.B(2, 2 * i) = dndy;
    g.B(2, 2 * i + 1) = dndx;
  }
  return g;
}

ElementGeometry element_geometry(const Mesh& mesh, int e)
{
  const auto& el = mesh.element(e);
  try {
    return element_geometry(mesh.node(el.nodes[0]), mesh.node(el.nodes[1]), mesh.node(el.nodes[2]));
  } catch (const DegenerateElementError&) {
    throw DegenerateElementError("element " + std::to_string(e) + " is degenerate", e);
  }
}

std::optional<ProbeLocation> locate_probe(const Mesh& mesh, Vec2 point)
{
  constexpr double tol = 1e-9;
  std::optional<ProbeLocation> best;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    const Vec2& a = mesh.node(el.nodes[0]);
    const Vec2& b = mesh.node(el.nodes[1]);
    const Vec2& c = mesh.node(el.nodes[2]);
    const double area = signed_area(a, b, c);
    std::array<double, 3> l{
      signed_area(point, b, c) / area,
      signed_area(a, point, c) / area,
      signed_area(a, b, point) / area,
    };
    const double violation = -std::min({l[0], l[1], l[2], 0.0});
    if (violation <= tol && violation < best_violation) {
      for (double& v : l) {
        v = std::clamp(v, 0.0, 1.0);
      }
      const double s = l[0] + l[1] + l[2];
      for (double& v : l) {
        v /= s;
      }
      best = ProbeLocation{e, l};
      best_violation = violation;
      if (violation == 0.0) {
        break;
      }
    }
  }
  return best;
}

namespace {

struct LineReader
{
  std::istream& in;
  int line_no = 0;
  std::string line;

  /// Next non-blank line, without comments introduced by '#'.
  bool next()
  {
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        return true;
      }
    }
    return false;
  }
};

std::size_t read_header(LineReader& r, std::string_view name)
{
  if (!r.next()) {
    throw ParseError("expected section " + std::string(name) + ", found end of file", r.line_no);
  }
  std::istringstream ss(r.line);
  std::string tag;
  long long count = -1;
  ss >> tag >> count;
  if (tag != name || ss.fail() || count < 0) {
    throw ParseError("expected '" + std::string(name) + " <count>'", r.line_no);
  }
  return static_cast<std::size_t>(count);
}

template <typename... T>
void read_fields(LineReader& r, std::string_view section, T&... fields)
{
  if (!r.next()) {
    throw ParseError("unexpected end of file in " + std::string(section), r.line_no);
  }
  std::istringstream ss(r.line);
  ss.imbue(std::locale::classic());
  (ss >> ... >> fields);
  std::string extra;
  if (ss.fail() || (ss >> extra)) {
    throw ParseError("malformed " + std::string(section) + " record", r.line_no);
  }
}

} // namespace

Mesh load_mesh(std::istream& in)
{
  LineReader r{in, 0, {}};

  const std::size_t n_nodes = read_header(r, "$Nodes");
  std::vector<Vec2> nodes(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    long long id = -1;
    Vec2 p;
    read_fields(r, "$Nodes", id, p.x, p.y);
    if (id != static_cast<long long>(i)) {
      throw ParseError("node ids must be dense 0..N-1 in order", r.line_no);
    }
    nodes[i] = p;
  }

  const std::size_t n_elem = read_header(r, "$Elements");
  std::vector<Element> elements(n_elem);
  for (std::size_t i = 0; i < n_elem; ++i) {
    long long id = -1;
    Element el;
    read_fields(r, "$Elements", id, el.nodes[0], el.nodes[1], el.nodes[2], el.material);
    if (id != static_cast<long long>(i)) {
      throw ParseError("element ids must be dense 0..M-1 in order", r.line_no);
    }
    elements[i] = std::move(el);
  }

  const std::size_t n_bnd = read_header(r, "$Boundary");
  std::vector<BoundarySegment> boundary(n_bnd);
  for (std::size_t i = 0; i < n_bnd; ++i) {
    std::string tag;
    read_fields(r, "$Boundary", boundary[i].a, boundary[i].b, tag);
    try {
      boundary[i].tag = boundary_tag_from_string(tag);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), r.line_no);
    }
  }

  std::vector<Probe> probes;
  if (r.next()) {
    std::istringstream ss(r.line);
    std::string tag;
    long long count = -1;
    ss >> tag >> count;
    if (tag != "$Probes" || ss.fail() || count < 0) {
      throw ParseError("expected '$Probes <count>'", r.line_no);
    }
    probes.resize(static_cast<std::size_t>(count));
    for (auto& p : probes) {
      read_fields(r, "$Probes", p.label, p.position.x, p.position.y);
    }
    if (r.next()) {
      throw ParseError("trailing content after $Probes", r.line_no);
    }
  }

  return Mesh(std::move(nodes), std::move(elements), std::move(boundary), std::move(probes));
}

Mesh load_mesh_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open mesh file '" + path + "'");
  }
  return load_mesh(in);
}

void save_mesh(const Mesh& mesh, std::ostream& out)
{
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
  out << "$Nodes " << mesh.node_count() << '\n';
  for (int i = 0; i < mesh.node_count(); ++i) {
    out << i << ' ' << mesh.node(i).x << ' ' << mesh.node(i).y << '\n';
  }
  out << "$Elements " << mesh.element_count() << '\n';
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    out << e << ' ' << el.nodes[0] << ' ' << el.nodes[1] << ' ' << el.nodes[2] << ' ' << el.material << '\n';
  }
  out << "$Boundary " << mesh.boundary().size() << '\n';
  for (const auto& seg : mesh.boundary()) {
    out << seg.a << ' ' << seg.b << ' ' << to_string(seg.tag) << '\n';
  }
  out << "$Probes " << mesh.probes().size() << '\n';
  for (const auto& p : mesh.probes()) {
    out << p.label << ' ' << p.position.x << ' ' << p.position.y << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void save_mesh_file(const Mesh& mesh, const std::string& path)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write mesh file '" + path + "'");
  }
  save_mesh(mesh, out);
}

} // namespace cavernsim
