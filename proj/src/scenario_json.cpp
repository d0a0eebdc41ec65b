#include "cavernsim/error.hpp"
#include "cavernsim/scenarios.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cavernsim {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key)
{
  return path.empty() ? key : path + "." + key;
}

/// Reads an object's members while tracking which keys were consumed so
/// that leftovers are reported as unknown.
class ObjectReader
{
public:
  ObjectReader(const json& j, std::string path)
    : j_(j)
    , path_(std::move(path))
  {
    if (!j_.is_object()) {
      throw ValidationError(path_, "expected an object");
    }
  }

  const std::string& path() const { return path_; }

  const json* find(const std::string& key)
  {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_number()) {
        throw ValidationError(join(path_, key), "expected a number");
      }
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) {
        throw ValidationError(join(path_, key), "expected an integer");
      }
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint32_t& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        throw ValidationError(join(path_, key), "expected a non-negative integer");
      }
      out = v->get<std::uint32_t>();
    }
  }

  void boolean(const std::string& key, bool& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) {
        throw ValidationError(join(path_, key), "expected true or false");
      }
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out)
  {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw ValidationError(join(path_, key), "expected a string");
      }
      out = v->get<std::string>();
    }
  }

  void choice(const std::string& key, std::string& out, std::initializer_list<const char*> allowed)
  {
    string(key, out);
    for (const char* a : allowed) {
      if (out == a) {
        return;
      }
    }
    std::string list;
    for (const char* a : allowed) {
      list += list.empty() ? a : std::string(", ") + a;
    }
    throw ValidationError(join(path_, key), "'" + out + "' is not one of: " + list);
  }

  void finish() const
  {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw ValidationError(join(path_, key), "unknown key");
      }
    }
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<Vec2> read_points(const json& j, const std::string& path)
{
  if (!j.is_array()) {
    throw ValidationError(path, "expected an array of [x, y] pairs");
  }
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ValidationError(path + "[" + std::to_string(i) + "]", "expected [x, y]");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

void read_cavern(const json& j, const std::string& path, CavernShapeConfig& c)
{
  ObjectReader r(j, path);
  r.choice("kind", c.kind, {"capsule", "points", "file"});
  r.number("radius", c.radius);
  r.number("height", c.height);
  if (const json* pts = r.find("points")) {
    c.points = read_points(*pts, join(path, "points"));
  }
  r.string("file", c.file);
  r.finish();
  if (c.kind == "points" && c.points.empty()) {
    throw ValidationError(join(path, "points"), "missing profile points");
  }
  if (c.kind == "file" && c.file.empty()) {
    throw ValidationError(join(path, "file"), "missing profile file");
  }
}

void read_mesh(const json& j, MeshConfig& m)
{
  ObjectReader r(j, "mesh");
  r.choice("source", m.source, {"generated", "file", "rectangle"});
  r.string("file", m.file);
  r.choice("layout", m.layout, {"single", "twin"});
  if (const json* c = r.find("cavern")) {
    read_cavern(*c, "mesh.cavern", m.cavern);
  }
  r.number("top_depth", m.top_depth);
  r.number("roof_thickness", m.roof_thickness);
  r.number("floor_thickness", m.floor_thickness);
  r.number("width", m.width);
  r.number("ctc", m.ctc);
  r.number("far_margin", m.far_margin);
  if (const json* t = r.find("target_elements")) {
    if (t->is_null()) {
      m.target_elements.reset();
    } else if (t->is_number_integer()) {
      m.target_elements = t->get<int>();
    } else {
      throw ValidationError("mesh.target_elements", "expected an integer or null");
    }
  }
  r.number("far_size", m.far_size);
  r.number("refinement", m.refinement);
  r.number("grading", m.grading);
  r.unsigned_integer("seed", m.seed);
  if (const json* o = r.find("origin")) {
    if (!o->is_array() || o->size() != 2 || !(*o)[0].is_number() || !(*o)[1].is_number()) {
      throw ValidationError("mesh.origin", "expected [x, y]");
    }
    m.origin_x = (*o)[0].get<double>();
    m.origin_y = (*o)[1].get<double>();
  }
  r.number("rect_width", m.rect_width);
  r.number("rect_height", m.rect_height);
  r.integer("nx", m.nx);
  r.integer("ny", m.ny);
  r.finish();
  if (m.source == "file" && m.file.empty()) {
    throw ValidationError("mesh.file", "missing mesh file for source \"file\"");
  }
}

void read_material(const json& j, const std::string& path, Material& m)
{
  ObjectReader r(j, path);
  r.number("density", m.density);
  if (const json* e = r.find("elastic")) {
    ObjectReader er(*e, join(path, "elastic"));
    er.number("E", m.elastic.youngs);
    er.number("nu", m.elastic.poisson);
    er.finish();
  }
  if (const json* c = r.find("creep")) {
    if (c->is_null()) {
      m.creep.reset();
    } else {
      CreepLaw law = m.creep.value_or(CreepLaw{});
      ObjectReader cr(*c, join(path, "creep"));
      cr.number("a", law.a);
      cr.number("n", law.n);
      cr.number("Q", law.Q);
      cr.finish();
      m.creep = law;
    }
  }
  if (const json* d = r.find("damage")) {
    if (d->is_null()) {
      m.damage.reset();
    } else {
      DamageParams p = m.damage.value_or(DamageParams{});
      ObjectReader dr(*d, join(path, "damage"));
      dr.number("B", p.B);
      dr.number("r", p.r);
      dr.number("D_star", p.D_star);
      std::string form = p.form == DamageLawForm::ResistanceScalesRate ? "scales-rate" : "inside-power";
      dr.choice("form", form, {"scales-rate", "inside-power"});
      p.form = form == "scales-rate" ? DamageLawForm::ResistanceScalesRate : DamageLawForm::ResistanceInsidePower;
      dr.number("l", p.l);
      dr.number("b", p.b);
      dr.finish();
      m.damage = p;
    }
  }
  r.finish();
}

void read_materials(const json& j, MaterialCatalog& catalog)
{
  if (!j.is_object()) {
    throw ValidationError("materials", "expected an object keyed by material name");
  }
  for (const auto& [name, value] : j.items()) {
    Material m;
    if (catalog.contains(name)) {
      m = catalog.at(name);
    }
    m.name = name;
    read_material(value, "materials." + name, m);
    catalog.insert(std::move(m));
  }
}

void read_schedule(const json& j, PressureSchedule& s)
{
  ObjectReader r(j, "schedule");
  std::string kind = s.kind == PressureSchedule::Kind::Constant ? "constant" : "cyclic";
  r.choice("kind", kind, {"constant", "cyclic"});
  if (kind == "constant") {
    double fraction = s.p_min;
    r.number("fraction", fraction);
    s = PressureSchedule::constant(fraction);
  } else {
    if (s.kind == PressureSchedule::Kind::Constant) {
      s = PressureSchedule::cyclic(0.2, 0.8, 6.0, 0.5);
    }
    r.number("p_min", s.p_min);
    r.number("p_max", s.p_max);
    r.number("period", s.period);
    r.number("duty", s.duty);
  }
  r.finish();
}

void read_integrator(const json& j, IntegratorConfig& c)
{
  ObjectReader r(j, "integrator");
  std::string scheme = c.scheme == Scheme::Explicit ? "explicit" : "implicit";
  r.choice("scheme", scheme, {"explicit", "implicit"});
  c.scheme = scheme == "explicit" ? Scheme::Explicit : Scheme::Implicit;
  r.number("dt", c.dt);
  r.number("t_end", c.t_end);
  r.number("residual_tolerance", c.residual_tolerance);
  r.integer("max_iterations", c.max_iterations);
  r.integer("max_step_cuts", c.max_step_cuts);
  r.boolean("damage", c.damage_enabled);
  r.number("snapshot_interval", c.snapshot_interval);
  r.boolean("updated_geometry", c.updated_geometry);
  r.finish();
}

json points_json(const std::vector<Vec2>& pts)
{
  json a = json::array();
  for (const auto& p : pts) {
    a.push_back({p.x, p.y});
  }
  return a;
}

json material_json(const Material& m)
{
  json j;
  j["density"] = m.density;
  j["elastic"] = {{"E", m.elastic.youngs}, {"nu", m.elastic.poisson}};
  j["creep"] = m.creep ? json{{"a", m.creep->a}, {"n", m.creep->n}, {"Q", m.creep->Q}} : json(nullptr);
  if (m.damage) {
    j["damage"] = {{"B", m.damage->B},
                   {"r", m.damage->r},
                   {"D_star", m.damage->D_star},
                   {"form", m.damage->form == DamageLawForm::ResistanceScalesRate ? "scales-rate" : "inside-power"},
                   {"l", m.damage->l},
                   {"b", m.damage->b}};
  } else {
    j["damage"] = nullptr;
  }
  return j;
}

json scenario_to_json(const Scenario& s)
{
  json j;
  j["name"] = s.name;
  j["mode"] = s.mode;

  const auto& m = s.mesh;
  json cavern = {{"kind", m.cavern.kind}, {"radius", m.cavern.radius}, {"height", m.cavern.height},
                 {"points", points_json(m.cavern.points)}, {"file", m.cavern.file}};
  j["mesh"] = {{"source", m.source},
               {"file", m.file},
               {"layout", m.layout},
               {"cavern", cavern},
               {"top_depth", m.top_depth},
               {"roof_thickness", m.roof_thickness},
               {"floor_thickness", m.floor_thickness},
               {"width", m.width},
               {"ctc", m.ctc},
               {"far_margin", m.far_margin},
               {"target_elements", m.target_elements ? json(*m.target_elements) : json(nullptr)},
               {"far_size", m.far_size},
               {"refinement", m.refinement},
               {"grading", m.grading},
               {"seed", m.seed},
               {"origin", {m.origin_x, m.origin_y}},
               {"rect_width", m.rect_width},
               {"rect_height", m.rect_height},
               {"nx", m.nx},
               {"ny", m.ny}};

  j["material"] = s.material;
  json mats = json::object();
  for (const auto& name : s.materials.names()) {
    mats[name] = material_json(s.materials.at(name));
  }
  j["materials"] = mats;

  json layers = json::array();
  for (const auto& l : s.interlayers) {
    layers.push_back(
      {{"material", l.material}, {"placement", l.placement}, {"width", l.width}, {"center_depth", l.center_depth}});
  }
  j["interlayers"] = layers;

  const auto& g = s.geostatic;
  j["geostatic"] = {{"overburden_density", g.overburden_density},
                    {"salt_density", g.salt_density},
                    {"salt_top_depth", g.salt_top_depth},
                    {"g", g.g},
                    {"surface_temperature", g.surface_temperature},
                    {"temperature_gradient", g.temperature_gradient}};

  if (s.schedule.kind == PressureSchedule::Kind::Constant) {
    j["schedule"] = {{"kind", "constant"}, {"fraction", s.schedule.p_min}};
  } else {
    j["schedule"] = {{"kind", "cyclic"},
                     {"p_min", s.schedule.p_min},
                     {"p_max", s.schedule.p_max},
                     {"period", s.schedule.period},
                     {"duty", s.schedule.duty}};
  }
  j["fluid"] = {{"density", s.fluid.density}};
  j["loading"] = {{"kind", s.loading.kind}, {"sxx", s.loading.sxx}, {"syy", s.loading.syy}};
  j["temperature"] = s.temperature ? json(*s.temperature) : json(nullptr);

  const auto& c = s.integrator;
  j["integrator"] = {{"scheme", c.scheme == Scheme::Explicit ? "explicit" : "implicit"},
                     {"dt", c.dt},
                     {"t_end", c.t_end},
                     {"residual_tolerance", c.residual_tolerance},
                     {"max_iterations", c.max_iterations},
                     {"max_step_cuts", c.max_step_cuts},
                     {"damage", c.damage_enabled},
                     {"snapshot_interval", c.snapshot_interval},
                     {"updated_geometry", c.updated_geometry}};

  json probes = json::array();
  for (const auto& p : s.probes) {
    probes.push_back({{"label", p.label}, {"x", p.position.x}, {"y", p.position.y}});
  }
  j["probes"] = probes;
  j["output"] = {{"vtk", s.output.vtk}, {"csv", s.output.csv}};
  return j;
}

Scenario scenario_from_json(const json& j)
{
  Scenario s;
  ObjectReader r(j, "");
  r.string("name", s.name);
  r.choice("mode", s.mode, {"simulate", "verify-mms"});
  if (const json* m = r.find("mesh")) {
    read_mesh(*m, s.mesh);
  }
  r.string("material", s.material);
  if (const json* m = r.find("materials")) {
    read_materials(*m, s.materials);
  }
  if (const json* layers = r.find("interlayers")) {
    if (!layers->is_array()) {
      throw ValidationError("interlayers", "expected an array");
    }
    for (std::size_t i = 0; i < layers->size(); ++i) {
      const std::string path = "interlayers[" + std::to_string(i) + "]";
      InterlayerConfig l;
      ObjectReader lr((*layers)[i], path);
      lr.string("material", l.material);
      lr.choice("placement", l.placement, {"mid", "floor", "depth"});
      lr.number("width", l.width);
      lr.number("center_depth", l.center_depth);
      lr.finish();
      if (l.material.empty()) {
        throw ValidationError(join(path, "material"), "missing interlayer material");
      }
      s.interlayers.push_back(l);
    }
  }
  if (const json* g = r.find("geostatic")) {
    ObjectReader gr(*g, "geostatic");
    gr.number("overburden_density", s.geostatic.overburden_density);
    gr.number("salt_density", s.geostatic.salt_density);
    gr.number("salt_top_depth", s.geostatic.salt_top_depth);
    gr.number("g", s.geostatic.g);
    gr.number("surface_temperature", s.geostatic.surface_temperature);
    gr.number("temperature_gradient", s.geostatic.temperature_gradient);
    gr.finish();
  }
  if (const json* sch = r.find("schedule")) {
    read_schedule(*sch, s.schedule);
  }
  if (const json* f = r.find("fluid")) {
    ObjectReader fr(*f, "fluid");
    fr.number("density", s.fluid.density);
    fr.finish();
  }
  if (const json* l = r.find("loading")) {
    ObjectReader lr(*l, "loading");
    lr.choice("kind", s.loading.kind, {"cavern", "patch"});
    lr.number("sxx", s.loading.sxx);
    lr.number("syy", s.loading.syy);
    lr.finish();
  }
  if (const json* t = r.find("temperature")) {
    if (t->is_null()) {
      s.temperature.reset();
    } else if (t->is_number()) {
      s.temperature = t->get<double>();
    } else {
      throw ValidationError("temperature", "expected a number or null");
    }
  }
  if (const json* i = r.find("integrator")) {
    read_integrator(*i, s.integrator);
  }
  if (const json* p = r.find("probes")) {
    if (!p->is_array()) {
      throw ValidationError("probes", "expected an array");
    }
    for (std::size_t i = 0; i < p->size(); ++i) {
      const std::string path = "probes[" + std::to_string(i) + "]";
      Probe probe;
      ObjectReader pr((*p)[i], path);
      pr.string("label", probe.label);
      pr.number("x", probe.position.x);
      pr.number("y", probe.position.y);
      pr.finish();
      if (probe.label.empty()) {
        throw ValidationError(join(path, "label"), "missing probe label");
      }
      s.probes.push_back(probe);
    }
  }
  if (const json* o = r.find("output")) {
    ObjectReader orr(*o, "output");
    orr.boolean("vtk", s.output.vtk);
    orr.boolean("csv", s.output.csv);
    orr.finish();
  }
  r.finish();
  s.warnings = validate(s);
  return s;
}

} // namespace

Scenario parse_scenario(const std::string& text)
{
  json j;
  try {
    j = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid scenario JSON: ") + e.what(), 0);
  }
  return scenario_from_json(j);
}

Scenario load_scenario_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("scenario", "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s)
{
  return scenario_to_json(s).dump(2) + "\n";
}

namespace {

std::string to_pointer(const std::string& path)
{
  if (!path.empty() && path.front() == '/') {
    return path;
  }
  std::string p = "/" + path;
  for (char& c : p) {
    if (c == '.') {
      c = '/';
    }
  }
  return p;
}

} // namespace

Scenario with_assignment(const Scenario& s, const std::string& path, double value)
{
  json j = scenario_to_json(s);
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(to_pointer(path));
  } catch (const json::exception&) {
    throw ValidationError(path, "invalid sweep path");
  }
  if (!j.contains(ptr) || !j.at(ptr).is_number()) {
    throw ValidationError(path, "sweep path does not name a numeric setting");
  }
  if (j.at(ptr).is_number_integer()) {
    j[ptr] = static_cast<long long>(std::llround(value));
  } else {
    j[ptr] = value;
  }
  return scenario_from_json(j);
}

} // namespace cavernsim
