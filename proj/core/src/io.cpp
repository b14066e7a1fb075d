#include "uniformizer/io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uniformizer/error.hpp"

namespace uniformizer {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct ElementLines {
  std::vector<int> vertices;
  std::vector<int> edges;
};

// Line of the first token of every element of the top-level "vertices" and
// "edges" arrays.
ElementLines scan_element_lines(const std::string& text) {
  ElementLines out;
  int line = 1, depth = 0;
  bool in_string = false, escaped = false, want = false;
  std::string current, key;
  std::vector<int>* target = nullptr;
  for (const char c : text) {
    if (in_string) {
      if (c == '\n') ++line;
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      } else if (depth == 1) {
        current += c;
      }
      continue;
    }
    if (c == '\n') {
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (target && depth == 2 && want && c != ']') {
      target->push_back(line);
      want = false;
    }
    switch (c) {
      case '"':
        in_string = true;
        current.clear();
        break;
      case ':':
        if (depth == 1) key = current;
        break;
      case '{':
      case '[':
        ++depth;
        if (c == '[' && depth == 2 && (key == "vertices" || key == "edges")) {
          target = key == "vertices" ? &out.vertices : &out.edges;
          want = true;
        }
        break;
      case '}':
      case ']':
        if (depth == 2 && c == ']') target = nullptr;
        --depth;
        break;
      case ',':
        if (target && depth == 2) want = true;
        break;
      default:
        break;
    }
  }
  return out;
}

int line_at(const std::vector<int>& lines, std::size_t index) {
  return index < lines.size() ? lines[index] : 0;
}

int line_of_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) line += text[i] == '\n';
  return line;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what(), line_of_byte(text, e.byte));
  }
}

template <class T>
T field(const json& obj, const char* name, int line, const char* what) {
  const auto it = obj.find(name);
  if (it == obj.end()) throw InputError(std::string(what) + " is missing \"" + name + "\"", line);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string(what) + " has a malformed \"" + name + "\"", line);
  }
}

void check_number(const json& obj, const char* name, int line, const char* what) {
  const auto it = obj.find(name);
  if (it != obj.end() && !it->is_number()) {
    throw InputError(std::string(what) + " field \"" + name + "\" must be a number", line);
  }
}

}  // namespace

GraphSpace parse_domain(const std::string& text) {
  const json doc = parse_json(text);
  const auto lines = scan_element_lines(text);
  if (!doc.is_object()) throw InputError("domain document must be a JSON object", 1);
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) throw InputError("domain needs a \"vertices\" array", 1);
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw InputError("domain needs an \"edges\" array", 1);

  std::vector<GraphSpace::VertexRecord> vertices;
  const auto& vs = doc["vertices"];
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const int line = line_at(lines.vertices, i);
    const auto& v = vs[i];
    if (!v.is_object()) throw InputError("vertex entry must be an object", line);
    GraphSpace::VertexRecord rec;
    rec.id = field<std::string>(v, "id", line, "vertex");
    check_number(v, "measure", line, "vertex");
    rec.measure = field<double>(v, "measure", line, "vertex");
    rec.boundary = field<bool>(v, "boundary", line, "vertex");
    if (v.contains("coords")) rec.coords = field<std::vector<double>>(v, "coords", line, "vertex");
    if (v.contains("frontier")) rec.frontier = field<bool>(v, "frontier", line, "vertex");
    vertices.push_back(std::move(rec));
  }
  std::vector<GraphSpace::EdgeRecord> edges;
  const auto& es = doc["edges"];
  for (std::size_t i = 0; i < es.size(); ++i) {
    const int line = line_at(lines.edges, i);
    const auto& e = es[i];
    if (!e.is_object()) throw InputError("edge entry must be an object", line);
    check_number(e, "length", line, "edge");
    edges.push_back({field<std::string>(e, "u", line, "edge"), field<std::string>(e, "v", line, "edge"),
                     field<double>(e, "length", line, "edge")});
  }
  try {
    return GraphSpace(std::move(vertices), std::move(edges));
  } catch (const InvariantViolation& e) {
    int line = 0;
    if (e.section() == InvariantViolation::Section::vertices) line = line_at(lines.vertices, e.index());
    if (e.section() == InvariantViolation::Section::edges) line = line_at(lines.edges, e.index());
    throw InputError(e.detail(), line);
  }
}

GraphSpace load_domain(const std::string& path) { return parse_domain(read_text_file(path)); }

namespace {

ordered_json vertex_json(const GraphSpace& space, VertexIndex v, double measure) {
  ordered_json rec;
  rec["id"] = space.id(v);
  rec["measure"] = measure;
  rec["boundary"] = space.is_boundary(v);
  const auto c = space.coords(v);
  if (!c.empty()) rec["coords"] = std::vector<double>(c.begin(), c.end());
  if (space.is_frontier(v)) rec["frontier"] = true;
  return rec;
}

}  // namespace

std::string domain_to_json(const GraphSpace& space) {
  ordered_json doc;
  doc["vertices"] = ordered_json::array();
  for (VertexIndex v = 0; v < space.num_vertices(); ++v) doc["vertices"].push_back(vertex_json(space, v, space.measure(v)));
  doc["edges"] = ordered_json::array();
  for (const auto& e : space.graph().edges()) {
    doc["edges"].push_back({{"u", space.id(e.u)}, {"v", space.id(e.v)}, {"length", e.length}});
  }
  return doc.dump(1) + "\n";
}

std::string transformed_to_json(const TransformedSpace& t) {
  const GraphSpace& space = *t.base;
  ordered_json doc;
  doc["phi"] = t.phi.spec();
  doc["p"] = t.p;
  doc["vertices"] = ordered_json::array();
  for (VertexIndex v = 0; v < space.num_vertices(); ++v) {
    doc["vertices"].push_back(vertex_json(space, v, t.measured.vertex_measure[v]));
  }
  doc["edges"] = ordered_json::array();
  for (EdgeIndex e = 0; e < space.num_edges(); ++e) {
    const auto& ed = t.measured.graph.edge(e);
    doc["edges"].push_back({{"u", space.id(ed.u)},
                            {"v", space.id(ed.v)},
                            {"length", ed.length},
                            {"mass", t.measured.edge_mass[e]}});
  }
  if (t.infinity) {
    ordered_json inf;
    inf["id"] = "infinity";
    inf["measure"] = 0.0;
    inf["end_exponent"] = t.infinity->end_exponent;
    inf["edges"] = ordered_json::array();
    for (std::size_t i = 0; i < t.infinity->num_edges(); ++i) {
      const auto e = static_cast<EdgeIndex>(t.infinity->first_edge + i);
      inf["edges"].push_back({{"v", space.id(t.infinity->frontier[i])},
                              {"length", t.measured.graph.length(e)},
                              {"mass", t.measured.edge_mass[e]}});
    }
    doc["infinity"] = std::move(inf);
  }
  return doc.dump(1) + "\n";
}

std::string measure_to_json(const GraphSpace& space, const BoundaryMeasure& nu) {
  ordered_json doc;
  doc["theta"] = nu.theta;
  doc["mesh_scale"] = nu.mesh_scale;
  ordered_json values = ordered_json::object();
  for (VertexIndex v = 0; v < space.num_vertices(); ++v) {
    if (nu.nu[v] > 0.0) values[space.id(v)] = nu.nu[v];
  }
  doc["nu"] = std::move(values);
  return doc.dump(1) + "\n";
}

BoundaryMeasure parse_measure(const std::string& text, const GraphSpace& space) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("nu") || !doc["nu"].is_object()) {
    throw InputError("boundary measure needs a \"nu\" object", 1);
  }
  BoundaryMeasure nu;
  nu.theta = field<double>(doc, "theta", 1, "boundary measure");
  nu.mesh_scale = doc.contains("mesh_scale") ? field<double>(doc, "mesh_scale", 1, "boundary measure") : 1.0;
  nu.nu.assign(space.num_vertices(), 0.0);
  for (const auto& [id, value] : doc["nu"].items()) {
    const auto v = space.find(id);
    if (!v) throw InputError("boundary measure names unknown vertex '" + id + "'");
    if (!space.is_boundary(*v)) throw InputError("boundary measure on non-boundary vertex '" + id + "'");
    if (!value.is_number() || !(value.get<double>() > 0.0)) throw InputError("nu('" + id + "') must be positive");
    nu.nu[*v] = value.get<double>();
  }
  for (const VertexIndex b : space.boundary_vertices()) {
    if (!(nu.nu[b] > 0.0)) throw InputError("boundary measure missing at '" + space.id(b) + "'");
  }
  return nu;
}

std::string field_to_json(const GraphSpace& space, std::span<const double> u) {
  ordered_json doc;
  ordered_json values = ordered_json::object();
  for (VertexIndex v = 0; v < space.num_vertices(); ++v) values[space.id(v)] = u[v];
  doc["values"] = std::move(values);
  if (u.size() > space.num_vertices()) doc["infinity"] = u[space.num_vertices()];
  return doc.dump(1) + "\n";
}

ScalarField parse_field(const std::string& text, const GraphSpace& space, std::optional<double>* infinity) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw InputError("field document must be a JSON object", 1);
  const json& values = doc.contains("values") ? doc["values"] : doc;
  if (!values.is_object()) throw InputError("field \"values\" must be an object", 1);
  ScalarField u(space.num_vertices(), std::nan(""));
  for (const auto& [id, value] : values.items()) {
    if (id == "infinity") continue;
    const auto v = space.find(id);
    if (!v) throw InputError("field names unknown vertex '" + id + "'");
    if (!value.is_number()) throw InputError("field value at '" + id + "' must be a number");
    u[*v] = value.get<double>();
  }
  if (infinity) {
    infinity->reset();
    if (doc.contains("infinity") && doc["infinity"].is_number()) *infinity = doc["infinity"].get<double>();
  }
  return u;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw Error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace uniformizer
