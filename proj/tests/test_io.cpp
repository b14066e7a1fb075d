#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "uniformizer/domains.hpp"
#include "uniformizer/error.hpp"
#include "uniformizer/io.hpp"

using namespace uniformizer;

namespace {

const char* kDomain = R"({
  "vertices": [
    {"id": "b", "measure": 0, "boundary": true},
    {"id": "x", "measure": 1, "boundary": false},
    {"id": "y", "measure": 2, "boundary": false, "coords": [0.5, 1.0]}
  ],
  "edges": [
    {"u": "b", "v": "x", "length": 1},
    {"u": "x", "v": "y", "length": 0.5}
  ]
}
)";

int line_of(const std::string& text) {
  try {
    parse_domain(text);
  } catch (const InputError& e) {
    return e.line();
  }
  return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("domain round trip") {
  const auto s = parse_domain(kDomain);
  CHECK(s.num_vertices() == 3);
  CHECK(s.num_edges() == 2);
  CHECK(s.coords(s.index_of("y"))[0] == 0.5);
  const auto again = parse_domain(domain_to_json(s));
  CHECK(domain_to_json(again) == domain_to_json(s));

  const auto dom = half_strip(0.5, 8.0);
  const auto text = domain_to_json(dom.space);
  const auto back = parse_domain(text);
  REQUIRE(back.num_vertices() == dom.space.num_vertices());
  for (VertexIndex v = 0; v < back.num_vertices(); ++v) {
    CHECK(back.id(v) == dom.space.id(v));
    CHECK(back.measure(v) == dom.space.measure(v));
    CHECK(back.is_frontier(v) == dom.space.is_frontier(v));
  }
  CHECK(domain_to_json(back) == text);
}

TEST_CASE("line diagnostics") {
  CHECK(line_of(replace(kDomain, "\"length\": 0.5}", "\"length\": 0.5,}")) == 9);
  CHECK(line_of(replace(kDomain, "\"measure\": 2,", "\"measure\": \"two\",")) == 5);
  CHECK(line_of(replace(kDomain, "{\"u\": \"x\", \"v\": \"y\"", "{\"u\": \"x\", \"v\": \"z\"")) == 9);
  CHECK(line_of(replace(kDomain, "\"length\": 1}", "\"length\": -1}")) == 8);
  CHECK(line_of(replace(kDomain, "\"id\": \"y\"", "\"id\": \"x\"")) == 5);
  CHECK(line_of(replace(kDomain, "\"measure\": 0, \"boundary\": true", "\"measure\": 1, \"boundary\": true")) == 3);
  CHECK(line_of(replace(kDomain, "\"boundary\": false}", "\"boundary\": 3}")) == 4);
  try {
    parse_domain(replace(kDomain, "\"v\": \"y\"", "\"v\": \"x\""));
    FAIL("expected a self-loop error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()) == "line 9: self-loop at 'x'");
  }
}

TEST_CASE("transformed output") {
  const auto dom = half_strip(0.5, 8.0);
  const auto t = attach_infinity(transform(dom.space, Dampening::power(2.0), 2.0));
  const auto text = transformed_to_json(t);
  CHECK(text.find("\"infinity\"") != std::string::npos);
  CHECK(text.find("\"mass\"") != std::string::npos);
  CHECK(text == transformed_to_json(t));
}

TEST_CASE("measure and field documents") {
  const auto dom = half_strip(0.5, 8.0);
  const auto nu = parse_measure(measure_to_json(dom.space, dom.nu), dom.space);
  CHECK(nu.theta == dom.nu.theta);
  for (VertexIndex v = 0; v < dom.space.num_vertices(); ++v) CHECK(nu.nu[v] == doctest::Approx(dom.nu.nu[v]));
  CHECK_THROWS_AS(parse_measure(R"({"theta": 1, "nu": {"v0_0": 1}})", dom.space), InputError);

  ScalarField u(dom.space.num_vertices() + 1);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.1 * static_cast<double>(i);
  std::optional<double> inf;
  const auto back = parse_field(field_to_json(dom.space, u), dom.space, &inf);
  REQUIRE(inf.has_value());
  CHECK(*inf == doctest::Approx(u.back()));
  for (VertexIndex v = 0; v < dom.space.num_vertices(); ++v) CHECK(back[v] == u[v]);
  const auto partial = parse_field(R"({"v0_0": 2.5})", dom.space);
  CHECK(partial[dom.space.index_of("v0_0")] == 2.5);
  CHECK(std::isnan(partial[dom.space.index_of("v1_1")]));
  CHECK_THROWS_AS(parse_field(R"({"nowhere": 1})", dom.space), InputError);
}

TEST_CASE("atomic writes and hashing") {
  const auto dir = std::filesystem::temp_directory_path() / "uniformizer_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.json").string();
  write_text_file_atomic(path, "first");
  write_text_file_atomic(path, "second");
  CHECK(read_text_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_text_file((dir / "missing").string()), InputError);

  // FNV-1a reference values.
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
