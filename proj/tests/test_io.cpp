#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "trunclap/io.hpp"

using namespace trunclap;
using nlohmann::json;

TEST_CASE("domain JSON round trip") {
  const json src = json::parse(R"({"dim": 2, "body": {"type": "intersection", "members": [
      {"type": "ball", "center": [0, 0.5], "radius": 1},
      {"type": "ellipsoid", "center": [0, 0], "semiaxes": [2, 1]},
      {"type": "box", "lo": [-1, -1], "hi": [1, 1]}]}})");
  const ConvexBody a = parse_domain(src);
  const ConvexBody b = parse_domain(domain_to_json(a));
  Vec x(2);
  for (double s = -1.2; s <= 1.2; s += 0.1)
    for (double t = -1.2; t <= 1.2; t += 0.1) {
      x << s, t;
      CHECK(a.contains(x) == b.contains(x));
    }
  CHECK(domain_to_json(a) == domain_to_json(b));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(parse_domain(json::parse(R"({"dim": 4, "body": {"type": "ball"}})")), std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(json::parse(R"({"dim": 2, "body": {"type": "blob"}})")), std::invalid_argument);
  CHECK_THROWS_AS(parse_domain(json::parse(R"({"dim": 2, "body": {"type": "ball", "center": [0, 0, 0], "radius": 1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_domain("/nonexistent/domain.json"), std::invalid_argument);
}

TEST_CASE("drift specs") {
  CHECK(parse_drift_spec("0.5").is_constant());
  CHECK(parse_drift_spec("0.5").c0 == 0.5);
  const auto r = parse_drift_spec("radial:r-1");
  CHECK(r.function()(0.25) == doctest::Approx(-0.75));
  const auto a = parse_drift_spec("radial:affine:1,2");
  CHECK(a.function()(0.5) == doctest::Approx(2.0));
  CHECK_THROWS(parse_drift_spec("radial:unknown"));
  CHECK_THROWS(parse_drift_spec("radial:affine:1"));

  const std::string path = "drift_table_test.json";
  {
    std::ofstream out(path);
    out << R"({"type": "table", "points": [[0, 1], [1, 3]], "sign": "minus"})";
  }
  const auto t = parse_drift_spec(path);
  CHECK(t.sign == Side::minus);
  CHECK(t.function()(0.25) == doctest::Approx(1.5));
  CHECK(t.function()(2.0) == doctest::Approx(3.0));
  std::remove(path.c_str());
}

TEST_CASE("forcing specs") {
  CHECK(parse_forcing_spec("-1") == -1.0);
  CHECK(parse_forcing_spec("+2.5") == 2.5);
  CHECK_THROWS(parse_forcing_spec("nope.json"));
}

TEST_CASE("17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
