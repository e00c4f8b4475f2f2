#include "trunclap/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace trunclap {

using nlohmann::json;

namespace {

Vec to_vec(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("domain: expected an array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Mat to_mat(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("domain: expected a matrix");
  Mat m(j.size(), j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size()) throw std::invalid_argument("domain: ragged matrix");
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json from_vec(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json from_mat(const Mat& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) a.push_back(from_vec(m.row(r).transpose()));
  return a;
}

ConvexBody parse_body(const json& j, int dim) {
  const std::string type = j.at("type").get<std::string>();
  ConvexBody body = [&]() {
    if (type == "ball") return ConvexBody::ball(to_vec(j.at("center")), j.at("radius").get<double>());
    if (type == "ellipsoid") {
      const Vec c = to_vec(j.at("center"));
      if (j.contains("shape")) return ConvexBody::ellipsoid(c, to_mat(j.at("shape")));
      return ConvexBody::ellipsoid_axes(c, to_vec(j.at("semiaxes")),
                                        j.contains("rotation") ? to_mat(j.at("rotation")) : Mat());
    }
    if (type == "box") return ConvexBody::box(to_vec(j.at("lo")), to_vec(j.at("hi")));
    if (type == "hpolytope") {
      std::vector<Facet> facets;
      for (const auto& f : j.at("facets")) facets.push_back({to_vec(f.at("normal")), f.at("offset").get<double>()});
      return ConvexBody::hpolytope(std::move(facets));
    }
    if (type == "cylinder") {
      const ConvexBody base = parse_body(j.at("base"), -1);
      return ConvexBody::cylinder(j.contains("rotation") ? to_mat(j.at("rotation")) : Mat(), base, dim);
    }
    if (type == "power_epigraph")
      return ConvexBody::power_epigraph(dim, j.value("sign", 1.0), j.value("offset", 0.0), j.value("coefficient", 1.0),
                                        j.value("exponent", 2.0));
    if (type == "intersection") {
      std::vector<ConvexBody> members;
      for (const auto& m : j.at("members")) members.push_back(parse_body(m, dim));
      return ConvexBody::intersection(std::move(members));
    }
    throw std::invalid_argument("domain: unknown body type '" + type + "'");
  }();
  if (dim > 0 && body.dim() != dim) throw std::invalid_argument("domain: body dimension does not match 'dim'");
  return body;
}

json body_json(const ConvexBody& b) {
  const auto& im = b.impl();
  json j;
  j["type"] = body_kind_name(b.kind());
  switch (b.kind()) {
    case BodyKind::ball:
      j["center"] = from_vec(im.center);
      j["radius"] = im.radius;
      break;
    case BodyKind::ellipsoid:
      j["center"] = from_vec(im.center);
      j["shape"] = from_mat(im.shape);
      break;
    case BodyKind::hpolytope:
      j["facets"] = json::array();
      for (const auto& f : im.facets) j["facets"].push_back({{"normal", from_vec(f.normal)}, {"offset", f.offset}});
      break;
    case BodyKind::cylinder:
      j["rotation"] = from_mat(im.rotation);
      j["base"] = body_json(b.cylinder_base());
      break;
    case BodyKind::power_epigraph:
      j["sign"] = im.sign;
      j["offset"] = im.offset;
      j["coefficient"] = im.coefficient;
      j["exponent"] = im.exponent;
      break;
    case BodyKind::intersection:
      j["members"] = json::array();
      for (const auto& m : im.members) j["members"].push_back(body_json(m));
      break;
  }
  return j;
}

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace

ConvexBody parse_domain(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 2 || dim > 3) throw std::invalid_argument("domain: dim must be 2 or 3");
    return parse_body(j.at("body"), dim);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("domain: ") + e.what());
  }
}

ConvexBody load_domain(const std::string& path) { return parse_domain(read_json_file(path)); }

json domain_to_json(const ConvexBody& body) { return {{"dim", body.dim()}, {"body", body_json(body)}}; }

ScalarFn DriftSpec::function() const {
  switch (kind) {
    case Kind::constant: {
      const double v = c0;
      return [v](double) { return v; };
    }
    case Kind::affine: {
      const double a = c0, b = c1;
      return [a, b](double r) { return a + b * r; };
    }
    case Kind::table: {
      const auto rr = r;
      const auto bb = b;
      return [rr, bb](double x) {
        if (x <= rr.front()) return bb.front();
        if (x >= rr.back()) return bb.back();
        const auto it = std::upper_bound(rr.begin(), rr.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - rr.begin());
        const double t = (x - rr[i - 1]) / (rr[i] - rr[i - 1]);
        return bb[i - 1] + t * (bb[i] - bb[i - 1]);
      };
    }
  }
  return {};
}

ScalarFn DriftSpec::derivative() const {
  if (kind == Kind::constant) return [](double) { return 0.0; };
  if (kind == Kind::affine) {
    const double b = c1;
    return [b](double) { return b; };
  }
  return {};
}

Drift DriftSpec::drift(const Vec& center) const {
  if (kind == Kind::constant) return Drift::make_constant(c0, sign);
  return Drift::make_radial(function(), sign, center);
}

DriftCoefficient DriftSpec::radial(double R, int k, int N) const {
  if (kind == Kind::constant) return DriftCoefficient::make_constant(c0, R, k, N);
  return DriftCoefficient::make_callable(function(), derivative(), R, k, N);
}

std::string DriftSpec::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  switch (kind) {
    case Kind::constant: os << "constant:" << c0; break;
    case Kind::affine: os << "affine:" << c0 << "," << c1; break;
    case Kind::table: os << "table:" << r.size(); break;
  }
  os << (sign == Side::plus ? ":plus" : ":minus");
  return os.str();
}

DriftSpec parse_drift_spec(const std::string& spec) {
  DriftSpec d;
  double v;
  if (parse_number(spec, v)) {
    d.kind = DriftSpec::Kind::constant;
    d.c0 = v;
    return d;
  }
  if (spec.rfind("radial:", 0) == 0) {
    const std::string name = spec.substr(7);
    d.kind = DriftSpec::Kind::affine;
    if (name == "r") {
      d.c0 = 0.0;
      d.c1 = 1.0;
      return d;
    }
    if (name == "r-1") {
      d.c0 = -1.0;
      d.c1 = 1.0;
      return d;
    }
    if (name.rfind("affine:", 0) == 0) {
      const std::string args = name.substr(7);
      const auto comma = args.find(',');
      if (comma == std::string::npos || !parse_number(args.substr(0, comma), d.c0) ||
          !parse_number(args.substr(comma + 1), d.c1))
        throw std::invalid_argument("drift: expected radial:affine:c0,c1");
      return d;
    }
    throw std::invalid_argument("drift: unknown radial profile '" + name + "'");
  }
  const json j = read_json_file(spec);
  try {
    const std::string type = j.at("type").get<std::string>();
    if (j.contains("sign")) d.sign = j.at("sign").get<std::string>() == "minus" ? Side::minus : Side::plus;
    if (type == "constant") {
      d.kind = DriftSpec::Kind::constant;
      d.c0 = j.at("value").get<double>();
    } else if (type == "affine") {
      d.kind = DriftSpec::Kind::affine;
      d.c0 = j.at("c0").get<double>();
      d.c1 = j.at("c1").get<double>();
    } else if (type == "table") {
      d.kind = DriftSpec::Kind::table;
      for (const auto& row : j.at("points")) {
        d.r.push_back(row.at(0).get<double>());
        d.b.push_back(row.at(1).get<double>());
      }
      if (d.r.size() < 2) throw std::invalid_argument("drift: table needs at least two points");
      for (std::size_t i = 1; i < d.r.size(); ++i)
        if (!(d.r[i] > d.r[i - 1])) throw std::invalid_argument("drift: table radii must increase");
    } else {
      throw std::invalid_argument("drift: unknown type '" + type + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("drift: ") + e.what());
  }
  return d;
}

double parse_forcing_spec(const std::string& spec) {
  double v;
  if (parse_number(spec, v)) return v;
  const json j = read_json_file(spec);
  try {
    if (j.at("type").get<std::string>() != "constant") throw std::invalid_argument("forcing: only constant f is supported");
    return j.at("value").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("forcing: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(const std::string& path, const Grid& g, const Eigen::VectorXd& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << (g.dim() == 2 ? "x,y,u\n" : "x,y,z,u\n");
  for (int i = 0; i < g.size(); ++i) {
    const Vec& x = g.position(i);
    for (int a = 0; a < g.dim(); ++a) out << format_double(x[a]) << ',';
    out << format_double(u[i]) << '\n';
  }
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace trunclap
