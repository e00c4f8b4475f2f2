// trunclap: batch front-end for truncated-Laplacian solves, profiles and checks.
//
//   trunclap classify --domain square.json
//   trunclap solve --domain disk.json --k 1 --b 0.5 --f -1 --h 0.015625 --out run1
//   trunclap verify all --seed 42

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "trunclap/eigen.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/geometry.hpp"
#include "trunclap/io.hpp"
#include "trunclap/radial.hpp"
#include "trunclap/solver.hpp"
#include "trunclap/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trunclap;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNonexistence = 2, kMaxIterations = 3, kChecksFailed = 4 };

struct Options {
  std::string command;
  std::string config;
  std::string domain;
  int k = 1;
  std::string b = "0";
  std::string b_sign = "plus";
  std::string f = "-1";
  double h = 1.0 / 32;
  std::optional<double> mu;
  double radius = 1.0;
  std::string out = ".";
  std::uint64_t seed = 42;
  std::string suite = "all";
  std::string method = "policy";
  int width = 3;
  double tolerance_scale = 1.0;
  int samples = 200;
  int max_iterations = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fill options that were not given on the command line from a flat JSON file.
void apply_config(CLI::App& sub, Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw UsageError("cannot open config '" + o.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  auto unset = [&](const char* flag) { return sub.count(flag) == 0; };
  auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "domain" && unset("--domain")) o.domain = v.get<std::string>();
      else if (key == "k" && unset("--k")) o.k = v.get<int>();
      else if (key == "b" && unset("--b")) o.b = text(v);
      else if (key == "b_sign" && unset("--b-sign")) o.b_sign = v.get<std::string>();
      else if (key == "f" && unset("--f")) o.f = text(v);
      else if (key == "h" && unset("--h")) o.h = v.get<double>();
      else if (key == "mu" && unset("--mu")) o.mu = v.get<double>();
      else if (key == "radius" && unset("--radius")) o.radius = v.get<double>();
      else if (key == "out" && unset("--out")) o.out = v.get<std::string>();
      else if (key == "seed" && unset("--seed")) o.seed = v.get<std::uint64_t>();
      else if (key == "suite" && unset("--suite")) o.suite = v.get<std::string>();
      else if (key == "method" && unset("--method")) o.method = v.get<std::string>();
      else if (key == "width" && unset("--width")) o.width = v.get<int>();
      else if (key == "tolerance_scale" && unset("--tolerance-scale")) o.tolerance_scale = v.get<double>();
      else if (key == "samples" && unset("--samples")) o.samples = v.get<int>();
      else if (key == "max_iterations" && unset("--max-iterations")) o.max_iterations = v.get<int>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

ConvexBody need_domain(const Options& o) {
  if (o.domain.empty()) throw UsageError("--domain is required");
  try {
    return load_domain(o.domain);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

DriftSpec need_drift(const Options& o) {
  DriftSpec d;
  try {
    d = parse_drift_spec(o.b);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.b_sign == "minus") d.sign = Side::minus;
  else if (o.b_sign != "plus") throw UsageError("--b-sign must be plus or minus");
  return d;
}

double need_forcing(const Options& o) {
  try {
    return parse_forcing_spec(o.f);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SchemeConfig scheme(const Options& o, const ConvexBody& body, const DriftSpec& drift) {
  if (o.k < 1 || o.k > body.dim()) throw UsageError("--k must lie in 1..dim");
  if (!(o.h > 0.0)) throw UsageError("--h must be positive");
  if (o.width < 1) throw UsageError("--width must be positive");
  SchemeConfig cfg;
  cfg.k = o.k;
  cfg.width = o.width;
  if (o.max_iterations < 0) throw UsageError("--max-iterations must be >= 0");
  cfg.max_iterations = o.max_iterations;
  const Vec center = body.kind() == BodyKind::ball ? body.impl().center : Vec::Zero(body.dim());
  cfg.drift = drift.drift(center);
  if (o.method == "policy") cfg.method = SolveMethod::policy_iteration;
  else if (o.method == "explicit") cfg.method = SolveMethod::explicit_jacobi;
  else throw UsageError("--method must be policy or explicit");
  return cfg;
}

json vec_json(const std::vector<double>& v) { return json(v); }

json certificate_json(const GrowthCertificate& c) {
  json lbs = json::array();
  for (const auto& lb : c.lower_bounds)
    lbs.push_back({{"epsilon", lb.epsilon}, {"radius", lb.radius}, {"reference", lb.reference}, {"value", lb.value},
                   {"exceeded", lb.exceeded}});
  return {{"rule", c.rule},           {"spacings", vec_json(c.spacings)},   {"sup_norms", vec_json(c.sup_norms)},
          {"origin_values", vec_json(c.origin_values)}, {"increments", vec_json(c.increments)},
          {"ratios", vec_json(c.ratios)}, {"cap", c.cap}, {"cap_reached", c.cap_reached}, {"lower_bounds", lbs}};
}

struct Run {
  json report;
  json timing = json::object();
  int code = kOk;
};

// Constant-drift ball (or ellipsoid) with bR >= k on an inscribed ball.
bool threshold_case(const ConvexBody& body, const DriftSpec& d, int k) {
  if (!d.is_constant() || d.sign != Side::plus || !(d.c0 > 0.0)) return false;
  if (body.kind() != BodyKind::ball && body.kind() != BodyKind::ellipsoid) return false;
  return d.c0 * body.impl().radius >= k;
}

Run run_classify(const Options& o) {
  const ConvexBody body = need_domain(o);
  const Classification c = classify(body);
  json gj = json::object();
  json probe = json::object();
  for (int j = 1; j < body.dim(); ++j) {
    gj[std::to_string(j)] = static_cast<bool>(c.gj[j]);
    probe[std::to_string(j)] = gj_probe(body, j, o.samples * 50, o.seed);
  }
  Run r;
  r.report = {{"command", "classify"}, {"domain", domain_to_json(body)}, {"d", c.d},        {"cj_max", c.cj_max},
              {"gj", gj},              {"gj_probe", probe},               {"seed", o.seed}, {"diameter", body.diameter()},
              {"flatness_upper_bound", flatness_upper_bound(body)}};
  return r;
}

void write_profile_csv(const fs::path& path, const RadialProfile& p, int samples) {
  std::ostringstream os;
  os << "r,g,dg,d2g,regime\n";
  for (int i = 0; i <= samples; ++i) {
    const double r = p.R * i / samples;
    os << format_double(r) << ',' << format_double(p.value(r)) << ',' << format_double(p.first(r)) << ','
       << format_double(p.second(r)) << ',' << p.segment_name(r) << '\n';
  }
  write_text(path.string(), os.str());
}

Run run_radial(const Options& o) {
  const DriftSpec d = need_drift(o);
  double R = o.radius;
  int N = 2;
  if (!o.domain.empty()) {
    const ConvexBody body = need_domain(o);
    if (body.kind() != BodyKind::ball) throw UsageError("radial: domain must be a ball");
    R = body.impl().radius;
    N = body.dim();
  }
  if (!(R > 0.0)) throw UsageError("radial: radius must be positive");
  if (o.k < 1 || o.k > N) throw UsageError("--k must lie in 1..dim");
  const DriftCoefficient c = d.radial(R, o.k, N);
  Run r;
  r.report = {{"command", "radial"}, {"drift", d.describe()}, {"R", R}, {"k", o.k}, {"N", N}};
  RadialProfile p;
  ScalarFn rhs = [](double) { return -1.0; };
  try {
    if (o.mu) {
      if (!d.is_constant() || std::abs(d.c0 * R - o.k) > 1e-12)
        throw UsageError("radial --mu needs a constant drift with bR = k");
      p = critical_eigen_profile(*o.mu, 1.0, R, o.k);
      const double mu = *o.mu;
      rhs = [&p, mu](double s) { return -mu * p.value(s); };
    } else if (d.is_constant() && d.sign == Side::minus) {
      p = profile_minus_b(d.c0, R, o.k);
    } else if (d.is_constant()) {
      p = profile_const_b(d.c0, R, o.k);
    } else {
      const IntegralTestResult t = integral_test(c);
      r.report["integral_test"] = {{"finite", t.finite}, {"value", t.value}, {"r0_threshold", t.r0_threshold}};
      try {
        p = profile_weighted(c);
      } catch (const HypothesisViolation&) {
        p = profile_weighted_reversed(c);
      }
    }
  } catch (const NonexistenceThreshold& e) {
    r.report["outcome"] = "nonexistence";
    r.report["tag"] = e.tag();
    r.report["citation"] = e.citation();
    r.report["radius"] = e.radius();
    r.code = kNonexistence;
    return r;
  } catch (const RangeError& e) {
    throw UsageError(e.what());
  } catch (const HypothesisViolation& e) {
    throw UsageError(e.what());
  }
  const Side sign = o.mu ? Side::plus : d.sign;
  r.report["outcome"] = "profile";
  r.report["regime"] = regime_name(p.regime);
  r.report["g0"] = p.value(0.0);
  r.report["gR"] = p.value(R);
  r.report["glue_radii"] = p.glue_radii;
  r.report["residual"] = radial_residual(p, c, rhs, sign);
  write_profile_csv(fs::path(o.out) / "profile.csv", p, o.samples);
  return r;
}

Run run_solve(const Options& o) {
  const ConvexBody body = need_domain(o);
  if (!body.bounded()) throw UsageError("solve: domain must be bounded");
  const DriftSpec d = need_drift(o);
  const double fval = need_forcing(o);
  const SchemeConfig cfg = scheme(o, body, d);
  const PointFn f = [fval](const Vec&) { return fval; };
  Run r;
  r.report = {{"command", "solve"}, {"domain", domain_to_json(body)}, {"k", o.k}, {"drift", d.describe()},
              {"f", fval},          {"h", o.h},                       {"width", o.width}};

  if (threshold_case(body, d, o.k)) {
    const NonexistenceReport nr = detect_nonexistence(body, f, cfg);
    double wall = 0.0;
    for (const auto& lvl : nr.levels) wall += lvl.wall_clock;
    r.timing["wall_clock"] = wall;
    if (nr.blow_up) {
      r.report["outcome"] = outcome_name(Outcome::blow_up);
      r.report["tag"] = nr.tag;
      r.report["citation"] = nr.citation;
      r.report["certificate"] = certificate_json(nr.certificate);
      r.code = kNonexistence;
      return r;
    }
    r.report["ladder"] = certificate_json(nr.certificate);
  }

  const SolveReport rep = solve_dirichlet(body, f, o.h, cfg);
  r.timing["wall_clock"] = rep.wall_clock;
  r.report["outcome"] = outcome_name(rep.outcome);
  r.report["method"] = rep.method;
  r.report["iterations"] = rep.iterations;
  r.report["residual"] = rep.residual;
  r.report["tolerance"] = rep.tolerance;
  r.report["nodes"] = rep.grid->size();
  r.report["sup_norm"] = rep.field.size() ? rep.field.cwiseAbs().maxCoeff() : 0.0;
  r.report["boundary_trace_max"] = rep.boundary_trace_max;
  r.report["residual_history"] = rep.residual_history;
  if (rep.outcome == Outcome::blow_up) {
    r.report["certificate"] = certificate_json(rep.certificate);
    r.code = kNonexistence;
  } else if (rep.outcome == Outcome::max_iterations) {
    r.code = kMaxIterations;
  }

  // Closed-form comparison on a ball centred anywhere with f constant < 0.
  if (body.kind() == BodyKind::ball && fval < 0.0 && d.sign == Side::plus && rep.outcome == Outcome::converged) {
    const double R = body.impl().radius;
    std::optional<RadialProfile> oracle;
    try {
      if (d.is_constant() && d.c0 >= 0.0) oracle = profile_const_b(d.c0, R, o.k);
      else if (!d.is_constant()) oracle = profile_weighted(d.radial(R, o.k, body.dim()));
    } catch (const std::exception&) {
    }
    if (oracle) {
      double err = 0.0;
      for (int i = 0; i < rep.grid->size(); ++i)
        err = std::max(err, std::abs(rep.field[i] + fval * oracle->value((rep.grid->position(i) - body.impl().center).norm())));
      r.report["oracle"] = regime_name(oracle->regime);
      r.report["max_error"] = err;
    }
  }
  write_field_csv((fs::path(o.out) / "field.csv").string(), *rep.grid, rep.field);
  return r;
}

Run run_eigen(const Options& o) {
  const ConvexBody body = need_domain(o);
  const DriftSpec d = need_drift(o);
  Run r;
  r.report = {{"command", "eigen"}, {"domain", domain_to_json(body)}, {"k", o.k}, {"drift", d.describe()}};

  // Critical drift on a ball: closed-form family certificate.
  if (body.kind() == BodyKind::ball && d.is_constant() && d.c0 > 0.0) {
    const double R = body.impl().radius;
    if (std::abs(d.c0 * R - o.k) > 1e-12) throw UsageError("eigen: a drift term is supported only at bR = k");
    const CriticalDriftReport c = critical_drift_gap_check(R, o.k);
    r.report["critical_drift"] = {{"mu", c.mu},
                                  {"a_values", c.a_values},
                                  {"residuals", c.residuals},
                                  {"max_residual", c.max_residual},
                                  {"perturbed_mu", c.perturbed_mu},
                                  {"perturbed_failure_detected", c.perturbed_failure_detected},
                                  {"failure_radius", c.failure_radius},
                                  {"note", c.note}};
    return r;
  }
  if (!d.is_constant() || d.c0 != 0.0) throw UsageError("eigen: only b = 0 or a critical ball drift is supported");
  if (o.k != 1) throw UsageError("eigen: the iteration is defined for k = 1");
  const SchemeConfig cfg = scheme(o, body, d);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (o.mu) {
      auto grid = std::make_shared<const Grid>(body, o.h, cfg.width, cfg.k);
      const IterationResult it = bounded_iteration(grid, *o.mu, cfg);
      r.report["mu"] = *o.mu;
      r.report["outcome"] = iteration_outcome_name(it.outcome);
      r.report["steps"] = it.steps;
      r.report["extrapolated"] = it.decided_by_extrapolation;
      r.report["contraction"] = it.contraction;
      r.report["monotone_violation"] = it.monotone_violation;
      r.report["sup_norms"] = it.sup_norms;
    } else {
      const EigenEstimate e = estimate_mu1(body, o.h, cfg);
      json log = json::array();
      for (const auto& entry : e.log)
        log.push_back({{"mu", entry.mu}, {"outcome", iteration_outcome_name(entry.outcome)}, {"steps", entry.steps},
                       {"sup_norm", entry.sup_norm}, {"extrapolated", entry.extrapolated}});
      r.report["bracket"] = {e.mu_lo, e.mu_hi};
      r.report["mu1"] = e.mu();
      r.report["lower_bound"] = mu_lower_bound(o.k, 0.0, enclosing_radius(body));
      r.report["log"] = log;
      r.report["monotone_violation"] = e.monotone_violation;
      write_field_csv((fs::path(o.out) / "eigenfunction.csv").string(), *e.grid, e.eigenfunction);
    }
  } catch (const BracketFailure& e) {
    r.report["outcome"] = "bracket_failure";
    r.report["error"] = e.what();
    r.report["log_text"] = e.log();
    r.code = kMaxIterations;
  }
  r.timing["wall_clock"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Run run_verify(const Options& o) {
  const auto& names = verify_suite_names();
  if (o.suite != "all" && std::find(names.begin(), names.end(), o.suite) == names.end())
    throw UsageError("unknown suite '" + o.suite + "'");
  VerifyOptions vo;
  vo.seed = o.seed;
  vo.tolerance_scale = o.tolerance_scale;
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_verify_suite(o.suite, vo);
  Run r;
  r.timing["wall_clock"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.report = verify_summary_json(results);
  r.report["command"] = "verify";
  r.report["suite"] = o.suite;
  r.report["seed"] = o.seed;
  for (const auto& c : results)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '.' << c.name << "  " << format_double(c.value)
              << " <= " << format_double(c.threshold) << '\n';
  if (r.report["failures"].get<int>() > 0) r.code = kChecksFailed;
  return r;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "flat JSON file with option defaults");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
}

void add_domain(CLI::App* sub, Options& o) { sub->add_option("--domain", o.domain, "domain JSON file"); }

void add_scheme(CLI::App* sub, Options& o) {
  sub->add_option("--k", o.k, "truncation index");
  sub->add_option("--b", o.b, "drift: number | radial:r | radial:r-1 | radial:affine:c0,c1 | file");
  sub->add_option("--b-sign", o.b_sign, "plus or minus");
  sub->add_option("--h", o.h, "grid spacing");
  sub->add_option("--method", o.method, "policy or explicit");
  sub->add_option("--width", o.width, "stencil width (max lattice entry)");
  sub->add_option("--max-iterations", o.max_iterations, "solver iteration cap (0: method default)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Laplacian solver"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Options o;

  auto* classify_cmd = app.add_subcommand("classify", "flatness dimension and C_j / G_j membership");
  add_common(classify_cmd, o);
  add_domain(classify_cmd, o);
  classify_cmd->add_option("--samples", o.samples, "probe samples / 50");

  auto* radial_cmd = app.add_subcommand("radial", "closed-form and quadrature radial profiles");
  add_common(radial_cmd, o);
  add_domain(radial_cmd, o);
  radial_cmd->add_option("--k", o.k, "truncation index");
  radial_cmd->add_option("--b", o.b, "drift");
  radial_cmd->add_option("--b-sign", o.b_sign, "plus or minus");
  radial_cmd->add_option("--radius", o.radius, "ball radius when no domain is given");
  radial_cmd->add_option("--mu", o.mu, "critical-drift eigen profile at this mu");
  radial_cmd->add_option("--samples", o.samples, "rows in profile.csv minus one");

  auto* solve_cmd = app.add_subcommand("solve", "Dirichlet problem on a grid");
  add_common(solve_cmd, o);
  add_domain(solve_cmd, o);
  add_scheme(solve_cmd, o);
  solve_cmd->add_option("--f", o.f, "forcing: number | file");

  auto* eigen_cmd = app.add_subcommand("eigen", "principal eigenvalue by bounded iteration");
  add_common(eigen_cmd, o);
  add_domain(eigen_cmd, o);
  add_scheme(eigen_cmd, o);
  eigen_cmd->add_option("--mu", o.mu, "run a single bounded iteration at this mu");

  auto* verify_cmd = app.add_subcommand("verify", "property suites");
  add_common(verify_cmd, o);
  verify_cmd->add_option("suite,--suite", o.suite, "operators | geometry | radial | solver | eigen | all");
  verify_cmd->add_option("--tolerance-scale", o.tolerance_scale, "multiplies every threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  o.command = sub->get_name();
  Run run;
  try {
    apply_config(*sub, o);
    fs::create_directories(o.out);
    if (o.command == "classify") run = run_classify(o);
    else if (o.command == "radial") run = run_radial(o);
    else if (o.command == "solve") run = run_solve(o);
    else if (o.command == "eigen") run = run_eigen(o);
    else run = run_verify(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NonexistenceThreshold& e) {
    std::cerr << "nonexistence (" << e.tag() << "): " << e.citation() << '\n';
    return kNonexistence;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMaxIterations;
  }

  run.report["exit_code"] = run.code;
  const fs::path out(o.out);
  write_text((out / "report.json").string(), run.report.dump(2) + "\n");
  json meta = {{"command", o.command}, {"started_utc", utc_now()}, {"argv", std::vector<std::string>(argv, argv + argc)}};
  meta.update(run.timing);
  write_text((out / "metadata.json").string(), meta.dump(2) + "\n");

  if (run.report.contains("citation"))
    std::cerr << "nonexistence (" << run.report["tag"].get<std::string>() << "): "
              << run.report["citation"].get<std::string>() << '\n';
  if (o.command != "verify") std::cout << run.report.dump(2) << '\n';
  return run.code;
}
