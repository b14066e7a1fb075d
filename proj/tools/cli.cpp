#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "uniformizer/analysis.hpp"
#include "uniformizer/dampening.hpp"
#include "uniformizer/domains.hpp"
#include "uniformizer/energy.hpp"
#include "uniformizer/error.hpp"
#include "uniformizer/io.hpp"
#include "uniformizer/solver.hpp"
#include "uniformizer/transform.hpp"

namespace uniformizer::cli {
namespace {

using ojson = nlohmann::ordered_json;

struct CheckRow {
  std::string check;
  std::string params;
  double ratio = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Run {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::uint64_t seed = 0;
  ojson results = ojson::object();
  std::vector<CheckRow> checks;
};

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string config_hash(const Run& run) {
  std::string text = run.command;
  for (const auto& [k, v] : run.config) text += "\n" + k + "=" + v;
  for (const auto& [k, v] : run.inputs) text += "\nfile:" + k + "=" + v;
  text += "\nseed=" + std::to_string(run.seed);
  return fnv1a_hex(text);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

ojson number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

ojson report_json(const Run& run) {
  ojson doc;
  doc["command"] = run.command;
  doc["config_hash"] = config_hash(run);
  doc["seed"] = run.seed;
  doc["timestamp"] = timestamp_utc();
  ojson cfg = ojson::object();
  for (const auto& [k, v] : run.config) cfg[k] = v;
  doc["config"] = cfg;
  doc["results"] = run.results;
  ojson checks = ojson::array();
  for (const auto& c : run.checks) {
    checks.push_back({{"check", c.check},
                      {"params", c.params},
                      {"ratio", number_or_string(c.ratio)},
                      {"bound", number_or_string(c.bound)},
                      {"pass", c.pass}});
  }
  doc["checks"] = checks;
  return doc;
}

std::string checks_csv(const Run& run) {
  std::string out = "# config_hash=" + config_hash(run) + " seed=" + std::to_string(run.seed) + "\n";
  out += "check,params,ratio,bound,pass\n";
  for (const auto& c : run.checks) {
    out += c.check + "," + c.params + "," + format_number(c.ratio) + "," + format_number(c.bound) + "," +
           (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_text_file_atomic(path, content);
  }
}

bool all_pass(const Run& run) {
  return std::all_of(run.checks.begin(), run.checks.end(), [](const CheckRow& c) { return c.pass; });
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string("malformed ") + what + " list entry '" + item + "'");
    }
  }
  return out;
}

std::size_t parse_fields_spec(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2 || parts[0] != "random") throw InputError("--fields expects random:N");
  try {
    const long n = std::stol(parts[1]);
    if (n <= 0) throw std::invalid_argument(parts[1]);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw InputError("--fields expects a positive count");
  }
}

double mesh_scale(const GraphSpace& space) {
  double h = kInfinity;
  for (EdgeIndex e = 0; e < space.num_edges(); ++e) h = std::min(h, space.graph().length(e));
  return h;
}

// Vertex selectors: comma-separated ids, plus "boundary" and "infinity".
std::vector<VertexIndex> select_vertices(const std::string& spec, const GraphSpace& space,
                                         const TransformedSpace* t) {
  std::vector<VertexIndex> out;
  for (const auto& name : split(spec, ',')) {
    if (name == "boundary") {
      const auto b = space.boundary_vertices();
      out.insert(out.end(), b.begin(), b.end());
    } else if (name == "infinity") {
      if (!t || !t->has_infinity()) throw InputError("'infinity' requires --phi");
      out.push_back(t->infinity_vertex());
    } else {
      const auto v = space.find(name);
      if (!v) throw InputError("unknown vertex id '" + name + "'");
      out.push_back(*v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ";";
    out += std::string(k) + "=" + v;
  }
  return out;
}

struct Options {
  // example
  std::string name = "half_strip";
  double h = 0.25;
  double H = 64.0;
  int level = 1;
  std::string nu_out;
  // validate-phi
  std::string kind = "power";
  double beta = 2.0;
  int nmax = 20;
  // shared
  std::string domain;
  std::string phi;
  double p = 2.0;
  bool attach = false;
  std::string out;
  std::string report;
  std::string format = "json";
  std::uint64_t seed = 0;
  // solve
  std::string data;
  std::optional<double> at_infinity;
  // capacity / modulus
  std::string E, F;
  // verify
  std::vector<std::string> checks;
  std::optional<double> theta;
  std::string nu_in;
  std::string fields = "random:20";
  std::string radii;
  std::optional<double> bound;
  std::optional<double> q;
  double tol = 0.3;
  std::size_t samples = 10;
  // report
  std::vector<std::string> inputs;
};

struct Loaded {
  GraphSpace space;
  std::string hash;
};

Loaded load(const std::string& path) {
  if (path.empty()) throw InputError("--domain is required");
  const auto text = read_text_file(path);
  try {
    return {parse_domain(text), fnv1a_hex(text)};
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Dampening phi_of(const Options& o) { return Dampening::parse(o.phi.empty() ? "power:2" : o.phi); }

void write_report(const Options& o, const Run& run) {
  if (!o.report.empty()) write_text_file_atomic(o.report, report_json(run).dump(1) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_example(const Options& o, Run& run) {
  if (o.out.empty()) throw InputError("--out is required");
  const auto dom = generate({parse_domain_kind(o.name), o.h, o.H, o.level});
  write_text_file_atomic(o.out, domain_to_json(dom.space) + "\n");
  if (!o.nu_out.empty()) write_text_file_atomic(o.nu_out, measure_to_json(dom.space, dom.nu) + "\n");
  run.results["vertices"] = dom.space.num_vertices();
  run.results["edges"] = dom.space.num_edges();
  run.results["boundary_vertices"] = dom.space.boundary_vertices().size();
  run.results["theta"] = dom.theta;
  write_report(o, run);
  return 0;
}

int cmd_validate_phi(const Options& o, Run& run) {
  const auto phi = o.phi.empty() ? Dampening::parse(o.kind + ":" + format_number(o.beta)) : Dampening::parse(o.phi);
  std::vector<double> band_measure;
  if (!o.domain.empty()) {
    const auto l = load(o.domain);
    run.inputs.emplace_back("domain", l.hash);
    band_measure = bands(l.space).band_measure;
  }
  const auto rep = validate(phi, o.p, band_measure, o.nmax);
  ojson doc;
  doc["phi"] = phi.spec();
  doc["p"] = o.p;
  doc["n_max"] = o.nmax;
  doc["tail_integral_estimate"] = number_or_string(rep.tail_integral_estimate);
  doc["C_phi_emp"] = number_or_string(rep.C_phi_emp);
  doc["tau_emp"] = number_or_string(rep.tau_emp);
  doc["cond5_implied_constant"] = number_or_string(rep.cond5_implied_constant);
  doc["cond6_implied_constant"] = number_or_string(rep.cond6_implied_constant);
  ojson conds = ojson::array();
  bool ok = true;
  for (int k = 1; k <= 6; ++k) {
    const auto status = rep.status[k - 1];
    conds.push_back({{"condition", k}, {"status", to_string(status)}});
    ok = ok && status != CheckStatus::fail;
    run.checks.push_back({"phi_condition_" + std::to_string(k), params({{"phi", phi.spec()}}), 0.0, 0.0,
                          status != CheckStatus::fail});
  }
  doc["conditions"] = conds;
  doc["notes"] = rep.notes;
  doc["pass"] = ok;
  doc["config_hash"] = config_hash(run);
  doc["seed"] = run.seed;
  run.results = doc;
  emit(o.out, doc.dump(1) + "\n");
  write_report(o, run);
  return ok ? 0 : 1;
}

int cmd_transform(const Options& o, Run& run) {
  const auto l = load(o.domain);
  run.inputs.emplace_back("domain", l.hash);
  auto t = transform(l.space, phi_of(o), o.p);
  if (o.attach) t = attach_infinity(std::move(t));
  emit(o.out, transformed_to_json(t) + "\n");
  run.results["vertices"] = t.measured.num_vertices();
  run.results["edges"] = t.measured.num_edges();
  if (t.has_infinity()) run.results["end_exponent"] = t.infinity->end_exponent;
  write_report(o, run);
  return 0;
}

ojson solve_json(const SolveResult& r) {
  ojson j;
  j["energy"] = r.energy;
  j["iterations"] = r.iterations;
  j["stages"] = r.stages;
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  j["flags"] = r.flags;
  return j;
}

int cmd_solve(const Options& o, Run& run) {
  const auto l = load(o.domain);
  run.inputs.emplace_back("domain", l.hash);
  if (o.data.empty()) throw InputError("--data is required");
  const auto data_text = read_text_file(o.data);
  run.inputs.emplace_back("data", fnv1a_hex(data_text));
  const auto f = parse_field(data_text, l.space);
  for (const auto b : l.space.boundary_vertices()) {
    if (std::isnan(f[b])) throw InputError(o.data + ": boundary data missing at '" + l.space.id(b) + "'");
  }
  const auto s = solve_dirichlet_unbounded(l.space, phi_of(o), o.p, f, o.at_infinity);
  ScalarField u(s.result.u.begin(), s.result.u.begin() + static_cast<std::ptrdiff_t>(l.space.num_vertices()));
  u.push_back(s.at_infinity);
  if (o.out.empty()) throw InputError("--out is required");
  write_text_file_atomic(o.out, field_to_json(l.space, u) + "\n");
  run.results = solve_json(s.result);
  run.results["at_infinity"] = s.at_infinity;
  run.checks.push_back({"solver_converged", params({{"p", format_number(o.p)}}), s.result.residual, o.p, s.result.converged});
  write_report(o, run);
  if (o.report.empty()) std::cout << report_json(run).dump(1) << "\n";
  return s.result.converged ? 0 : 1;
}

struct CondenserSetup {
  std::optional<TransformedSpace> t;
  const MeasuredGraph* g = nullptr;
  Condenser cond;
};

CondenserSetup condenser_setup(const Options& o, const GraphSpace& space) {
  CondenserSetup s;
  if (!o.phi.empty()) {
    s.t = attach_infinity(transform(space, phi_of(o), o.p));
    s.g = &s.t->measured;
  } else {
    s.g = &space.measured();
  }
  if (o.E.empty() || o.F.empty()) throw InputError("--E and --F are required");
  s.cond.E = select_vertices(o.E, space, s.t ? &*s.t : nullptr);
  s.cond.F = select_vertices(o.F, space, s.t ? &*s.t : nullptr);
  return s;
}

int cmd_capacity(const Options& o, Run& run) {
  const auto l = load(o.domain);
  run.inputs.emplace_back("domain", l.hash);
  const auto s = condenser_setup(o, l.space);
  const auto c = capacity(*s.g, s.cond, o.p);
  run.results["capacity"] = c.value;
  run.results["solve"] = solve_json(c.solve);
  run.checks.push_back({"capacity_converged", params({{"p", format_number(o.p)}}), c.value, 0.0, c.solve.converged});
  emit(o.out, report_json(run).dump(1) + "\n");
  write_report(o, run);
  return c.solve.converged ? 0 : 1;
}

int cmd_modulus(const Options& o, Run& run) {
  const auto l = load(o.domain);
  run.inputs.emplace_back("domain", l.hash);
  const auto s = condenser_setup(o, l.space);
  const auto m = modulus(*s.g, s.cond, o.p);
  run.results["modulus"] = m.value;
  run.results["paths_used"] = m.paths_used;
  run.results["shortest"] = m.shortest;
  run.results["converged"] = m.converged;
  run.results["flags"] = m.flags;
  run.checks.push_back({"modulus_converged", params({{"p", format_number(o.p)}}), m.value, 0.0, m.converged});
  emit(o.out, report_json(run).dump(1) + "\n");
  write_report(o, run);
  return m.converged ? 0 : 1;
}

int cmd_classify(const Options& o, Run& run) {
  const auto l = load(o.domain);
  run.inputs.emplace_back("domain", l.hash);
  const auto t = attach_infinity(transform(l.space, phi_of(o), o.p));
  const auto c = classify_parabolicity(t);
  auto& r = run.results;
  r["verdict"] = to_string(c.verdict);
  r["predicted"] = to_string(c.predicted);
  r["near_threshold"] = c.near_threshold;
  r["q_mu_minus"] = c.q_mu_minus;
  r["q_mu_plus"] = c.q_mu_plus;
  r["radii"] = c.radii;
  r["caps"] = c.caps;
  r["fit"] = {{"form", c.fit.form},
              {"exponent", c.fit.exponent},
              {"residual", c.fit.residual},
              {"loglog_slope", c.fit.loglog_slope},
              {"logpower_slope", c.fit.logpower_slope}};
  r["notes"] = c.notes;
  const bool agrees = c.verdict != Verdict::indeterminate && (c.near_threshold || c.verdict == c.predicted);
  run.checks.push_back({"classification", params({{"p", format_number(o.p)}, {"phi", t.phi.spec()}}),
                        c.fit.exponent, 0.0, agrees});
  emit(o.out, report_json(run).dump(1) + "\n");
  write_report(o, run);
  return agrees ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct VerifyContext {
  const Options& o;
  const GraphSpace& space;
  TransformedSpace t;
  BoundaryMeasure nu;
  double h;
  std::mt19937_64 rng;
  std::vector<ScalarField> fields;
};

std::vector<double> radii_or(const VerifyContext& c, std::vector<double> fallback) {
  return c.o.radii.empty() ? fallback : parse_list(c.o.radii, "radius");
}

std::vector<VertexIndex> sampled(const VerifyContext& c, std::span<const VertexIndex> pool) {
  return sample_vertices(pool, c.o.samples, c.o.seed);
}

std::string base_params(const VerifyContext& c) {
  return params({{"p", format_number(c.o.p)}, {"phi", c.t.phi.spec()}, {"theta", format_number(c.nu.theta)}});
}

double interior_extent(const VerifyContext& c) {
  double dmax = 0.0;
  for (VertexIndex v = 0; v < c.space.num_vertices(); ++v) dmax = std::max(dmax, c.t.d_omega[v]);
  return dmax;
}

CheckRow check_poincare(VerifyContext& c) {
  const auto centers = sampled(c, c.space.interior_vertices());
  const auto radii = radii_or(c, dyadic_radii(4.0 * c.h, std::max(4.0 * c.h, interior_extent(c) / 8.0)));
  const auto rep = poincare_check(c.space.measured(), centers, radii, 2.0, c.fields, c.o.p);
  const double bound = c.o.bound.value_or(16.0);
  return {"poincare", base_params(c) + ";lambda=2", rep.max_ratio, bound, rep.max_ratio <= bound};
}

CheckRow check_hardy(VerifyContext& c) {
  double worst = 0.0;
  for (const auto& u : c.fields) worst = std::max(worst, hardy_check(c.t, u));
  const double bound = c.o.bound.value_or(64.0);
  return {"hardy", base_params(c), worst, bound, std::isfinite(worst) && worst <= bound};
}

CheckRow check_adams(VerifyContext& c) {
  const auto centers = sampled(c, c.space.boundary_vertices());
  const auto radii = radii_or(c, {4.0 * c.h, 8.0 * c.h});
  std::vector<Ball> balls;
  for (const auto z : centers)
    for (const double r : radii) balls.push_back({z, r});
  const double q = c.o.q.value_or(c.o.p + 1.0);
  double worst = 0.0;
  for (const auto& u : c.fields) worst = std::max(worst, adams_check(c.t, c.nu, u, q, c.nu.theta, balls).max_ratio);
  const double bound = c.o.bound.value_or(64.0);
  return {"adams", base_params(c) + ";q=" + format_number(q), worst, bound, std::isfinite(worst) && worst <= bound};
}

CheckRow check_codim(VerifyContext& c) {
  const auto radii = radii_or(c, dyadic_radii(c.h, 1.0));
  const double bound = c.o.bound.value_or(16.0);
  const auto rep = verify_codimensionality(c.space, c.nu, radii, bound);
  return {"codim", base_params(c), rep.spread, bound, rep.pass};
}

CheckRow check_besov(VerifyContext& c) {
  const double alpha = 1.0 - c.nu.theta / c.o.p;
  double worst = 0.0;
  for (const auto& f : c.fields) {
    const auto s = solve_dirichlet_unbounded(c.t, f, std::nullopt);
    const double e = std::pow(s.result.energy, 1.0 / c.o.p);
    if (e > 0.0) worst = std::max(worst, besov_norm(c.space.graph(), c.nu, f, alpha, c.o.p) / e);
  }
  const double bound = c.o.bound.value_or(64.0);
  return {"besov", base_params(c) + ";alpha=" + format_number(alpha), worst, bound,
          std::isfinite(worst) && worst <= bound};
}

CheckRow check_doubling(VerifyContext& c) {
  const VertexIndex centers[] = {c.t.infinity_vertex()};
  const auto radii = radii_or(c, infinity_radii(c.t));
  const double bound = c.o.bound.value_or(64.0);
  const auto rep = doubling_constant(c.t.measured, centers, radii, bound);
  return {"doubling", base_params(c) + ";center=infinity", rep.max_ratio, bound, rep.pass};
}

CheckRow check_exponents(VerifyContext& c) {
  const VertexIndex at_inf[] = {c.t.infinity_vertex()};
  const auto fit = mass_exponents(c.t.measured, at_inf, radii_or(c, infinity_radii(c.t)));
  const auto centers = sampled(c, c.space.interior_vertices());
  const double top = interior_extent(c);
  const auto base = mass_exponents(c.space.measured(), centers, dyadic_radii(top / 16.0, top / 2.0));
  const double beta = c.t.phi.kind() == Dampening::Kind::tabulated ? 2.0 : c.t.phi.beta();
  const auto pred = q_beta(c.o.p, beta, base.slope, base.slope);
  const double tol = c.o.bound.value_or(c.o.tol);
  const double err = std::abs(fit.slope - pred.minus);
  return {"exponents",
          base_params(c) + ";slope=" + format_number(fit.slope) + ";predicted=" + format_number(pred.minus), err, tol,
          err <= tol};
}

CheckRow check_distinf(VerifyContext& c) {
  const auto rep = dist_infinity_check(c.t);
  const double bound = c.o.bound.value_or(4.0);
  return {"distinf", base_params(c), rep.kappa, bound, rep.kappa <= bound};
}

CheckRow check_uniformity(VerifyContext& c) {
  const auto pool = c.space.interior_vertices();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<std::pair<VertexIndex, VertexIndex>> pairs;
  for (std::size_t i = 0; i < c.o.samples; ++i) {
    const VertexIndex a = pool[pick(c.rng)], b = pool[pick(c.rng)];
    if (a != b) pairs.emplace_back(a, b);
  }
  const auto d = boundary_distance(c.space);
  const auto rep = uniformity_spot_check(c.space.measured(), d, pairs);
  const double bound = c.o.bound.value_or(16.0);
  return {"uniformity", base_params(c), rep.constant, bound, rep.constant <= bound};
}

CheckRow check_fatness(VerifyContext& c) {
  const auto centers = sampled(c, c.space.boundary_vertices());
  const auto radii = radii_or(c, dyadic_radii(4.0 * c.h, std::max(4.0 * c.h, 0.25)));
  const double bound = c.o.bound.value_or(16.0);
  const auto rep = boundary_fatness(c.t, c.nu, centers, radii, bound);
  return {"fatness", base_params(c) + ";floor=" + format_number(rep.floor), rep.min_ratio, rep.floor, rep.pass};
}

int cmd_verify(const Options& o, Run& run) {
  const auto l = load(o.domain);
  run.inputs.emplace_back("domain", l.hash);
  const double h = mesh_scale(l.space);
  BoundaryMeasure nu;
  if (!o.nu_in.empty()) {
    const auto text = read_text_file(o.nu_in);
    run.inputs.emplace_back("nu", fnv1a_hex(text));
    nu = parse_measure(text, l.space);
    if (o.theta) nu.theta = *o.theta;
  } else {
    nu = codimensional_measure(l.space, o.theta.value_or(1.0), h);
  }
  VerifyContext c{o, l.space, attach_infinity(transform(l.space, phi_of(o), o.p)), std::move(nu), h,
                  std::mt19937_64(o.seed), {}};
  const std::size_t nf = parse_fields_spec(o.fields);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t i = 0; i < nf; ++i) {
    ScalarField u(l.space.num_vertices());
    for (auto& x : u) x = unit(c.rng);
    c.fields.push_back(std::move(u));
  }
  static const std::vector<std::pair<std::string, std::function<CheckRow(VerifyContext&)>>> table{
      {"poincare", check_poincare}, {"hardy", check_hardy},       {"adams", check_adams},
      {"codim", check_codim},       {"besov", check_besov},       {"doubling", check_doubling},
      {"exponents", check_exponents}, {"distinf", check_distinf}, {"uniformity", check_uniformity},
      {"fatness", check_fatness}};
  if (o.checks.empty()) throw InputError("--check is required");
  for (const auto& name : o.checks) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
    if (it == table.end()) throw InputError("unknown check '" + name + "'");
    run.checks.push_back(it->second(c));
  }
  emit(o.out, o.format == "csv" ? checks_csv(run) : report_json(run).dump(1) + "\n");
  write_report(o, run);
  return all_pass(run) ? 0 : 1;
}

int cmd_report(const Options& o, Run& run) {
  if (o.inputs.empty()) throw InputError("--in is required");
  ojson files = ojson::array();
  for (const auto& path : o.inputs) {
    const auto text = read_text_file(path);
    run.inputs.emplace_back(path, fnv1a_hex(text));
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(path + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("checks") || !doc["checks"].is_array()) {
      throw InputError(path + ": not a run report");
    }
    for (const auto& row : doc["checks"]) {
      const auto num = [&](const char* key) {
        const auto& v = row.at(key);
        return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
      };
      run.checks.push_back({row.at("check").get<std::string>(), row.at("params").get<std::string>(), num("ratio"),
                            num("bound"), row.at("pass").get<bool>()});
    }
    files.push_back({{"path", path},
                     {"command", doc.value("command", "")},
                     {"config_hash", doc.value("config_hash", "")}});
  }
  run.results["reports"] = files;
  run.results["all_pass"] = all_pass(run);
  emit(o.out, o.format == "csv" ? checks_csv(run) : report_json(run).dump(1) + "\n");
  return all_pass(run) ? 0 : 1;
}

// ---------------------------------------------------------------------------

void record_config(const CLI::App& sub, Run& run) {
  for (const auto* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto name = "--" + opt->get_lnames().front();
    if (name == "--help" || name == "--out" || name == "--report" || (name == "--nu" && sub.get_name() == "example")) {
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    run.config.emplace_back(name, value);
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"uniformizer: conformal transformation lab for unbounded uniform graph domains"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  Options o;

  const auto shared = [&](CLI::App* s, bool phi_default) {
    s->add_option("--domain", o.domain, "Domain JSON file");
    auto* phi = s->add_option("--phi", o.phi, "Dampening spec, e.g. power:2");
    if (phi_default) phi->default_str("power:2");
    s->add_option("--p", o.p, "Energy exponent")->capture_default_str();
    s->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    s->add_option("--out", o.out, "Primary output path ('-' for stdout)");
    s->add_option("--report", o.report, "Run report JSON path");
  };

  auto* example = app.add_subcommand("example", "Generate an example domain");
  example->add_option("--name", o.name, "half_strip|slit_cone|cantor_slit|plane_minus_cantor_square")
      ->capture_default_str();
  example->add_option("--h", o.h, "Mesh width")->capture_default_str();
  example->add_option("--H", o.H, "Truncation extent")->capture_default_str();
  example->add_option("--level", o.level, "Cantor level")->capture_default_str();
  example->add_option("--nu", o.nu_out, "Boundary measure output path");
  example->add_option("--out", o.out, "Domain output path");
  example->add_option("--report", o.report, "Run report JSON path");
  example->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  auto* vphi = app.add_subcommand("validate-phi", "Check the dampening conditions");
  vphi->add_option("--kind", o.kind, "power|log_power")->capture_default_str();
  vphi->add_option("--beta", o.beta, "Decay exponent")->capture_default_str();
  vphi->add_option("--nmax", o.nmax, "Largest dyadic exponent")->capture_default_str();
  shared(vphi, false);

  auto* tr = app.add_subcommand("transform", "Write the transformed domain");
  shared(tr, true);
  tr->add_flag("--attach-infinity", o.attach, "Attach the point at infinity");

  auto* solve = app.add_subcommand("solve", "Solve the Dirichlet problem on the transformed domain");
  shared(solve, true);
  solve->add_option("--data", o.data, "Boundary data JSON");
  solve->add_option("--at-infinity", o.at_infinity, "Pin the value at infinity");

  auto* cap = app.add_subcommand("capacity", "Condenser capacity");
  shared(cap, false);
  cap->add_option("--E", o.E, "Comma-separated ids, 'boundary' or 'infinity'");
  cap->add_option("--F", o.F, "Comma-separated ids, 'boundary' or 'infinity'");

  auto* mod = app.add_subcommand("modulus", "Condenser p-modulus");
  shared(mod, false);
  mod->add_option("--E", o.E, "Comma-separated ids, 'boundary' or 'infinity'");
  mod->add_option("--F", o.F, "Comma-separated ids, 'boundary' or 'infinity'");

  auto* cls = app.add_subcommand("classify", "Parabolic or hyperbolic end");
  shared(cls, true);

  auto* ver = app.add_subcommand("verify", "Run inequality and geometry checks");
  shared(ver, true);
  ver->add_option("--check", o.checks,
                  "poincare|hardy|adams|codim|besov|doubling|exponents|distinf|uniformity|fatness")
      ->delimiter(',');
  ver->add_option("--theta", o.theta, "Codimension");
  ver->add_option("--nu", o.nu_in, "Boundary measure JSON");
  ver->add_option("--fields", o.fields, "random:N")->capture_default_str();
  ver->add_option("--radii", o.radii, "Comma-separated radii");
  ver->add_option("--bound", o.bound, "Override the pass bound");
  ver->add_option("--q", o.q, "Adams exponent (default p + 1)");
  ver->add_option("--tol", o.tol, "Exponent tolerance")->capture_default_str();
  ver->add_option("--samples", o.samples, "Sampled centres")->capture_default_str();
  ver->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* rep = app.add_subcommand("report", "Aggregate run reports");
  rep->add_option("--in", o.inputs, "Run report JSON files")->required();
  rep->add_option("--out", o.out, "Output path ('-' for stdout)");
  rep->add_option("--format", o.format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const std::vector<std::pair<CLI::App*, std::function<int(const Options&, Run&)>>> commands{
      {example, cmd_example}, {vphi, cmd_validate_phi}, {tr, cmd_transform}, {solve, cmd_solve},
      {cap, cmd_capacity},    {mod, cmd_modulus},       {cls, cmd_classify}, {ver, cmd_verify},
      {rep, cmd_report}};
  for (const auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    Run run;
    run.command = sub->get_name();
    run.seed = o.seed;
    record_config(*sub, run);
    try {
      return fn(o, run);
    } catch (const InputError& e) {
      std::cerr << "input error: " << e.what() << "\n";
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace uniformizer::cli
