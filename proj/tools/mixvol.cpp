// mixvol: command-line front end.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical or LP failure.
// Errors go to stderr as one line of JSON.

#include "mixvol/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

using namespace mixvol;

namespace {

struct Common {
  std::string instance;
  std::vector<int> alpha;
  std::string out;
  int workers = 1;
};

struct Options {
  Common common;
  double eps = 0.1;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::string mode = "exact";
  int d2 = 32;
  int scale_bits = 20;
  std::vector<std::string> lambda;
  double tol = 1e-9;
  std::string svg;
  int audit_points = 1000;
  int gen_n = 2, gen_k = 2, gen_m0 = 4, gen_L = 2;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Exponent resolve_alpha(const Common& c, const InstanceFile& f) {
  if (!c.alpha.empty()) return c.alpha;
  if (f.alpha) return *f.alpha;
  throw ValidationError("alpha is required (pass --alpha or set it in the instance file)");
}

std::optional<Vector> parse_lambda(const std::vector<std::string>& text) {
  if (text.empty()) return std::nullopt;
  Vector out;
  for (const auto& t : text) out.push_back(parse_rational(t));
  return out;
}

Json envelope(const std::string& command, const Json& config, const Json& seed) {
  return {{"tool", "mixvol"},
          {"version", MIXVOL_VERSION},
          {"schema_version", kReportSchemaVersion},
          {"command", command},
          {"seed", seed},
          {"config", config}};
}

Json common_config(const Common& c) {
  Json j = {{"instance", c.instance}, {"workers", c.workers}};
  j["alpha"] = c.alpha.empty() ? Json(nullptr) : Json(c.alpha);
  return j;
}

void emit(const Json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open output file " + path);
  f << text;
}

Json run_estimate(const Options& o) {
  const auto t0 = Clock::now();
  const InstanceFile f = load_instance(o.common.instance);
  const Instance in = Instance::make(f.polytopes, resolve_alpha(o.common, f));
  EstimateConfig cfg;
  if (o.mode == "exact") {
    cfg.mode = EstimateMode::exact;
  } else if (o.mode == "sampled") {
    cfg.mode = EstimateMode::sampled;
  } else {
    throw ValidationError("mode must be exact or sampled");
  }
  cfg.d2 = o.d2;
  cfg.scale_bits = o.scale_bits;
  cfg.workers = o.common.workers;
  cfg.fixed_lambda = parse_lambda(o.lambda);
  const EstimateReport r = estimate_mixed_volume(in, o.eps, o.delta, o.seed, cfg);
  Json config = common_config(o.common);
  config["alpha"] = in.alpha;
  config.update({{"eps", o.eps},
                 {"delta", o.delta},
                 {"seed", o.seed},
                 {"mode", o.mode},
                 {"d2", o.d2},
                 {"scale_bits", o.scale_bits},
                 {"lambda", cfg.fixed_lambda ? to_json(*cfg.fixed_lambda) : Json(nullptr)}});
  Json rep = envelope("estimate", config, o.seed);
  rep["result"] = to_json(r);
  Json timings(r.timings);
  timings["wall"] = seconds_since(t0);
  rep["timings"] = timings;
  return rep;
}

Json run_exact(const Options& o) {
  const auto t0 = Clock::now();
  const InstanceFile f = load_instance(o.common.instance);
  const Instance in = Instance::make(f.polytopes, resolve_alpha(o.common, f));
  const MinkowskiPolynomial v = interpolate_coefficients(in.polytopes, o.common.workers);
  const Normalization conv = convert_normalization(v.coefficient(in.alpha), in.alpha);
  Json coeffs = Json::array();
  for (const auto& mu : compositions(in.n, in.k)) coeffs.push_back({{"mu", mu}, {"value", to_json(v.coefficient(mu))}});
  Json config = common_config(o.common);
  config["alpha"] = in.alpha;
  Json rep = envelope("exact", config, nullptr);
  rep["result"] = {{"n", in.n},
                   {"k", in.k},
                   {"alpha", in.alpha},
                   {"coefficient", to_json(conv.coefficient)},
                   {"derivative_form", to_json(conv.derivative_form)},
                   {"standard_mixed_volume", to_json(conv.standard_mixed_volume)},
                   {"coefficients", coeffs}};
  rep["timings"] = {{"wall", seconds_since(t0)}};
  return rep;
}

Json run_capacity(const Options& o, bool with_bounds) {
  const auto t0 = Clock::now();
  const InstanceFile f = load_instance(o.common.instance);
  const Instance in = Instance::make(f.polytopes, resolve_alpha(o.common, f));
  const MinkowskiPolynomial v = interpolate_coefficients(in.polytopes, o.common.workers);
  CapacityOptions copt;
  copt.tol = o.tol;
  copt.box_radius = search_box_radius(in.n, in.L, in.m0);
  const CapacityResult cap = capacity_minimize(v, in.alpha, copt);
  Json config = common_config(o.common);
  config["alpha"] = in.alpha;
  config["tol"] = o.tol;
  Json rep = envelope(with_bounds ? "bounds" : "capacity", config, nullptr);
  rep["result"] = {{"capacity", to_json(cap)}};
  if (with_bounds) rep["result"]["bounds"] = to_json(bound_report(v, in.alpha, cap, in.polytopes));
  rep["timings"] = {{"wall", seconds_since(t0)}};
  return rep;
}

Json run_subdivide(const Options& o) {
  const auto t0 = Clock::now();
  const InstanceFile f = load_instance(o.common.instance);
  const int k = static_cast<int>(f.polytopes.size());
  if (!o.svg.empty() && f.n != 2) throw ValidationError("SVG export requires n = 2");
  if (minkowski_sum_dim(f.polytopes) < f.n) throw ValidationError("Minkowski sum is lower-dimensional; no cells");
  Vector lambda = parse_lambda(o.lambda).value_or(Vector(static_cast<std::size_t>(k), Rational(1)));
  if (lambda.size() != static_cast<std::size_t>(k)) throw ValidationError("lambda must have one entry per polytope");
  SubdivisionOptions sopt;
  sopt.workers = o.common.workers;

  Rng rng(o.seed, 0);
  std::vector<SubdivisionCell> cells;
  ShiftVectors shifts;
  int resamples = 0;
  for (;;) {
    shifts = sample_shifts(k, f.n, 32, rng);
    try {
      cells = enumerate_cells(f.polytopes, lambda, shifts, sopt);
      break;
    } catch (const NonGenericShifts&) {
      if (++resamples > 5) throw;
    }
  }
  const SubdivisionAudit audit = verify_subdivision(cells, f.polytopes, lambda, o.seed, o.audit_points);
  if (!o.svg.empty()) export_svg(cells, f.polytopes, o.svg);

  Json config = common_config(o.common);
  config.update({{"lambda", to_json(lambda)}, {"seed", o.seed}, {"audit_points", o.audit_points}});
  config["svg"] = o.svg.empty() ? Json(nullptr) : Json(o.svg);
  Json rep = envelope("subdivide", config, o.seed);
  Json cj = Json::array();
  for (const auto& c : cells) cj.push_back(to_json(c));
  rep["result"] = {{"n", f.n},
                   {"k", k},
                   {"lambda", to_json(lambda)},
                   {"shifts", to_json(shifts)},
                   {"resamples", resamples},
                   {"num_cells", cells.size()},
                   {"signature_sums", to_json(signature_sums(cells))},
                   {"verification", to_json(audit)},
                   {"cells", cj}};
  if (!o.common.alpha.empty() || f.alpha) {
    const Exponent alpha = resolve_alpha(o.common, f);
    const Rational sum = alpha_cell_sum(cells, alpha);
    const Rational expected = monomial(lambda, alpha) * interpolate_coefficients(f.polytopes).coefficient(alpha);
    rep["result"]["alpha_cell_sum"] = {
        {"alpha", alpha}, {"value", to_json(sum)}, {"expected", to_json(expected)}, {"match", sum == expected}};
  }
  rep["timings"] = {{"wall", seconds_since(t0)}};
  return rep;
}

Json run_gen(const Options& o) {
  if (o.gen_n < 1 || o.gen_k < 1 || o.gen_m0 < 1 || o.gen_L < 0 || o.gen_L > 30)
    throw ValidationError("gen parameters must be positive (L in [0, 30])");
  Rng rng(o.seed, 0);
  const Integer bound = Integer(1) << static_cast<mp_bitcnt_t>(o.gen_L);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    InstanceFile f;
    f.n = o.gen_n;
    f.L = o.gen_L;
    for (int i = 0; i < o.gen_k; ++i) {
      std::vector<Point> pts;
      for (int j = 0; j < o.gen_m0; ++j) {
        Point p;
        for (int c = 0; c < o.gen_n; ++c) p.emplace_back(rng.between(-bound, bound));
        pts.push_back(std::move(p));
      }
      f.polytopes.push_back(convex_hull(pts).named("P" + std::to_string(i + 1)));
    }
    if (minkowski_sum_dim(f.polytopes) == f.n) return to_json(f);
  }
  throw NumericalError("gen: could not draw a full-dimensional instance");
}

void fail(const char* kind, int code, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed volumes of lattice polytopes: estimation, exact oracles, and subdivisions"};
  app.set_version_flag("--version", std::string("mixvol ") + MIXVOL_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool alpha) {
    sub->add_option("instance", o.common.instance, "Instance JSON file")->required();
    if (alpha) sub->add_option("--alpha", o.common.alpha, "Exponent vector, e.g. 1,1")->delimiter(',');
    sub->add_option("--out", o.common.out, "Write the report here instead of stdout");
    sub->add_option("--workers", o.common.workers, "Worker threads")->envname("MIXVOL_THREADS");
  };

  auto* est = app.add_subcommand("estimate", "Randomized estimate of the mixed-volume coefficient");
  add_common(est, true);
  est->add_option("--eps", o.eps, "Relative accuracy")->capture_default_str();
  est->add_option("--delta", o.delta, "Failure probability")->capture_default_str();
  est->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  est->add_option("--mode", o.mode, "exact or sampled volume at lambda")->capture_default_str();
  est->add_option("--d2", o.d2, "Sampling grid exponent")->capture_default_str();
  est->add_option("--scale-bits", o.scale_bits, "Integer scaling bits for lambda")->capture_default_str();
  est->add_option("--lambda", o.lambda, "Fixed scaling vector (skips capacity)")->delimiter(',');

  auto* exact = app.add_subcommand("exact", "Exact coefficient by interpolation");
  add_common(exact, true);

  auto* cap = app.add_subcommand("capacity", "Capacity of the volume polynomial");
  add_common(cap, true);
  cap->add_option("--tol", o.tol, "Certified log-gap tolerance")->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "Capacity, constants, and coefficient bounds");
  add_common(bounds, true);
  bounds->add_option("--tol", o.tol, "Certified log-gap tolerance")->capture_default_str();

  auto* sub = app.add_subcommand("subdivide", "Exact mixed subdivision");
  add_common(sub, true);
  sub->add_option("--lambda", o.lambda, "Scaling vector (default all ones)")->delimiter(',');
  sub->add_option("--seed", o.seed, "Seed for the shift vectors")->capture_default_str();
  sub->add_option("--svg", o.svg, "Write an SVG drawing (n = 2 only)");
  sub->add_option("--audit-points", o.audit_points, "Random audit size")->capture_default_str();

  auto* gen = app.add_subcommand("gen", "Random instance generator");
  gen->add_option("--n", o.gen_n, "Dimension")->capture_default_str();
  gen->add_option("--k", o.gen_k, "Number of polytopes")->capture_default_str();
  gen->add_option("--m0", o.gen_m0, "Points per polytope")->capture_default_str();
  gen->add_option("--L", o.gen_L, "Coordinates in [-2^L, 2^L]")->capture_default_str();
  gen->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  gen->add_option("--out", o.common.out, "Write the instance here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", 2, e.what());
    return 2;
  }

  try {
    if (o.common.workers < 1) throw ValidationError("workers must be at least 1");
    Json rep;
    if (est->parsed()) rep = run_estimate(o);
    if (exact->parsed()) rep = run_exact(o);
    if (cap->parsed()) rep = run_capacity(o, false);
    if (bounds->parsed()) rep = run_capacity(o, true);
    if (sub->parsed()) rep = run_subdivide(o);
    if (gen->parsed()) rep = run_gen(o);
    emit(rep, o.common.out);
  } catch (const ValidationError& e) {
    fail("validation", 2, e.what());
    return 2;
  } catch (const std::exception& e) {
    fail("numerical", 3, e.what());
    return 3;
  }
  return 0;
}
