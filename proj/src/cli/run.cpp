#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "lsl/analytic.hpp"
#include "lsl/cli.hpp"
#include "lsl/error.hpp"
#include "lsl/exact.hpp"
#include "lsl/extremal.hpp"
#include "lsl/format.hpp"
#include "lsl/random_mult.hpp"
#include "lsl/sieve_cache.hpp"

namespace lsl::cli {

namespace {

struct Context {
  Config config;
  bool timing = false;
  std::ostream& out;
};

void emit(Context& ctx, std::vector<ExperimentRecord> records, OutputFormat fallback, std::int64_t ms) {
  const auto format = ctx.config.output_format.value_or(fallback);
  if (ctx.timing)
    for (auto& r : records) r.wall_time_ms = ms;
  std::string last_header;
  for (const auto& r : records) {
    if (format == OutputFormat::Json) {
      ctx.out << r.to_json_line() << '\n';
    } else {
      const auto header = r.csv_header();
      if (header != last_header) {
        if (!last_header.empty()) ctx.out << '\n';
        ctx.out << header << '\n';
        last_header = header;
      }
      ctx.out << r.csv_row() << '\n';
    }
  }
}

Json fraction_or_float(const logsum::SumLedger& L, const Rational& exact, double approx) {
  if (L.mode == logsum::Mode::ExactRational) return to_fraction_string(exact);
  return json_number(approx);
}

std::string sign_string(const SignVector& sv) {
  std::string s;
  s.reserve(sv.signs.size());
  for (const auto v : sv.signs) s += v > 0 ? '+' : '-';
  return s;
}

std::filesystem::path cache_path(const Config& config, const MultiplicativeSpec& spec, std::uint64_t limit) {
  std::string name = spec.name();
  for (auto& c : name)
    if (c == ':' || c == '/' || c == '\\') c = '_';
  return config.cache_dir / (name + "-" + std::to_string(limit) + ".lslc");
}

void ensure_cache_dir(const Config& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.cache_dir, ec);
  if (ec) throw ConfigError("cannot create cache_dir " + config.cache_dir.string() + ": " + ec.message());
}

ValueTable cached_table(const Config& config, const MultiplicativeSpec& spec, std::uint64_t limit) {
  if (spec.function_class() == FunctionClass::F) return sieve_values(spec, limit);
  const auto path = cache_path(config, spec, limit);
  if (std::filesystem::exists(path)) return read_sieve_cache(path);
  auto table = sieve_values(spec, limit);
  ensure_cache_dir(config);
  write_sieve_cache(path, table);
  return table;
}

ExperimentRecord ledger_record(const std::string& f, const logsum::SumLedger& L) {
  ExperimentRecord r;
  r.command = "logsum";
  r.parameters = {{"f", f}, {"x", L.x}, {"mode", logsum::to_string(L.mode)}};
  r.outputs["S"] = fraction_or_float(L, L.S_exact, L.S);
  r.outputs["T"] = fraction_or_float(L, L.T_exact, L.T);
  r.outputs["G"] = fraction_or_float(L, L.G_exact, L.G);
  r.outputs["Phi"] = fraction_or_float(L, L.Phi_exact, L.Phi);
  if (L.x >= 3) {
    const auto rep = logsum::decomposition_report(L);
    r.outputs["residual"] = json_number(rep.residual);
    r.outputs["normalized_residual"] = json_number(rep.normalized_residual);
  } else {
    r.outputs["residual"] = nullptr;
    r.outputs["normalized_residual"] = nullptr;
  }
  r.outputs["error_bound"] = json_number(L.float_error_bound);
  r.outputs["identity_holds"] = L.identity_holds();
  return r;
}

Json interval_json(const randmult::Interval& iv) { return Json::array({json_number(iv.lo), json_number(iv.hi)}); }

ExperimentRecord tail_record(const std::string& command, const randmult::TailEstimate& e, Json params) {
  ExperimentRecord r;
  r.command = command;
  r.parameters = std::move(params);
  r.outputs = {{"trials", e.trials}, {"hits", e.hits}, {"estimate", json_number(e.estimate)}, {"wilson_interval", interval_json(e.wilson)}};
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Logarithmic partial sums of multiplicative functions: exact sums, extremal search, "
               "random models and analytic diagnostics.",
               "lsl"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, cache_dir, workers, seed, mode, format;
  bool timing = false;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--cache-dir", cache_dir, "sieve cache directory");
  app.add_option("--workers", workers, "worker threads or 'auto'");
  app.add_option("--seed", seed, "64-bit seed for random experiments");
  app.add_option("--mode", mode, "float mode: exact | compensated");
  app.add_option("--format", format, "output format: csv | json");
  app.add_flag("--timing", timing, "add wall_time_ms to every record");

  std::function<std::vector<ExperimentRecord>(Context&)> action;
  OutputFormat fallback = OutputFormat::Json;
  auto set_action = [&](CLI::App* sub, OutputFormat def, std::function<std::vector<ExperimentRecord>(Context&)> fn) {
    sub->callback([&action, &fallback, def, fn = std::move(fn)] {
      action = fn;
      fallback = def;
    });
  };

  // logsum
  std::string ls_f = "liouville", ls_x;
  bool ls_cache = false;
  auto* ls = app.add_subcommand("logsum", "S, T, G, Phi and the decomposition residual at each x");
  ls->add_option("--f", ls_f, "liouville | one | char:<d> | random:<seed>");
  ls->add_option("--x", ls_x, "comma list of x values (1e6 and 10^6 accepted)")->required();
  ls->add_flag("--cache", ls_cache, "load/store the sieve table in cache_dir");
  set_action(ls, OutputFormat::Csv, [&](Context& ctx) {
    const auto xs = parse_count_list(ls_x);
    if (xs.empty()) throw UsageError("--x needs at least one value");
    const auto xmax = *std::max_element(xs.begin(), xs.end());
    const auto spec = parse_spec(ls_f, xmax);
    logsum::LedgerOptions opts;
    opts.workers = ctx.config.workers();
    std::optional<ValueTable> table;
    if (ls_cache) table = cached_table(ctx.config, spec, xmax);
    std::vector<ExperimentRecord> recs;
    for (const auto x : xs) {
      const auto L = table ? logsum::compute_ledger(*table, x, ctx.config.float_mode, opts)
                           : logsum::compute_ledger(spec, x, ctx.config.float_mode, opts);
      recs.push_back(ledger_record(ls_f, L));
    }
    return recs;
  });

  // extremal
  std::string ex_x, ex_method = "exhaustive";
  auto* ex = app.add_subcommand("extremal", "minimum of S_f(x) over f with f(p) = +-1");
  ex->add_option("--x", ex_x, "x")->required();
  ex->add_option("--method", ex_method, "exhaustive | bb | greedy");
  set_action(ex, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(ex_x);
    const auto method = extremal::parse_method(ex_method);
    extremal::ExtremalResult res;
    switch (method) {
      case extremal::Method::Exhaustive: res = extremal::delta1_exhaustive(x, ctx.config.workers()); break;
      case extremal::Method::BranchBound: res = extremal::delta1_branch_bound(x); break;
      case extremal::Method::Greedy: res = extremal::delta1_greedy(x); break;
    }
    ExperimentRecord r;
    r.command = "extremal";
    r.parameters = {{"x", x}, {"method", extremal::to_string(method)}};
    r.outputs = {{"minimum", to_fraction_string(res.minimum)},
                 {"minimum_float", json_number(res.minimum.get_d())},
                 {"nodes_explored", res.nodes_explored},
                 {"argmin_primes", res.argmin.size()},
                 {"argmin_signs", sign_string(res.argmin)},
                 {"recomputed_match", extremal::logsum_of_signs(res.argmin, x) == res.minimum}};
    return std::vector{r};
  });

  // charscan
  std::string cs_x;
  std::int64_t cs_bound = 100;
  auto* cs = app.add_subcommand("charscan", "minimum of sum chi_d(n)/n over fundamental discriminants");
  cs->add_option("--x", cs_x, "x")->required();
  cs->add_option("--disc-bound", cs_bound, "largest |d| scanned");
  set_action(cs, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(cs_x);
    const auto res = extremal::delta0_character_scan(x, cs_bound, ctx.config.workers());
    ExperimentRecord r;
    r.command = "charscan";
    r.parameters = {{"x", x}, {"disc_bound", cs_bound}};
    r.outputs = {{"minimum", to_fraction_string(res.minimum)},
                 {"minimum_float", json_number(res.minimum.get_d())},
                 {"argmin_discriminant", res.argmin_discriminant},
                 {"discriminants_scanned", res.discriminants_scanned}};
    return std::vector{r};
  });

  // vertex
  std::string vx_x;
  std::uint64_t vx_samples = 1000;
  auto* vx = app.add_subcommand("vertex", "vertex minimum over multiplicative f with values in [-1,1]");
  vx->add_option("--x", vx_x, "x")->required();
  vx->add_option("--samples", vx_samples, "random interior points checked");
  set_action(vx, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(vx_x);
    const auto rep = extremal::delta_vertex_check(x, vx_samples, ctx.config.default_seed);
    ExperimentRecord r;
    r.command = "vertex";
    r.parameters = {{"x", x}, {"samples", vx_samples}, {"seed", ctx.config.default_seed}};
    Json slots = Json::array();
    for (std::size_t i = 0; i < rep.slots.size(); ++i) slots.push_back({rep.slots[i], rep.vertex_argmin[i]});
    r.outputs = {{"vertex_minimum", to_fraction_string(rep.vertex_minimum)},
                 {"vertex_minimum_float", json_number(rep.vertex_minimum.get_d())},
                 {"argmin", slots},
                 {"min_sample_value", json_number(rep.min_sample_value)},
                 {"violations", rep.violations}};
    return std::vector{r};
  });

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo and exact experiments on random multiplicative f");
  mc->require_subcommand(1, 1);
  std::string mc_x;
  std::uint64_t mc_trials = 10000;
  unsigned mc_q = 2;
  double mc_t = 1.0, mc_M = 0.1;
  std::string mc_weight = "unit";
  auto mc_common = [&](CLI::App* s, bool trials) {
    s->add_option("--x", mc_x, "x")->required();
    if (trials) s->add_option("--trials", mc_trials, "number of trials");
  };
  auto* mc_neg = mc->add_subcommand("neg", "P(S_f(x) < 0) by simulation");
  mc_common(mc_neg, true);
  set_action(mc_neg, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(mc_x);
    const auto e = randmult::negativity_probability_mc(x, mc_trials, ctx.config.default_seed, ctx.config.workers());
    return std::vector{tail_record("mc neg", e, {{"x", x}, {"trials", mc_trials}, {"seed", ctx.config.default_seed}})};
  });
  auto* mc_negx = mc->add_subcommand("negexact", "P(S_f(x) < 0) by full enumeration");
  mc_common(mc_negx, false);
  set_action(mc_negx, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(mc_x);
    const auto p = randmult::negativity_probability_exact(x, ctx.config.workers());
    ExperimentRecord r;
    r.command = "mc negexact";
    r.parameters = {{"x", x}};
    r.outputs = {{"probability", to_fraction_string(p)}, {"probability_float", json_number(p.get_d())}};
    return std::vector{r};
  });
  auto* mc_mom = mc->add_subcommand("moment", "E[(sum f(n))^q] empirically and exactly");
  mc_common(mc_mom, true);
  mc_mom->add_option("--q", mc_q, "moment order");
  mc_mom->add_option("--weight", mc_weight, "unit | fracpart");
  set_action(mc_mom, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(mc_x);
    randmult::MomentWeight w;
    if (mc_weight == "unit")
      w = randmult::MomentWeight::Unit;
    else if (mc_weight == "fracpart")
      w = randmult::MomentWeight::FracPart;
    else
      throw UsageError("--weight must be unit or fracpart");
    const auto m = randmult::empirical_moment(x, mc_q, mc_trials, ctx.config.default_seed, ctx.config.workers(), w);
    ExperimentRecord r;
    r.command = "mc moment";
    r.parameters = {{"x", x}, {"q", mc_q}, {"weight", mc_weight}, {"trials", mc_trials}, {"seed", ctx.config.default_seed}};
    r.outputs["exact_value"] = m.exact_value ? Json(*m.exact_value) : Json(nullptr);
    r.outputs["empirical_value"] = json_number(m.empirical_value);
    r.outputs["standard_error"] = json_number(m.standard_error);
    r.outputs["relative_deviation"] = m.relative_deviation ? json_number(*m.relative_deviation) : Json(nullptr);
    return std::vector{r};
  });
  auto* mc_pt = mc->add_subcommand("primetail", "P(sum_{p<=x} f(p) <= -t) against exp(-t^2/(2 pi(x)))");
  mc_common(mc_pt, true);
  mc_pt->add_option("--t", mc_t, "threshold t > 0")->required();
  set_action(mc_pt, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(mc_x);
    const auto p = randmult::prime_sum_tail(x, mc_t, mc_trials, ctx.config.default_seed, ctx.config.workers());
    ExperimentRecord r;
    r.command = "mc primetail";
    r.parameters = {{"x", x}, {"t", json_number(mc_t)}, {"trials", mc_trials}, {"seed", ctx.config.default_seed}};
    r.outputs = {{"hits", p.hits}, {"empirical", json_number(p.empirical)}, {"hoeffding_bound", json_number(p.hoeffding_bound)}};
    return std::vector{r};
  });
  auto* mc_ft = mc->add_subcommand("fractail", "P(|sum f(n){x/n}| >= M x / log x)");
  mc_common(mc_ft, true);
  mc_ft->add_option("--M", mc_M, "M > 0");
  set_action(mc_ft, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(mc_x);
    const auto e = randmult::fracpart_tail_mc(x, mc_M, mc_trials, ctx.config.default_seed, ctx.config.workers());
    return std::vector{tail_record("mc fractail", e,
                                   {{"x", x}, {"M", json_number(mc_M)}, {"trials", mc_trials}, {"seed", ctx.config.default_seed}})};
  });

  // bounds
  auto* bd = app.add_subcommand("bounds", "analytic bounds and diagnostics");
  bd->require_subcommand(1, 1);
  std::string b_f = "one", b_x;
  double b_tmax = -1, b_u = 0, b_y = 0, b_C = 4, b_A = 4, b_M = 0.1, b_delta = 0.5, b_v = 5, b_eps = 0.1, b_lambda = 0.5,
         b_w = 0, b_z = 0, b_step = bounds::kDickmanStep;
  std::uint64_t b_steps = bounds::kDefaultHalaszSteps, b_cutoff = 0, b_plo = 2, b_phi = 100;
  unsigned b_q = 2, b_k = 2;
  std::string b_primes, b_weight = "1-f", b_zs, b_ys;
  std::optional<double> b_uopt, b_vopt;

  auto* b_hal = bd->add_subcommand("halasz", "Halasz quantity M(x) from a truncated Euler product");
  b_hal->add_option("--f", b_f, "multiplicative function");
  b_hal->add_option("--x", b_x, "x")->required();
  b_hal->add_option("--t-max", b_tmax, "grid half-width (default log x)");
  b_hal->add_option("--steps", b_steps, "grid points");
  b_hal->add_option("--cutoff", b_cutoff, "Euler product cutoff (default max(x, 10^6))");
  set_action(b_hal, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(b_x);
    bounds::HalaszOptions o;
    if (b_tmax >= 0) o.t_max = b_tmax;
    o.steps = b_steps;
    if (b_cutoff) o.euler_cutoff = b_cutoff;
    o.workers = ctx.config.workers();
    const auto spec = parse_spec(b_f, o.euler_cutoff.value_or(std::max<std::uint64_t>(x, bounds::kDefaultEulerCutoff)));
    const auto h = bounds::halasz_M(spec, x, o);
    ExperimentRecord r;
    r.command = "bounds halasz";
    r.parameters = {{"f", b_f}, {"x", x}, {"t_max", json_number(h.t_max)}, {"steps", h.steps}, {"euler_cutoff", h.euler_cutoff}};
    r.outputs = {{"sigma", json_number(h.sigma)},           {"argmax_t", json_number(h.argmax_t)},
                 {"max_ratio", json_number(h.max_ratio)},   {"M", json_number(h.M)},
                 {"tail_log_bound", json_number(h.tail_log_bound)}, {"refined", h.refined},
                 {"coarse_grid_warning", h.coarse_grid_warning}};
    return std::vector{r};
  });

  auto* b_ht = bd->add_subcommand("ht", "Hall-Tenenbaum bound against |T_f(x)|");
  b_ht->add_option("--f", b_f, "multiplicative function");
  b_ht->add_option("--x", b_x, "x")->required();
  set_action(b_ht, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(b_x);
    const auto spec = parse_spec(b_f, x);
    const double bound = bounds::hall_tenenbaum_bound(spec, x);
    logsum::LedgerOptions lo;
    lo.workers = ctx.config.workers();
    const auto L = logsum::compute_ledger(spec, x, logsum::Mode::CompensatedFloat, lo);
    ExperimentRecord r;
    r.command = "bounds ht";
    r.parameters = {{"f", b_f}, {"x", x}, {"kappa", bounds::kHallTenenbaumKappa}};
    r.outputs = {{"bound", json_number(bound)},
                 {"mertens_1_minus_f", json_number(bounds::mertens_weighted_sum(spec, x, bounds::PrimeWeight::OneMinusF))},
                 {"abs_T", json_number(std::abs(L.T))},
                 {"ratio", json_number(std::abs(L.T) / bound)}};
    return std::vector{r};
  });

  auto* b_mer = bd->add_subcommand("mertens", "sum_{p<=x} w(p)/p");
  b_mer->add_option("--f", b_f, "multiplicative function");
  b_mer->add_option("--x", b_x, "x")->required();
  b_mer->add_option("--weight", b_weight, "1-f | 1+f | f | 1");
  set_action(b_mer, OutputFormat::Json, [&](Context&) {
    const auto x = parse_count(b_x);
    const auto w = bounds::parse_prime_weight(b_weight);
    ExperimentRecord r;
    r.command = "bounds mertens";
    r.parameters = {{"f", b_f}, {"x", x}, {"weight", bounds::to_string(w)}};
    r.outputs = {{"sum", json_number(bounds::mertens_weighted_sum(parse_spec(b_f, x), x, w))}};
    return std::vector{r};
  });

  auto* b_sm = bd->add_subcommand("smooth", "Psi(x, y) with Dickman rho and the CEP envelope");
  b_sm->add_option("--x", b_x, "x")->required();
  b_sm->add_option("--y", b_ys, "smoothness bound y")->required();
  set_action(b_sm, OutputFormat::Json, [&](Context&) {
    const auto x = parse_count(b_x), y = parse_count(b_ys);
    const auto s = bounds::psi_smooth(x, y);
    ExperimentRecord r;
    r.command = "bounds smooth";
    r.parameters = {{"x", x}, {"y", y}};
    r.outputs = {{"psi", s.psi},
                 {"u", json_number(s.u)},
                 {"rho_u", json_number(s.rho_u)},
                 {"density", json_number(static_cast<double>(s.psi) / static_cast<double>(x))},
                 {"cep_envelope", json_number(s.cep_envelope)},
                 {"cep_valid", s.cep_valid},
                 {"memo_entries", s.memo_entries}};
    return std::vector{r};
  });

  auto* b_rho = bd->add_subcommand("rho", "Dickman rho(u)");
  b_rho->add_option("--u", b_u, "u")->required();
  b_rho->add_option("--step", b_step, "integration step");
  set_action(b_rho, OutputFormat::Json, [&](Context&) {
    ExperimentRecord r;
    r.command = "bounds rho";
    r.parameters = {{"u", json_number(b_u)}, {"step", json_number(b_step)}};
    r.outputs = {{"rho", json_number(bounds::dickman_rho(b_u, b_step))}};
    return std::vector{r};
  });

  auto* b_cep = bd->add_subcommand("cep", "w u^-u with u = log w / log z");
  b_cep->add_option("--w", b_w, "w")->required();
  b_cep->add_option("--z", b_z, "z")->required();
  set_action(b_cep, OutputFormat::Json, [&](Context&) {
    const auto e = bounds::cep_envelope(b_w, b_z);
    ExperimentRecord r;
    r.command = "bounds cep";
    r.parameters = {{"w", json_number(b_w)}, {"z", json_number(b_z)}};
    r.outputs = {{"u", json_number(e.u)}, {"envelope", json_number(e.envelope)}, {"valid", e.valid}};
    return std::vector{r};
  });

  auto* b_eu = bd->add_subcommand("euler", "prod_p ((1 + p^(delta-1))^q + (1 - p^(delta-1))^q) / 2");
  b_eu->add_option("--q", b_q, "moment order (even)");
  b_eu->add_option("--delta", b_delta, "delta");
  b_eu->add_option("--p-lo", b_plo, "smallest prime");
  b_eu->add_option("--p-hi", b_phi, "largest prime");
  set_action(b_eu, OutputFormat::Json, [&](Context&) {
    const auto v = bounds::euler_moment_product(b_q, b_delta, b_plo, b_phi);
    ExperimentRecord r;
    r.command = "bounds euler";
    r.parameters = {{"q", b_q}, {"delta", json_number(b_delta)}, {"p_lo", b_plo}, {"p_hi", b_phi}};
    r.outputs = {{"log_value", json_number(v.log_value)}, {"value", json_number(v.value)}};
    return std::vector{r};
  });

  auto* b_mo = bd->add_subcommand("moment", "two-term moment bound in log space");
  b_mo->add_option("--x", b_x, "x")->required();
  b_mo->add_option("--y", b_y, "y (default (log x)^4, clamped to x)");
  b_mo->add_option("--q", b_q, "moment order (even)");
  b_mo->add_option("--C", b_C);
  set_action(b_mo, OutputFormat::Json, [&](Context&) {
    const double x = static_cast<double>(parse_count(b_x));
    double y = b_y > 0 ? b_y : std::min(x, std::pow(std::log(x), 4.0));
    const auto m = bounds::moment_bound_rhs({x, y, b_q, b_C});
    ExperimentRecord r;
    r.command = "bounds moment";
    r.parameters = {{"x", json_number(x)}, {"y", json_number(y)}, {"q", b_q}, {"C", json_number(b_C)}};
    r.outputs = {{"delta", json_number(m.delta)},       {"epsilon", json_number(m.epsilon)},
                 {"log_term1", json_number(m.log_term1)}, {"log_term2", json_number(m.log_term2)},
                 {"log_value", json_number(m.total.log_value)}, {"value", json_number(m.total.value)}};
    return std::vector{r};
  });

  auto* b_mk = bd->add_subcommand("markov", "moment bound divided by (M x / log x)^q");
  b_mk->add_option("--x", b_x, "x")->required();
  b_mk->add_option("--M", b_M);
  b_mk->add_option("--A", b_A);
  b_mk->add_option("--C", b_C);
  set_action(b_mk, OutputFormat::Json, [&](Context&) {
    const double x = static_cast<double>(parse_count(b_x));
    const auto m = bounds::markov_tail_bound(x, b_M, b_A, b_C);
    ExperimentRecord r;
    r.command = "bounds markov";
    r.parameters = {{"x", json_number(x)}, {"M", json_number(b_M)}, {"A", json_number(b_A)}, {"C", json_number(b_C)}};
    r.outputs = {{"y", json_number(m.y)},         {"y_clamped", m.y_clamped},
                 {"q_raw", json_number(m.q_raw)}, {"q", m.q},
                 {"log_rhs", json_number(m.rhs.total.log_value)}, {"log_bound", json_number(m.log_bound)},
                 {"bound", json_number(m.bound)},  {"trivial_bound", 1}};
    return std::vector{r};
  });

  auto* b_pp = bd->add_subcommand("primeproducts", "ordered k-tuples of primes with product in [x/2, x]");
  b_pp->add_option("--primes", b_primes, "comma list of primes")->required();
  b_pp->add_option("--k", b_k, "number of primes");
  b_pp->add_option("--x", b_x, "x")->required();
  b_pp->add_option("--lambda", b_lambda, "lambda in (0,1)");
  b_pp->add_option("--u", b_uopt, "primes at most x^(1/u)");
  b_pp->add_option("--v", b_vopt, "primes above x^(1/v); enables the ratio");
  set_action(b_pp, OutputFormat::Json, [&](Context&) {
    bounds::PrimeProductQuery q;
    q.primes = parse_count_list(b_primes);
    q.k = b_k;
    q.x = parse_count(b_x);
    q.lambda_param = b_lambda;
    q.u = b_uopt;
    q.v = b_vopt;
    const auto c = bounds::count_prime_products(q);
    ExperimentRecord r;
    r.command = "bounds primeproducts";
    r.parameters = {{"primes", q.primes}, {"k", q.k}, {"x", q.x}, {"lambda", json_number(q.lambda_param)}};
    r.parameters["u"] = q.u ? json_number(*q.u) : Json(nullptr);
    r.parameters["v"] = q.v ? json_number(*q.v) : Json(nullptr);
    r.outputs = {{"count", c.count}, {"nodes", c.nodes}};
    r.outputs["ratio"] = c.ratio ? json_number(*c.ratio) : Json(nullptr);
    return std::vector{r};
  });

  auto* b_l32 = bd->add_subcommand("lemma32", "smooth-restricted sum of g(n)/n against exp(sum g(p)/p)");
  b_l32->add_option("--f", b_f, "multiplicative function");
  b_l32->add_option("--x", b_x, "x")->required();
  b_l32->add_option("--z", b_zs, "z")->required();
  set_action(b_l32, OutputFormat::Json, [&](Context&) {
    const auto x = parse_count(b_x), z = parse_count(b_zs);
    const auto d = bounds::lemma32_diagnostic(parse_spec(b_f, x), x, z);
    ExperimentRecord r;
    r.command = "bounds lemma32";
    r.parameters = {{"f", b_f}, {"x", x}, {"z", z}};
    r.outputs = {{"lhs", json_number(d.lhs)}, {"rhs_core", json_number(d.rhs_core)}, {"ratio", json_number(d.ratio)}, {"u", json_number(d.u)}};
    return std::vector{r};
  });

  auto* b_p33 = bd->add_subcommand("prop33", "prime-set hypothesis and sum g(n) against its skeleton bound");
  b_p33->add_option("--f", b_f, "multiplicative function");
  b_p33->add_option("--x", b_x, "x")->required();
  b_p33->add_option("--delta", b_delta, "delta");
  b_p33->add_option("--v", b_v, "primes in [x^(1/v), x]");
  b_p33->add_option("--epsilon", b_eps, "epsilon > 0");
  set_action(b_p33, OutputFormat::Json, [&](Context&) {
    const auto x = parse_count(b_x);
    const auto d = bounds::prop33_diagnostic(parse_spec(b_f, x), x, b_delta, b_v, b_eps);
    ExperimentRecord r;
    r.command = "bounds prop33";
    r.parameters = {{"f", b_f}, {"x", x}, {"delta", json_number(b_delta)}, {"v", json_number(b_v)}, {"epsilon", json_number(b_eps)}};
    r.outputs = {{"primes_in_set", d.primes_in_set},
                 {"hypothesis_sum", json_number(d.hypothesis_sum)},
                 {"hypothesis_holds", d.hypothesis_holds},
                 {"in_proven_range", d.in_proven_range},
                 {"lhs", json_number(d.lhs)},
                 {"rhs_skeleton", json_number(d.rhs_skeleton)},
                 {"ratio", json_number(d.ratio)}};
    return std::vector{r};
  });

  // cache
  auto* ca = app.add_subcommand("cache", "binary sieve caches");
  ca->require_subcommand(1, 1);
  std::string ca_f = "liouville", ca_limit, ca_file;
  auto* ca_w = ca->add_subcommand("write", "sieve and store");
  ca_w->add_option("--f", ca_f, "function to sieve");
  ca_w->add_option("--limit", ca_limit, "sieve f(n) for n <= limit")->required();
  set_action(ca_w, OutputFormat::Json, [&](Context& ctx) {
    const auto limit = parse_count(ca_limit);
    const auto spec = parse_spec(ca_f, limit);
    const auto table = sieve_values(spec, limit);
    ensure_cache_dir(ctx.config);
    const auto path = cache_path(ctx.config, spec, limit);
    write_sieve_cache(path, table);
    ExperimentRecord r;
    r.command = "cache write";
    r.parameters = {{"f", ca_f}, {"limit", limit}};
    r.outputs = {{"path", path.string()}, {"bytes", std::filesystem::file_size(path)}};
    return std::vector{r};
  });
  auto* ca_v = ca->add_subcommand("verify", "write, reload and compare against a fresh sieve");
  ca_v->add_option("--f", ca_f, "function to sieve");
  ca_v->add_option("--limit", ca_limit, "sieve f(n) for n <= limit")->required();
  set_action(ca_v, OutputFormat::Json, [&](Context& ctx) {
    const auto limit = parse_count(ca_limit);
    const auto spec = parse_spec(ca_f, limit);
    const auto table = sieve_values(spec, limit);
    ensure_cache_dir(ctx.config);
    const auto path = cache_path(ctx.config, spec, limit);
    write_sieve_cache(path, table);
    const auto back = read_sieve_cache(path);
    const auto fresh = sieve_values(spec, limit);
    ExperimentRecord r;
    r.command = "cache verify";
    r.parameters = {{"f", ca_f}, {"limit", limit}};
    r.outputs = {{"path", path.string()}, {"identical", back.codes == fresh.codes && back.limit == fresh.limit && back.cls == fresh.cls}};
    return std::vector{r};
  });
  auto* ca_i = ca->add_subcommand("info", "validate a cache file and report its header");
  ca_i->add_option("--file", ca_file, "cache file to read")->required();
  set_action(ca_i, OutputFormat::Json, [&](Context&) {
    const auto t = read_sieve_cache(ca_file);
    std::int64_t sum = 0;
    for (std::uint64_t n = 1; n <= t.limit; ++n) sum += t.codes[n];
    ExperimentRecord r;
    r.command = "cache info";
    r.parameters = {{"file", ca_file}};
    r.outputs = {{"limit", t.limit}, {"class", std::string(to_string(t.cls))}, {"value_sum", sum}};
    return std::vector{r};
  });

  // sweep
  std::string sw_f = "liouville", sw_x, sw_svg;
  bool sw_scan = false;
  auto* sw = app.add_subcommand("sweep", "S_f(x) over lists of functions and x values, with an SVG chart");
  sw->add_option("--f", sw_f, "comma list; chars:<D> expands to all characters with |d| <= D");
  sw->add_option("--x", sw_x, "comma list of x values")->required();
  sw->add_option("--svg", sw_svg, "write the chart to this path");
  sw->add_flag("--scan", sw_scan, "also certify S(y) > 0 for every y <= x");
  set_action(sw, OutputFormat::Csv, [&](Context& ctx) {
    const auto specs = expand_spec_list(sw_f);
    const auto xs = parse_count_list(sw_x);
    if (specs.empty()) throw UsageError("sweep needs at least one function");
    if (xs.empty()) throw UsageError("sweep needs at least one x");
    const auto xmax = *std::max_element(xs.begin(), xs.end());
    std::vector<ExperimentRecord> recs;
    std::vector<Series> series;
    std::uint64_t failures = 0;
    std::optional<Rational> min_exact;
    std::optional<double> min_float;
    std::string argmin_f;
    std::uint64_t argmin_x = 0;
    logsum::LedgerOptions lo;
    lo.workers = ctx.config.workers();
    for (const auto& name : specs) {
      Series s{name, {}};
      for (const auto x : xs) {
        ExperimentRecord r;
        r.command = "sweep";
        r.parameters = {{"f", name}, {"x", x}, {"mode", logsum::to_string(ctx.config.float_mode)}};
        r.outputs = {{"S", nullptr}, {"S_float", nullptr}, {"positive", nullptr}, {"error_bound", nullptr},
                     {"positive_all", nullptr}, {"error", ""}};
        try {
          const auto spec = parse_spec(name, xmax);
          const auto L = logsum::compute_ledger(spec, x, ctx.config.float_mode, lo);
          const bool exact = L.mode == logsum::Mode::ExactRational;
          r.outputs["S"] = exact ? Json(to_fraction_string(L.S_exact)) : json_number(L.S);
          r.outputs["S_float"] = json_number(L.S);
          r.outputs["positive"] = exact ? L.S_exact > 0 : L.S - L.S_error > 0;
          r.outputs["error_bound"] = json_number(L.S_error);
          if (sw_scan) {
            logsum::ScanOptions so;
            so.workers = ctx.config.workers();
            r.outputs["positive_all"] = logsum::positivity_scan(spec, x, so).certified;
          }
          s.points.push_back({static_cast<double>(x), L.S});
          const bool better = exact ? (!min_exact || L.S_exact < *min_exact) : (!min_float || L.S < *min_float);
          if (better) {
            if (exact) min_exact = L.S_exact;
            min_float = L.S;
            argmin_f = name;
            argmin_x = x;
          }
        } catch (const Error& e) {
          ++failures;
          r.outputs["error"] = e.what();
        }
        recs.push_back(std::move(r));
      }
      series.push_back(std::move(s));
    }
    ExperimentRecord summary;
    summary.command = "sweep summary";
    summary.parameters = {{"functions", specs.size()}, {"x_values", xs.size()}};
    summary.outputs = {{"rows", recs.size()}, {"failures", failures}};
    summary.outputs["minimum"] = min_exact ? Json(to_fraction_string(*min_exact)) : (min_float ? json_number(*min_float) : Json(nullptr));
    summary.outputs["argmin_f"] = argmin_f;
    summary.outputs["argmin_x"] = argmin_x;
    if (!sw_svg.empty()) {
      std::ofstream svg(sw_svg);
      if (!svg) throw ConfigError("cannot write " + sw_svg);
      svg << render_svg(series, "S_f(x) = sum_{n<=x} f(n)/n");
      summary.outputs["svg"] = sw_svg;
    }
    recs.push_back(std::move(summary));
    return recs;
  });

  // scan
  std::string sc_f = "liouville", sc_x;
  std::uint64_t sc_segment = std::uint64_t(1) << 20;
  auto* sc = app.add_subcommand("scan", "certify S_f(y) > 0 for all y <= x (long-run mode)");
  sc->add_option("--f", sc_f, "function to scan");
  sc->add_option("--x", sc_x, "scan every y <= x")->required();
  sc->add_option("--segment", sc_segment, "segment length");
  set_action(sc, OutputFormat::Json, [&](Context& ctx) {
    const auto x = parse_count(sc_x);
    logsum::ScanOptions so;
    so.segment_size = sc_segment;
    so.workers = ctx.config.workers();
    const auto s = logsum::positivity_scan(parse_spec(sc_f, x), x, so);
    ExperimentRecord r;
    r.command = "scan";
    r.parameters = {{"f", sc_f}, {"x", x}};
    r.outputs = {{"certified", s.certified},
                 {"min_value", json_number(s.min_value)},
                 {"argmin_x", s.argmin_x},
                 {"error_bound", json_number(s.error_bound)},
                 {"certified_margin", json_number(s.certified_margin)},
                 {"final_value", json_number(s.final_value)},
                 {"segments", s.segments}};
    r.outputs["first_nonpositive"] = s.first_nonpositive ? Json(*s.first_nonpositive) : Json(nullptr);
    return std::vector{r};
  });

  const std::string grammar = app.help("", CLI::AppFormatMode::All);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << grammar;
    return 0;
  } catch (const CLI::ParseError& e) {
    // a subcommand's --help surfaces as CallForHelp from that subcommand
    if (e.get_exit_code() == 0) {
      const CLI::App* sub = &app;
      while (!sub->get_subcommands().empty()) sub = sub->get_subcommands().front();
      out << sub->help();
      return 0;
    }
    std::string message = e.what();
    // CLI11 reports a stray first word as a missing subcommand; name it
    static const std::vector<std::string> valued = {"--config", "--cache-dir", "--workers", "--seed", "--mode", "--format"};
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].rfind("-", 0) == 0) {
        if (std::find(valued.begin(), valued.end(), args[i]) != valued.end()) ++i;
        continue;
      }
      bool known = false;
      for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args[i];
      if (!known) message = "unknown subcommand '" + args[i] + "'";
      break;
    }
    err << "error: " << message << "\n\n" << grammar;
    return 2;
  }

  try {
    Context ctx{Config{}, timing, out};
    if (!config_path.empty()) apply_config_file(ctx.config, config_path);
    if (!cache_dir.empty()) apply_setting(ctx.config, "cache_dir", cache_dir);
    if (!workers.empty()) apply_setting(ctx.config, "workers", workers);
    if (!seed.empty()) apply_setting(ctx.config, "seed", seed);
    if (!mode.empty()) apply_setting(ctx.config, "float_mode", mode);
    if (!format.empty()) apply_setting(ctx.config, "output_format", format);
    apply_environment(ctx.config);
    if (!action) throw UsageError("no subcommand");
    const auto t0 = std::chrono::steady_clock::now();
    auto records = action(ctx);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    emit(ctx, std::move(records), fallback, ms);
    return 0;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return 3;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << grammar;
    return 2;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const ModeError& e) {
    err << "mode error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lsl::cli
