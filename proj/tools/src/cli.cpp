#include "cccp_tools/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "cccp/bounds_analysis.hpp"
#include "cccp/exact_hitting.hpp"
#include "cccp/marginal_dynamics.hpp"
#include "cccp/params.hpp"
#include "cccp/random.hpp"
#include "cccp/simulator.hpp"

namespace cccp::cli {

using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- number formatting and parsing (locale-free) --------------------------

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string fmt(std::uint64_t x) { return std::to_string(x); }

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

const CLI::Validator kReal(
    [](std::string& s) -> std::string {
      return parse_real(s) ? std::string{} : "expected a finite real number, got '" + s + "'";
    },
    "REAL");

const CLI::Validator kProbability(
    [](std::string& s) -> std::string {
      const auto v = parse_real(s);
      return v && *v >= 0.0 && *v <= 1.0 ? std::string{} : "expected a probability in [0, 1], got '" + s + "'";
    },
    "PROB");

CLI::Option* add_real(CLI::App* app, const std::string& name, double& dest, const std::string& desc,
                      const CLI::Validator& check = kReal) {
  return app
      ->add_option_function<std::string>(
          name, [&dest](const std::string& s) { dest = *parse_real(s); }, desc)
      ->check(check);
}

// start:stop:step, endpoints included within 1e-12.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    const auto v = parse_real(item);
    if (!v) throw UsageError("bad grid component '" + item + "' in '" + text + "'");
    parts.push_back(*v);
  }
  if (parts.size() != 3) throw UsageError("grid must be start:stop:step, got '" + text + "'");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0)) throw UsageError("grid step must be positive");
  if (start > stop + 1e-12) throw UsageError("empty grid '" + text + "'");
  constexpr double kTol = 1e-12;
  std::vector<double> out;
  for (std::uint64_t i = 0;; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (v > stop + kTol) break;
    if (std::abs(v - stop) <= kTol) v = stop;
    out.push_back(v);
    if (out.size() > 10'000'000) throw UsageError("grid too large");
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_real(item);
    if (!v) throw UsageError("bad list entry '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("empty p list");
  return out;
}

// ---- manifests and sinks --------------------------------------------------

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::string command;
  std::vector<std::string> args;  // canonical argument list; replays the run
  ordered_json params = ordered_json::object();
  std::optional<std::uint64_t> seed;

  ordered_json to_json() const {
    ordered_json j;
    j["tool"] = "cccp";
    j["version"] = CCCP_VERSION_STRING;
    j["prng"] = kPrngName;
    j["command"] = command;
    j["params"] = params;
    if (seed) j["seed"] = *seed;
    j["args"] = args;
    j["timestamp"] = utc_timestamp();
    return j;
  }
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << body;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

// Writes `body` to `path` (or `out` when path is empty). A file output gets
// its manifest alongside as <path>.manifest.json.
void emit(const std::string& path, const std::string& body, const Manifest& manifest, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  write_file(path, body);
  write_file(path + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json real_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json log_json(LogValue v, const char* tag) {
  ordered_json j;
  j["log10"] = real_or_null(v.log10());
  j["linear"] = v.representable() ? ordered_json(v.linear()) : ordered_json(nullptr);
  j["infinite"] = v.is_infinite();
  j["tag"] = tag;
  return j;
}

// ---- shared option sets ---------------------------------------------------

struct Common {
  std::uint32_t n = 0;
  double p = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 0;
};

void add_instance(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "Number of coupon types")->required()->check(CLI::PositiveNumber);
  add_real(app, "--p", c.p, "Per-round loss probability", kProbability)->required();
}

void add_seed(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, std::string("Master seed (default: $") + kSeedEnvVar + " or " +
                                        std::to_string(kFallbackSeed) + ")");
  app->add_option("--threads", c.threads, "Worker threads, 0 = all cores (results do not depend on it)");
}

std::uint64_t resolve_seed(const Common& c, const Environment& env) {
  if (c.seed) return *c.seed;
  if (env.seed) {
    const auto v = parse_u64(*env.seed);
    if (!v) throw UsageError(std::string(kSeedEnvVar) + " is not an unsigned integer: '" + *env.seed + "'");
    return *v;
  }
  return kFallbackSeed;
}

std::vector<std::string> instance_args(const std::string& command, const Common& c) {
  return {command, "--n", std::to_string(c.n), "--p", fmt(c.p)};
}

// ---- exact ----------------------------------------------------------------

struct ExactOpts {
  Common c;
  bool full_vector = false;
  bool oracle = false;
  bool csv = false;
};

int cmd_exact(const ExactOpts& o, std::ostream& out, std::ostream& err) {
  const Params params(o.c.n, o.c.p);
  Manifest m{"exact", instance_args("exact", o.c), {}, std::nullopt};
  m.params = {{"n", o.c.n}, {"p", o.c.p}, {"full_vector", o.full_vector}, {"oracle", o.oracle}};
  if (o.full_vector) m.args.push_back("--full-vector");
  if (o.oracle) m.args.push_back("--oracle");
  m.args.push_back(o.csv ? "--csv" : "--json");

  const auto sol = solve_hitting_times(params);
  std::optional<HittingSolution> ref;
  double diff = 0.0;
  if (o.oracle) {
    ref = dense_oracle_solve(params);
    diff = max_relative_difference(sol.h, ref->h);
  }
  if (sol.overflow) err << "note: h exceeds the double range; `cccp bounds` gives log-scale estimates\n";

  std::string body;
  if (o.csv) {
    std::ostringstream s;
    if (o.full_vector) {
      s << "k,h" << (ref ? ",oracle_h" : "") << "\n";
      for (std::size_t k = 0; k < sol.h.size(); ++k) {
        s << k << "," << fmt(sol.h[k]);
        if (ref) s << "," << fmt(ref->h[k]);
        s << "\n";
      }
    } else {
      s << "n,p,h0,residual_inf,overflow" << (ref ? ",oracle_h0,oracle_max_rel_diff" : "") << "\n";
      s << o.c.n << "," << fmt(o.c.p) << "," << fmt(sol.h0()) << "," << fmt(sol.residual_inf) << ","
        << (sol.overflow ? 1 : 0);
      if (ref) s << "," << fmt(ref->h0()) << "," << fmt(diff);
      s << "\n";
    }
    body = s.str();
  } else {
    ordered_json j;
    j["n"] = o.c.n;
    j["p"] = o.c.p;
    j["method"] = to_string(sol.method);
    j["h0"] = real_or_null(sol.h0());
    j["residual_inf"] = real_or_null(sol.residual_inf);
    j["overflow"] = sol.overflow;
    if (o.full_vector) {
      ordered_json h = ordered_json::array();
      for (const double x : sol.h) h.push_back(real_or_null(x));
      j["h"] = h;
    }
    if (ref) {
      j["oracle"] = {{"method", to_string(ref->method)},
                     {"h0", real_or_null(ref->h0())},
                     {"residual_inf", real_or_null(ref->residual_inf)},
                     {"max_rel_diff", real_or_null(diff)}};
    }
    j["manifest"] = m.to_json();
    body = dump(j);
  }
  emit(o.c.out, body, m, out);
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOpts {
  Common c;
  std::uint64_t runs = 1000;
  std::uint64_t max_steps = kDefaultMaxSteps;
};

int cmd_simulate(const SimulateOpts& o, const Environment& env, std::ostream& out, std::ostream& err) {
  const Params params(o.c.n, o.c.p);
  const std::uint64_t seed = resolve_seed(o.c, env);
  Manifest m{"simulate", instance_args("simulate", o.c), {}, seed};
  for (const auto& a : {std::string("--runs"), fmt(o.runs), std::string("--max-steps"), fmt(o.max_steps),
                        std::string("--seed"), fmt(seed)})
    m.args.push_back(a);
  m.params = {{"n", o.c.n}, {"p", o.c.p}, {"runs", o.runs}, {"max_steps", o.max_steps}};

  const auto sum = batch_hitting_stats(params, o.runs, seed, o.max_steps, o.c.threads);
  std::ostringstream csv;
  csv << "replication,seed,hitting_time,censored\n";
  for (const auto& r : sum.outcomes) {
    csv << r.replication << "," << r.stream_seed() << ",";
    if (r.hitting_time) csv << *r.hitting_time;
    csv << "," << (r.censored() ? 1 : 0) << "\n";
  }

  ordered_json j;
  j["n"] = o.c.n;
  j["p"] = o.c.p;
  j["runs"] = o.runs;
  j["mean"] = sum.mean ? ordered_json(*sum.mean) : ordered_json(nullptr);
  j["mean_defined"] = sum.mean_defined();
  j["variance"] = sum.variance;
  j["stderr"] = sum.stderr;
  j["censored"] = sum.censored;
  j["manifest"] = m.to_json();

  emit(o.c.out, csv.str(), m, out);
  (o.c.out.empty() ? err : out) << dump(j);
  return kOk;
}

// ---- trajectory -----------------------------------------------------------

struct TrajectoryOpts {
  Common c;
  std::uint64_t horizon = 1000;
  std::uint64_t runs = 100;
  bool full = false;
};

int cmd_trajectory(const TrajectoryOpts& o, const Environment& env, std::ostream& out, std::ostream& err) {
  const Params params(o.c.n, o.c.p);
  const std::uint64_t seed = resolve_seed(o.c, env);
  Manifest m{"trajectory", instance_args("trajectory", o.c), {}, seed};
  for (const auto& a : {std::string("--horizon"), fmt(o.horizon), std::string("--runs"), fmt(o.runs),
                        std::string("--seed"), fmt(seed)})
    m.args.push_back(a);
  if (o.full) m.args.push_back("--full");
  m.params = {{"n", o.c.n}, {"p", o.c.p}, {"horizon", o.horizon}, {"runs", o.runs}, {"full", o.full}};

  const auto pts = batch_trajectory_stats(params, o.runs, seed, o.horizon, o.c.threads,
                                          o.full ? ChainKind::Full : ChainKind::Reduced);
  std::ostringstream csv;
  csv << "t,mean_fraction,stderr,theory\n";
  for (std::uint64_t t = 0; t <= o.horizon; ++t) {
    csv << t << "," << fmt(pts[t].mean_fraction) << "," << fmt(pts[t].stderr) << "," << fmt(q_at(params, t))
        << "\n";
  }

  const double q_star = marginal_coeffs(params).q_star;
  ordered_json j;
  j["n"] = o.c.n;
  j["p"] = o.c.p;
  j["q_star"] = q_star;
  if (q_star > 0.0) {
    const std::uint64_t t_mix = marginal_mixing_time(params, default_epsilon(params));
    j["t_mix"] = t_mix;
    j["epsilon"] = default_epsilon(params);
    if (t_mix <= o.horizon) {
      double acc = 0.0;
      for (std::uint64_t t = t_mix; t <= o.horizon; ++t) acc += pts[t].mean_fraction;
      j["plateau_mean"] = acc / static_cast<double>(o.horizon - t_mix + 1);
    }
  }
  j["manifest"] = m.to_json();

  emit(o.c.out, csv.str(), m, out);
  (o.c.out.empty() ? err : out) << dump(j);
  return kOk;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsOpts {
  Common c;
  std::optional<double> epsilon;
  double delta = 0.2;
  std::uint64_t window = 10'000;
  std::string variant;  // empty = choose from the q* regime
};

MetastabilityVariant pick_variant(const Params& params, const std::string& requested) {
  if (requested == "small_p") return MetastabilityVariant::SmallP;
  if (requested == "large_p") return MetastabilityVariant::LargeP;
  return classify_qstar_regime(params).label == QStarRegime::Vanishing ? MetastabilityVariant::LargeP
                                                                       : MetastabilityVariant::SmallP;
}

int cmd_bounds(const BoundsOpts& o, std::ostream& out) {
  const Params params(o.c.n, o.c.p);
  if (params.n() < 2) throw DomainError("bounds need n >= 2");
  const auto model = marginal_coeffs(params);
  const double eps = o.epsilon ? *o.epsilon : (model.q_star > 0.0 ? default_epsilon(params) : 0.1);
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  if (o.window == 0) throw UsageError("--window must be positive");
  const auto variant = pick_variant(params, o.variant);

  Manifest m{"bounds", instance_args("bounds", o.c), {}, std::nullopt};
  for (const auto& a : {std::string("--epsilon"), fmt(eps), std::string("--delta"), fmt(o.delta),
                        std::string("--window"), fmt(o.window), std::string("--variant"),
                        std::string(to_string(variant))})
    m.args.push_back(a);
  m.params = {{"n", o.c.n},         {"p", o.c.p},           {"epsilon", eps},
              {"delta", o.delta},   {"window", o.window},   {"variant", to_string(variant)}};

  ordered_json j;
  j["n"] = o.c.n;
  j["p"] = o.c.p;
  j["epsilon"] = eps;
  j["q_star"] = model.q_star;
  j["a"] = model.a;
  j["b"] = model.b;
  j["t_mix"] = model.q_star > 0.0 ? marginal_mixing_time(params, eps) : 0;

  const auto regime = hitting_regime(params);
  j["regime"] = {{"label", to_string(regime.label)},
                 {"log10_scale", real_or_null(regime.log10_scale())},
                 {"c", regime.c},
                 {"boundary", regime.boundary},
                 {"tag", "heuristic"}};

  if (eps < model.q_star) {
    const auto mf = mean_field_interval(params, eps);
    j["mf_lower"] = log_json(mf.lower, "heuristic");
    j["mf_lower"]["clamped"] = mf.lower_clamped;
    j["mf_upper"] = log_json(mf.upper, "heuristic");
  } else {
    j["mf_lower"] = nullptr;
    j["mf_upper"] = nullptr;
    j["mf_note"] = "mean-field interval needs epsilon < q_star";
  }

  j["rigorous_lower"] = log_json(unconditional_lower_bound(params), "rigorous");
  j["rigorous_upper"] = log_json(unconditional_upper_bound(params, eps), "rigorous");
  const auto esc = escape_rate(params, eps);
  j["rho"] = log_json(esc.rho, "rigorous");
  j["rho"]["block_len"] = esc.block_len;
  j["rho"]["good_threshold"] = esc.good_threshold;

  const auto mb = metastability_deviation_bound(params, o.delta, o.window, variant);
  j["metastability_bound"] = log_json(mb.prob_bound, "rigorous");
  j["metastability_bound"]["variant"] = to_string(mb.variant);
  j["metastability_bound"]["delta"] = mb.delta;
  j["metastability_bound"]["window"] = mb.window;
  j["metastability_bound"]["vacuous"] = mb.vacuous;
  j["metastability_bound"]["start"] = metastability_start(params, o.delta);
  j["manifest"] = m.to_json();

  emit(o.c.out, dump(j), m, out);
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepOpts {
  Common c;
  std::string p_list;
  std::string p_grid;
  std::uint64_t runs = 1000;
  std::uint64_t max_steps = kDefaultMaxSteps;
  double eps_factor = 0.1;
};

int cmd_sweep(const SweepOpts& o, const Environment& env, std::ostream& out, std::ostream& err) {
  if (o.p_list.empty() == o.p_grid.empty()) throw UsageError("give exactly one of --p-list or --p-grid");
  const auto ps = o.p_grid.empty() ? parse_list(o.p_list) : parse_grid(o.p_grid);
  for (const double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("grid value " + fmt(p) + " is not a probability");
  }
  if (!(o.eps_factor > 0.0 && o.eps_factor < 1.0)) throw UsageError("--epsilon-factor must lie in (0, 1)");
  const std::uint64_t seed = resolve_seed(o.c, env);

  Manifest m{"sweep", {"sweep", "--n", std::to_string(o.c.n)}, {}, seed};
  if (o.p_grid.empty()) {
    m.args.insert(m.args.end(), {"--p-list", o.p_list});
  } else {
    m.args.insert(m.args.end(), {"--p-grid", o.p_grid});
  }
  m.args.insert(m.args.end(), {"--runs", fmt(o.runs), "--max-steps", fmt(o.max_steps), "--epsilon-factor",
                               fmt(o.eps_factor), "--seed", fmt(seed)});
  m.params = {{"n", o.c.n},   {"p_values", ps},           {"runs", o.runs},
              {"max_steps", o.max_steps}, {"epsilon_factor", o.eps_factor}};

  std::ostringstream csv;
  csv << "n,p,exact_h0,exact_overflow,sim_mean,sim_stderr,censored,lb_log10,ub_log10,mf_upper_log10,regime\n";
  for (const double p : ps) {
    const Params params(o.c.n, p);
    double h0 = std::numeric_limits<double>::infinity();
    bool overflow = false;
    if (!params.never_completes()) {
      const auto sol = solve_hitting_times(params);
      h0 = sol.h0();
      overflow = sol.overflow;
    }
    csv << o.c.n << "," << fmt(p) << "," << fmt(h0) << "," << (overflow ? 1 : 0) << ",";
    if (o.runs > 0) {
      const auto sum = batch_hitting_stats(params, o.runs, seed, o.max_steps, o.c.threads);
      if (sum.mean) csv << fmt(*sum.mean) << "," << fmt(sum.stderr);
      else csv << ",";
      csv << "," << sum.censored;
    } else {
      csv << ",,";
    }
    const double q_star = marginal_coeffs(params).q_star;
    const double eps = o.eps_factor * q_star;
    csv << "," << fmt(unconditional_lower_bound(params).log10()) << ",";
    if (o.c.n >= 2) {
      csv << fmt(q_star > 0.0 ? unconditional_upper_bound(params, eps).log10()
                              : std::numeric_limits<double>::infinity());
      csv << ",";
      if (q_star > 0.0) csv << fmt(mean_field_interval(params, eps).upper.log10());
      csv << "," << to_string(hitting_regime(params).label);
    } else {
      csv << ",,";
    }
    csv << "\n";
  }
  emit(o.c.out, csv.str(), m, out);
  if (o.c.out.empty()) err << m.to_json().dump() << "\n";
  return kOk;
}

// ---- metastable -----------------------------------------------------------

struct MetastableOpts {
  Common c;
  double delta = 0.2;
  std::uint64_t window = 10'000;
  std::uint64_t runs = 100;
  std::optional<std::uint64_t> start;
  std::string variant = "small_p";
};

int cmd_metastable(const MetastableOpts& o, const Environment& env, std::ostream& out) {
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  if (o.window == 0) throw UsageError("--window must be positive");
  if (o.runs == 0) throw UsageError("--runs must be positive");
  const Params params(o.c.n, o.c.p);
  const std::uint64_t seed = resolve_seed(o.c, env);
  const std::uint64_t start = o.start ? *o.start : metastability_start(params, o.delta);
  const auto variant = pick_variant(params, o.variant);

  Manifest m{"metastable", instance_args("metastable", o.c), {}, seed};
  m.args.insert(m.args.end(), {"--delta", fmt(o.delta), "--window", fmt(o.window), "--runs", fmt(o.runs),
                               "--start", fmt(start), "--variant", std::string(to_string(variant)), "--seed",
                               fmt(seed)});
  m.params = {{"n", o.c.n},       {"p", o.c.p},         {"delta", o.delta}, {"window", o.window},
              {"runs", o.runs},   {"start", start},     {"variant", to_string(variant)}};

  const auto st = band_violation_stats(params, o.delta, start, o.window, o.runs, seed, o.c.threads);
  const auto mb = metastability_deviation_bound(params, o.delta, o.window, variant);

  ordered_json j;
  j["n"] = o.c.n;
  j["p"] = o.c.p;
  j["q_star"] = marginal_coeffs(params).q_star;
  j["delta"] = o.delta;
  j["window"] = o.window;
  j["start"] = start;
  j["runs"] = o.runs;
  j["band_center"] = st.band_center;
  j["band_halfwidth"] = st.band_halfwidth;
  j["runs_violated"] = st.runs_violated;
  j["empirical_violation_frequency"] = st.violation_frequency();
  j["fraction_rounds_outside"] = st.fraction_rounds_outside();
  j["analytic_bound"] = log_json(mb.prob_bound, "rigorous");
  j["analytic_bound"]["variant"] = to_string(mb.variant);
  j["analytic_bound"]["vacuous"] = mb.vacuous;
  j["manifest"] = m.to_json();

  emit(o.c.out, dump(j), m, out);
  return kOk;
}

// ---- replay ---------------------------------------------------------------

int cmd_replay(const std::string& manifest_path, const std::string& out_path, const Environment& env,
               std::ostream& out, std::ostream& err) {
  std::ifstream f(manifest_path, std::ios::binary);
  if (!f) throw IoError("cannot read manifest '" + manifest_path + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("args") || !j["args"].is_array()) throw UsageError("manifest has no args array");
  std::vector<std::string> args;
  for (const auto& a : j["args"]) {
    if (!a.is_string()) throw UsageError("manifest args must be strings");
    args.push_back(a.get<std::string>());
  }
  if (args.empty() || args.front() == "replay") throw UsageError("manifest does not name a command");
  if (!out_path.empty()) args.insert(args.end(), {"--out", out_path});
  return run(args, out, err, env);
}

}  // namespace

std::string version_string() {
  return std::string("cccp ") + CCCP_VERSION_STRING + " (prng " + kPrngName + ")";
}

Environment process_environment() {
  Environment env;
  if (const char* s = std::getenv(kSeedEnvVar)) env.seed = s;
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Careless coupon collector: exact hitting times, bounds and simulation", "cccp"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  ExactOpts exact;
  auto* sc_exact = app.add_subcommand("exact", "Exact expected hitting times by Hessenberg elimination");
  add_instance(sc_exact, exact.c);
  sc_exact->add_flag("--full-vector", exact.full_vector, "Report h(k) for every k");
  sc_exact->add_flag("--oracle", exact.oracle, "Also run the dense pivoted reference solve");
  auto* json_flag = sc_exact->add_flag("--json", "JSON report (default)");
  sc_exact->add_flag("--csv", exact.csv, "CSV report")->excludes(json_flag);
  sc_exact->add_option("--out", exact.c.out, "Output file (default stdout)");

  SimulateOpts sim;
  auto* sc_sim = app.add_subcommand("simulate", "Monte Carlo hitting times, one CSV row per run");
  add_instance(sc_sim, sim.c);
  sc_sim->add_option("--runs", sim.runs, "Replications")->capture_default_str()->check(CLI::PositiveNumber);
  sc_sim->add_option("--max-steps", sim.max_steps, "Censoring budget per run")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_seed(sc_sim, sim.c);
  sc_sim->add_option("--out", sim.c.out, "CSV output file (default stdout; summary then goes to stderr)");

  TrajectoryOpts traj;
  auto* sc_traj = app.add_subcommand("trajectory", "Mean |S_t|/n per round over many runs");
  add_instance(sc_traj, traj.c);
  sc_traj->add_option("--horizon", traj.horizon, "Last round")->capture_default_str()->check(CLI::PositiveNumber);
  sc_traj->add_option("--runs", traj.runs, "Replications")->capture_default_str()->check(CLI::PositiveNumber);
  sc_traj->add_flag("--full", traj.full, "Simulate the set-valued chain instead of the count chain");
  add_seed(sc_traj, traj.c);
  sc_traj->add_option("--out", traj.c.out, "CSV output file (default stdout; summary then goes to stderr)");

  BoundsOpts bnd;
  double bnd_eps = 0.0;
  auto* sc_bnd = app.add_subcommand("bounds", "Analytic estimates and rigorous bounds (JSON)");
  add_instance(sc_bnd, bnd.c);
  auto* eps_opt = add_real(sc_bnd, "--epsilon", bnd_eps, "Mixing tolerance (default q*/n)");
  add_real(sc_bnd, "--delta", bnd.delta, "Metastability band parameter")->default_str("0.2");
  sc_bnd->add_option("--window", bnd.window, "Metastability window L")->capture_default_str();
  sc_bnd->add_option("--variant", bnd.variant, "small_p or large_p (default by q* regime)")
      ->check(CLI::IsMember({"small_p", "large_p"}));
  sc_bnd->add_option("--out", bnd.c.out, "Output file (default stdout)");

  SweepOpts sweep;
  auto* sc_sweep = app.add_subcommand("sweep", "Exact, simulated and bound values over a p grid (CSV)");
  sc_sweep->add_option("--n", sweep.c.n, "Number of coupon types")->required()->check(CLI::PositiveNumber);
  auto* list_opt = sc_sweep->add_option("--p-list", sweep.p_list, "Comma-separated p values");
  sc_sweep->add_option("--p-grid", sweep.p_grid, "start:stop:step, endpoints inclusive")->excludes(list_opt);
  sc_sweep->add_option("--runs", sweep.runs, "Replications per p (0 skips simulation)")->capture_default_str();
  sc_sweep->add_option("--max-steps", sweep.max_steps, "Censoring budget per run")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_real(sc_sweep, "--epsilon-factor", sweep.eps_factor, "Bounds use epsilon = factor * q*")
      ->default_str("0.1");
  add_seed(sc_sweep, sweep.c);
  sc_sweep->add_option("--out", sweep.c.out, "CSV output file (default stdout; manifest then goes to stderr)");

  MetastableOpts meta;
  auto* sc_meta = app.add_subcommand("metastable", "Empirical band violations against the deviation bound");
  add_instance(sc_meta, meta.c);
  add_real(sc_meta, "--delta", meta.delta, "Band half-width is 2 delta n q*")->default_str("0.2");
  sc_meta->add_option("--window", meta.window, "Window length L")->capture_default_str();
  sc_meta->add_option("--runs", meta.runs, "Replications")->capture_default_str();
  sc_meta->add_option("--start", meta.start, "First round of the window (default T_mix(delta q*/2))");
  sc_meta->add_option("--variant", meta.variant, "small_p or large_p")
      ->capture_default_str()
      ->check(CLI::IsMember({"small_p", "large_p"}));
  add_seed(sc_meta, meta.c);
  sc_meta->add_option("--out", meta.c.out, "Output file (default stdout)");

  std::string manifest_path, replay_out;
  auto* sc_replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  sc_replay->add_option("manifest", manifest_path, "Manifest JSON file")->required();
  sc_replay->add_option("--out", replay_out, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (eps_opt->count() > 0) bnd.epsilon = bnd_eps;

  try {
    if (*sc_exact) return cmd_exact(exact, out, err);
    if (*sc_sim) return cmd_simulate(sim, env, out, err);
    if (*sc_traj) return cmd_trajectory(traj, env, out, err);
    if (*sc_bnd) return cmd_bounds(bnd, out);
    if (*sc_sweep) return cmd_sweep(sweep, env, out, err);
    if (*sc_meta) return cmd_metastable(meta, env, out);
    if (*sc_replay) return cmd_replay(manifest_path, replay_out, env, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}

}  // namespace cccp::cli
