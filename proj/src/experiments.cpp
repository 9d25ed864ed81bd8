#include "maxlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "maxlab/counterexample.hpp"
#include "maxlab/io.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/spectral.hpp"
#include "maxlab/threads.hpp"
#include "maxlab/timesets.hpp"

namespace maxlab {

namespace {
using nlohmann::json;
constexpr double two_pi = 2.0 * std::numbers::pi;

const ExperimentInfo kExperiments[] = {
    {"propagate", "definitions: propagator, Sobolev norms, lattice transforms"},
    {"covernum", "covering numbers N_E(r)"},
    {"suffsum", "Corollary 5 / Theorem 6 sufficiency sums"},
    {"maximal", "Theorem 4"},
    {"theorem3", "Theorem 3"},
    {"lemma3", "Lemma 3"},
    {"multiplier", "Theorem 2 (p = 2 multiplier bound)"},
    {"counterexample", "Theorem 7"},
    {"exponents", "Corollary 1, Theorem 6, Corollary 7 exponent formulas"},
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

void require_keys(const json& j, const std::string& ctx,
                  std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError(ctx + ": unknown key \"" + it.key() + "\"");
    }
}

double jget(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ConfigError(std::string("key \"") + key + "\" must be a number");
    return j[key].get<double>();
}

int jget(const json& j, const char* key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer())
        throw ConfigError(std::string("key \"") + key + "\" must be an integer");
    return j[key].get<int>();
}

bool jget(const json& j, const char* key, bool dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_boolean()) throw ConfigError(std::string("key \"") + key + "\" must be a boolean");
    return j[key].get<bool>();
}

std::string jget(const json& j, const char* key, const char* dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_string()) throw ConfigError(std::string("key \"") + key + "\" must be a string");
    return j[key].get<std::string>();
}

double jreq_num(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key \"" + key + "\"");
    if (!j[key].is_number()) throw ConfigError(ctx + ": key \"" + key + "\" must be a number");
    return j[key].get<double>();
}

int jreq_int(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key \"" + key + "\"");
    if (!j[key].is_number_integer())
        throw ConfigError(ctx + ": key \"" + key + "\" must be an integer");
    return j[key].get<int>();
}

// Finite time sets usable as E in maximal-function runs.
TimeSet parse_time_set(const json& j) {
    if (!j.is_object()) throw ConfigError("set: must be an object");
    std::string type = jget(j, "type", "");
    if (type == "power") {
        require_keys(j, "set(power)", {"type", "p", "count"});
        return seq_generate({SeqKind::power, jreq_num(j, "p", "set"), jreq_int(j, "count", "set"), {}});
    }
    if (type == "log_reciprocal") {
        require_keys(j, "set(log_reciprocal)", {"type", "count"});
        return seq_generate({SeqKind::log_reciprocal, 0.0, jreq_int(j, "count", "set"), {}});
    }
    if (type == "geometric") {
        require_keys(j, "set(geometric)", {"type", "r", "count"});
        return seq_generate({SeqKind::geometric, jreq_num(j, "r", "set"), jreq_int(j, "count", "set"), {}});
    }
    if (type == "explicit") {
        require_keys(j, "set(explicit)", {"type", "times"});
        if (!j.contains("times") || !j["times"].is_array())
            throw ConfigError("set(explicit): key \"times\" must be an array");
        std::vector<double> ts = j["times"].get<std::vector<double>>();
        return seq_generate({SeqKind::explicit_list, 0.0, 0, std::move(ts)});
    }
    if (type == "cantor_endpoints") {
        require_keys(j, "set(cantor_endpoints)", {"type", "lambda", "level"});
        CantorApprox ca = cantor_build(jreq_num(j, "lambda", "set"), jreq_int(j, "level", "set"));
        std::vector<double> pts;
        for (const auto& iv : ca.intervals()) {
            if (iv.left > 0.0) pts.push_back(iv.left); // t = 0 is not a valid time
            pts.push_back(iv.right);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return TimeSet(std::move(pts));
    }
    throw ConfigError("set: unknown type \"" + type + "\"");
}

// Covering sets additionally admit intervals and Cantor approximations.
CoveringSet parse_covering_set(const json& j) {
    if (!j.is_object()) throw ConfigError("set: must be an object");
    std::string type = jget(j, "type", "");
    if (type == "interval") {
        require_keys(j, "set(interval)", {"type", "left", "right"});
        double l = jreq_num(j, "left", "set"), r = jreq_num(j, "right", "set");
        if (!(r >= l)) throw ConfigError("set(interval): need right >= left");
        return Interval{l, r};
    }
    if (type == "cantor") {
        require_keys(j, "set(cantor)", {"type", "lambda", "level"});
        return cantor_build(jreq_num(j, "lambda", "set"), jreq_int(j, "level", "set"));
    }
    return CoveringSet{parse_time_set(j)};
}

cplx complex_normal(std::mt19937_64& gen) {
    auto unit = [&gen] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53; };
    double u1 = unit(), u2 = unit();
    double rad = std::sqrt(-2.0 * std::log(u1));
    return {rad * std::cos(two_pi * u2) / std::numbers::sqrt2,
            rad * std::sin(two_pi * u2) / std::numbers::sqrt2};
}

SpectralFunction random_function(const FrequencyGrid& grid, std::mt19937_64& gen) {
    SpectralFunction f{grid};
    for (std::size_t i = 0; i < f.size(); ++i) f.coeff(i) = complex_normal(gen);
    return f;
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json checks_to_json(const std::vector<CheckResult>& checks) {
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return arr;
}

struct RunnerOutput {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    json results;
    json grid_provenance;
    std::vector<CheckResult> checks;
};

std::string fd(double x) { return format_double(x); }

// ---- propagate -------------------------------------------------------------

RunnerOutput run_propagate(const json& cfg) {
    require_keys(cfg, "propagate",
                 {"experiment", "a", "s", "n", "period", "mode_bound", "t", "trials", "seed"});
    ExponentParams p{jget(cfg, "a", 2.0), jget(cfg, "s", 0.5), jget(cfg, "n", 1)};
    p.validate();
    FrequencyGrid grid{p.n, jget(cfg, "period", two_pi), jget(cfg, "mode_bound", 16)};
    double t = jget(cfg, "t", 0.37);
    int trials = jget(cfg, "trials", 25);
    auto seed = static_cast<std::uint64_t>(jget(cfg, "seed", 20260818));
    if (trials < 1) throw ConfigError("propagate: trials must be >= 1");

    std::mt19937_64 gen(seed);
    int res = 2 * grid.mode_bound() + 1;
    auto pts = lattice_points(grid, res);

    RunnerOutput out;
    out.header = {"trial", "hs_before", "hs_after", "unitarity_rel", "roundtrip_rel", "semigroup_rel"};
    double worst_unit = 0.0, worst_round = 0.0, worst_semi = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
        SpectralFunction f = random_function(grid, gen);
        double before = h_s_norm(f, p.s);
        SpectralFunction g = propagate(f, t, p);
        double after = h_s_norm(g, p.s);
        double unit = std::fabs(after - before) / before;

        SpectralFunction back = analyze_lattice(grid, evaluate(f, 0.0, p, pts), res);
        double round = h_s_norm(back - f, p.s) / before;

        SpectralFunction two_step = propagate(propagate(f, t / 2, p), t / 2, p);
        double semi = h_s_norm(two_step - g, p.s) / before;

        worst_unit = std::max(worst_unit, unit);
        worst_round = std::max(worst_round, round);
        worst_semi = std::max(worst_semi, semi);
        out.rows.push_back({std::to_string(tr), fd(before), fd(after), fd(unit), fd(round), fd(semi)});
    }
    out.results = {{"worst_unitarity_rel", worst_unit},
                   {"worst_roundtrip_rel", worst_round},
                   {"worst_semigroup_rel", worst_semi}};
    out.grid_provenance = {{"dim", grid.dim()}, {"period", grid.period()},
                           {"mode_bound", grid.mode_bound()}, {"lattice_resolution", res}};
    out.checks.push_back({"unitarity_1e-12", worst_unit < 1e-12, fd(worst_unit)});
    out.checks.push_back({"roundtrip_1e-10", worst_round < 1e-10, fd(worst_round)});
    out.checks.push_back({"semigroup_1e-12", worst_semi < 1e-12, fd(worst_semi)});
    return out;
}

// ---- covernum --------------------------------------------------------------

RunnerOutput run_covernum(const json& cfg) {
    require_keys(cfg, "covernum", {"experiment", "set", "m_max", "r_list", "exact_check"});
    if (!cfg.contains("set")) throw ConfigError("covernum: missing key \"set\"");
    CoveringSet E = parse_covering_set(cfg["set"]);
    int m_max = jget(cfg, "m_max", 20);
    if (m_max < 0) throw ConfigError("covernum: m_max must be >= 0");

    std::vector<double> rs;
    if (cfg.contains("r_list")) {
        if (!cfg["r_list"].is_array()) throw ConfigError("covernum: r_list must be an array");
        rs = cfg["r_list"].get<std::vector<double>>();
    } else {
        for (int m = 0; m <= m_max; ++m) rs.push_back(std::ldexp(1.0, -m));
    }

    RunnerOutput out;
    out.header = {"r", "covering_number"};
    std::vector<std::size_t> ns;
    for (double r : rs) {
        std::size_t N = covering_number(E, r);
        ns.push_back(N);
        out.rows.push_back({fd(r), std::to_string(N)});
    }

    bool monotone = true;
    for (std::size_t i = 1; i < rs.size(); ++i)
        if (rs[i] < rs[i - 1] && ns[i] < ns[i - 1]) monotone = false;
    out.checks.push_back({"monotone_in_r", monotone, "N nondecreasing as r decreases"});

    bool exact = jget(cfg, "exact_check", std::holds_alternative<CantorApprox>(E));
    if (exact && std::holds_alternative<CantorApprox>(E)) {
        const auto& ca = std::get<CantorApprox>(E);
        bool ok = true;
        std::string detail;
        for (int k = 0; k <= ca.level(); ++k) {
            std::size_t want = static_cast<std::size_t>(1) << k;
            std::size_t got = covering_number(ca, std::pow(ca.lambda(), k));
            if (got != want) {
                ok = false;
                detail = "level " + std::to_string(k) + ": got " + std::to_string(got) +
                         ", want " + std::to_string(want);
                break;
            }
        }
        out.checks.push_back({"cantor_exact_2^k", ok, ok ? "N(lambda^k) = 2^k" : detail});
    }
    out.results = {{"r_count", rs.size()}};
    out.grid_provenance = json::object();
    return out;
}

// ---- suffsum ---------------------------------------------------------------

RunnerOutput run_suffsum(const json& cfg) {
    require_keys(cfg, "suffsum", {"experiment", "set", "s", "a", "m_max"});
    if (!cfg.contains("set")) throw ConfigError("suffsum: missing key \"set\"");
    CoveringSet E = parse_covering_set(cfg["set"]);
    double s = jget(cfg, "s", 0.5), a = jget(cfg, "a", 2.0);
    int m_max = jget(cfg, "m_max", 25);

    SufficiencyReport rep = sufficiency_sum(E, s, a, m_max);

    RunnerOutput out;
    out.header = {"m", "r", "covering_number", "term", "partial_sum"};
    for (std::size_t m = 0; m < rep.terms.size(); ++m) {
        double r = std::ldexp(1.0, -static_cast<int>(m));
        std::size_t N = covering_number(E, r);
        out.rows.push_back({std::to_string(m), fd(r), std::to_string(N),
                            fd(rep.terms[m]), fd(rep.partial_sums[m])});
    }
    out.results = {{"verdict", to_string(rep.verdict)},
                   {"window_ratio", rep.window_ratio},
                   {"tail_estimate", rep.tail_estimate},
                   {"total", rep.total()}};
    if (rep.saturation_m) out.results["saturation_m"] = *rep.saturation_m;
    out.grid_provenance = json::object();

    bool nondec = true;
    for (std::size_t m = 1; m < rep.partial_sums.size(); ++m)
        if (rep.partial_sums[m] < rep.partial_sums[m - 1]) nondec = false;
    out.checks.push_back({"partial_sums_nondecreasing", nondec, ""});
    bool pos = std::all_of(rep.terms.begin(), rep.terms.end(), [](double v) { return v > 0.0; });
    out.checks.push_back({"terms_positive", pos, ""});
    return out;
}

// ---- maximal ---------------------------------------------------------------

RunnerOutput run_maximal(const json& cfg) {
    require_keys(cfg, "maximal",
                 {"experiment", "a", "s", "n", "period", "mode_bound", "resolution", "set",
                  "trials", "seed", "sampler", "compare_trials", "compare_resolution"});
    ExponentParams p{jget(cfg, "a", 2.0), jget(cfg, "s", 0.7), jget(cfg, "n", 1)};
    p.validate();
    FrequencyGrid grid{p.n, jget(cfg, "period", two_pi), jget(cfg, "mode_bound", 64)};
    int resolution = jget(cfg, "resolution", 2 * (2 * grid.mode_bound() + 1));
    if (!cfg.contains("set")) throw ConfigError("maximal: missing key \"set\"");
    TimeSet E = parse_time_set(cfg["set"]);
    int trials = jget(cfg, "trials", 50);
    auto seed = static_cast<std::uint64_t>(jget(cfg, "seed", 20260818));
    std::string sampler_name = jget(cfg, "sampler", "gaussian");
    SamplerKind sampler;
    if (sampler_name == "gaussian") sampler = SamplerKind::gaussian;
    else if (sampler_name == "single_mode") sampler = SamplerKind::single_mode;
    else throw ConfigError("maximal: unknown sampler \"" + sampler_name + "\"");

    SweepStats stats = theorem4_ratio_sweep(grid, E, p, resolution, trials, sampler, seed);

    RunnerOutput out;
    out.header = {"trial", "ratio"};
    for (std::size_t i = 0; i < stats.ratios.size(); ++i)
        out.rows.push_back({std::to_string(i), fd(stats.ratios[i])});
    out.results = {{"max_ratio", stats.max_ratio}, {"mean_ratio", stats.mean_ratio},
                   {"trials", stats.trials}};
    out.grid_provenance = {{"dim", grid.dim()}, {"period", grid.period()},
                           {"mode_bound", grid.mode_bound()}, {"resolution", resolution},
                           {"set_size", E.size()}};
    out.checks.push_back({"ratios_finite",
                          std::all_of(stats.ratios.begin(), stats.ratios.end(),
                                      [](double v) { return std::isfinite(v) && v >= 0.0; }),
                          ""});

    int compare_trials = jget(cfg, "compare_trials", 0);
    if (compare_trials > 0) {
        SweepStats more = theorem4_ratio_sweep(grid, E, p, resolution, compare_trials, sampler, seed);
        double drift = std::fabs(more.max_ratio - stats.max_ratio) /
                       std::max(stats.max_ratio, 1e-300);
        out.results["compare_trials_max_ratio"] = more.max_ratio;
        out.checks.push_back({"trial_stability_20pct", drift <= 0.20, fd(drift)});
    }
    int compare_resolution = jget(cfg, "compare_resolution", 0);
    if (compare_resolution > 0) {
        SweepStats finer = theorem4_ratio_sweep(grid, E, p, compare_resolution, trials, sampler, seed);
        double drift = std::fabs(finer.max_ratio - stats.max_ratio) /
                       std::max(stats.max_ratio, 1e-300);
        out.results["compare_resolution_max_ratio"] = finer.max_ratio;
        out.checks.push_back({"mesh_stability_5pct", drift <= 0.05, fd(drift)});
    }
    return out;
}

// ---- theorem3 --------------------------------------------------------------

RunnerOutput run_theorem3(const json& cfg) {
    require_keys(cfg, "theorem3",
                 {"experiment", "a", "s", "n", "period", "mode_bound", "set", "b",
                  "j_lo", "j_hi", "trials", "seed", "growth_tol"});
    ExponentParams p{jget(cfg, "a", 2.0), jget(cfg, "s", 0.5), jget(cfg, "n", 1)};
    p.validate();
    FrequencyGrid grid{p.n, jget(cfg, "period", two_pi), jget(cfg, "mode_bound", 16)};
    json set_cfg = cfg.contains("set") ? cfg["set"]
                                       : json{{"type", "geometric"}, {"r", 0.5}, {"count", 20}};
    TimeSet ts = parse_time_set(set_cfg);
    double b = jget(cfg, "b", 2.0 / 3.0);
    int j_lo = jget(cfg, "j_lo", 8), j_hi = jget(cfg, "j_hi", 16);
    int trials = jget(cfg, "trials", 20);
    auto seed = static_cast<std::uint64_t>(jget(cfg, "seed", 20260818));
    double tol = jget(cfg, "growth_tol", 0.10);
    if (j_lo < 1 || j_hi < j_lo) throw ConfigError("theorem3: need 1 <= j_lo <= j_hi");
    if (trials < 1) throw ConfigError("theorem3: trials must be >= 1");

    std::mt19937_64 gen(seed);
    RunnerOutput out;
    out.header = {"trial", "total_at_j_lo", "total_at_j_hi", "growth"};
    double worst = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
        SpectralFunction f = random_function(grid, gen);
        Theorem3Report lo = theorem3_sums(f, ts, p, b, j_lo);
        Theorem3Report hi = theorem3_sums(f, ts, p, b, j_hi);
        double t_lo = (lo.low_sum + lo.high_sum) / lo.hs_sq;
        double t_hi = (hi.low_sum + hi.high_sum) / hi.hs_sq;
        double growth = t_hi / t_lo - 1.0;
        worst = std::max(worst, growth);
        out.rows.push_back({std::to_string(tr), fd(t_lo), fd(t_hi), fd(growth)});
    }
    out.results = {{"worst_growth", worst}, {"b", b}, {"j_lo", j_lo}, {"j_hi", j_hi}};
    out.grid_provenance = {{"dim", grid.dim()}, {"period", grid.period()},
                           {"mode_bound", grid.mode_bound()}, {"set_size", ts.size()}};
    out.checks.push_back({"truncation_growth_bounded", worst <= tol, fd(worst)});
    return out;
}

// ---- lemma3 ----------------------------------------------------------------

RunnerOutput run_lemma3(const json& cfg) {
    require_keys(cfg, "lemma3",
                 {"experiment", "a", "s", "n", "period", "mode_bound", "left", "r",
                  "time_mesh", "resolution", "trials", "seed"});
    ExponentParams p{jget(cfg, "a", 2.0), jget(cfg, "s", 0.5), jget(cfg, "n", 1)};
    p.validate();
    FrequencyGrid grid{p.n, jget(cfg, "period", two_pi), jget(cfg, "mode_bound", 12)};
    double left = jget(cfg, "left", 0.25);
    double r = jget(cfg, "r", 0.001);
    int time_mesh = jget(cfg, "time_mesh", 16);
    int resolution = jget(cfg, "resolution", 2 * (2 * grid.mode_bound() + 1));
    int trials = jget(cfg, "trials", 10);
    auto seed = static_cast<std::uint64_t>(jget(cfg, "seed", 20260818));
    if (trials < 1) throw ConfigError("lemma3: trials must be >= 1");

    std::mt19937_64 gen(seed);
    RunnerOutput out;
    out.header = {"trial", "lhs", "rhs_bound", "slack"};
    bool all_ok = true;
    for (int tr = 0; tr < trials; ++tr) {
        SpectralFunction f = random_function(grid, gen);
        IntervalSupReport rep = interval_sup_check(f, left, r, p, time_mesh, resolution);
        bool ok = rep.lhs <= rep.rhs_bound * (1.0 + 1e-12);
        all_ok = all_ok && ok;
        out.rows.push_back({std::to_string(tr), fd(rep.lhs), fd(rep.rhs_bound),
                            fd(rep.rhs_bound - rep.lhs)});
    }
    out.results = {{"left", left}, {"r", r}, {"time_mesh", time_mesh}};
    out.grid_provenance = {{"dim", grid.dim()}, {"period", grid.period()},
                           {"mode_bound", grid.mode_bound()}, {"resolution", resolution}};
    out.checks.push_back({"oscillation_dominated", all_ok, "lhs <= r^2 A^{2a} (2pi)^{-n} h0^2"});
    return out;
}

// ---- multiplier ------------------------------------------------------------

RunnerOutput run_multiplier(const json& cfg) {
    require_keys(cfg, "multiplier",
                 {"experiment", "a", "s", "period", "mode_bound", "log2_delta_min",
                  "log2_delta_max"});
    ExponentParams p{jget(cfg, "a", 2.0), jget(cfg, "s", 0.5), 1};
    p.validate();
    FrequencyGrid grid{1, jget(cfg, "period", 8.0 * std::numbers::pi), jget(cfg, "mode_bound", 2400)};
    int lo = jget(cfg, "log2_delta_min", -14), hi = jget(cfg, "log2_delta_max", -2);
    if (lo > hi || hi > -1) throw ConfigError("multiplier: need log2_delta_min <= log2_delta_max <= -1");

    RunnerOutput out;
    out.header = {"log2_delta", "delta", "sup_value", "normalized"};
    double norm_min = std::numeric_limits<double>::infinity(), norm_max = 0.0;
    for (int e = hi; e >= lo; --e) {
        double delta = std::ldexp(1.0, e);
        double sup = delta_multiplier_sup(grid, delta, p);
        double normalized = sup / std::pow(delta, p.s / p.a);
        norm_min = std::min(norm_min, normalized);
        norm_max = std::max(norm_max, normalized);
        out.rows.push_back({std::to_string(e), fd(delta), fd(sup), fd(normalized)});
    }
    out.results = {{"normalized_min", norm_min}, {"normalized_max", norm_max},
                   {"spread", norm_max / norm_min}};
    out.grid_provenance = {{"dim", 1}, {"period", grid.period()},
                           {"mode_bound", grid.mode_bound()},
                           {"band_limit", grid.band_limit()}};
    out.checks.push_back({"delta_power_law_factor2", norm_max / norm_min < 2.0,
                          fd(norm_max / norm_min)});
    return out;
}

// ---- counterexample --------------------------------------------------------

RunnerOutput run_counterexample(const json& cfg) {
    require_keys(cfg, "counterexample",
                 {"experiment", "a", "nu_lo", "nu_hi", "mesh_constant", "mesh_points",
                  "dim", "annulus", "sensitivity"});
    double a = jget(cfg, "a", 2.0);
    BumpSpec spec = BumpSpec::standard(a);
    if (cfg.contains("annulus")) {
        spec.A = jreq_num(cfg, "annulus", "counterexample");
        spec.validate();
    }
    GrowthOptions opt;
    opt.mesh_constant = jget(cfg, "mesh_constant", 8.0);
    opt.mesh_points = jget(cfg, "mesh_points", 256);
    opt.dim = jget(cfg, "dim", 1);
    opt.sensitivity = jget(cfg, "sensitivity", true);
    int nu_lo = jget(cfg, "nu_lo", 6), nu_hi = jget(cfg, "nu_hi", 12);
    ExponentParams p{a, 0.5, 1};

    GrowthTable table = growth_experiment(nu_lo, nu_hi, p, spec, opt);

    RunnerOutput out;
    out.header = {"nu", "norm_f", "lower_bound_maximal", "ratio", "fit_residual"};
    for (const auto& row : table.rows)
        out.rows.push_back({std::to_string(row.nu), fd(row.norm_f), fd(row.lower_bound),
                            fd(row.ratio), fd(row.residual)});
    json sens = json::array();
    for (const auto& [c, slope] : table.sensitivity)
        sens.push_back({{"mesh_constant", c}, {"fitted_exponent", slope}});
    out.results = {{"fitted_exponent", table.fitted_exponent},
                   {"fit_intercept", table.fit_intercept},
                   {"sensitivity", sens},
                   {"psi_factor", table.psi_factor},
                   {"max_time_error", table.max_time_error}};
    out.grid_provenance = {{"dim", table.dim}, {"mesh_constant", table.mesh_constant},
                           {"mesh_points", table.mesh_points},
                           {"annulus", spec.A}, {"nu_lo", nu_lo}, {"nu_hi", nu_hi}};

    bool increasing = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        if (!(table.rows[i].ratio > table.rows[i - 1].ratio)) increasing = false;
    out.checks.push_back({"ratios_strictly_increasing", increasing, ""});
    bool window = table.fitted_exponent >= 0.35 && table.fitted_exponent <= 0.65;
    out.checks.push_back({"exponent_in_window", window, fd(table.fitted_exponent)});
    return out;
}

// ---- exponents -------------------------------------------------------------

RunnerOutput run_exponents(const json& cfg) {
    require_keys(cfg, "exponents", {"experiment", "a", "s", "n"});
    ExponentParams p{jget(cfg, "a", 2.0), jget(cfg, "s", 0.5), jget(cfg, "n", 1)};
    ExponentReport rep = exponents(p);

    RunnerOutput out;
    out.header = {"a", "s", "n", "gamma", "p0", "interval_lo", "interval_hi",
                  "interval_lo_open", "cantor_threshold", "b_max", "inv_gamma_bound", "flags"};
    std::string flags;
    for (const auto& fl : rep.flags) {
        if (!flags.empty()) flags += "; ";
        flags += fl;
    }
    out.rows.push_back({fd(p.a), fd(p.s), std::to_string(p.n),
                        rep.gamma ? fd(*rep.gamma) : "",
                        fd(rep.p0), fd(rep.interval.lo), fd(rep.interval.hi),
                        rep.interval.lo_open ? "1" : "0",
                        fd(rep.cantor_threshold),
                        rep.b_max ? fd(*rep.b_max) : "",
                        rep.inv_gamma_bound ? fd(*rep.inv_gamma_bound) : "",
                        flags});
    out.results = {{"p0", rep.p0}, {"cantor_threshold", rep.cantor_threshold}};
    if (rep.gamma) out.results["gamma"] = *rep.gamma;
    out.grid_provenance = json::object();

    bool gamma_ok = !rep.gamma || std::fabs(*rep.gamma * (p.a - p.s) - 2.0 * p.s) < 1e-12;
    out.checks.push_back({"gamma_identity", gamma_ok, ""});
    double p0_expect = 2.0 / (1.0 + 2.0 * p.s / (p.n * p.a));
    out.checks.push_back({"p0_identity", std::fabs(rep.p0 - p0_expect) < 1e-12, ""});
    return out;
}

} // namespace

std::span<const ExperimentInfo> list_experiments() { return kExperiments; }

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
        throw ConfigError("config needs an \"experiment\" string key");
    std::string name = cfg["experiment"].get<std::string>();
    bool known = false;
    for (const auto& info : kExperiments)
        if (info.name == name) known = true;
    if (!known) throw ConfigError("unknown experiment \"" + name + "\"");
    return cfg;
}

RunResult run_experiment(const json& cfg, const RunOptions& opt) {
    if (!cfg.is_object() || !cfg.contains("experiment") || !cfg["experiment"].is_string())
        throw ConfigError("config needs an \"experiment\" string key");
    if (opt.threads > 0) set_thread_cap(opt.threads);
    std::string name = cfg["experiment"].get<std::string>();

    RunnerOutput out;
    if (name == "propagate") out = run_propagate(cfg);
    else if (name == "covernum") out = run_covernum(cfg);
    else if (name == "suffsum") out = run_suffsum(cfg);
    else if (name == "maximal") out = run_maximal(cfg);
    else if (name == "theorem3") out = run_theorem3(cfg);
    else if (name == "lemma3") out = run_lemma3(cfg);
    else if (name == "multiplier") out = run_multiplier(cfg);
    else if (name == "counterexample") out = run_counterexample(cfg);
    else if (name == "exponents") out = run_exponents(cfg);
    else throw ConfigError("unknown experiment \"" + name + "\"");

    std::filesystem::create_directories(opt.out_dir);
    RunResult res;
    res.csv_path = opt.out_dir + "/" + name + ".csv";
    res.summary_path = opt.out_dir + "/" + name + "_summary.json";
    write_csv(res.csv_path, out.header, out.rows);

    res.checks_passed = std::all_of(out.checks.begin(), out.checks.end(),
                                    [](const CheckResult& c) { return c.passed; });
    json summary = {{"experiment", name},
                    {"config", cfg},
                    {"provenance",
                     {{"timestamp", iso_timestamp()},
                      {"threads", thread_cap()},
                      {"grid", out.grid_provenance}}},
                    {"results", out.results},
                    {"checks", checks_to_json(out.checks)},
                    {"passed", res.checks_passed}};
    std::ofstream sf(res.summary_path, std::ios::binary | std::ios::trunc);
    if (!sf) throw std::runtime_error("cannot write summary: " + res.summary_path);
    sf << summary.dump(2) << '\n';

    res.exit_code = res.checks_passed ? 0 : 2;
    return res;
}

} // namespace maxlab
