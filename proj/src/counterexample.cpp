#include "maxlab/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "maxlab/io.hpp"
#include "maxlab/threads.hpp"

namespace maxlab {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double ls_fit(std::span<const double> x, std::span<const double> y, double& intercept) {
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    double slope = den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
    intercept = (sy - slope * sx) / n;
    return slope;
}

std::vector<double> log_mesh(double lo, double hi, int points) {
    std::vector<double> xs(static_cast<std::size_t>(points));
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i)
        xs[static_cast<std::size_t>(i)] = std::clamp(
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / (points - 1)), lo, hi);
    return xs;
}
} // namespace

double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double h0 = std::exp(-1.0 / u);
    double h1 = std::exp(-1.0 / (1.0 - u));
    return h0 / (h0 + h1);
}

double BumpSpec::critical_radius() const { return std::pow(a, -1.0 / (a - 1.0)); }

void BumpSpec::validate() const {
    if (!(a > 1.0) || !std::isfinite(a)) fail("BumpSpec: need a > 1");
    if (!(A > 1.0) || !std::isfinite(A)) fail("BumpSpec: need A > 1");
    double xc = critical_radius();
    if (!(1.0 / A < 0.9 * xc))
        fail("BumpSpec: inner edge 1/A must sit below the plateau (need 1/A < 0.9 a^{-1/(a-1)})");
    if (!(A > 1.1 * xc))
        fail("BumpSpec: outer edge A must sit above the plateau");
}

BumpSpec BumpSpec::standard(double a) {
    BumpSpec spec;
    spec.a = a;
    spec.A = 16.0 * std::max(1.0, spec.critical_radius());
    spec.validate();
    return spec;
}

std::function<double(double)> bump_phi(const BumpSpec& spec) {
    spec.validate();
    const double lo = 1.0 / spec.A, hi = spec.A;
    const double p1 = 0.9 * spec.critical_radius();
    const double p2 = 1.1 * spec.critical_radius();
    return [lo, hi, p1, p2](double xi) {
        double r = std::fabs(xi);
        if (r <= lo || r >= hi) return 0.0;
        if (r < p1) return smooth_step((r - lo) / (p1 - lo));
        if (r <= p2) return 1.0;
        return smooth_step((hi - r) / (hi - p2));
    };
}

double psi_profile(double u) {
    double r = std::fabs(u);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    return smooth_step(2.0 - r);
}

SpectralFunction make_f_nu(int nu, const BumpSpec& spec, const FrequencyGrid& grid) {
    spec.validate();
    if (nu < 0) fail("make_f_nu: nu must be >= 0");
    const double scale = std::ldexp(1.0, nu);
    const double ramp = (spec.A - 1.0 / spec.A) * scale / 64.0;
    if (grid.spacing() > ramp)
        fail("make_f_nu: grid spacing " + format_double(grid.spacing()) +
             " too coarse for the dilated ramps, need <= " + format_double(ramp));
    const double reach = grid.spacing() * grid.mode_bound();
    if (reach < spec.A * scale)
        fail("make_f_nu: band reach " + format_double(reach) +
             " does not cover the dilated annulus, need >= " + format_double(spec.A * scale));
    auto phi = bump_phi(spec);
    SpectralFunction f{grid};
    for (std::size_t i = 0; i < f.size(); ++i) {
        Point xi = grid.frequency(i);
        double v = phi(xi[0] / scale);
        if (grid.dim() == 2) v *= psi_profile(xi[1]);
        f.coeff(i) = v;
    }
    return f;
}

TimeChoice optimal_time(double x, int nu, const ExponentParams& p) {
    p.validate();
    if (!(p.a > 1.0)) fail("optimal_time: need a > 1");
    if (nu < 0) fail("optimal_time: nu must be >= 0");
    const double floor_x = 4.0 * std::ldexp(1.0, -nu);
    if (!(x >= floor_x * (1.0 - 1e-12) && x <= 1.0))
        fail("optimal_time: x must lie in [4*2^-nu, 1], got " + format_double(x));

    const double tau = x * std::pow(2.0, static_cast<double>(nu) * (1.0 - p.a));
    TimeChoice ch;
    const double kstar = std::exp(1.0 / tau);
    if (kstar <= 9.0e15) {
        long long k0 = std::llround(kstar);
        double best_t = 0.0, best_err = std::numeric_limits<double>::infinity();
        for (long long k = std::max<long long>(3, k0 - 2); k <= k0 + 2; ++k) {
            double tk = 1.0 / std::log(static_cast<double>(k));
            double err = std::fabs(tk - tau);
            if (err < best_err) {
                best_err = err;
                best_t = tk;
            }
        }
        ch.t = best_t;
        ch.error_bound = best_err;
        ch.exact_member = true;
    } else {
        // Neighbor gap ~ tau^2 / k*: finer than double resolution long before
        // k* overflows, so tau itself stands in for the nearest member.
        ch.t = tau;
        ch.error_bound = tau * tau * std::exp(-1.0 / tau); // underflows to 0 eventually
        ch.below_representable = true;
    }
    return ch;
}

cplx oscillatory_integral(double lambda, const BumpSpec& spec) {
    spec.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        fail("oscillatory_integral: need lambda >= 0");
    auto phi = bump_phi(spec);
    auto K = [&spec](double xi) { return std::pow(std::fabs(xi), spec.a) + xi; };

    KahanSum re, im;
    const double comps[2][2] = {{-spec.A, -1.0 / spec.A}, {1.0 / spec.A, spec.A}};
    for (const auto& comp : comps) {
        const double a0 = comp[0], b0 = comp[1];
        double kmin = K(a0), kmax = kmin;
        for (int i = 1; i <= 1024; ++i) {
            double v = K(a0 + (b0 - a0) * i / 1024.0);
            kmin = std::min(kmin, v);
            kmax = std::max(kmax, v);
        }
        double cycles = lambda * (kmax - kmin) / two_pi;
        double want = std::max(4096.0, 32.0 * std::ceil(cycles));
        if (want > static_cast<double>(1 << 26))
            throw std::runtime_error("oscillatory_integral: quadrature budget exceeded");
        std::size_t N = static_cast<std::size_t>(want);
        if (N % 2) ++N;
        const double h = (b0 - a0) / static_cast<double>(N);
        KahanSum cre, cim;
        for (std::size_t i = 0; i <= N; ++i) {
            double xi = a0 + h * static_cast<double>(i);
            double wgt = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            double amp = phi(xi);
            if (amp == 0.0) continue;
            cplx e = std::polar(amp * wgt, lambda * K(xi));
            cre.add(e.real());
            cim.add(e.imag());
        }
        re.add(cre.value() * h / 3.0);
        im.add(cim.value() * h / 3.0);
    }
    return {re.value(), im.value()};
}

double critical_point(const BumpSpec& spec) {
    spec.validate();
    // K'(xi) = 1 - a r^{a-1} on the negative component, r = -xi.
    double lo = 1.0 / spec.A, hi = spec.A;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double d = 1.0 - spec.a * std::pow(mid, spec.a - 1.0);
        (d > 0.0 ? lo : hi) = mid;
    }
    return -0.5 * (lo + hi);
}

StationaryPhaseResult stationary_phase_check(int nu, double x, const BumpSpec& spec,
                                             double floor_c) {
    if (nu < 0) fail("stationary_phase_check: nu must be >= 0");
    const double floor_x = 4.0 * std::ldexp(1.0, -nu);
    if (!(x >= floor_x * (1.0 - 1e-12) && x <= 1.0))
        fail("stationary_phase_check: x must lie in [4*2^-nu, 1]");
    StationaryPhaseResult res;
    res.lambda = std::ldexp(x, nu);
    res.integral_abs = std::abs(oscillatory_integral(res.lambda, spec));
    res.predicted_floor = floor_c * std::pow(2.0, -0.5 * nu) / std::sqrt(x);
    return res;
}

double calibrate_floor(const BumpSpec& spec, std::span<const int> nus,
                       int samples_per_nu, double mesh_constant) {
    if (nus.empty()) fail("calibrate_floor: no nu values");
    if (samples_per_nu < 2) fail("calibrate_floor: need at least 2 samples per nu");
    if (!(mesh_constant >= 4.0)) fail("calibrate_floor: need mesh constant >= 4");
    double floor_c = std::numeric_limits<double>::infinity();
    for (int nu : nus) {
        double xlo = mesh_constant * std::ldexp(1.0, -nu);
        if (!(xlo < 1.0))
            fail("calibrate_floor: nu = " + std::to_string(nu) +
                 " leaves no room below x = 1");
        std::vector<double> xs = log_mesh(xlo, 1.0, samples_per_nu);
        std::vector<double> g(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) {
            double lambda = std::ldexp(xs[i], nu);
            g[i] = std::abs(oscillatory_integral(lambda, spec)) * std::sqrt(lambda);
        });
        for (double v : g) floor_c = std::min(floor_c, v);
    }
    return floor_c;
}

namespace {
// Direct |S_t f(x)| for the 1-D growth rows; the grid data is prebuilt once
// per nu and shared across the x mesh.
struct NuContext {
    FrequencyGrid grid;
    std::vector<double> freq;  // xi_m
    std::vector<double> speed; // |xi_m|^a
    std::vector<double> coeff; // real nonnegative phi samples
    double front = 0.0;        // dxi / (2 pi)
    double norm_spatial = 0.0; // (2 pi)^{-1/2} h_0
};

NuContext build_nu_context(int nu, const BumpSpec& spec, double a) {
    const double scale = std::ldexp(1.0, nu);
    const double ramp = (spec.A - 1.0 / spec.A) * scale / 64.0;
    double dxi = 1.0;
    while (dxi > ramp) dxi *= 0.5;
    const double period = two_pi / dxi;
    const int M = static_cast<int>(std::ceil(spec.A * scale / dxi));
    NuContext ctx{FrequencyGrid{1, period, M}, {}, {}, {}, 0.0, 0.0};

    SpectralFunction f = make_f_nu(nu, spec, ctx.grid);
    ctx.front = dxi / two_pi;
    ctx.norm_spatial = h_s_norm(f, 0.0) / std::sqrt(two_pi);
    const std::size_t n = ctx.grid.mode_count();
    ctx.freq.resize(n);
    ctx.speed.resize(n);
    ctx.coeff.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ctx.freq[i] = ctx.grid.frequency(i)[0];
        ctx.speed[i] = std::pow(std::fabs(ctx.freq[i]), a);
        ctx.coeff[i] = f.coeff(i).real();
    }
    return ctx;
}

double field_magnitude(const NuContext& ctx, double t, double x) {
    KahanSum re, im;
    for (std::size_t i = 0; i < ctx.freq.size(); ++i) {
        double c = ctx.coeff[i];
        if (c == 0.0) continue;
        double phase = ctx.freq[i] * x + t * ctx.speed[i];
        re.add(c * std::cos(phase));
        im.add(c * std::sin(phase));
    }
    return std::hypot(re.value(), im.value()) * ctx.front;
}

// Trapezoid of vals^2 over the (nonuniform) mesh, then the square root.
double mesh_lower_bound(std::span<const double> xs, std::span<const double> vals) {
    KahanSum acc;
    for (std::size_t i = 1; i < xs.size(); ++i)
        acc.add(0.5 * (xs[i] - xs[i - 1]) * (vals[i] * vals[i] + vals[i - 1] * vals[i - 1]));
    return std::sqrt(acc.value());
}
} // namespace

GrowthTable growth_experiment(int nu_lo, int nu_hi, const ExponentParams& p,
                              const BumpSpec& spec, const GrowthOptions& opt) {
    p.validate();
    spec.validate();
    if (!(p.a > 1.0)) fail("growth_experiment: need a > 1");
    if (nu_lo < 1 || nu_hi < nu_lo) fail("growth_experiment: need 1 <= nu_lo <= nu_hi");
    if (opt.mesh_points < 2) fail("growth_experiment: need at least 2 mesh points");
    if (!(opt.mesh_constant >= 4.0)) fail("growth_experiment: need mesh constant C >= 4");
    if (opt.dim != 1 && opt.dim != 2) fail("growth_experiment: dim must be 1 or 2");
    if (opt.dim == 2 && p.a != 2.0)
        fail("growth_experiment: the dim-2 tensor factorization needs a = 2");
    if (!(opt.mesh_constant * std::ldexp(1.0, -nu_lo) < 1.0))
        fail("growth_experiment: C 2^-nu_lo must be < 1");

    std::vector<double> cs{opt.mesh_constant};
    if (opt.sensitivity)
        for (double c : {4.0, 16.0})
            if (c != opt.mesh_constant && c * std::ldexp(1.0, -nu_lo) < 1.0)
                cs.push_back(c);

    GrowthTable table;
    table.mesh_constant = opt.mesh_constant;
    table.mesh_points = opt.mesh_points;
    table.dim = opt.dim;

    // dim-2 second-coordinate constants: c_psi = (2 pi)^{-1} sum psi^2 dxi2.
    double c_psi = 1.0;
    if (opt.dim == 2) {
        const double dxi2 = 1.0 / 16.0;
        KahanSum acc;
        for (int m = -32; m <= 32; ++m) {
            double v = psi_profile(m * dxi2);
            acc.add(v * v);
        }
        c_psi = acc.value() * dxi2 / two_pi;
    }
    table.psi_factor = c_psi;

    const int ncols = static_cast<int>(cs.size());
    const int nrows = nu_hi - nu_lo + 1;
    std::vector<std::vector<double>> ratios(static_cast<std::size_t>(ncols));

    for (int nu = nu_lo; nu <= nu_hi; ++nu) {
        NuContext ctx = build_nu_context(nu, spec, p.a);
        for (int ci = 0; ci < ncols; ++ci) {
            double C = cs[static_cast<std::size_t>(ci)];
            double xlo = C * std::ldexp(1.0, -nu);
            std::vector<double> xs = log_mesh(xlo, 1.0, opt.mesh_points);
            std::vector<double> vals(xs.size());
            double worst_err = 0.0;
            std::vector<double> errs(xs.size(), 0.0);
            parallel_for(xs.size(), [&](std::size_t i) {
                TimeChoice ch = optimal_time(xs[i], nu, p);
                vals[i] = field_magnitude(ctx, ch.t, xs[i]);
                errs[i] = ch.error_bound;
            });
            for (double e : errs) worst_err = std::max(worst_err, e);
            double lb = mesh_lower_bound(xs, vals);
            ratios[static_cast<std::size_t>(ci)].push_back(lb / ctx.norm_spatial);
            if (ci == 0) {
                GrowthRow row;
                row.nu = nu;
                row.norm_f = ctx.norm_spatial * std::sqrt(c_psi); // c_psi = 1 in dim 1
                row.lower_bound = lb * std::sqrt(c_psi);
                row.ratio = row.lower_bound / row.norm_f;
                table.rows.push_back(row);
                table.max_time_error = std::max(table.max_time_error, worst_err);
            }
        }
    }

    std::vector<double> lx(static_cast<std::size_t>(nrows)), ly(static_cast<std::size_t>(nrows));
    for (int i = 0; i < nrows; ++i) {
        lx[static_cast<std::size_t>(i)] = std::log(static_cast<double>(nu_lo + i));
        ly[static_cast<std::size_t>(i)] = std::log(table.rows[static_cast<std::size_t>(i)].ratio);
    }
    table.fitted_exponent = ls_fit(lx, ly, table.fit_intercept);
    for (int i = 0; i < nrows; ++i)
        table.rows[static_cast<std::size_t>(i)].residual =
            ly[static_cast<std::size_t>(i)] -
            (table.fit_intercept + table.fitted_exponent * lx[static_cast<std::size_t>(i)]);

    for (int ci = 0; ci < ncols; ++ci) {
        std::vector<double> y(static_cast<std::size_t>(nrows));
        for (int i = 0; i < nrows; ++i)
            y[static_cast<std::size_t>(i)] =
                std::log(ratios[static_cast<std::size_t>(ci)][static_cast<std::size_t>(i)]);
        double icpt = 0.0;
        double slope = ls_fit(lx, y, icpt);
        table.sensitivity.emplace_back(cs[static_cast<std::size_t>(ci)], slope);
    }
    return table;
}

} // namespace maxlab
