#include "maxlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "maxlab/threads.hpp"

namespace maxlab {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double front_factor(const FrequencyGrid& grid) {
    return grid.cell_weight() / (grid.dim() == 1 ? two_pi : two_pi * two_pi);
}

void check_resolution(const FrequencyGrid& grid, int resolution, const char* op) {
    int need = 2 * (2 * grid.mode_bound() + 1);
    if (resolution < need)
        fail(std::string(op) + ": resolution " + std::to_string(resolution) +
             " too coarse for quadrature of squares, need >= " + std::to_string(need));
}

// Standard complex normal via Box-Muller on the given engine; hand-rolled so
// the draw sequence is pinned across standard libraries.
cplx complex_normal(std::mt19937_64& gen) {
    auto unit = [&gen] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53; };
    double u1 = unit(), u2 = unit();
    double rad = std::sqrt(-2.0 * std::log(u1));
    return {rad * std::cos(two_pi * u2) / std::numbers::sqrt2,
            rad * std::sin(two_pi * u2) / std::numbers::sqrt2};
}
} // namespace

MaximalReport maximal_field(const SpectralFunction& f, const TimeSet& E,
                            const ExponentParams& p, int resolution) {
    p.validate();
    const auto& grid = f.grid();
    if (grid.dim() != p.n) fail("maximal_field: params.n does not match grid dim");
    check_resolution(grid, resolution, "maximal_field");

    const std::size_t modes = grid.mode_count();
    const std::size_t nt = E.size();
    std::vector<double> w(modes);
    std::vector<Point> freqs(modes);
    for (std::size_t i = 0; i < modes; ++i) {
        w[i] = std::pow(grid.frequency_norm(i), p.a);
        freqs[i] = grid.frequency(i);
    }
    // Propagated coefficients for every t in E, row-major [t][mode].
    std::vector<cplx> prop(nt * modes);
    for (std::size_t k = 0; k < nt; ++k) {
        double t = E.times()[k];
        for (std::size_t i = 0; i < modes; ++i)
            prop[k * modes + i] = f.coeff(i) * std::polar(1.0, t * w[i]);
    }

    MaximalReport rep;
    rep.x_points = lattice_points(grid, resolution);
    rep.max_values.assign(rep.x_points.size(), 0.0);
    const double front = front_factor(grid);
    parallel_for(rep.x_points.size(), [&](std::size_t j) {
        const Point& x = rep.x_points[j];
        // Spatial phasors depend only on x; hoisting them leaves the t-loop
        // as plain complex dot products.
        std::vector<cplx> ph(modes);
        for (std::size_t i = 0; i < modes; ++i)
            ph[i] = std::polar(1.0, freqs[i][0] * x[0] + freqs[i][1] * x[1]);
        double best = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const cplx* row = prop.data() + k * modes;
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < modes; ++i) {
                cplx term = row[i] * ph[i];
                re += term.real();
                im += term.imag();
            }
            double mag = std::hypot(re, im) * front;
            if (mag > best) best = mag;
        }
        rep.max_values[j] = best;
    });

    double cell = grid.period() / resolution;
    double weight = grid.dim() == 1 ? cell : cell * cell;
    KahanSum l2;
    for (double v : rep.max_values) l2.add(v * v);
    rep.l2_sq = l2.value() * weight;

    double hs = h_s_norm(f, p.s);
    rep.hs_sq = hs * hs;

    rep.sum_m_max = 40;
    SufficiencyReport suff = sufficiency_sum(CoveringSet{E}, p.s, p.a, rep.sum_m_max);
    rep.sum_value = suff.total();
    rep.sum_saturated = suff.saturation_m.has_value();

    double den = rep.sum_value * rep.hs_sq;
    rep.ratio = den > 0.0 ? rep.l2_sq / den : 0.0;
    return rep;
}

SweepStats theorem4_ratio_sweep(const FrequencyGrid& grid, const TimeSet& E,
                                const ExponentParams& p, int resolution,
                                int trials, SamplerKind sampler, std::uint64_t seed) {
    if (trials < 1) fail("theorem4_ratio_sweep: trials must be >= 1");
    p.validate();
    std::mt19937_64 gen(seed);
    SweepStats stats;
    stats.trials = trials;
    KahanSum mean;
    for (int tr = 0; tr < trials; ++tr) {
        SpectralFunction f{grid};
        if (sampler == SamplerKind::gaussian) {
            for (std::size_t i = 0; i < f.size(); ++i) f.coeff(i) = complex_normal(gen);
        } else {
            std::size_t idx = static_cast<std::size_t>(gen() % f.size());
            f.coeff(idx) = 1.0;
        }
        MaximalReport rep = maximal_field(f, E, p, resolution);
        stats.ratios.push_back(rep.ratio);
        stats.max_ratio = std::max(stats.max_ratio, rep.ratio);
        mean.add(rep.ratio);
    }
    stats.mean_ratio = mean.value() / trials;
    return stats;
}

std::pair<SpectralFunction, SpectralFunction> lowhigh_split(const SpectralFunction& f,
                                                            double cutoff) {
    if (!(cutoff >= 0.0)) fail("lowhigh_split: cutoff must be >= 0");
    SpectralFunction low{f.grid()}, high{f.grid()};
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.grid().frequency_norm(i) <= cutoff) low.coeff(i) = f.coeff(i);
        else high.coeff(i) = f.coeff(i);
    }
    return {std::move(low), std::move(high)};
}

std::vector<double> augmented_class(const TimeSet& ts, int j, double b) {
    if (j < 1) fail("augmented_class: j must be >= 1");
    if (!(b >= 0.0) || !std::isfinite(b)) fail("augmented_class: need b >= 0");
    const double lo = std::ldexp(1.0, -j - 1);
    const double hi = std::ldexp(1.0, -j);
    std::vector<double> nodes{0.0};
    for (double t : ts.times())
        if (t > lo && t <= hi) nodes.push_back(t);
    nodes.push_back(hi);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const double gap_cap = hi * std::pow(2.0, -b * j);
    std::vector<double> mesh{nodes.front()};
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        double x0 = nodes[k - 1], x1 = nodes[k];
        double gap = x1 - x0;
        auto nsub = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / gap_cap - 1e-12)));
        for (std::size_t i = 1; i <= nsub; ++i)
            mesh.push_back(x0 + gap * static_cast<double>(i) / static_cast<double>(nsub));
    }
    return mesh;
}

Theorem3Report theorem3_sums(const SpectralFunction& f, const TimeSet& ts,
                             const ExponentParams& p, double b, int j_max) {
    p.validate();
    if (!(p.s > 0.0)) fail("theorem3_sums: need s > 0");
    if (!(b >= 0.0) || !std::isfinite(b)) fail("theorem3_sums: need b >= 0");
    if (j_max < 1) fail("theorem3_sums: j_max must be >= 1");
    const auto& grid = f.grid();
    if (grid.dim() != p.n) fail("theorem3_sums: params.n does not match grid dim");
    for (int j = 1; j <= j_max; ++j) {
        double lo = std::ldexp(1.0, -j - 1), hi = std::ldexp(1.0, -j);
        bool nonempty = false;
        for (double t : ts.times())
            if (t > lo && t <= hi) { nonempty = true; break; }
        if (!nonempty)
            fail("theorem3_sums: dyadic class j = " + std::to_string(j) + " is empty");
    }

    const std::size_t modes = grid.mode_count();
    std::vector<double> w(modes), xi_norm(modes), c2(modes);
    for (std::size_t i = 0; i < modes; ++i) {
        xi_norm[i] = grid.frequency_norm(i);
        w[i] = std::pow(xi_norm[i], p.a);
        c2[i] = std::norm(f.coeff(i));
    }
    const double cell = grid.cell_weight();
    const double b1 = b / (2.0 * p.s);

    Theorem3Report rep;
    rep.b = b;
    rep.j_max = j_max;
    rep.low_terms.assign(static_cast<std::size_t>(j_max), 0.0);
    rep.high_terms.assign(static_cast<std::size_t>(j_max), 0.0);
    parallel_for(static_cast<std::size_t>(j_max), [&](std::size_t jj) {
        int j = static_cast<int>(jj) + 1;
        double cutoff = std::pow(2.0, b1 * j);
        std::vector<double> v = augmented_class(ts, j, b);
        KahanSum low;
        KahanSum high_mass;
        for (std::size_t i = 0; i < modes; ++i) {
            if (c2[i] == 0.0) continue;
            if (xi_norm[i] <= cutoff) {
                KahanSum osc;
                for (std::size_t k = 1; k < v.size(); ++k) {
                    double half = 0.5 * (v[k] - v[k - 1]) * w[i];
                    double s2 = std::sin(half);
                    osc.add(4.0 * s2 * s2);
                }
                low.add(osc.value() * c2[i]);
            } else {
                high_mass.add(c2[i]);
            }
        }
        rep.low_terms[jj] = std::pow(2.0, b * j) * low.value() * cell;
        rep.high_terms[jj] = static_cast<double>(v.size()) * high_mass.value() * cell;
    });

    KahanSum ls, hs;
    for (double x : rep.low_terms) ls.add(x);
    for (double x : rep.high_terms) hs.add(x);
    rep.low_sum = ls.value();
    rep.high_sum = hs.value();
    double h = h_s_norm(f, p.s);
    rep.hs_sq = h * h;
    return rep;
}

IntervalSupReport interval_sup_check(const SpectralFunction& f, double left, double r,
                                     const ExponentParams& p, int time_mesh,
                                     int resolution) {
    p.validate();
    if (r < 0.0 || !std::isfinite(r)) fail("interval_sup_check: need r >= 0");
    if (time_mesh < 1) fail("interval_sup_check: time_mesh must be >= 1");
    const auto& grid = f.grid();
    if (grid.dim() != p.n) fail("interval_sup_check: params.n does not match grid dim");
    check_resolution(grid, resolution, "interval_sup_check");

    auto pts = lattice_points(grid, resolution);
    std::size_t nmesh = static_cast<std::size_t>(time_mesh) + 1;
    std::vector<std::vector<cplx>> fields(nmesh);
    for (std::size_t i = 0; i < nmesh; ++i) {
        double t = left + r * static_cast<double>(i) / time_mesh;
        fields[i] = evaluate(f, t, p, pts);
    }

    std::vector<double> worst(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t j) {
        double best = 0.0;
        for (std::size_t i1 = 0; i1 < nmesh; ++i1)
            for (std::size_t i2 = i1 + 1; i2 < nmesh; ++i2) {
                double d = std::norm(fields[i1][j] - fields[i2][j]);
                if (d > best) best = d;
            }
        worst[j] = best;
    });
    double cellx = grid.period() / resolution;
    double weight = grid.dim() == 1 ? cellx : cellx * cellx;
    KahanSum acc;
    for (double v : worst) acc.add(v);

    double A = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.coeff(i) != cplx{0.0, 0.0}) A = std::max(A, grid.frequency_norm(i));
    double h0 = h_s_norm(f, 0.0);
    double inv2pi = grid.dim() == 1 ? 1.0 / two_pi : 1.0 / (two_pi * two_pi);

    IntervalSupReport rep;
    rep.time_mesh = time_mesh;
    rep.lhs = acc.value() * weight;
    rep.rhs_bound = r * r * std::pow(A, 2.0 * p.a) * inv2pi * h0 * h0;
    return rep;
}

} // namespace maxlab
