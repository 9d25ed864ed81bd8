#include "maxlab/timesets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxlab/threads.hpp"

namespace maxlab {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Dyadic class of t in (0, 1/2]: the j >= 1 with t in (2^{-j-1}, 2^{-j}].
int dyadic_class_of(double t) {
    int j = static_cast<int>(std::floor(-std::log2(t) + 1e-12));
    return j;
}

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y) {
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}
} // namespace

TimeSet::TimeSet(std::vector<double> ascending) : times_(std::move(ascending)) {
    if (times_.empty()) fail("TimeSet: empty");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !(times_[i] > 0.0) || !(times_[i] <= 1.0))
            fail("TimeSet: times must lie in (0, 1]");
        if (i > 0 && !(times_[i] > times_[i - 1]))
            fail("TimeSet: times must be strictly increasing");
    }
}

TimeSet seq_generate(const SeqDescriptor& d) {
    std::vector<double> ts;
    switch (d.kind) {
    case SeqKind::power: {
        if (!(d.param > 0.0)) fail("seq_generate: power needs p > 0");
        if (d.count < 1) fail("seq_generate: count must be >= 1");
        ts.resize(d.count);
        for (int k = 1; k <= d.count; ++k)
            ts[static_cast<std::size_t>(d.count - k)] = std::pow(static_cast<double>(k), -d.param);
        break;
    }
    case SeqKind::log_reciprocal: {
        if (d.count < 1) fail("seq_generate: count must be >= 1");
        ts.resize(d.count);
        for (int k = 3; k <= d.count + 2; ++k)
            ts[static_cast<std::size_t>(d.count + 2 - k)] = 1.0 / std::log(static_cast<double>(k));
        break;
    }
    case SeqKind::geometric: {
        if (!(d.param > 0.0 && d.param < 1.0)) fail("seq_generate: geometric needs 0 < r < 1");
        if (d.count < 1) fail("seq_generate: count must be >= 1");
        ts.resize(d.count);
        for (int k = 1; k <= d.count; ++k)
            ts[static_cast<std::size_t>(d.count - k)] = std::pow(d.param, k);
        break;
    }
    case SeqKind::explicit_list: {
        if (d.times.empty()) fail("seq_generate: explicit list is empty");
        ts = d.times;
        std::reverse(ts.begin(), ts.end());
        break;
    }
    }
    return TimeSet(std::move(ts)); // ctor re-validates range and monotonicity
}

DyadicProfile dyadic_classes(const TimeSet& ts, int j_max) {
    if (j_max < 0) fail("dyadic_classes: j_max must be >= 0");
    DyadicProfile prof;
    prof.counts.assign(static_cast<std::size_t>(j_max) + 1, 0);
    for (double t : ts.times()) {
        std::size_t j = t > 0.5 ? 0 : static_cast<std::size_t>(dyadic_class_of(t));
        if (j >= prof.counts.size()) prof.counts.resize(j + 1, 0);
        ++prof.counts[j];
    }
    std::vector<double> xs, ys;
    for (std::size_t j = 1; j < prof.counts.size(); ++j)
        if (prof.counts[j] > 0) {
            xs.push_back(static_cast<double>(j));
            ys.push_back(std::log2(static_cast<double>(prof.counts[j])));
        }
    prof.fit_bins = static_cast<int>(xs.size());
    prof.b_fit = xs.size() >= 2 ? ls_slope(xs, ys) : 0.0;
    return prof;
}

CantorApprox::CantorApprox(double lambda, int level, std::vector<Interval> intervals)
    : lambda_(lambda), level_(level), intervals_(std::move(intervals)) {
    if (!(lambda > 0.0 && lambda < 0.5)) fail("CantorApprox: need 0 < lambda < 1/2");
    if (level < 0 || level > 30) fail("CantorApprox: level must be in [0, 30]");
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (!(intervals_[i].right >= intervals_[i].left))
            fail("CantorApprox: degenerate interval");
        if (i > 0 && !(intervals_[i].left > intervals_[i - 1].right))
            fail("CantorApprox: intervals must be sorted and disjoint");
    }
}

double CantorApprox::resolution_limit() const { return std::pow(lambda_, level_); }

CantorApprox cantor_build(double lambda, int level) {
    if (!(lambda > 0.0 && lambda < 0.5)) fail("cantor_build: need 0 < lambda < 1/2");
    if (level < 0 || level > 30) fail("cantor_build: level must be in [0, 30]");
    std::vector<Interval> cur{{0.0, 1.0}};
    for (int k = 0; k < level; ++k) {
        std::vector<Interval> next;
        next.reserve(cur.size() * 2);
        for (const auto& iv : cur) {
            double len = iv.right - iv.left;
            next.push_back({iv.left, iv.left + lambda * len});
            next.push_back({iv.right - lambda * len, iv.right});
        }
        cur = std::move(next);
    }
    return CantorApprox(lambda, level, std::move(cur));
}

double cantor_dimension(double lambda) {
    if (!(lambda > 0.0 && lambda < 0.5)) fail("cantor_dimension: need 0 < lambda < 1/2");
    return std::log(2.0) / std::log(1.0 / lambda);
}

std::size_t covering_number(std::span<const double> sorted_points, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) fail("covering_number: need r > 0");
    if (sorted_points.empty()) return 0;
    for (std::size_t i = 1; i < sorted_points.size(); ++i)
        if (!(sorted_points[i] >= sorted_points[i - 1]))
            fail("covering_number: points must be sorted ascending");
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < sorted_points.size()) {
        ++n;
        double lim = sorted_points[i] + r;
        double tol = 1e-12 * std::max(1.0, std::fabs(lim));
        while (i < sorted_points.size() && sorted_points[i] <= lim + tol) ++i;
    }
    return n;
}

std::size_t covering_number(const TimeSet& ts, double r) {
    return covering_number(ts.times(), r);
}

std::size_t covering_number(std::span<const Interval> disjoint_sorted, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) fail("covering_number: need r > 0");
    std::size_t n = 0;
    double covered = -std::numeric_limits<double>::infinity();
    for (const auto& iv : disjoint_sorted) {
        if (!(iv.right >= iv.left)) fail("covering_number: degenerate interval");
        double tol = 1e-12 * std::max(1.0, std::fabs(iv.right));
        if (iv.right <= covered + tol) continue;
        double c = std::max(iv.left, covered);
        double q = (iv.right - c) / r;
        double k = std::max(1.0, std::ceil(q - 1e-9));
        n += static_cast<std::size_t>(k);
        covered = c + k * r;
    }
    return n;
}

std::size_t covering_number(const Interval& iv, double r) {
    const Interval one[1] = {iv};
    return covering_number(std::span<const Interval>(one), r);
}

std::size_t covering_number(const CantorApprox& ca, double r) {
    return covering_number(ca.intervals(), r);
}

std::size_t covering_number(const CoveringSet& E, double r) {
    return std::visit([&](const auto& e) { return covering_number(e, r); }, E);
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverging: return "diverging";
    default: return "inconclusive";
    }
}

SufficiencyReport sufficiency_sum(const CoveringSet& E, double s, double a, int m_max) {
    if (!(a > 0.0) || !std::isfinite(a)) fail("sufficiency_sum: need a > 0");
    if (!(s >= 0.0) || !std::isfinite(s)) fail("sufficiency_sum: need s >= 0");
    if (m_max < 0) fail("sufficiency_sum: m_max must be >= 0");
    if (const auto* ca = std::get_if<CantorApprox>(&E)) {
        double finest = std::ldexp(1.0, -m_max);
        if (finest < ca->resolution_limit() * (1.0 - 1e-9)) {
            int valid = static_cast<int>(std::floor(
                ca->level() * std::log2(1.0 / ca->lambda()) + 1e-9));
            fail("sufficiency_sum: 2^-m_max below the Cantor approximation resolution "
                 "lambda^level; largest valid m_max is " + std::to_string(valid));
        }
    }
    const std::size_t set_size =
        std::holds_alternative<TimeSet>(E) ? std::get<TimeSet>(E).size() : 0;

    SufficiencyReport rep;
    rep.terms.reserve(static_cast<std::size_t>(m_max) + 1);
    rep.partial_sums.reserve(static_cast<std::size_t>(m_max) + 1);
    KahanSum acc;
    for (int m = 0; m <= m_max; ++m) {
        double r = std::ldexp(1.0, -m);
        std::size_t N = covering_number(E, r);
        if (set_size && N == set_size && !rep.saturation_m) rep.saturation_m = m;
        double term = static_cast<double>(N) * std::pow(2.0, -2.0 * s * m / a);
        rep.terms.push_back(term);
        acc.add(term);
        rep.partial_sums.push_back(acc.value());
    }

    std::size_t w = std::min<std::size_t>(8, rep.terms.size());
    if (w >= 2) {
        double first = rep.terms[rep.terms.size() - w];
        double last = rep.terms.back();
        rep.window_ratio = std::pow(last / first, 1.0 / static_cast<double>(w - 1));
        if (rep.window_ratio < 0.95) rep.verdict = Verdict::converged;
        else if (rep.window_ratio >= 0.995) rep.verdict = Verdict::diverging;
        else rep.verdict = Verdict::inconclusive;
    }

    double rho_exact = std::pow(2.0, -2.0 * s / a);
    if (rep.saturation_m && rho_exact < 1.0)
        rep.tail_estimate = rep.terms.back() * rho_exact / (1.0 - rho_exact);
    else if (rep.verdict == Verdict::converged && rep.window_ratio < 1.0)
        rep.tail_estimate = rep.terms.back() * rep.window_ratio / (1.0 - rep.window_ratio);
    return rep;
}

ExponentReport exponents(const ExponentParams& p) {
    p.validate();
    ExponentReport rep;
    const double a = p.a, s = p.s;
    const double n = static_cast<double>(p.n);
    if (s < a) {
        rep.gamma = 2.0 * s / (a - s);
        rep.b_max = rep.gamma;
    } else {
        rep.flags.push_back("gamma undefined: s >= a");
    }
    rep.p0 = 2.0 / (1.0 + 2.0 * s / (n * a));
    if (p.n == 1 && s >= a / 2.0) {
        rep.interval = {1.0, 2.0, true};
        rep.flags.push_back("exponent interval collapsed to (1, 2]");
    } else {
        rep.interval = {rep.p0, 2.0, false};
    }
    rep.cantor_threshold = 2.0 * s / a;
    if (s > 0.0) {
        rep.inv_gamma_bound = (a - 2.0 * s) / (2.0 * s);
        if (a < 2.0 * s)
            rep.flags.push_back("reciprocal-gamma bound vacuous: a < 2s");
        if (s > 0.5)
            rep.flags.push_back("outside the 0 < s <= 1/2 hypothesis");
    } else {
        rep.flags.push_back("s = 0: no convergence exponents");
    }
    if (rep.cantor_threshold > 1.0)
        rep.flags.push_back("2s/a > 1: sums converge for every subset of (0, 1]");
    return rep;
}

Lemma6Report lemma6_check(const TimeSet& ts, double b, int m_max) {
    if (!(b >= 0.0) || !std::isfinite(b)) fail("lemma6_check: need b >= 0");
    if (m_max < 0) fail("lemma6_check: m_max must be >= 0");
    Lemma6Report rep;
    DyadicProfile prof = dyadic_classes(ts, m_max);

    std::vector<std::size_t> bins;
    for (std::size_t j = 1; j < prof.counts.size(); ++j)
        if (prof.counts[j] > 0) bins.push_back(j);
    std::size_t head = bins.empty() ? 0 : std::max<std::size_t>(1, (bins.size() + 1) / 2);
    double C = 0.0;
    for (std::size_t k = 0; k < head; ++k) {
        double ratio = static_cast<double>(prof.counts[bins[k]]) /
                       std::pow(2.0, b * static_cast<double>(bins[k]));
        C = std::max(C, ratio);
    }
    rep.fitted_C = C;
    rep.precondition_ok = true;
    for (std::size_t k = head; k < bins.size(); ++k) {
        double ratio = static_cast<double>(prof.counts[bins[k]]) /
                       std::pow(2.0, b * static_cast<double>(bins[k]));
        if (ratio > 1.5 * C) {
            rep.precondition_ok = false;
            rep.violating_j = static_cast<int>(bins[k]);
            break;
        }
    }

    for (int m = 0; m <= m_max; ++m) {
        double r = std::ldexp(1.0, -m);
        double N = static_cast<double>(covering_number(ts, r));
        double ratio = N / std::pow(2.0, b * m / (b + 1.0));
        rep.ratios.push_back(ratio);
        rep.empirical_C = std::max(rep.empirical_C, ratio);
    }
    return rep;
}

} // namespace maxlab
