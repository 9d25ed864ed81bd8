#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include "maxlab/maximal.hpp"

using namespace maxlab;
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

cplx normal_draw(std::mt19937_64& gen) {
    auto unit = [&gen] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53; };
    double u1 = unit(), u2 = unit();
    double rad = std::sqrt(-2.0 * std::log(u1));
    return {rad * std::cos(two_pi * u2) / std::numbers::sqrt2,
            rad * std::sin(two_pi * u2) / std::numbers::sqrt2};
}

SpectralFunction random_f(const FrequencyGrid& g, std::mt19937_64& gen) {
    SpectralFunction f{g};
    for (std::size_t i = 0; i < f.size(); ++i) f.coeff(i) = normal_draw(gen);
    return f;
}

// Reference maximal values: one evaluate() call per time, running pointwise
// max. Exercises a different accumulation path than the phasor-table field.
std::vector<double> maximal_by_evaluate(const SpectralFunction& f, const TimeSet& E,
                                        const ExponentParams& p,
                                        const std::vector<Point>& pts) {
    std::vector<double> best(pts.size(), 0.0);
    for (double t : E.times()) {
        auto vals = evaluate(f, t, p, pts);
        for (std::size_t j = 0; j < pts.size(); ++j)
            best[j] = std::max(best[j], std::abs(vals[j]));
    }
    return best;
}

} // namespace

TEST_CASE("maximal_field agrees with a per-time evaluate sweep") {
    std::mt19937_64 gen(1);
    ExponentParams p{2.0, 0.7, 1};
    FrequencyGrid g{1, two_pi, 8};
    SpectralFunction f = random_f(g, gen);
    TimeSet E = seq_generate({SeqKind::geometric, 0.5, 12, {}});
    MaximalReport rep = maximal_field(f, E, p, 40);
    auto want = maximal_by_evaluate(f, E, p, rep.x_points);
    REQUIRE(rep.max_values.size() == want.size());
    for (std::size_t j = 0; j < want.size(); ++j)
        CHECK(rep.max_values[j] == doctest::Approx(want[j]).epsilon(1e-11));

    // quadrature weight and norms recomputed from the reported field
    double acc = 0.0;
    for (double v : rep.max_values) acc += v * v;
    acc *= two_pi / 40.0;
    CHECK(rep.l2_sq == doctest::Approx(acc).epsilon(1e-12));
    double hs = h_s_norm(f, p.s);
    CHECK(rep.hs_sq == doctest::Approx(hs * hs).epsilon(1e-12));
    CHECK(rep.ratio == doctest::Approx(rep.l2_sq / (rep.sum_value * rep.hs_sq)));

    CHECK_THROWS_AS(maximal_field(f, E, p, 33), std::invalid_argument);
}

TEST_CASE("singleton time set at s = 0: unitarity pins the ratio") {
    std::mt19937_64 gen(2);
    ExponentParams p{2.0, 0.0, 1};
    FrequencyGrid g{1, two_pi, 6};
    SpectralFunction f = random_f(g, gen);
    TimeSet single{{1.0}};
    MaximalReport rep = maximal_field(f, single, p, 26);
    // N_E(2^-m) = 1 for every m = 0..40 and the s = 0 tail is dropped
    CHECK(rep.sum_value == 41.0);
    CHECK(rep.sum_saturated);
    // |S_1 f| has the same L2 mass as f, so ratio * sum = (2 pi)^{-1}
    CHECK(rep.ratio * rep.sum_value == doctest::Approx(1.0 / two_pi).epsilon(1e-12));
}

TEST_CASE("maximal field: dominance, subadditivity, absolute homogeneity") {
    std::mt19937_64 gen(3);
    ExponentParams p{2.0, 0.5, 1};
    FrequencyGrid g{1, two_pi, 6};
    SpectralFunction f = random_f(g, gen);
    SpectralFunction h = random_f(g, gen);
    TimeSet small{{0.2, 0.8}};
    TimeSet big{{0.1, 0.2, 0.5, 0.8}};
    int res = 26;
    MaximalReport rs = maximal_field(f, small, p, res);
    MaximalReport rb = maximal_field(f, big, p, res);
    MaximalReport rh = maximal_field(h, big, p, res);
    MaximalReport rsum = maximal_field(f + h, big, p, res);
    MaximalReport rscaled = maximal_field(cplx{0.0, -2.5} * f, big, p, res);
    double scale = h_s_norm(f, 0.0) + h_s_norm(h, 0.0);
    for (std::size_t j = 0; j < rs.max_values.size(); ++j) {
        CHECK(rb.max_values[j] >= rs.max_values[j] * (1.0 - 1e-12));
        CHECK(rsum.max_values[j] <=
              rb.max_values[j] + rh.max_values[j] + 1e-12 * scale);
        CHECK(rscaled.max_values[j] == doctest::Approx(2.5 * rb.max_values[j]).epsilon(1e-12));
    }
}

TEST_CASE("maximal_field sum matches sufficiency_sum on the same set") {
    ExponentParams p{2.0, 0.7, 1};
    FrequencyGrid g{1, two_pi, 4};
    SpectralFunction f{g};
    f.coeff(g.index({1, 0})) = 1.0;
    TimeSet E = seq_generate({SeqKind::geometric, 0.5, 9, {}});
    MaximalReport rep = maximal_field(f, E, p, 18);
    SufficiencyReport suff = sufficiency_sum(CoveringSet{E}, p.s, p.a, rep.sum_m_max);
    CHECK(rep.sum_value == doctest::Approx(suff.total()).epsilon(1e-14));
    CHECK(rep.sum_saturated == suff.saturation_m.has_value());
}

TEST_CASE("theorem4_ratio_sweep: longer sweeps extend shorter ones trial-for-trial") {
    ExponentParams p{2.0, 0.7, 1};
    FrequencyGrid g{1, two_pi, 6};
    TimeSet E = seq_generate({SeqKind::geometric, 0.5, 6, {}});
    SweepStats five = theorem4_ratio_sweep(g, E, p, 26, 5, SamplerKind::gaussian, 99);
    SweepStats ten = theorem4_ratio_sweep(g, E, p, 26, 10, SamplerKind::gaussian, 99);
    REQUIRE(five.ratios.size() == 5);
    REQUIRE(ten.ratios.size() == 10);
    for (int i = 0; i < 5; ++i) CHECK(five.ratios[i] == ten.ratios[i]); // bitwise
    CHECK(five.max_ratio > 0.0);
    CHECK(ten.max_ratio >= five.max_ratio);

    SweepStats sm = theorem4_ratio_sweep(g, E, p, 26, 4, SamplerKind::single_mode, 7);
    for (double r : sm.ratios) CHECK(r > 0.0);

    SweepStats rerun = theorem4_ratio_sweep(g, E, p, 26, 10, SamplerKind::gaussian, 99);
    CHECK(rerun.ratios == ten.ratios);
}

TEST_CASE("lowhigh_split partitions the band and conserves energy") {
    std::mt19937_64 gen(4);
    FrequencyGrid g{1, two_pi, 8};
    SpectralFunction f = random_f(g, gen);
    auto [low, high] = lowhigh_split(f, 2.5);
    for (std::size_t i = 0; i < f.size(); ++i) {
        bool is_low = g.frequency_norm(i) <= 2.5;
        CHECK(low.coeff(i) == (is_low ? f.coeff(i) : cplx{0, 0}));
        CHECK(high.coeff(i) == (is_low ? cplx{0, 0} : f.coeff(i)));
    }
    double l0 = h_s_norm(low, 0.0), h0 = h_s_norm(high, 0.0), w0 = h_s_norm(f, 0.0);
    CHECK(l0 * l0 + h0 * h0 == doctest::Approx(w0 * w0).epsilon(1e-14));
    CHECK_THROWS_AS(lowhigh_split(f, -1.0), std::invalid_argument);
}

TEST_CASE("augmented_class: anchored at zero, capped gaps, members kept") {
    TimeSet geo = seq_generate({SeqKind::geometric, 0.5, 20, {}});
    auto mesh = augmented_class(geo, 3, 1.0);
    // single member 1/8 = class endpoint; gap cap 2^-3 * 2^-3 = 1/64
    REQUIRE(mesh.size() == 9);
    CHECK(mesh.front() == 0.0);
    CHECK(mesh.back() == 0.125);
    for (std::size_t k = 1; k < mesh.size(); ++k) {
        CHECK(mesh[k] > mesh[k - 1]);
        CHECK(mesh[k] - mesh[k - 1] <= 0.015625 * (1.0 + 1e-12));
    }

    // empty class: mesh degenerates to {0, 2^-j}
    TimeSet pow = seq_generate({SeqKind::power, 2.0, 5, {}});
    auto empty1 = augmented_class(pow, 1, 0.0);
    CHECK(empty1 == std::vector<double>{0.0, 0.5});

    // members of the class always appear as mesh nodes
    auto mesh2 = augmented_class(pow, 2, 0.3);
    bool has = false;
    for (double v : mesh2) has |= v == 0.25; // 1/4 lies in (1/8, 1/4]
    CHECK(has);

    CHECK_THROWS_AS(augmented_class(geo, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(augmented_class(geo, 1, -0.5), std::invalid_argument);
}

TEST_CASE("theorem3_sums: single low mode reproduced by a direct phase walk") {
    ExponentParams p{2.0, 0.5, 1};
    FrequencyGrid g{1, two_pi, 4};
    SpectralFunction f{g};
    f.coeff(g.index({1, 0})) = cplx{0.8, -0.6};
    TimeSet ts = seq_generate({SeqKind::geometric, 0.5, 8, {}});
    double b = 0.5;
    Theorem3Report rep = theorem3_sums(f, ts, p, b, 5);
    REQUIRE(rep.low_terms.size() == 5);
    CHECK(rep.high_sum == 0.0); // cutoff_j = 2^{j/2} > 1 = |xi| for every j
    for (int j = 1; j <= 5; ++j) {
        auto v = augmented_class(ts, j, b);
        double sum = 0.0; // |e^{i v_k w} - e^{i v_{k-1} w}|^2, w = 1
        for (std::size_t k = 1; k < v.size(); ++k)
            sum += std::norm(std::polar(1.0, v[k]) - std::polar(1.0, v[k - 1]));
        double want = std::pow(2.0, b * j) * sum * std::norm(f.coeff(g.index({1, 0})));
        CHECK(rep.low_terms[j - 1] == doctest::Approx(want).epsilon(1e-13));
    }
    double total = 0.0;
    for (double v : rep.low_terms) total += v;
    CHECK(rep.low_sum == doctest::Approx(total).epsilon(1e-14));
    double hs = h_s_norm(f, p.s);
    CHECK(rep.hs_sq == doctest::Approx(hs * hs));

    // a pure DC level neither oscillates nor exceeds any cutoff
    SpectralFunction dc{g};
    dc.coeff(g.index({0, 0})) = 3.0;
    Theorem3Report quiet = theorem3_sums(dc, ts, p, b, 5);
    CHECK(quiet.low_sum == 0.0);
    CHECK(quiet.high_sum == 0.0);
}

TEST_CASE("theorem3_sums: high-frequency mass counted per class") {
    ExponentParams p{2.0, 0.5, 1};
    FrequencyGrid g{1, two_pi, 8};
    SpectralFunction f{g};
    f.coeff(g.index({8, 0})) = 1.0;
    TimeSet ts = seq_generate({SeqKind::geometric, 0.5, 8, {}});
    double b = 0.5; // b1 = b / (2s) = 0.5: cutoff_j = 2^{j/2} reaches 8 at j = 6
    Theorem3Report rep = theorem3_sums(f, ts, p, b, 7);
    for (int j = 1; j <= 5; ++j) {
        double want = static_cast<double>(augmented_class(ts, j, b).size());
        CHECK(rep.high_terms[j - 1] == doctest::Approx(want).epsilon(1e-14));
        CHECK(rep.low_terms[j - 1] == 0.0);
    }
    CHECK(rep.high_terms[5] == 0.0);
    CHECK(rep.high_terms[6] == 0.0);
    CHECK(rep.low_terms[5] > 0.0);

    // t_k = k^-2 leaves (1/4, 1/2] empty: precondition violated
    TimeSet pow = seq_generate({SeqKind::power, 2.0, 50, {}});
    bool threw = false;
    try {
        theorem3_sums(f, pow, p, b, 3);
    } catch (const std::invalid_argument& e) {
        threw = true;
        CHECK(std::string(e.what()).find("j = 1") != std::string::npos);
    }
    CHECK(threw);

    CHECK_THROWS_AS(theorem3_sums(f, ts, ExponentParams{2.0, 0.0, 1}, b, 3),
                    std::invalid_argument);
}

TEST_CASE("interval_sup_check: degenerate interval and single-mode closed form") {
    ExponentParams p{2.0, 0.5, 1};
    FrequencyGrid g{1, two_pi, 4};
    SpectralFunction f{g};
    f.coeff(g.index({2, 0})) = 1.0;

    IntervalSupReport zero = interval_sup_check(f, 0.3, 0.0, p, 4, 18);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs_bound == 0.0);
    CHECK_THROWS_AS(interval_sup_check(f, 0.3, -0.1, p, 4, 18), std::invalid_argument);
    CHECK_THROWS_AS(interval_sup_check(f, 0.3, 0.1, p, 0, 18), std::invalid_argument);

    // one mode at xi = 2, a = 2: phase speed 4, worst pair is the endpoints
    double r = 0.05;
    IntervalSupReport rep = interval_sup_check(f, 0.25, r, p, 8, 18);
    double want_lhs = (2.0 / std::numbers::pi) * std::pow(std::sin(2.0 * r), 2);
    double want_rhs = r * r * std::pow(2.0, 4.0) / two_pi;
    CHECK(rep.lhs == doctest::Approx(want_lhs).epsilon(1e-9));
    CHECK(rep.rhs_bound == doctest::Approx(want_rhs).epsilon(1e-12));
    CHECK(rep.lhs <= rep.rhs_bound);
}

TEST_CASE("interval_sup_check bound dominates on random data") {
    std::mt19937_64 gen(6);
    ExponentParams p{2.0, 0.5, 1};
    FrequencyGrid g{1, two_pi, 8};
    for (int trial = 0; trial < 10; ++trial) {
        SpectralFunction f = random_f(g, gen);
        IntervalSupReport rep = interval_sup_check(f, 0.3, 0.01, p, 8, 34);
        CHECK(rep.lhs <= rep.rhs_bound * (1.0 + 1e-12));
        CHECK(rep.lhs > 0.0);
    }
}
