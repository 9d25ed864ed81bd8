#pragma once
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "maxlab/spectral.hpp"
#include "maxlab/timesets.hpp"

// Discrete maximal function sup_{t in E} |S_t f| on a spatial quadrature
// lattice, the ratio ||sup|S_t f|||_2^2 / (sum * ||f||_{H_s}^2) against the
// covering sufficiency sum, low/high frequency splittings along a dyadic
// time-class profile, and the short-interval oscillation bound.

namespace maxlab {

struct MaximalReport {
    std::vector<Point> x_points;      // lattice_points(grid, resolution)
    std::vector<double> max_values;   // max_{t in E} |S_t f(x)| per point
    double l2_sq = 0.0;               // (L/R)^n sum_x max^2 (plain quadrature)
    double hs_sq = 0.0;               // h_s_norm(f, s)^2
    double sum_value = 0.0;           // sufficiency sum with saturated tail
    double ratio = 0.0;               // l2_sq / (sum_value * hs_sq)
    int sum_m_max = 0;
    bool sum_saturated = false;
};

// resolution >= 2(2M+1) required (quadrature exactness for |S_t f|^2).
// Per-t fields are evaluated via a precomputed point-by-mode phasor table;
// mode order and max-reduction order are fixed, so reruns are bit-identical.
// The sufficiency sum runs to m = 40; once N_E(2^-m) saturates at #E the
// remaining geometric tail 2^{-2ms/a} is added in closed form (skipped when
// s = 0 makes the tail non-summable).
MaximalReport maximal_field(const SpectralFunction& f, const TimeSet& E,
                            const ExponentParams& p, int resolution);

enum class SamplerKind { gaussian, single_mode };

struct SweepStats {
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    int trials = 0;
    std::vector<double> ratios;
};

// Draws `trials` coefficient vectors on `grid` (gaussian: iid standard complex
// normals via Box-Muller on one seeded mt19937_64 stream, so a longer sweep
// extends a shorter one trial-for-trial; single_mode: unit coefficient on a
// uniformly drawn mode) and reports maximal_field ratios.
SweepStats theorem4_ratio_sweep(const FrequencyGrid& grid, const TimeSet& E,
                                const ExponentParams& p, int resolution,
                                int trials, SamplerKind sampler, std::uint64_t seed);

// Frequency split at |xi| <= cutoff / |xi| > cutoff; the two parts sum to f
// exactly (coefficients are copied).
std::pair<SpectralFunction, SpectralFunction> lowhigh_split(const SpectralFunction& f,
                                                            double cutoff);

// Chaining mesh for dyadic class j: {0}, the times of E in (2^{-j-1}, 2^{-j}],
// and the class endpoint 2^{-j}, each consecutive gap subdivided uniformly to
// at most 2^{-j} 2^{-bj} (the chain starts at t = 0 where S_0 f = f).
// Requires j >= 1, b >= 0.
std::vector<double> augmented_class(const TimeSet& ts, int j, double b);

// Spectral-side evaluation of the two truncation sums over j = 1..j_max with
// per-class cutoffs 2^{b1 j}, b1 = b/(2s):
//   low_terms[j-1]  = 2^{bj} sum_k sum_{|xi| <= cutoff_j}
//                     |e^{i v_k w} - e^{i v_{k-1} w}|^2 |fhat|^2 dxi^n
//   high_terms[j-1] = #augmented_class(j) * sum_{|xi| > cutoff_j} |fhat|^2 dxi^n
// (w = |xi|^a, v the augmented class). Every class j = 1..j_max must be
// nonempty in E, else std::invalid_argument names the first empty one.
struct Theorem3Report {
    std::vector<double> low_terms;
    std::vector<double> high_terms;
    double low_sum = 0.0;
    double high_sum = 0.0;
    double hs_sq = 0.0;
    int j_max = 0;
    double b = 0.0;
};
Theorem3Report theorem3_sums(const SpectralFunction& f, const TimeSet& ts,
                             const ExponentParams& p, double b, int j_max);

// Worst mesh-pair oscillation over a short time interval [left, left + r]:
//   lhs = (L/R)^n sum_x max_{i,j} |S_{t_i} f(x) - S_{t_j} f(x)|^2
//   rhs = r^2 A^{2a} (2*pi)^{-n} h0^2,  A = max |xi| with fhat(xi) != 0
// (h0 the H_0 norm), which dominates lhs with constant 1 in exact arithmetic.
// r = 0 is the legal degenerate case (lhs = 0); r < 0 and time_mesh < 1 are
// rejected. resolution as in maximal_field.
struct IntervalSupReport {
    double lhs = 0.0;
    double rhs_bound = 0.0;
    int time_mesh = 0;
};
IntervalSupReport interval_sup_check(const SpectralFunction& f, double left, double r,
                                     const ExponentParams& p, int time_mesh,
                                     int resolution);

} // namespace maxlab
