#pragma once
#include <functional>
#include <span>
#include <vector>

#include "maxlab/spectral.hpp"

// The divergence construction: annulus bumps phi(2^{-nu} xi), the
// near-optimal time choice t = 1/log k per point, lower bounds for
// ||sup_t |S_t f_nu|||_2 / ||f_nu||_2 and their growth in nu, and the
// stationary-phase floor that explains the growth rate.

namespace maxlab {

// Even C-infinity profile: 1 on [0.9, 1.1] xi_c, smooth exp-based ramps down
// to 0 at |xi| = 1/A and |xi| = A, where xi_c = a^{-1/(a-1)} is the critical
// radius of |xi|^a + xi. Requires a > 1, A > 1, 1/A < 0.9 xi_c, A > 1.1 xi_c.
struct BumpSpec {
    double a = 2.0;
    double A = 16.0;
    double critical_radius() const;
    void validate() const;
    // Default annulus: wide enough that the stationary-phase asymptote is
    // reached by lambda ~ 8, which the growth-rate window needs at nu <= 12.
    static BumpSpec standard(double a);
};

// C-infinity step: 0 for u <= 0, 1 for u >= 1, h(u)/(h(u)+h(1-u)) between,
// h(u) = e^{-1/u}.
double smooth_step(double u);

// The profile function phi as a callable on R (vectorized by callers).
std::function<double(double)> bump_phi(const BumpSpec& spec);

// f_nu with fhat(xi) = phi(2^{-nu} |xi|_or_coordinate) sampled on the grid;
// for dim 2 the second coordinate carries the fixed psi factor. The grid must
// resolve the dilated annulus: spacing <= (A - 1/A) 2^nu / 64 and band limit
// >= A 2^nu, else std::invalid_argument spells out the required values.
SpectralFunction make_f_nu(int nu, const BumpSpec& spec, const FrequencyGrid& grid);

// Fixed even plateau profile for the second coordinate in dim 2: 1 on [-1,1],
// smooth ramps to 0 at |u| = 2.
double psi_profile(double u);

// Near-optimal time for the lower bound at position x: the target is
// tau = x 2^{nu(1-a)} / ... reduced to tau with e^{-1/t} stationary weight;
// among the admissible times t_k = 1/log k (k >= 3) the nearest to tau is
// returned when k* = e^{1/tau} is representable (searched exactly around
// round(e^{1/tau})); beyond that t = tau itself is returned with
// below_representable set and error_bound = tau^2 e^{-1/tau} (the substitution
// cost |t_k - tau| <= gap ~ tau^2/k*). Requires x in [C 2^{-nu}, 1], C >= 4.
struct TimeChoice {
    double t = 0.0;
    double error_bound = 0.0;
    bool exact_member = false;      // t is exactly some 1/log k
    bool below_representable = false;
};
TimeChoice optimal_time(double x, int nu, const ExponentParams& p);

struct GrowthRow {
    int nu = 0;
    double norm_f = 0.0;        // spatial L2 norm of f_nu
    double lower_bound = 0.0;   // quadrature lower bound for ||sup_t |S_t f||_2
    double ratio = 0.0;         // lower_bound / norm_f
    double residual = 0.0;      // log-log fit residual for this row
};

struct GrowthOptions {
    double mesh_constant = 8.0; // C: x-mesh on [C 2^{-nu}, 1]
    int mesh_points = 256;      // log-spaced x samples
    int dim = 1;                // 1 or 2 (dim 2 runs the tensor factorization)
    bool sensitivity = true;    // re-fit at C in {4, 16} for the metadata
};

struct GrowthTable {
    std::vector<GrowthRow> rows;
    double fitted_exponent = 0.0;   // LS slope of log ratio against log nu
    double fit_intercept = 0.0;
    double mesh_constant = 8.0;
    int mesh_points = 0;
    int dim = 1;
    double psi_factor = 1.0;        // dim-2 second-coordinate constant, 1 in dim 1
    std::vector<std::pair<double, double>> sensitivity; // (C, fitted exponent)
    double max_time_error = 0.0;    // worst optimal_time error_bound used
};

// Evaluates |S_{t(x)} f_nu(x)| on the x-mesh with t(x) = optimal_time, lower
// bounds the maximal L2 norm by trapezoid quadrature over the mesh, and fits
// log(ratio) against log(nu) for nu = nu_lo..nu_hi. dim 2 is computed by the
// exact tensor factorization through psi_profile (the dim-2 report equals the
// dim-1 ratios; norms and bounds carry the psi constants). Work parallelizes
// over mesh points; outputs are mesh-order reductions, deterministic.
GrowthTable growth_experiment(int nu_lo, int nu_hi, const ExponentParams& p,
                              const BumpSpec& spec, const GrowthOptions& opt);

// I(lambda) = integral e^{i lambda (|xi|^a + xi)} phi(xi) dxi over the support
// of phi, composite Simpson with at least 32 nodes per 2 pi of phase range
// per component (floor 4096 nodes; budgets above 2^26 nodes are rejected).
cplx oscillatory_integral(double lambda, const BumpSpec& spec);

// Critical point of |xi|^a + xi inside [-A, -1/A] by bisection on the phase
// derivative (it is -critical_radius()).
double critical_point(const BumpSpec& spec);

struct StationaryPhaseResult {
    double integral_abs = 0.0;   // |I(2^nu x)|
    double predicted_floor = 0.0; // floor_c * 2^{-nu/2} * x^{-1/2}
    double lambda = 0.0;
};
// Requires x in [4 2^{-nu}, 1].
StationaryPhaseResult stationary_phase_check(int nu, double x, const BumpSpec& spec,
                                             double floor_c);

// Calibrates the floor constant: min over the given nus and a log x-mesh of
// |I(2^nu x)| sqrt(2^nu x).
double calibrate_floor(const BumpSpec& spec, std::span<const int> nus,
                       int samples_per_nu, double mesh_constant);

} // namespace maxlab
