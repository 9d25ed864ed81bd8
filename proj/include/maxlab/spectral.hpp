#pragma once
#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

// Band-limited realization of the fractional propagator on the torus.
//
// Conventions, fixed once here and used by every module:
//   lattice      xi_m = (2*pi/L) m,  m integer vector, |m_i| <= M, dim n in {1,2}
//   propagator   S_t f(x) = (2*pi)^{-n} sum_m e^{i xi_m.x} e^{i t |xi_m|^a} fhat(xi_m) dxi^n
//   H_s norm     ( sum_m (1+|xi_m|^2)^s |fhat(xi_m)|^2 dxi^n )^{1/2},  dxi = 2*pi/L
//   Bessel op    multiplies fhat by (1+|xi|^2)^{-s/2}
// so with dxi = 1 (L = 2*pi) the spatial L^2 norm over one period equals
// (2*pi)^{-n/2} times the H_0 norm (Plancherel with the (2*pi)^{-n} front factor).
// Mode order is lexicographic in m (first coordinate outer), which pins the
// summation order of every reduction; large reductions are Kahan-compensated.

namespace maxlab {

using cplx = std::complex<double>;
using Point = std::array<double, 2>; // spatial point or frequency; dim-1 uses [0]

// Dispersion exponent a, Sobolev index s, dimension n.
// a > 0 and n in {1,2} are hard requirements; s >= 0 (the convergence
// statements need s > 0, but degenerate s = 0 reports are legal).
struct ExponentParams {
    double a = 2.0;
    double s = 0.5;
    int n = 1;
    void validate() const; // throws std::invalid_argument
};

class FrequencyGrid {
public:
    // dim in {1,2}, period L > 0, mode_bound M >= 0.
    FrequencyGrid(int dim, double period, int mode_bound);

    int dim() const { return dim_; }
    double period() const { return period_; }
    int mode_bound() const { return mode_bound_; }
    double spacing() const { return spacing_; }          // 2*pi/L
    std::size_t mode_count() const { return count_; }    // (2M+1)^dim
    double cell_weight() const;                          // spacing^dim

    // Lexicographic enumeration of m in [-M, M]^dim.
    std::array<int, 2> mode(std::size_t idx) const;
    std::size_t index(const std::array<int, 2>& m) const;
    Point frequency(std::size_t idx) const;  // xi_m
    double frequency_norm(std::size_t idx) const; // |xi_m|
    double band_limit() const;               // max |xi_m| over the lattice

    bool operator==(const FrequencyGrid&) const = default;

private:
    int dim_;
    double period_;
    int mode_bound_;
    double spacing_;
    std::size_t count_;
};

// Coefficient vector fhat on a FrequencyGrid, mode order as the grid's.
class SpectralFunction {
public:
    explicit SpectralFunction(FrequencyGrid grid);
    SpectralFunction(FrequencyGrid grid, std::vector<cplx> coeffs); // size checked

    const FrequencyGrid& grid() const { return grid_; }
    std::span<const cplx> coeffs() const { return coeffs_; }
    std::span<cplx> coeffs() { return coeffs_; }
    cplx coeff(std::size_t idx) const { return coeffs_[idx]; }
    cplx& coeff(std::size_t idx) { return coeffs_[idx]; }
    std::size_t size() const { return coeffs_.size(); }

private:
    FrequencyGrid grid_;
    std::vector<cplx> coeffs_;
};

// Pointwise arithmetic; grids must compare equal (checked).
SpectralFunction operator+(const SpectralFunction& f, const SpectralFunction& g);
SpectralFunction operator-(const SpectralFunction& f, const SpectralFunction& g);
SpectralFunction operator*(cplx z, const SpectralFunction& f);

// fhat(xi_m) = symbol(xi_m). A non-finite symbol value throws, naming the
// offending frequency in the message.
SpectralFunction sample_symbol(const FrequencyGrid& grid,
                               const std::function<cplx(const Point&)>& symbol);

// Multiplies each coefficient by e^{i t |xi|^a}. Unitary on every H_s.
SpectralFunction propagate(const SpectralFunction& f, double t, const ExponentParams& p);

// S_t f at the given spatial points (coordinates must lie in [0, L]).
std::vector<cplx> evaluate(const SpectralFunction& f, double t, const ExponentParams& p,
                           std::span<const Point> points);

// Uniform spatial lattice x_j = (L/resolution) j, j in [0, resolution)^dim,
// lexicographic order; the quadrature mesh used by the maximal module.
std::vector<Point> lattice_points(const FrequencyGrid& grid, int resolution);

// Recovers coefficients from values of evaluate(f, 0, ., lattice_points(grid, R)).
// Exact (up to rounding) when R >= 2M+1; R below that is rejected.
SpectralFunction analyze_lattice(const FrequencyGrid& grid, std::span<const cplx> values,
                                 int resolution);

double h_s_norm(const SpectralFunction& f, double s);
SpectralFunction bessel_apply(const SpectralFunction& f, double s);

// sup over the lattice of |(e^{i d |xi|^a} - 1)| (1+|xi|^2)^{-s/2}.
// Requires 0 < d < 1, a > 1, 0 < s < a; the sup is attained well inside the
// band only when the band limit exceeds sqrt(pi/d), which is the caller's
// business (the multiplier experiment checks it).
double delta_multiplier_sup(const FrequencyGrid& grid, double delta,
                            const ExponentParams& p);

// |t-u| sum_m |xi_m|^a |fhat(xi_m)| dxi^n / (2*pi)^n, a uniform bound for
// sup_x |S_t f(x) - S_u f(x)| (|e^{i h}-1| <= |h| termwise).
double lipschitz_time_bound(const SpectralFunction& f, double t, double u,
                            const ExponentParams& p);

// Sharp annulus pieces: piece 0 holds |xi| <= 1, piece k >= 1 holds
// 2^{k-1} < |xi| <= 2^k, up to K = max(0, ceil(log2 band_limit)). Pieces sum
// to f exactly (coefficients are copied, never recomputed).
std::vector<SpectralFunction> dyadic_decompose(const SpectralFunction& f);

} // namespace maxlab
