#include "maxlab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "maxlab/io.hpp"
#include "maxlab/threads.hpp"

namespace maxlab {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_same_grid(const SpectralFunction& f, const SpectralFunction& g,
                     const char* op) {
    if (!(f.grid() == g.grid()))
        fail(std::string(op) + ": operands live on different grids");
}

void check_dim(const FrequencyGrid& grid, const ExponentParams& p, const char* op) {
    if (grid.dim() != p.n)
        fail(std::string(op) + ": params.n = " + std::to_string(p.n) +
             " does not match grid dim = " + std::to_string(grid.dim()));
}

// |xi|^a per mode, the phase speeds; computed once per grid pass.
std::vector<double> phase_speeds(const FrequencyGrid& grid, double a) {
    std::vector<double> w(grid.mode_count());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::pow(grid.frequency_norm(i), a);
    return w;
}
} // namespace

void ExponentParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) fail("ExponentParams: a must be positive");
    if (!(s >= 0.0) || !std::isfinite(s)) fail("ExponentParams: s must be >= 0");
    if (n != 1 && n != 2) fail("ExponentParams: n must be 1 or 2");
}

FrequencyGrid::FrequencyGrid(int dim, double period, int mode_bound)
    : dim_(dim), period_(period), mode_bound_(mode_bound) {
    if (dim != 1 && dim != 2) fail("FrequencyGrid: dim must be 1 or 2");
    if (!(period > 0.0) || !std::isfinite(period)) fail("FrequencyGrid: period must be positive");
    if (mode_bound < 0) fail("FrequencyGrid: mode_bound must be >= 0");
    spacing_ = two_pi / period;
    std::size_t side = 2 * static_cast<std::size_t>(mode_bound) + 1;
    count_ = dim == 1 ? side : side * side;
}

double FrequencyGrid::cell_weight() const {
    return dim_ == 1 ? spacing_ : spacing_ * spacing_;
}

std::array<int, 2> FrequencyGrid::mode(std::size_t idx) const {
    if (idx >= count_) fail("FrequencyGrid::mode: index out of range");
    std::size_t side = 2 * static_cast<std::size_t>(mode_bound_) + 1;
    if (dim_ == 1) return {static_cast<int>(idx) - mode_bound_, 0};
    return {static_cast<int>(idx / side) - mode_bound_,
            static_cast<int>(idx % side) - mode_bound_};
}

std::size_t FrequencyGrid::index(const std::array<int, 2>& m) const {
    if (std::abs(m[0]) > mode_bound_ || (dim_ == 2 && std::abs(m[1]) > mode_bound_))
        fail("FrequencyGrid::index: mode out of band");
    std::size_t side = 2 * static_cast<std::size_t>(mode_bound_) + 1;
    std::size_t i0 = static_cast<std::size_t>(m[0] + mode_bound_);
    if (dim_ == 1) return i0;
    return i0 * side + static_cast<std::size_t>(m[1] + mode_bound_);
}

Point FrequencyGrid::frequency(std::size_t idx) const {
    auto m = mode(idx);
    return {spacing_ * m[0], dim_ == 2 ? spacing_ * m[1] : 0.0};
}

double FrequencyGrid::frequency_norm(std::size_t idx) const {
    Point xi = frequency(idx);
    return dim_ == 1 ? std::fabs(xi[0]) : std::hypot(xi[0], xi[1]);
}

double FrequencyGrid::band_limit() const {
    double edge = spacing_ * mode_bound_;
    return dim_ == 1 ? edge : std::hypot(edge, edge);
}

SpectralFunction::SpectralFunction(FrequencyGrid grid)
    : grid_(grid), coeffs_(grid.mode_count(), cplx{0.0, 0.0}) {}

SpectralFunction::SpectralFunction(FrequencyGrid grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.mode_count())
        fail("SpectralFunction: coefficient count does not match grid");
}

SpectralFunction operator+(const SpectralFunction& f, const SpectralFunction& g) {
    check_same_grid(f, g, "operator+");
    SpectralFunction h = f;
    for (std::size_t i = 0; i < h.size(); ++i) h.coeff(i) += g.coeff(i);
    return h;
}

SpectralFunction operator-(const SpectralFunction& f, const SpectralFunction& g) {
    check_same_grid(f, g, "operator-");
    SpectralFunction h = f;
    for (std::size_t i = 0; i < h.size(); ++i) h.coeff(i) -= g.coeff(i);
    return h;
}

SpectralFunction operator*(cplx z, const SpectralFunction& f) {
    SpectralFunction h = f;
    for (std::size_t i = 0; i < h.size(); ++i) h.coeff(i) *= z;
    return h;
}

SpectralFunction sample_symbol(const FrequencyGrid& grid,
                               const std::function<cplx(const Point&)>& symbol) {
    SpectralFunction f{grid};
    for (std::size_t i = 0; i < grid.mode_count(); ++i) {
        Point xi = grid.frequency(i);
        cplx v = symbol(xi);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "sample_symbol: non-finite value at xi = (" << format_double(xi[0]);
            if (grid.dim() == 2) os << ", " << format_double(xi[1]);
            os << ")";
            fail(os.str());
        }
        f.coeff(i) = v;
    }
    return f;
}

SpectralFunction propagate(const SpectralFunction& f, double t, const ExponentParams& p) {
    p.validate();
    check_dim(f.grid(), p, "propagate");
    if (!std::isfinite(t)) fail("propagate: t must be finite");
    SpectralFunction g = f;
    const auto w = phase_speeds(f.grid(), p.a);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.coeff(i) *= std::polar(1.0, t * w[i]);
    return g;
}

std::vector<cplx> evaluate(const SpectralFunction& f, double t, const ExponentParams& p,
                           std::span<const Point> points) {
    p.validate();
    check_dim(f.grid(), p, "evaluate");
    if (!std::isfinite(t)) fail("evaluate: t must be finite");
    const auto& grid = f.grid();
    const double L = grid.period();
    for (std::size_t j = 0; j < points.size(); ++j)
        for (int k = 0; k < grid.dim(); ++k)
            if (!(points[j][k] >= 0.0 && points[j][k] <= L))
                fail("evaluate: point " + std::to_string(j) + " outside [0, period]");

    const auto w = phase_speeds(grid, p.a);
    const std::size_t modes = grid.mode_count();
    std::vector<Point> freqs(modes);
    for (std::size_t i = 0; i < modes; ++i) freqs[i] = grid.frequency(i);

    const double front = grid.cell_weight() / (grid.dim() == 1 ? two_pi : two_pi * two_pi);
    std::vector<cplx> out(points.size());
    parallel_for(points.size(), [&](std::size_t j) {
        const Point& x = points[j];
        KahanSum re, im;
        for (std::size_t i = 0; i < modes; ++i) {
            double phase = freqs[i][0] * x[0] + freqs[i][1] * x[1] + t * w[i];
            cplx term = f.coeff(i) * std::polar(1.0, phase);
            re.add(term.real());
            im.add(term.imag());
        }
        out[j] = front * cplx{re.value(), im.value()};
    });
    return out;
}

std::vector<Point> lattice_points(const FrequencyGrid& grid, int resolution) {
    if (resolution < 1) fail("lattice_points: resolution must be >= 1");
    const double step = grid.period() / resolution;
    std::vector<Point> pts;
    if (grid.dim() == 1) {
        pts.reserve(resolution);
        for (int j = 0; j < resolution; ++j) pts.push_back({step * j, 0.0});
    } else {
        pts.reserve(static_cast<std::size_t>(resolution) * resolution);
        for (int j1 = 0; j1 < resolution; ++j1)
            for (int j2 = 0; j2 < resolution; ++j2)
                pts.push_back({step * j1, step * j2});
    }
    return pts;
}

SpectralFunction analyze_lattice(const FrequencyGrid& grid, std::span<const cplx> values,
                                 int resolution) {
    const int need = 2 * grid.mode_bound() + 1;
    if (resolution < need)
        fail("analyze_lattice: resolution " + std::to_string(resolution) +
             " aliases the band, need >= " + std::to_string(need));
    const auto pts = lattice_points(grid, resolution);
    if (values.size() != pts.size())
        fail("analyze_lattice: value count does not match the lattice");
    const double cells = grid.dim() == 1 ? static_cast<double>(resolution)
                                         : static_cast<double>(resolution) * resolution;
    const double fronts = (grid.dim() == 1 ? two_pi : two_pi * two_pi) /
                          (grid.cell_weight() * cells);
    SpectralFunction f{grid};
    parallel_for(grid.mode_count(), [&](std::size_t i) {
        Point xi = grid.frequency(i);
        KahanSum re, im;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            double phase = -(xi[0] * pts[j][0] + xi[1] * pts[j][1]);
            cplx term = values[j] * std::polar(1.0, phase);
            re.add(term.real());
            im.add(term.imag());
        }
        f.coeff(i) = fronts * cplx{re.value(), im.value()};
    });
    return f;
}

double h_s_norm(const SpectralFunction& f, double s) {
    if (!std::isfinite(s)) fail("h_s_norm: s must be finite");
    const auto& grid = f.grid();
    KahanSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double xi2 = grid.frequency_norm(i);
        xi2 *= xi2;
        acc.add(std::pow(1.0 + xi2, s) * std::norm(f.coeff(i)));
    }
    return std::sqrt(acc.value() * grid.cell_weight());
}

SpectralFunction bessel_apply(const SpectralFunction& f, double s) {
    if (!std::isfinite(s)) fail("bessel_apply: s must be finite");
    SpectralFunction g = f;
    const auto& grid = f.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        double xi2 = grid.frequency_norm(i);
        xi2 *= xi2;
        g.coeff(i) *= std::pow(1.0 + xi2, -s / 2.0);
    }
    return g;
}

double delta_multiplier_sup(const FrequencyGrid& grid, double delta,
                            const ExponentParams& p) {
    p.validate();
    check_dim(grid, p, "delta_multiplier_sup");
    if (!(delta > 0.0 && delta < 1.0)) fail("delta_multiplier_sup: need 0 < delta < 1");
    if (!(p.a > 1.0)) fail("delta_multiplier_sup: need a > 1");
    if (!(p.s > 0.0 && p.s < p.a)) fail("delta_multiplier_sup: need 0 < s < a");
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.mode_count(); ++i) {
        double xi = grid.frequency_norm(i);
        double osc = 2.0 * std::fabs(std::sin(0.5 * delta * std::pow(xi, p.a)));
        double val = osc * std::pow(1.0 + xi * xi, -p.s / 2.0);
        if (val > sup) sup = val;
    }
    return sup;
}

double lipschitz_time_bound(const SpectralFunction& f, double t, double u,
                            const ExponentParams& p) {
    p.validate();
    check_dim(f.grid(), p, "lipschitz_time_bound");
    if (!std::isfinite(t) || !std::isfinite(u)) fail("lipschitz_time_bound: times must be finite");
    const auto& grid = f.grid();
    KahanSum acc;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc.add(std::pow(grid.frequency_norm(i), p.a) * std::abs(f.coeff(i)));
    const double front = grid.cell_weight() / (grid.dim() == 1 ? two_pi : two_pi * two_pi);
    return std::fabs(t - u) * acc.value() * front;
}

std::vector<SpectralFunction> dyadic_decompose(const SpectralFunction& f) {
    const auto& grid = f.grid();
    const double band = grid.band_limit();
    int K = band > 1.0 ? static_cast<int>(std::ceil(std::log2(band))) : 0;
    std::vector<SpectralFunction> pieces(static_cast<std::size_t>(K) + 1,
                                         SpectralFunction{grid});
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r = grid.frequency_norm(i);
        int k = r <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(r)));
        if (k > K) k = K; // rounding guard at the band edge
        pieces[static_cast<std::size_t>(k)].coeff(i) = f.coeff(i);
    }
    return pieces;
}

} // namespace maxlab
