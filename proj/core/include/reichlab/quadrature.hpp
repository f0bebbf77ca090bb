#pragma once

// Deterministic 2D quadrature with embedded error estimates.
//
// Every cell is integrated with a tensor Gauss-Kronrod pair (7-point Gauss
// nested in 15-point Kronrod). The Kronrod value is kept and |K - G| is the
// cell error estimate. Adaptive refinement always bisects the cell with the
// largest estimate, in a fixed order, so results are reproducible bit for bit.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "reichlab/errors.hpp"
#include "reichlab/geom.hpp"

namespace reichlab::quadrature {

using Integrand = std::function<Complex(Complex)>;
// Integrand in parameter coordinates (x, y); used for polar and other maps.
using ParamIntegrand = std::function<Complex(double, double)>;

struct Options {
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    std::size_t max_evaluations = 1'000'000;
};

struct QuadratureResult {
    Complex value{};
    double error_estimate = 0.0;
    std::size_t cells_used = 0;
    std::size_t evaluations = 0;
    // False when the evaluation budget ran out before the tolerance was met.
    bool certified = false;
};

QuadratureResult integrate_interval(const std::function<Complex(double)>& f, double a, double b,
                                    const Options& options = {});

QuadratureResult integrate_param(const ParamIntegrand& g,
                                 std::span<const geom::RectRegion> initial_cells,
                                 const Options& options = {});

QuadratureResult integrate_rect(const Integrand& f, const geom::RectRegion& rect,
                                const Options& options = {});

// Rectangles are integrated directly; disks and annulus sectors in polar coordinates.
QuadratureResult integrate_region(const Integrand& f, const geom::Region& region,
                                  const Options& options = {});

struct PoleOptions {
    double r_min = 1e-6;
    int pole_order_hint = 1;
};

// Integral over the disk |z - center| < R of an integrand with at most a
// first-order singularity at the center. The core |z - center| < r_min is
// omitted and its mass bound, sup(|f| r) * 2 pi * r_min, is added to the
// error estimate. Throws IntegrabilityError when |f| grows faster than
// first order at the center.
QuadratureResult integrate_pole(const Integrand& f, Complex center, double R,
                                const Options& options = {}, const PoleOptions& pole = {});

struct TailedSum {
    Complex value{};
    double tail_bound = 0.0;
    std::size_t terms_used = 0;
};

// Upper bound for sum over lattice points z with |z - center| > rho of
// c exp(-|z - center| / c).
double envelope_tail_bound(double c, double rho);

// Sums term(k, l) over Chebyshev shells around the lattice point nearest to
// center until envelope_tail_bound drops below tol. Every computed term is
// checked against c exp(-|k + l i - center| / c); a violation throws
// EnvelopeViolation naming (k, l).
TailedSum lattice_sum(const std::function<Complex(long, long)>& term, double envelope_c,
                      Complex center, double tol, long max_shells = 200000);

// One node of a fixed tensor rule with both embedded weights.
struct WeightedNode {
    double x;
    double y;
    double kronrod;
    double gauss;  // zero at nodes that belong only to the Kronrod extension
};

// The 225-node tensor Gauss-Kronrod rule on a rectangle.
std::vector<WeightedNode> tensor_gk15(const geom::RectRegion& rect);

// The 15 Kronrod abscissae on [-1, 1] with Kronrod and (nested) Gauss weights.
struct Rule1d {
    std::array<double, 15> nodes;
    std::array<double, 15> kronrod;
    std::array<double, 15> gauss;
};
const Rule1d& gauss_kronrod15();

}  // namespace reichlab::quadrature
