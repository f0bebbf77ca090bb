#pragma once

// The weight-4 Bergman kernel of the disk, its Poincare series over a
// Fuchsian group, and the Bergman projection of measurable quadratic
// differentials.

#include <functional>
#include <optional>

#include "reichlab/fuchsian.hpp"
#include "reichlab/geom.hpp"
#include "reichlab/quadrature.hpp"

namespace reichlab::bergman {

using fuchsian::FuchsianGroup;
using geom::MobiusMap;

// (1 - z conj(w))^-4.
Complex disk_kernel(Complex z, Complex w);

// |K(Az, Aw) A'(z)^2 conj(A'(w))^2 - K(z, w)|.
double invariance_residual(const MobiusMap& a, Complex z, Complex w);

// Euclidean area of A(W), from Green's formula along the mapped boundary of W.
quadrature::QuadratureResult mobius_image_area(const geom::Region& region, const MobiusMap& a,
                                               const quadrature::Options& options = {});

struct MassIdentity {
    double lhs;  // rho^2(w) * area(A(W)), A = mobius_to_zero(w)
    double rhs;  // integral over W of |K(z, w)|
    double lhs_error;
    double rhs_error;
};

// Both sides by independent routes (boundary integral versus area quadrature).
// Throws ToleranceNotMet when either quadrature fails to certify tol.
MassIdentity mass_identity_check(const geom::Region& region, Complex w, double tol);

struct KernelValue {
    Complex value;
    double tail_bound;
    int word_depth;
};

// Estimated sum of |A'(x)|^2 over words longer than the orbit depth.
//
// Shell masses s_k = sum_{|A| = k} |A'(x)|^2 of the last three shells are
// extrapolated both geometrically (largest shell ratio) and as a power law
// (smallest local exponent); the larger tail is returned. Zero when the group
// has no generators, infinite below depth 3 or when the shells do not decay.
// This is an estimate, not a proof.
double orbit_tail_mass(const fuchsian::WordOrbit& orbit);

// Poincare series B(z, w) = sum_A K(Az, w) A'(z)^2 with one argument's orbit
// precomputed, for repeated evaluation in the other argument.
class PoincareKernel {
public:
    // Orbit of z; evaluate(w) returns B(z, w).
    static PoincareKernel with_first(const FuchsianGroup& group, Complex z, int depth);
    // Orbit of w; evaluate(z) returns B(z, w) = sum_A K(z, A w) conj(A'(w))^2.
    static PoincareKernel with_second(const FuchsianGroup& group, Complex w, int depth);

    Complex evaluate(Complex other) const;
    // Bound on the omitted terms at the given free argument.
    double tail_bound(Complex other) const;
    // Sum of |term| over the retained words, for mass estimates.
    double absolute_sum(Complex other) const;

    const fuchsian::WordOrbit& orbit() const noexcept { return orbit_; }
    const std::vector<Complex>& points() const noexcept { return points_; }
    const std::vector<Complex>& weights() const noexcept { return weights_; }
    double tail_mass() const noexcept { return tail_mass_; }
    bool orbit_of_first() const noexcept { return first_; }

private:
    PoincareKernel(fuchsian::WordOrbit orbit, bool first);

    fuchsian::WordOrbit orbit_;
    std::vector<Complex> points_;   // A(x), conjugated when the orbit is of the second argument
    std::vector<Complex> weights_;  // A'(x)^2, conjugated likewise
    double tail_mass_;
    bool first_;
};

KernelValue poincare_kernel(const FuchsianGroup& group, Complex z, Complex w, int depth);

// Deepens the series until tail_bound <= tol; throws ConvergenceError with the
// partial value when max_depth is reached first.
KernelValue poincare_kernel_to_tolerance(const FuchsianGroup& group, Complex z, Complex w,
                                         double tol, int max_depth = 12);

// integral over the region bounded by path (inside the closed unit disk) of
// (1 - |w|^2)^2 B(z, w) dA(w), z the base of a with_first kernel, as a
// boundary integral of an exact antiderivative in conj(w). Retained words only.
quadrature::QuadratureResult weighted_kernel_integral(const PoincareKernel& kernel,
                                                      const geom::BoundaryPath& path,
                                                      const quadrature::Options& options = {});

// A measurable quadratic differential f(z) dz^2 given by its coefficient.
struct MeasurableQD {
    std::function<Complex(Complex)> evaluator;
    // When set, the evaluator vanishes outside this region.
    std::optional<geom::Region> support;
};

struct ProjectionOptions {
    double tol = 1e-8;
    int word_depth = 6;
    std::size_t max_evaluations = 1'000'000;
};

struct ProjectionResult {
    Complex value;
    double error_estimate;
    bool certified;
};

// c * integral f(w) (1 - |w|^2)^2 B(z, w) dA(w) with c the calibrated
// reproducing constant. For a nontrivial group the support must be set and
// must embed in the quotient; the integral then runs over that lift.
ProjectionResult project_detailed(const MeasurableQD& f, const FuchsianGroup& group, Complex z,
                                  const ProjectionOptions& options = {});

// As project_detailed; throws IntegrabilityError when quadrature does not certify.
Complex project(const MeasurableQD& f, const FuchsianGroup& group, Complex z, double tol = 1e-8);

// The c with c * integral_D (1 - |w|^2)^2 K(0, w) dA(w) = 1, by quadrature.
// Defined for the trivial group only (PreconditionError otherwise).
double reproducing_constant(const FuchsianGroup& group);

// reproducing_constant(trivial_group()), computed once.
double calibrated_reproducing_constant();

// The nominal normalisation 3 / (2 pi); it reproduces constants only up to a factor 1/2.
inline constexpr double kNominalProjectionConstant = 3.0 / (2.0 * geom::kPi);

struct CalibrationReport {
    double calibrated;
    double closed_form;                  // 3 / pi, from the radial integral 1/6
    double nominal;                      // 3 / (2 pi)
    double nominal_constant_projection;  // projection of f = 1 at 0 under the nominal constant
};

CalibrationReport calibration_report();

struct MassBound {
    double measured;          // integral over U of |B(z, p)| / rho^2(p), including the tail
    double measured_partial;  // the same without the tail contribution
    double tail;              // certified tail contribution added to measured
    double bound;             // 4 pi exp(-d(U, p))
    double distance;          // d(U, p) in the quotient
    double quadrature_error;
};

// Measures the kernel mass over U ⊂ D (a lift that embeds in the quotient)
// against the exponential bound. Throws DomainError when U touches p.
MassBound kernel_mass_bound(const FuchsianGroup& group, const geom::Region& region, Complex p,
                            double tol = 1e-8, int word_depth = 8);

}  // namespace reichlab::bergman
