#include "reichlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reichlab::bergman {

namespace {

using geom::kPi;

quadrature::Options options_for(double tol, std::size_t budget = 1'000'000) {
    return {tol, tol, budget};
}

// G(xi, w) with dG / d conj(w) = (1 - |w|^2)^2 (1 - xi conj(w))^-4.
Complex weighted_antiderivative(Complex xi, Complex w) {
    const Complex wb = std::conj(w);
    // The closed form loses about eps / |xi|^3 to cancellation; below 0.1 use the series.
    if (std::abs(xi) >= 0.1) {
        const Complex u = 1.0 - xi * wb;
        const Complex a = xi - w;
        const Complex u2 = u * u;
        return (a * a / (3.0 * u2 * u) + a * w / u2 + w * w / u) / (xi * xi * xi);
    }
    // conj(w) sum_m C(m+3, 3) q^m (1/(m+1) - 2s/(m+2) + s^2/(m+3)), q = xi conj(w), s = |w|^2.
    const double s = std::norm(w);
    const Complex q = xi * wb;
    const double aq = std::abs(q);
    Complex sum = 0.0;
    Complex qm = 1.0;
    double qm_abs = 1.0;
    for (int m = 0; m < 64; ++m) {
        const double binom = (m + 1.0) * (m + 2.0) * (m + 3.0) / 6.0;
        const double coeff = binom * (1.0 / (m + 1.0) - 2.0 * s / (m + 2.0) + s * s / (m + 3.0));
        sum += coeff * qm;
        // Later coefficients are at most binom (m+4)^3 / (m+1)^3-fold larger than this one's scale.
        if (binom * qm_abs * 8.0 < 1e-17 * std::abs(sum) || qm_abs < 1e-300) break;
        qm *= q;
        qm_abs *= aq;
    }
    return wb * sum;
}

}  // namespace

Complex disk_kernel(Complex z, Complex w) {
    const Complex q = 1.0 - z * std::conj(w);
    const Complex q2 = q * q;
    return 1.0 / (q2 * q2);
}

double invariance_residual(const MobiusMap& a, Complex z, Complex w) {
    const Complex az = a.derivative(z);
    const Complex aw = std::conj(a.derivative(w));
    return std::abs(disk_kernel(a(z), a(w)) * az * az * aw * aw - disk_kernel(z, w));
}

quadrature::QuadratureResult mobius_image_area(const geom::Region& region, const MobiusMap& a,
                                               const quadrature::Options& options) {
    // area = (1/2) Im of the contour integral of conj(u) du along u = A(boundary).
    quadrature::QuadratureResult total;
    total.certified = true;
    for (const auto& piece : geom::boundary(region)) {
        auto r = quadrature::integrate_interval(
            [&](double t) {
                const Complex z = geom::piece_point(piece, t);
                const Complex u = a(z);
                const Complex du = a.derivative(z) * geom::piece_tangent(piece, t);
                return Complex(0.5 * std::imag(std::conj(u) * du), 0.0);
            },
            0.0, 1.0, options);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evaluations += r.evaluations;
        total.cells_used += r.cells_used;
        total.certified = total.certified && r.certified;
    }
    return total;
}

MassIdentity mass_identity_check(const geom::Region& region, Complex w, double tol) {
    geom::require_disk_point(w, "mass_identity_check");
    if (!(tol > 0.0)) throw DomainError("mass_identity_check: tol must be positive");
    const auto a = geom::mobius_to_zero(w);
    const double rho = geom::disk_density(w);
    const auto opts = options_for(0.25 * tol);
    const auto image = mobius_image_area(region, a, opts);
    const auto direct = quadrature::integrate_region(
        [&](Complex z) {
            if (std::norm(z) >= 1.0) return Complex(0.0);
            return Complex(std::abs(disk_kernel(z, w)), 0.0);
        },
        region, opts);
    MassIdentity out{rho * rho * image.value.real(), direct.value.real(),
                     rho * rho * image.error_estimate, direct.error_estimate};
    if (!image.certified || !direct.certified) {
        throw ToleranceNotMet("mass_identity_check: quadrature did not reach tolerance", out.lhs,
                              out.rhs);
    }
    return out;
}

double orbit_tail_mass(const fuchsian::WordOrbit& orbit) {
    const std::size_t shells = orbit.shell_offsets.size() - 1;
    std::vector<double> mass(shells, 0.0);
    for (std::size_t k = 0; k < shells; ++k) {
        for (std::size_t i = orbit.shell_offsets[k]; i < orbit.shell_offsets[k + 1]; ++i) {
            mass[k] += std::norm(orbit.elements[i].derivative);
        }
    }
    if (shells >= 2 && orbit.shell_offsets[1] == orbit.shell_offsets[2]) return 0.0;  // no generators
    if (shells < 2) return std::numeric_limits<double>::infinity();
    const std::size_t depth = shells - 1;
    if (depth < 3) return std::numeric_limits<double>::infinity();
    double ratio = 0.0;
    double exponent = std::numeric_limits<double>::infinity();
    for (std::size_t j = depth - 2; j <= depth; ++j) {
        const double r = mass[j] / mass[j - 1];
        ratio = std::max(ratio, r);
        if (j >= 2) {
            exponent = std::min(exponent, std::log(r) / std::log((j - 1.0) / j));
        }
    }
    if (!(ratio < 1.0) || !(exponent > 1.0)) return std::numeric_limits<double>::infinity();
    // Parabolic words make the shells decay like a power of the length rather
    // than geometrically; take whichever extrapolation is larger.
    const double geometric = mass[depth] * ratio / (1.0 - ratio);
    const double power = mass[depth] * static_cast<double>(depth) / (exponent - 1.0);
    return std::max(geometric, power);
}

PoincareKernel::PoincareKernel(fuchsian::WordOrbit orbit, bool first)
    : orbit_(std::move(orbit)), tail_mass_(orbit_tail_mass(orbit_)), first_(first) {
    points_.reserve(orbit_.elements.size());
    weights_.reserve(orbit_.elements.size());
    for (const auto& e : orbit_.elements) {
        const Complex d2 = e.derivative * e.derivative;
        points_.push_back(first_ ? e.image : std::conj(e.image));
        weights_.push_back(first_ ? d2 : std::conj(d2));
    }
}

PoincareKernel PoincareKernel::with_first(const FuchsianGroup& group, Complex z, int depth) {
    return PoincareKernel(fuchsian::enumerate_orbit(group, z, group.is_trivial() ? 1 : depth), true);
}

PoincareKernel PoincareKernel::with_second(const FuchsianGroup& group, Complex w, int depth) {
    return PoincareKernel(fuchsian::enumerate_orbit(group, w, group.is_trivial() ? 1 : depth), false);
}

Complex PoincareKernel::evaluate(Complex other) const {
    // first:  sum K(A z, w) A'(z)^2      = sum (1 - A(z) conj(w))^-4 A'(z)^2
    // second: sum K(z, A w) conj(A'(w))^2 = sum (1 - z conj(A w))^-4 conj(A'(w))^2
    const Complex x = first_ ? std::conj(other) : other;
    Complex sum = 0.0;
    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Complex q = 1.0 - points_[i] * x;
        const Complex q2 = q * q;
        sum += weights_[i] / (q2 * q2);
    }
    return sum;
}

double PoincareKernel::absolute_sum(Complex other) const {
    const Complex x = first_ ? std::conj(other) : other;
    double sum = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double q = std::norm(1.0 - points_[i] * x);
        sum += std::abs(weights_[i]) / (q * q);
    }
    return sum;
}

double PoincareKernel::tail_bound(Complex other) const {
    if (tail_mass_ == 0.0) return 0.0;
    const double m = 1.0 - std::abs(other);
    return tail_mass_ / (m * m * m * m);
}

quadrature::QuadratureResult weighted_kernel_integral(const PoincareKernel& kernel,
                                                      const geom::BoundaryPath& path,
                                                      const quadrature::Options& options) {
    if (!kernel.orbit_of_first()) {
        throw PreconditionError("weighted_kernel_integral: kernel must carry the orbit of its first argument");
    }
    const auto& points = kernel.points();
    const auto& weights = kernel.weights();
    quadrature::QuadratureResult total;
    total.certified = true;
    // integral of g dA = (1 / 2i) contour integral of G dw.
    const Complex half_over_i(0.0, -0.5);
    for (const auto& piece : path) {
        auto r = quadrature::integrate_interval(
            [&](double t) {
                const Complex w = geom::piece_point(piece, t);
                Complex g = 0.0;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    g += weights[i] * weighted_antiderivative(points[i], w);
                }
                return half_over_i * g * geom::piece_tangent(piece, t);
            },
            0.0, 1.0, options);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evaluations += r.evaluations;
        total.cells_used += r.cells_used;
        total.certified = total.certified && r.certified;
    }
    return total;
}

KernelValue poincare_kernel(const FuchsianGroup& group, Complex z, Complex w, int depth) {
    geom::require_disk_point(z, "poincare_kernel");
    geom::require_disk_point(w, "poincare_kernel");
    if (depth < 0) throw DomainError("poincare_kernel: negative depth");
    const auto kernel = PoincareKernel::with_first(group, z, depth);
    return {kernel.evaluate(w), kernel.tail_bound(w), group.is_trivial() ? 0 : depth};
}

KernelValue poincare_kernel_to_tolerance(const FuchsianGroup& group, Complex z, Complex w,
                                         double tol, int max_depth) {
    KernelValue last{};
    for (int depth = group.is_trivial() ? 0 : 1; depth <= max_depth; ++depth) {
        last = poincare_kernel(group, z, w, depth);
        if (last.tail_bound <= tol) return last;
    }
    throw ConvergenceError("poincare_kernel: depth budget exhausted before the tail met tol",
                           last.value, last.tail_bound);
}

double reproducing_constant(const FuchsianGroup& group) {
    if (!group.is_trivial()) {
        throw PreconditionError("reproducing_constant: calibration runs on the trivial group");
    }
    // c * integral_D (1 - |w|^2)^2 K(0, w) dA = 1, and K(0, w) = 1.
    const auto r = quadrature::integrate_region(
        [](Complex w) {
            const double s = 1.0 - std::norm(w);
            return Complex(s * s * disk_kernel(0.0, w).real(), 0.0);
        },
        geom::DiskRegion{0.0, 1.0}, options_for(1e-14));
    return 1.0 / r.value.real();
}

double calibrated_reproducing_constant() {
    static const double c = reproducing_constant(fuchsian::trivial_group());
    return c;
}

ProjectionResult project_detailed(const MeasurableQD& f, const FuchsianGroup& group, Complex z,
                                  const ProjectionOptions& options) {
    geom::require_disk_point(z, "project");
    if (!(options.tol > 0.0)) throw DomainError("project: tol must be positive");
    const double c = calibrated_reproducing_constant();
    const auto kernel = PoincareKernel::with_first(group, z, options.word_depth);
    auto integrand = [&](Complex w) -> Complex {
        const double n = std::norm(w);
        if (n >= 1.0) return 0.0;
        const Complex fw = f.evaluator(w);
        if (fw == Complex(0.0)) return 0.0;
        const double s = 1.0 - n;
        return c * fw * (s * s) * kernel.evaluate(w);
    };
    geom::Region domain = geom::DiskRegion{0.0, 1.0};
    if (f.support) {
        domain = *f.support;
    } else if (!group.is_trivial()) {
        throw PreconditionError("project: a quotient projection needs a support region that embeds");
    }
    double tail_error = 0.0;
    if (!group.is_trivial()) {
        const auto disk = geom::bounding_disk(domain);
        const auto ball = geom::to_hyperbolic(disk);
        if (ball.radius > fuchsian::embedded_radius(group, ball.center, options.word_depth)) {
            throw PreconditionError("project: support does not embed in the quotient");
        }
        if (kernel.tail_mass() > 0.0) {
            // |tail(w)| <= tail_mass (1 - |w|)^-4 and |f| (1 - |w|^2)^2 <= |f| (1 + |w|)^2 (1 - |w|)^2.
            const double m = 1.0 - (std::abs(disk.center) + disk.radius);
            double sup_f = 0.0;
            for (int i = 0; i < 64; ++i) {
                for (int j = 0; j < 8; ++j) {
                    const Complex p = disk.center + std::polar(disk.radius * (j + 0.5) / 8.0,
                                                               2.0 * kPi * i / 64.0);
                    if (geom::contains(domain, p)) sup_f = std::max(sup_f, std::abs(f.evaluator(p)));
                }
            }
            tail_error = c * sup_f * geom::area(domain) * 4.0 * kernel.tail_mass() / (m * m);
        }
    }
    quadrature::Options q{options.tol, options.tol, options.max_evaluations};
    const auto r = quadrature::integrate_region(integrand, domain, q);
    return {r.value, r.error_estimate + tail_error, r.certified};
}

Complex project(const MeasurableQD& f, const FuchsianGroup& group, Complex z, double tol) {
    ProjectionOptions options;
    options.tol = tol;
    const auto r = project_detailed(f, group, z, options);
    if (!r.certified) {
        throw IntegrabilityError("project: quadrature refinement did not settle (non-integrable input?)");
    }
    return r.value;
}

CalibrationReport calibration_report() {
    CalibrationReport out{};
    out.calibrated = calibrated_reproducing_constant();
    out.closed_form = 3.0 / kPi;
    out.nominal = kNominalProjectionConstant;
    MeasurableQD one{[](Complex) { return Complex(1.0); }, std::nullopt};
    const Complex p = project(one, fuchsian::trivial_group(), 0.0, 1e-12);
    out.nominal_constant_projection = (p * (out.nominal / out.calibrated)).real();
    return out;
}

MassBound kernel_mass_bound(const FuchsianGroup& group, const geom::Region& region, Complex p,
                            double tol, int word_depth) {
    geom::require_disk_point(p, "kernel_mass_bound");
    const double rho = geom::disk_density(p);
    const auto kernel = PoincareKernel::with_second(group, p, word_depth);

    double distance = std::numeric_limits<double>::infinity();
    if (group.is_trivial()) {
        distance = geom::hyperbolic_distance(region, p);
    } else {
        const auto disk = geom::bounding_disk(region);
        const auto ball = geom::to_hyperbolic(disk);
        if (ball.radius > fuchsian::embedded_radius(group, ball.center, word_depth)) {
            throw PreconditionError("kernel_mass_bound: region does not embed in the quotient");
        }
        for (const auto& e : kernel.orbit().elements) {
            if (std::norm(e.image) >= 1.0) continue;
            distance = std::min(distance, geom::hyperbolic_distance(region, e.image));
        }
    }
    if (!(distance > 0.0)) throw DomainError("kernel_mass_bound: region touches p");

    const auto r = quadrature::integrate_region(
        [&](Complex z) -> Complex {
            if (std::norm(z) >= 1.0) return 0.0;
            return std::abs(kernel.evaluate(z));
        },
        region, options_for(tol));
    if (!r.certified) {
        throw ToleranceNotMet("kernel_mass_bound: quadrature did not reach tolerance",
                              r.value.real() / (rho * rho), 0.0);
    }
    double tail = 0.0;
    if (kernel.tail_mass() > 0.0) {
        const auto disk = geom::bounding_disk(region);
        const double m = 1.0 - std::min(1.0, std::abs(disk.center) + disk.radius);
        tail = kernel.tail_mass() * geom::area(region) / std::pow(m, 4) / (rho * rho);
    }
    MassBound out{};
    out.measured_partial = r.value.real() / (rho * rho);
    out.tail = tail;
    out.measured = out.measured_partial + tail;
    out.distance = distance;
    out.bound = 4.0 * kPi * std::exp(-distance);
    out.quadrature_error = r.error_estimate / (rho * rho);
    return out;
}

}  // namespace reichlab::bergman
