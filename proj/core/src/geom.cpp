#include "reichlab/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace reichlab::geom {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Minimise d(w, gamma(t)) over t in [0, 1] for a boundary piece gamma.
template <class Curve>
double min_distance_on_curve(Complex w, Curve&& gamma) {
    constexpr int kSamples = 2048;
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    auto dist = [&](double t) {
        const Complex z = gamma(t);
        if (std::norm(z) >= 1.0) return std::numeric_limits<double>::infinity();
        return disk_distance(z, w);
    };
    for (int i = 0; i <= kSamples; ++i) {
        const double d = dist(static_cast<double>(i) / kSamples);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    if (best_i < 0) return best;
    // Golden-section refinement in the bracketing sample interval.
    double lo = std::max(0, best_i - 1) / static_cast<double>(kSamples);
    double hi = std::min(kSamples, best_i + 1) / static_cast<double>(kSamples);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - g * (hi - lo);
    double b = lo + g * (hi - lo);
    double fa = dist(a);
    double fb = dist(b);
    for (int it = 0; it < 80; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = dist(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = dist(b);
        }
    }
    return std::min({best, fa, fb});
}

}  // namespace

void require_disk_point(Complex z, const char* what) {
    if (!finite(z) || std::norm(z) >= 1.0) {
        throw DomainError(std::string(what) + ": point is not in the open unit disk");
    }
}

double disk_density(Complex z) {
    require_disk_point(z, "disk_density");
    return 1.0 / (1.0 - std::norm(z));
}

double disk_distance(Complex z, Complex w) {
    require_disk_point(z, "disk_distance");
    require_disk_point(w, "disk_distance");
    const double t = std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
    return std::atanh(std::min(t, 1.0 - std::numeric_limits<double>::epsilon()));
}

MobiusMap MobiusMap::make(Complex rotation, Complex center) {
    if (!finite(rotation) || std::abs(std::abs(rotation) - 1.0) > 1e-12) {
        throw DomainError("MobiusMap: rotation must have modulus 1");
    }
    require_disk_point(center, "MobiusMap center");
    return MobiusMap(rotation / std::abs(rotation), center);
}

MobiusMap MobiusMap::rotation_by(double angle) { return MobiusMap(std::polar(1.0, angle), 0.0); }

MobiusMap MobiusMap::from_matrix(Complex a, Complex b, Complex c, Complex d) {
    if (std::abs(a) == 0.0 || std::abs(d) == 0.0) {
        throw DomainError("MobiusMap::from_matrix: not a disk automorphism");
    }
    const Complex center = -b / a;
    Complex rotation = a / d;
    require_disk_point(center, "MobiusMap::from_matrix");
    // A disk automorphism has c / d = -conj(center).
    if (std::abs(c / d + std::conj(center)) > 1e-8 * (1.0 + std::abs(c / d)) ||
        std::abs(std::abs(rotation) - 1.0) > 1e-8) {
        throw DomainError("MobiusMap::from_matrix: matrix does not preserve the disk");
    }
    rotation /= std::abs(rotation);
    return MobiusMap(rotation, center);
}

Complex MobiusMap::operator()(Complex z) const {
    return rotation_ * (z - center_) / (1.0 - std::conj(center_) * z);
}

Complex MobiusMap::derivative(Complex z) const {
    const Complex q = 1.0 - std::conj(center_) * z;
    return rotation_ * (1.0 - std::norm(center_)) / (q * q);
}

MobiusMap MobiusMap::inverse() const { return MobiusMap(std::conj(rotation_), -rotation_ * center_); }

std::array<Complex, 4> MobiusMap::matrix() const {
    const Complex det = rotation_ * (1.0 - std::norm(center_));
    const Complex s = std::sqrt(det);
    return {rotation_ / s, -rotation_ * center_ / s, -std::conj(center_) / s, 1.0 / s};
}

Complex MobiusMap::trace_squared() const {
    const auto m = matrix();
    const Complex tr = m[0] + m[3];
    return tr * tr / (m[0] * m[3] - m[1] * m[2]);
}

MobiusMap operator*(const MobiusMap& outer, const MobiusMap& inner) {
    const auto p = outer.matrix();
    const auto q = inner.matrix();
    const Complex a = p[0] * q[0] + p[1] * q[2];
    const Complex b = p[0] * q[1] + p[1] * q[3];
    const Complex d = p[2] * q[1] + p[3] * q[3];
    Complex rotation = a / d;
    rotation /= std::abs(rotation);
    return MobiusMap(rotation, -b / a);
}

MobiusMap mobius_to_zero(Complex w) {
    require_disk_point(w, "mobius_to_zero");
    return MobiusMap::make(1.0, w);
}

KoebeConstants koebe_constants(double r0) {
    if (!(r0 > 0.0) || r0 > 1.0) throw DomainError("koebe_constants: r0 must lie in (0, 1]");
    const double t0 = r0 < 1.0 ? std::atanh(r0) : std::numeric_limits<double>::infinity();
    return {t0, r0, r0 / 8.0};
}

double exclusion_radius(double distance) { return std::tanh(distance); }
double half_exclusion_radius(double distance) { return std::tanh(0.5 * distance); }

double exclusion_area(double distance) {
    const double c = std::cosh(distance);
    return kPi / (c * c);
}

double loose_exclusion_area(double distance) {
    const double c = std::cosh(0.5 * distance);
    return 4.0 * kPi / (c * c);
}

EuclideanDisk to_euclidean(const HyperbolicBall& ball) {
    require_disk_point(ball.center, "to_euclidean");
    // Move to 0, where the ball is {|z| <= tanh r}, and map back.
    const double t = std::tanh(ball.radius);
    const Complex c = ball.center;
    const double cc = std::norm(c);
    const double denom = 1.0 - t * t * cc;
    return {c * (1.0 - t * t) / denom, t * (1.0 - cc) / denom};
}

HyperbolicBall to_hyperbolic(const EuclideanDisk& disk) {
    const double m = std::abs(disk.center);
    if (!(disk.radius >= 0.0) || m + disk.radius >= 1.0) {
        throw DomainError("to_hyperbolic: disk must lie inside the unit disk");
    }
    const Complex dir = m > 0.0 ? disk.center / m : Complex(1.0, 0.0);
    const double a = std::atanh(m - disk.radius);
    const double b = std::atanh(m + disk.radius);
    return {dir * std::tanh(0.5 * (a + b)), 0.5 * (b - a)};
}

bool contains(const Region& region, Complex z) {
    return std::visit(
        overloaded{
            [&](const RectRegion& r) {
                return z.real() >= r.x0 && z.real() <= r.x1 && z.imag() >= r.y0 && z.imag() <= r.y1;
            },
            [&](const DiskRegion& d) { return std::abs(z - d.center) <= d.radius; },
            [&](const AnnulusSector& s) {
                const Complex u = z - s.center;
                const double r = std::abs(u);
                if (r < s.r_in || r > s.r_out) return false;
                if (s.theta1 - s.theta0 >= 2.0 * kPi) return true;
                double t = std::arg(u);
                while (t < s.theta0) t += 2.0 * kPi;
                while (t > s.theta0 + 2.0 * kPi) t -= 2.0 * kPi;
                return t <= s.theta1;
            },
        },
        region);
}

double area(const Region& region) {
    return std::visit(
        overloaded{
            [](const RectRegion& r) { return (r.x1 - r.x0) * (r.y1 - r.y0); },
            [](const DiskRegion& d) { return kPi * d.radius * d.radius; },
            [](const AnnulusSector& s) {
                return 0.5 * (s.theta1 - s.theta0) * (s.r_out * s.r_out - s.r_in * s.r_in);
            },
        },
        region);
}

EuclideanDisk bounding_disk(const Region& region) {
    return std::visit(
        overloaded{
            [](const RectRegion& r) {
                const Complex c(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
                return EuclideanDisk{c, 0.5 * std::hypot(r.x1 - r.x0, r.y1 - r.y0)};
            },
            [](const DiskRegion& d) { return EuclideanDisk{d.center, d.radius}; },
            [](const AnnulusSector& s) {
                if (s.theta1 - s.theta0 >= kPi) return EuclideanDisk{s.center, s.r_out};
                constexpr int kArc = 256;
                const double span = s.theta1 - s.theta0;
                std::vector<Complex> pts;
                for (int i = 0; i <= kArc; ++i) {
                    const double t = s.theta0 + span * i / kArc;
                    pts.push_back(s.center + std::polar(s.r_in, t));
                    pts.push_back(s.center + std::polar(s.r_out, t));
                }
                Complex c = 0.5 * (pts[0] + pts[pts.size() - 1]);
                c = 0.5 * (c + s.center + std::polar(0.5 * (s.r_in + s.r_out), s.theta0 + 0.5 * span));
                double r = 0.0;
                for (auto p : pts) r = std::max(r, std::abs(p - c));
                // Slack for the arc between consecutive samples.
                r += s.r_out * (1.0 - std::cos(0.5 * span / kArc));
                return EuclideanDisk{c, r};
            },
        },
        region);
}

bool inside_unit_disk(const Region& region) {
    return std::visit(
        overloaded{
            [](const RectRegion& r) {
                const double x = std::max(std::abs(r.x0), std::abs(r.x1));
                const double y = std::max(std::abs(r.y0), std::abs(r.y1));
                return x * x + y * y < 1.0;
            },
            [](const DiskRegion& d) { return std::abs(d.center) + d.radius < 1.0; },
            [](const AnnulusSector& s) { return std::abs(s.center) + s.r_out < 1.0; },
        },
        region);
}

double hyperbolic_distance(const Region& region, Complex w) {
    require_disk_point(w, "hyperbolic_distance");
    if (contains(region, w)) return 0.0;
    return std::visit(
        overloaded{
            [&](const RectRegion& r) {
                const Complex c00(r.x0, r.y0), c10(r.x1, r.y0), c11(r.x1, r.y1), c01(r.x0, r.y1);
                auto edge = [&](Complex a, Complex b) {
                    return min_distance_on_curve(w, [=](double t) { return a + t * (b - a); });
                };
                return std::min({edge(c00, c10), edge(c10, c11), edge(c11, c01), edge(c01, c00)});
            },
            [&](const DiskRegion& d) {
                if (std::abs(d.center) + d.radius < 1.0) {
                    const auto ball = to_hyperbolic({d.center, d.radius});
                    return std::max(0.0, disk_distance(ball.center, w) - ball.radius);
                }
                return min_distance_on_curve(
                    w, [&](double t) { return d.center + std::polar(d.radius, 2.0 * kPi * t); });
            },
            [&](const AnnulusSector& s) {
                auto arc = [&](double radius) {
                    return min_distance_on_curve(w, [&](double t) {
                        return s.center + std::polar(radius, s.theta0 + t * (s.theta1 - s.theta0));
                    });
                };
                double best = std::min(arc(s.r_in), arc(s.r_out));
                if (s.theta1 - s.theta0 < 2.0 * kPi) {
                    for (double th : {s.theta0, s.theta1}) {
                        best = std::min(best, min_distance_on_curve(w, [&](double t) {
                                            return s.center +
                                                   std::polar(s.r_in + t * (s.r_out - s.r_in), th);
                                        }));
                    }
                }
                return best;
            },
        },
        region);
}

Complex piece_point(const BoundaryPiece& piece, double t) {
    return std::visit(
        overloaded{
            [t](const Segment& s) { return s.a + t * (s.b - s.a); },
            [t](const Arc& a) {
                return a.center + std::polar(a.radius, a.theta0 + t * (a.theta1 - a.theta0));
            },
        },
        piece);
}

Complex piece_tangent(const BoundaryPiece& piece, double t) {
    return std::visit(
        overloaded{
            [](const Segment& s) { return s.b - s.a; },
            [t](const Arc& a) {
                const double span = a.theta1 - a.theta0;
                return Complex(0.0, span) * std::polar(a.radius, a.theta0 + t * span);
            },
        },
        piece);
}

BoundaryPath boundary(const Region& region) {
    return std::visit(
        overloaded{
            [](const RectRegion& r) {
                const Complex c[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
                BoundaryPath out;
                for (int i = 0; i < 4; ++i) out.push_back(Segment{c[i], c[(i + 1) % 4]});
                return out;
            },
            [](const DiskRegion& d) {
                return BoundaryPath{Arc{d.center, d.radius, 0.0, 2.0 * kPi}};
            },
            [](const AnnulusSector& s) {
                BoundaryPath out;
                const bool full = s.theta1 - s.theta0 >= 2.0 * kPi;
                const Complex u0 = std::polar(1.0, s.theta0);
                const Complex u1 = std::polar(1.0, s.theta1);
                out.push_back(Arc{s.center, s.r_out, s.theta0, s.theta1});
                if (!full) out.push_back(Segment{s.center + s.r_out * u1, s.center + s.r_in * u1});
                if (s.r_in > 0.0) out.push_back(Arc{s.center, s.r_in, s.theta1, s.theta0});
                if (!full) out.push_back(Segment{s.center + s.r_in * u0, s.center + s.r_out * u0});
                return out;
            },
        },
        region);
}

BoundaryPath clipped_rect_boundary(const RectRegion& r) {
    const Complex c[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    struct Clipped {
        Complex start, end;
        bool start_on_circle, end_on_circle;
    };
    std::vector<Clipped> parts;
    for (int i = 0; i < 4; ++i) {
        const Complex a = c[i];
        const Complex d = c[(i + 1) % 4] - a;
        // |a + t d|^2 < 1 for t in (t0, t1).
        const double qa = std::norm(d);
        const double qb = 2.0 * (a.real() * d.real() + a.imag() * d.imag());
        const double qc = std::norm(a) - 1.0;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc <= 0.0) continue;
        const double root = std::sqrt(disc);
        const double lo = (-qb - root) / (2.0 * qa);
        const double hi = (-qb + root) / (2.0 * qa);
        const double t0 = std::max(lo, 0.0);
        const double t1 = std::min(hi, 1.0);
        if (t1 - t0 <= 1e-15) continue;
        // Judged by modulus so that a corner lying exactly on the circle counts as on it.
        const Complex start = a + t0 * d;
        const Complex end = a + t1 * d;
        parts.push_back({start, end, std::abs(start) >= 1.0 - 1e-12, std::abs(end) >= 1.0 - 1e-12});
    }
    BoundaryPath out;
    if (parts.empty()) {
        if (r.x0 <= -1.0 && r.x1 >= 1.0 && r.y0 <= -1.0 && r.y1 >= 1.0) {
            out.push_back(Arc{0.0, 1.0, 0.0, 2.0 * kPi});
        }
        return out;
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out.push_back(Segment{parts[i].start, parts[i].end});
        if (!parts[i].end_on_circle) continue;
        const Complex next = parts[(i + 1) % parts.size()].start;
        if (std::abs(next - parts[i].end) < 1e-14) continue;
        const double from = std::arg(parts[i].end);
        double to = std::arg(next);
        while (to <= from) to += 2.0 * kPi;
        out.push_back(Arc{0.0, 1.0, from, to});
    }
    return out;
}

}  // namespace reichlab::geom
