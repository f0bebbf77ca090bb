#pragma once

// Hyperbolic geometry of the unit disk.
//
// Metric convention: ds = |dz| / (1 - |z|^2). With this density the distance
// from 0 to r is artanh(r), and the set of points at distance >= d from 0 is
// {|z| >= tanh(d)}.

#include <array>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "reichlab/errors.hpp"

namespace reichlab::geom {

inline constexpr double kPi = 3.14159265358979323846;

// 1 / (1 - |z|^2). Throws DomainError unless |z| < 1.
double disk_density(Complex z);

// Geodesic distance for the density above: artanh |(z - w) / (1 - conj(w) z)|.
double disk_distance(Complex z, Complex w);

// Throws DomainError unless z is a finite point of the open unit disk.
void require_disk_point(Complex z, const char* what);

// Disk automorphism z -> rotation * (z - center) / (1 - conj(center) z).
class MobiusMap {
public:
    MobiusMap() = default;

    // Validates |rotation| = 1 (to 1e-12, then renormalised) and |center| < 1.
    static MobiusMap make(Complex rotation, Complex center);
    static MobiusMap identity() { return {}; }
    static MobiusMap rotation_by(double angle);

    // Normalises (a z + b) / (c z + d); the matrix must represent a disk automorphism.
    static MobiusMap from_matrix(Complex a, Complex b, Complex c, Complex d);

    Complex rotation() const noexcept { return rotation_; }
    Complex center() const noexcept { return center_; }

    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;
    MobiusMap inverse() const;

    // Matrix [[a, b], [c, d]] with z -> (a z + b) / (c z + d), unit determinant up to sign.
    std::array<Complex, 4> matrix() const;

    // Squared trace of the determinant-one matrix; 4 for parabolic, > 4 for hyperbolic.
    Complex trace_squared() const;

    friend MobiusMap operator*(const MobiusMap& outer, const MobiusMap& inner);

private:
    MobiusMap(Complex rotation, Complex center) : rotation_(rotation), center_(center) {}

    Complex rotation_{1.0, 0.0};
    Complex center_{0.0, 0.0};
};

// The automorphism with positive-real derivative at w that sends w to 0.
MobiusMap mobius_to_zero(Complex w);

struct KoebeConstants {
    double t0;  // injectivity radius floor, artanh(r0) in the disk metric
    double r0;  // univalence radius of the uniformizer at points of the region
    double s0;  // density floor r0 / 8

    // |pi'(0)| < 8 / r0 follows from r1 = (r0 / 4)|pi'(0)| < 2.
    double max_uniformizer_derivative() const { return 8.0 / r0; }
    double koebe_radius(double uniformizer_derivative) const {
        return 0.25 * r0 * uniformizer_derivative;
    }
};

KoebeConstants koebe_constants(double r0);

// Radius of {xi : d(0, xi) >= d}: tanh(d) under this metric.
double exclusion_radius(double distance);
// The looser radius tanh(d / 2), which corresponds to the curvature -1 normalisation.
double half_exclusion_radius(double distance);

// Euclidean area of {tanh(d) <= |xi| < 1}: pi / cosh^2(d).
double exclusion_area(double distance);
// 4 pi / cosh^2(d / 2); an upper bound for exclusion_area.
double loose_exclusion_area(double distance);

// A closed hyperbolic ball; as a Euclidean set it is a disk.
struct HyperbolicBall {
    Complex center;
    double radius;
};

struct EuclideanDisk {
    Complex center;
    double radius;
};

EuclideanDisk to_euclidean(const HyperbolicBall& ball);
// Requires the disk to lie in the open unit disk.
HyperbolicBall to_hyperbolic(const EuclideanDisk& disk);

// ---- Regions -------------------------------------------------------------

struct RectRegion {
    double x0, x1, y0, y1;
};

struct DiskRegion {
    Complex center;
    double radius;
};

// {center + r e^{it} : r_in <= r <= r_out, theta0 <= t <= theta1}; a full
// annulus when theta1 - theta0 = 2 pi.
struct AnnulusSector {
    Complex center;
    double r_in, r_out;
    double theta0, theta1;
};

using Region = std::variant<RectRegion, DiskRegion, AnnulusSector>;

bool contains(const Region& region, Complex z);
double area(const Region& region);
// Smallest Euclidean disk computed from the region's extreme points.
EuclideanDisk bounding_disk(const Region& region);
// True when the closure of the region lies in the open unit disk.
bool inside_unit_disk(const Region& region);

// Hyperbolic distance from w to the region (0 if w lies in it). Regions may
// touch the unit circle; their points are clipped to |z| < 1.
double hyperbolic_distance(const Region& region, Complex w);

// ---- Oriented boundaries -----------------------------------------------------

struct Segment {
    Complex a, b;
};

// Traversed from theta0 to theta1 (clockwise when theta1 < theta0).
struct Arc {
    Complex center;
    double radius;
    double theta0, theta1;
};

using BoundaryPiece = std::variant<Segment, Arc>;
// A counterclockwise boundary, possibly in several closed pieces.
using BoundaryPath = std::vector<BoundaryPiece>;

Complex piece_point(const BoundaryPiece& piece, double t);     // t in [0, 1]
Complex piece_tangent(const BoundaryPiece& piece, double t);   // d point / dt

BoundaryPath boundary(const Region& region);
// Boundary of the rectangle intersected with the open unit disk; empty when they do not meet.
BoundaryPath clipped_rect_boundary(const RectRegion& rect);

}  // namespace reichlab::geom
