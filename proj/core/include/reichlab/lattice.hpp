#pragma once

// The integer lattice, quasilattices around it, the cells W_{k,l} and the
// region Omega of points at distance >= 1/4 from the lattice.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reichlab/errors.hpp"

namespace reichlab::lattice {

// Inclusive integer rectangle k_min..k_max x l_min..l_max.
struct IndexWindow {
    long k_min = 0, k_max = -1, l_min = 0, l_max = -1;

    long width() const { return k_max - k_min + 1; }
    long height() const { return l_max - l_min + 1; }
    std::size_t count() const {
        return width() > 0 && height() > 0 ? static_cast<std::size_t>(width() * height()) : 0;
    }
    bool contains(long k, long l) const {
        return k >= k_min && k <= k_max && l >= l_min && l <= l_max;
    }
    // Row-major position of (k, l): k varies fastest.
    std::size_t index(long k, long l) const {
        return static_cast<std::size_t>((l - l_min) * width() + (k - k_min));
    }
    bool operator==(const IndexWindow&) const = default;
};

// n x n indices centred on the origin: -n/2 .. n - 1 - n/2 in each direction.
IndexWindow centered_window(long n);

struct Cell {
    long k, l;
    bool operator==(const Cell&) const = default;
};

Complex lattice_point(long k, long l);

// The (k, l) whose half-open square z_{k,l} + [-1/2, 1/2)^2 contains z.
Cell cell_of(Complex z);

// Distance from z to the nearest integer lattice point.
double lattice_distance(Complex z);

// d(z, L0) >= 1/4.
bool omega_contains(Complex z);

// (s0 / 2)|z - w| - 2 s0: a lower bound for the hyperbolic distance of C \ L.
double distance_lower_bound(Complex z, Complex w, double s0);

class Quasilattice {
public:
    // Offsets are row-major over the window. Throws InvariantViolation when an
    // offset exceeds delta, delta exceeds 1/8, or two points coincide.
    Quasilattice(IndexWindow window, double delta, std::vector<Complex> offsets,
                 std::optional<std::uint64_t> seed = std::nullopt);

    const IndexWindow& window() const noexcept { return window_; }
    double delta() const noexcept { return delta_; }
    const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }
    const std::vector<Complex>& offsets() const noexcept { return offsets_; }

    Complex offset(long k, long l) const;
    // w_{k,l}; throws DomainError outside the window.
    Complex point(long k, long l) const;
    double max_offset() const;

private:
    IndexWindow window_;
    double delta_;
    std::vector<Complex> offsets_;
    std::optional<std::uint64_t> seed_;
};

inline constexpr double kMaxQuasilatticeDelta = 0.125;

// Offsets of modulus delta * sqrt(u) and uniform angle, drawn per index from
// a generator seeded by (seed, k, l). delta = 0 gives the lattice itself.
Quasilattice make_quasilattice(std::uint64_t seed, double delta, const IndexWindow& window);

struct PointSet {
    std::vector<Complex> points;
    double claimed_c;
};

// True when every disk of radius claimed_c centred in the rectangle
// [x0, x1] x [y0, y1] meets the set. Checked on a grid of spacing h with the
// margin h / sqrt(2), so true is a proof and false may be conservative.
bool certify_well_distributed(const PointSet& set, double x0, double x1, double y0, double y1);

// Picks in every disk D_{1/8}(z_{k,l}) the point of the set nearest z_{k,l}
// (ties broken by real, then imaginary part). Throws NotWellDistributed
// naming the first (k, l), in window order, whose disk holds no point.
Quasilattice extract_quasilattice(const PointSet& set, const IndexWindow& window);

// Euclidean length of the part of the polyline inside Omega.
double omega_path_length(std::span<const Complex> path);
// As above; throws PreconditionError when an endpoint is a point of L.
double omega_path_length(std::span<const Complex> path, const Quasilattice& lattice);

}  // namespace reichlab::lattice
