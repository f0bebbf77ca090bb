#include "reichlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>

namespace reichlab::lattice {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOmegaRadius = 0.25;

double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::uint32_t low32(std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffU); }
std::uint32_t high32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

// Points bucketed by integer square of side `size`.
class Buckets {
public:
    Buckets(const std::vector<Complex>& points, double size) : points_(points), size_(size) {
        for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
    }

    // Smallest distance from z to a point within `reach` (infinity if none).
    double nearest(Complex z, double reach) const {
        double best = std::numeric_limits<double>::infinity();
        const long span = static_cast<long>(std::ceil(reach / size_));
        const auto [cx, cy] = key(z);
        for (long dx = -span; dx <= span; ++dx) {
            for (long dy = -span; dy <= span; ++dy) {
                auto it = cells_.find({cx + dx, cy + dy});
                if (it == cells_.end()) continue;
                for (std::size_t i : it->second) best = std::min(best, std::abs(points_[i] - z));
            }
        }
        return best;
    }

private:
    std::pair<long, long> key(Complex z) const {
        return {static_cast<long>(std::floor(z.real() / size_)),
                static_cast<long>(std::floor(z.imag() / size_))};
    }

    const std::vector<Complex>& points_;
    double size_;
    std::map<std::pair<long, long>, std::vector<std::size_t>> cells_;
};

}  // namespace

IndexWindow centered_window(long n) {
    if (n < 1) throw DomainError("centered_window: size must be positive");
    const long lo = -(n / 2);
    return {lo, lo + n - 1, lo, lo + n - 1};
}

Complex lattice_point(long k, long l) {
    return {static_cast<double>(k), static_cast<double>(l)};
}

Cell cell_of(Complex z) {
    return {static_cast<long>(std::floor(z.real() + 0.5)), static_cast<long>(std::floor(z.imag() + 0.5))};
}

double lattice_distance(Complex z) {
    return std::hypot(z.real() - std::round(z.real()), z.imag() - std::round(z.imag()));
}

bool omega_contains(Complex z) { return lattice_distance(z) >= kOmegaRadius; }

double distance_lower_bound(Complex z, Complex w, double s0) {
    if (!(s0 > 0.0)) throw DomainError("distance_lower_bound: s0 must be positive");
    return 0.5 * s0 * std::abs(z - w) - 2.0 * s0;
}

Quasilattice::Quasilattice(IndexWindow window, double delta, std::vector<Complex> offsets,
                           std::optional<std::uint64_t> seed)
    : window_(window), delta_(delta), offsets_(std::move(offsets)), seed_(seed) {
    if (!(delta >= 0.0) || delta > kMaxQuasilatticeDelta) {
        throw InvariantViolation("quasilattice: delta must lie in [0, 1/8]");
    }
    if (offsets_.size() != window_.count()) {
        throw InvariantViolation("quasilattice: offset count does not match the window");
    }
    for (const auto& o : offsets_) {
        if (!(std::abs(o) <= delta_ * (1.0 + 1e-12))) {
            throw InvariantViolation("quasilattice: offset exceeds delta");
        }
    }
    // Offsets below 1/2 keep points in distinct open cells, so they are pairwise distinct.
}

Complex Quasilattice::offset(long k, long l) const {
    if (!window_.contains(k, l)) throw DomainError("quasilattice: index outside the window");
    return offsets_[window_.index(k, l)];
}

Complex Quasilattice::point(long k, long l) const { return lattice_point(k, l) + offset(k, l); }

double Quasilattice::max_offset() const {
    double m = 0.0;
    for (const auto& o : offsets_) m = std::max(m, std::abs(o));
    return m;
}

Quasilattice make_quasilattice(std::uint64_t seed, double delta, const IndexWindow& window) {
    if (!(delta >= 0.0) || delta > kMaxQuasilatticeDelta) {
        throw InvariantViolation("make_quasilattice: delta must lie in [0, 1/8]");
    }
    std::vector<Complex> offsets;
    offsets.reserve(window.count());
    for (long l = window.l_min; l <= window.l_max; ++l) {
        for (long k = window.k_min; k <= window.k_max; ++k) {
            const auto uk = static_cast<std::uint64_t>(k);
            const auto ul = static_cast<std::uint64_t>(l);
            std::seed_seq seq{low32(seed), high32(seed), low32(uk), high32(uk), low32(ul), high32(ul)};
            std::mt19937_64 gen(seq);
            const double radius = delta * std::sqrt(unit_uniform(gen));
            const double angle = 2.0 * kPi * unit_uniform(gen);
            offsets.push_back(delta == 0.0 ? Complex(0.0) : std::polar(radius, angle));
        }
    }
    return Quasilattice(window, delta, std::move(offsets), seed);
}

bool certify_well_distributed(const PointSet& set, double x0, double x1, double y0, double y1) {
    const double c = set.claimed_c;
    if (!(c > 0.0)) throw DomainError("certify_well_distributed: claimed_c must be positive");
    if (!(x1 >= x0) || !(y1 >= y0)) throw DomainError("certify_well_distributed: empty rectangle");
    const double h = 0.25 * c;
    const double reach = c - h / std::sqrt(2.0);
    const Buckets buckets(set.points, c);
    const long nx = static_cast<long>(std::ceil((x1 - x0) / h));
    const long ny = static_cast<long>(std::ceil((y1 - y0) / h));
    for (long i = 0; i <= nx; ++i) {
        for (long j = 0; j <= ny; ++j) {
            const Complex g(std::min(x0 + i * h, x1), std::min(y0 + j * h, y1));
            if (!(buckets.nearest(g, reach) <= reach)) return false;
        }
    }
    return true;
}

Quasilattice extract_quasilattice(const PointSet& set, const IndexWindow& window) {
    std::map<std::pair<long, long>, std::vector<Complex>> by_cell;
    for (const auto& p : set.points) {
        const Cell c = cell_of(p);
        if (window.contains(c.k, c.l)) by_cell[{c.k, c.l}].push_back(p);
    }
    std::vector<Complex> offsets;
    offsets.reserve(window.count());
    for (long l = window.l_min; l <= window.l_max; ++l) {
        for (long k = window.k_min; k <= window.k_max; ++k) {
            const Complex z = lattice_point(k, l);
            std::optional<Complex> best;
            auto it = by_cell.find({k, l});
            if (it != by_cell.end()) {
                for (const auto& p : it->second) {
                    const double d = std::abs(p - z);
                    if (d > kMaxQuasilatticeDelta) continue;
                    if (!best) {
                        best = p;
                        continue;
                    }
                    const double bd = std::abs(*best - z);
                    if (d < bd || (d == bd && std::make_pair(p.real(), p.imag()) <
                                                  std::make_pair(best->real(), best->imag()))) {
                        best = p;
                    }
                }
            }
            if (!best) {
                throw NotWellDistributed("extract_quasilattice: no point within 1/8 of the lattice point", k, l);
            }
            offsets.push_back(*best - z);
        }
    }
    return Quasilattice(window, kMaxQuasilatticeDelta, std::move(offsets));
}

double omega_path_length(std::span<const Complex> path) {
    double total = 0.0;
    for (std::size_t s = 1; s < path.size(); ++s) {
        const Complex a = path[s - 1];
        const Complex d = path[s] - a;
        const double len = std::abs(d);
        if (len == 0.0) continue;
        // Parameter intervals where the segment is strictly inside a disk D_{1/4}(k + l i).
        std::vector<std::pair<double, double>> inside;
        const long k0 = static_cast<long>(std::floor(std::min(a.real(), path[s].real()) - kOmegaRadius));
        const long k1 = static_cast<long>(std::ceil(std::max(a.real(), path[s].real()) + kOmegaRadius));
        const long l0 = static_cast<long>(std::floor(std::min(a.imag(), path[s].imag()) - kOmegaRadius));
        const long l1 = static_cast<long>(std::ceil(std::max(a.imag(), path[s].imag()) + kOmegaRadius));
        const double qa = len * len;
        for (long k = k0; k <= k1; ++k) {
            for (long l = l0; l <= l1; ++l) {
                const Complex e = a - lattice_point(k, l);
                const double qb = 2.0 * (e.real() * d.real() + e.imag() * d.imag());
                const double qc = std::norm(e) - kOmegaRadius * kOmegaRadius;
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc <= 0.0) continue;
                const double root = std::sqrt(disc);
                const double t0 = std::max(0.0, (-qb - root) / (2.0 * qa));
                const double t1 = std::min(1.0, (-qb + root) / (2.0 * qa));
                if (t1 > t0) inside.emplace_back(t0, t1);
            }
        }
        std::sort(inside.begin(), inside.end());
        double covered = 0.0;
        double reach = 0.0;
        for (const auto& [t0, t1] : inside) {
            const double from = std::max(t0, reach);
            if (t1 > from) covered += t1 - from;
            reach = std::max(reach, t1);
        }
        total += len * std::max(0.0, 1.0 - covered);
    }
    return total;
}

double omega_path_length(std::span<const Complex> path, const Quasilattice& lattice) {
    if (path.empty()) return 0.0;
    for (const Complex end : {path.front(), path.back()}) {
        const Cell c = cell_of(end);
        if (lattice.window().contains(c.k, c.l) && lattice.point(c.k, c.l) == end) {
            throw PreconditionError("omega_path_length: path endpoint is a puncture");
        }
    }
    return omega_path_length(path);
}

}  // namespace reichlab::lattice
