#include "reichlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <variant>

namespace reichlab::quadrature {

namespace {

using geom::RectRegion;
using geom::kPi;

constexpr std::size_t kNodesPerCell = 225;

Rule1d make_gk15() {
    // Positive Kronrod abscissae in decreasing order, with weights (QUADPACK qk15).
    constexpr std::array<double, 8> xgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    constexpr std::array<double, 8> wgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    Rule1d rule{};
    for (int i = 0; i < 8; ++i) {
        rule.nodes[i] = -xgk[i];
        rule.nodes[14 - i] = xgk[i];
        rule.kronrod[i] = wgk[i];
        rule.kronrod[14 - i] = wgk[i];
        const double g = (i % 2 == 1) ? wg[i / 2] : 0.0;
        rule.gauss[i] = g;
        rule.gauss[14 - i] = g;
    }
    return rule;
}

// Axes along which a cell is bisected next.
enum class SplitAxes { x, y, both };

struct Cell {
    RectRegion rect;
    Complex value;
    double error;
    SplitAxes axes;
};

struct ByError {
    bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

Cell evaluate_cell(const ParamIntegrand& g, const RectRegion& r) {
    const auto& rule = gauss_kronrod15();
    const double hx = 0.5 * (r.x1 - r.x0);
    const double hy = 0.5 * (r.y1 - r.y0);
    const double cx = 0.5 * (r.x0 + r.x1);
    const double cy = 0.5 * (r.y0 + r.y1);
    Complex kron = 0.0;
    Complex gauss = 0.0;
    Complex gauss_x = 0.0;  // Gauss in x, Kronrod in y
    Complex gauss_y = 0.0;  // Kronrod in x, Gauss in y
    for (int i = 0; i < 15; ++i) {
        const double x = cx + hx * rule.nodes[i];
        Complex row_k = 0.0;
        Complex row_g = 0.0;
        for (int j = 0; j < 15; ++j) {
            const Complex v = g(x, cy + hy * rule.nodes[j]);
            row_k += rule.kronrod[j] * v;
            row_g += rule.gauss[j] * v;
        }
        kron += rule.kronrod[i] * row_k;
        gauss += rule.gauss[i] * row_g;
        gauss_x += rule.gauss[i] * row_k;
        gauss_y += rule.kronrod[i] * row_g;
    }
    const double jac = hx * hy;
    kron *= jac;
    gauss *= jac;
    if (!std::isfinite(kron.real()) || !std::isfinite(kron.imag())) {
        throw IntegrabilityError("quadrature: integrand is not finite on a cell");
    }
    // Bisect only along an axis whose one-dimensional error clearly dominates.
    const double ex = std::abs(kron - jac * gauss_x);
    const double ey = std::abs(kron - jac * gauss_y);
    SplitAxes axes = SplitAxes::both;
    if (ex > 8.0 * ey) axes = SplitAxes::x;
    if (ey > 8.0 * ex) axes = SplitAxes::y;
    return {r, kron, std::abs(kron - gauss), axes};
}

std::vector<RectRegion> split(const RectRegion& r, SplitAxes axes) {
    const double mx = 0.5 * (r.x0 + r.x1);
    const double my = 0.5 * (r.y0 + r.y1);
    switch (axes) {
        case SplitAxes::x: return {RectRegion{r.x0, mx, r.y0, r.y1}, RectRegion{mx, r.x1, r.y0, r.y1}};
        case SplitAxes::y: return {RectRegion{r.x0, r.x1, r.y0, my}, RectRegion{r.x0, r.x1, my, r.y1}};
        case SplitAxes::both: break;
    }
    return {RectRegion{r.x0, mx, r.y0, my}, RectRegion{mx, r.x1, r.y0, my},
            RectRegion{r.x0, mx, my, r.y1}, RectRegion{mx, r.x1, my, r.y1}};
}

double target_error(const Options& o, Complex value) {
    return std::max(o.abs_tol, o.rel_tol * std::abs(value));
}

}  // namespace

const Rule1d& gauss_kronrod15() {
    static const Rule1d rule = make_gk15();
    return rule;
}

std::vector<WeightedNode> tensor_gk15(const RectRegion& r) {
    const auto& rule = gauss_kronrod15();
    const double hx = 0.5 * (r.x1 - r.x0);
    const double hy = 0.5 * (r.y1 - r.y0);
    const double cx = 0.5 * (r.x0 + r.x1);
    const double cy = 0.5 * (r.y0 + r.y1);
    std::vector<WeightedNode> nodes;
    nodes.reserve(kNodesPerCell);
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
            nodes.push_back({cx + hx * rule.nodes[i], cy + hy * rule.nodes[j],
                             rule.kronrod[i] * rule.kronrod[j] * hx * hy,
                             rule.gauss[i] * rule.gauss[j] * hx * hy});
        }
    }
    return nodes;
}

QuadratureResult integrate_interval(const std::function<Complex(double)>& f, double a, double b,
                                    const Options& options) {
    const auto& rule = gauss_kronrod15();
    struct Piece {
        double a, b;
        Complex value;
        double error;
    };
    auto eval = [&](double lo, double hi) {
        const double h = 0.5 * (hi - lo);
        const double c = 0.5 * (hi + lo);
        Complex k = 0.0, g = 0.0;
        for (int i = 0; i < 15; ++i) {
            const Complex v = f(c + h * rule.nodes[i]);
            k += rule.kronrod[i] * v;
            g += rule.gauss[i] * v;
        }
        k *= h;
        g *= h;
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
            throw IntegrabilityError("quadrature: integrand is not finite on an interval");
        }
        return Piece{lo, hi, k, std::abs(k - g)};
    };
    auto cmp = [](const Piece& x, const Piece& y) { return x.error < y.error; };
    std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> heap(cmp);
    QuadratureResult out;
    Piece first = eval(a, b);
    out.evaluations = 15;
    Complex total = first.value;
    double err = first.error;
    heap.push(first);
    while (err > target_error(options, total)) {
        if (out.evaluations + 30 > options.max_evaluations) break;
        Piece worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        Piece left = eval(worst.a, mid);
        Piece right = eval(mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    out.certified = err <= target_error(options, total);
    std::vector<Piece> pieces;
    pieces.reserve(heap.size());
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    out.value = 0.0;
    out.error_estimate = 0.0;
    for (const auto& p : pieces) {
        out.value += p.value;
        out.error_estimate += p.error;
    }
    out.cells_used = pieces.size();
    return out;
}

QuadratureResult integrate_param(const ParamIntegrand& g, std::span<const RectRegion> initial_cells,
                                 const Options& options) {
    std::priority_queue<Cell, std::vector<Cell>, ByError> heap;
    QuadratureResult out;
    Complex total = 0.0;
    double err = 0.0;
    for (const auto& r : initial_cells) {
        if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) continue;
        Cell c = evaluate_cell(g, r);
        out.evaluations += kNodesPerCell;
        total += c.value;
        err += c.error;
        heap.push(c);
    }
    while (!heap.empty() && err > target_error(options, total)) {
        if (out.evaluations + 4 * kNodesPerCell > options.max_evaluations) break;
        const Cell worst = heap.top();
        const double w = std::max(worst.rect.x1 - worst.rect.x0, worst.rect.y1 - worst.rect.y0);
        const double scale = std::max({std::abs(worst.rect.x0), std::abs(worst.rect.x1),
                                       std::abs(worst.rect.y0), std::abs(worst.rect.y1), 1.0});
        if (w < 1e-13 * scale) break;
        SplitAxes axes = worst.axes;
        if (axes == SplitAxes::x && worst.rect.x1 - worst.rect.x0 < 1e-13 * scale) axes = SplitAxes::y;
        if (axes == SplitAxes::y && worst.rect.y1 - worst.rect.y0 < 1e-13 * scale) axes = SplitAxes::x;
        heap.pop();
        total -= worst.value;
        err -= worst.error;
        for (const auto& child : split(worst.rect, axes)) {
            Cell c = evaluate_cell(g, child);
            total += c.value;
            err += c.error;
            heap.push(c);
            out.evaluations += kNodesPerCell;
        }
    }
    // Re-accumulate in a fixed geometric order to avoid drift from the running sums.
    std::vector<Cell> cells;
    cells.reserve(heap.size());
    while (!heap.empty()) {
        cells.push_back(heap.top());
        heap.pop();
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.rect.x0 != b.rect.x0) return a.rect.x0 < b.rect.x0;
        if (a.rect.y0 != b.rect.y0) return a.rect.y0 < b.rect.y0;
        return a.rect.x1 < b.rect.x1;
    });
    for (const auto& c : cells) {
        out.value += c.value;
        out.error_estimate += c.error;
    }
    out.cells_used = cells.size();
    out.certified = out.error_estimate <= target_error(options, out.value);
    return out;
}

QuadratureResult integrate_rect(const Integrand& f, const RectRegion& rect, const Options& options) {
    const RectRegion cells[] = {rect};
    return integrate_param([&](double x, double y) { return f(Complex(x, y)); }, cells, options);
}

QuadratureResult integrate_region(const Integrand& f, const geom::Region& region,
                                  const Options& options) {
    if (const auto* r = std::get_if<RectRegion>(&region)) return integrate_rect(f, *r, options);
    Complex center;
    double r0, r1, t0, t1;
    if (const auto* d = std::get_if<geom::DiskRegion>(&region)) {
        center = d->center;
        r0 = 0.0;
        r1 = d->radius;
        t0 = 0.0;
        t1 = 2.0 * kPi;
    } else {
        const auto& s = std::get<geom::AnnulusSector>(region);
        center = s.center;
        r0 = s.r_in;
        r1 = s.r_out;
        t0 = s.theta0;
        t1 = s.theta1;
    }
    const int nt = std::max(1, static_cast<int>(std::ceil((t1 - t0) / (0.5 * kPi))));
    std::vector<RectRegion> cells;
    for (int j = 0; j < nt; ++j) {
        cells.push_back({r0, r1, t0 + (t1 - t0) * j / nt, t0 + (t1 - t0) * (j + 1) / nt});
    }
    return integrate_param(
        [&](double r, double t) { return f(center + std::polar(r, t)) * r; }, cells, options);
}

QuadratureResult integrate_pole(const Integrand& f, Complex center, double R, const Options& options,
                                const PoleOptions& pole) {
    if (pole.pole_order_hint != 1) {
        throw IntegrabilityError("integrate_pole: only first-order singularities are supported");
    }
    if (!(R > 0.0) || !(pole.r_min > 0.0) || pole.r_min >= R) {
        throw DomainError("integrate_pole: need 0 < r_min < R");
    }
    // sup over a circle of |f| r; for a first-order singularity this stays bounded as r -> 0.
    auto circle_sup = [&](double r) {
        double m = 0.0;
        constexpr int kAngles = 64;
        for (int i = 0; i < kAngles; ++i) {
            m = std::max(m, std::abs(f(center + std::polar(r, 2.0 * kPi * (i + 0.5) / kAngles))) * r);
        }
        return m;
    };
    const double near = circle_sup(pole.r_min);
    const double far_r = std::min(R, 1e3 * pole.r_min);
    const double far = circle_sup(far_r);
    if (!std::isfinite(near)) throw IntegrabilityError("integrate_pole: integrand not finite near center");
    if (near > 0.0) {
        const double decades = std::log10(far_r / pole.r_min);
        const double growth = far > 0.0 ? std::log10(near / far) / decades
                                        : std::numeric_limits<double>::infinity();
        if (decades > 0.5 && growth > 0.25) {
            throw IntegrabilityError("integrate_pole: integrand grows faster than first order");
        }
    }
    std::vector<RectRegion> cells;
    double a = pole.r_min;
    while (a < R) {
        const double b = std::min(R, 2.0 * a);
        for (int j = 0; j < 4; ++j) cells.push_back({a, b, 0.5 * kPi * j, 0.5 * kPi * (j + 1)});
        a = b;
    }
    auto out = integrate_param(
        [&](double r, double t) { return f(center + std::polar(r, t)) * r; }, cells, options);
    // The omitted core is reported in the estimate; certification refers to the polar part.
    out.error_estimate += near * 2.0 * kPi * pole.r_min;
    return out;
}

double envelope_tail_bound(double c, double rho) {
    // Each lattice point z owns its unit cell; on that cell |x| >= |z| - sqrt(2)/2,
    // so the sum is dominated by e^{sqrt2/(2c)} * integral_{|x| > rho - sqrt2/2} c e^{-|x|/c}.
    const double h = 0.5 * std::sqrt(2.0);
    const double a = std::max(0.0, rho - h);
    return c * std::exp(h / c) * 2.0 * kPi * c * (a + c) * std::exp(-a / c);
}

TailedSum lattice_sum(const std::function<Complex(long, long)>& term, double envelope_c,
                      Complex center, double tol, long max_shells) {
    if (!(envelope_c > 0.0) || !(tol > 0.0)) throw DomainError("lattice_sum: need c > 0 and tol > 0");
    const long k0 = std::lround(center.real());
    const long l0 = std::lround(center.imag());
    const double offset = std::abs(center - Complex(static_cast<double>(k0), static_cast<double>(l0)));
    TailedSum out;
    auto add = [&](long k, long l) {
        const Complex v = term(k, l);
        const double r = std::abs(Complex(static_cast<double>(k), static_cast<double>(l)) - center);
        const double env = envelope_c * std::exp(-r / envelope_c);
        if (std::abs(v) > env * (1.0 + 1e-12) + 1e-300) {
            throw EnvelopeViolation("lattice_sum: term exceeds its envelope", k, l);
        }
        out.value += v;
        ++out.terms_used;
    };
    for (long m = 0; m <= max_shells; ++m) {
        if (m == 0) {
            add(k0, l0);
        } else {
            for (long k = k0 - m; k <= k0 + m; ++k) {
                add(k, l0 - m);
                add(k, l0 + m);
            }
            for (long l = l0 - m + 1; l <= l0 + m - 1; ++l) {
                add(k0 - m, l);
                add(k0 + m, l);
            }
        }
        // Points outside shell m satisfy |z - center| >= m + 1 - offset.
        out.tail_bound = envelope_tail_bound(envelope_c, static_cast<double>(m + 1) - offset);
        if (out.tail_bound <= tol) return out;
    }
    return out;
}

}  // namespace reichlab::quadrature
