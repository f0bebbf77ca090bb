#include "reichlab/reich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "parallel.hpp"

namespace reichlab::reich {

namespace {

using geom::kPi;

double modulus(long k, long l) { return std::hypot(static_cast<double>(k), static_cast<double>(l)); }

std::string format_point(Complex z) {
    std::ostringstream out;
    out.precision(6);
    out << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return out.str();
}

// Fixed tensor Gauss-Kronrod rule on a polar patch around `center`:
// theta in [theta0, theta1], r from r_in to r_out(theta).
struct PolarNode {
    Complex z;
    double kronrod;
    double gauss;
};

void polar_patch(std::vector<PolarNode>& out, Complex center, double theta0, double theta1,
                 double r_in, const std::function<double(double)>& r_out) {
    const auto& rule = quadrature::gauss_kronrod15();
    const double ht = 0.5 * (theta1 - theta0);
    const double mt = 0.5 * (theta1 + theta0);
    for (int i = 0; i < 15; ++i) {
        const double theta = mt + ht * rule.nodes[i];
        const double outer = r_out(theta);
        const double hr = 0.5 * (outer - r_in);
        const double mr = 0.5 * (outer + r_in);
        for (int j = 0; j < 15; ++j) {
            const double r = mr + hr * rule.nodes[j];
            const double jac = ht * hr * r;
            out.push_back({center + std::polar(r, theta), jac * rule.kronrod[i] * rule.kronrod[j],
                           jac * rule.gauss[i] * rule.gauss[j]});
        }
    }
}

// Cell square minus D_{1/4}(center): eight patches split at the axes and diagonals.
std::vector<PolarNode> omega_part_nodes(Complex center) {
    std::vector<PolarNode> nodes;
    const auto square = [](double theta) {
        return 0.5 / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
    };
    for (int p = 0; p < 8; ++p) {
        polar_patch(nodes, center, p * kPi / 4.0, (p + 1) * kPi / 4.0, 0.25, square);
    }
    return nodes;
}

std::vector<PolarNode> disk_nodes(Complex center, double radius) {
    std::vector<PolarNode> nodes;
    const auto edge = [radius](double) { return radius; };
    for (int p = 0; p < 4; ++p) polar_patch(nodes, center, p * kPi / 2.0, (p + 1) * kPi / 2.0, 0.0, edge);
    return nodes;
}

constexpr int kCircleSamples = 64;

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

double alpha(long p, long q, long n) {
    if (n < 1) throw DomainError("alpha: n must be at least 1");
    const double b = modulus(p, q) / static_cast<double>(n) + 1.0;
    const double b2 = b * b;
    return 1.0 / (b2 * b2);
}

BoundCheck alpha_diff_bound_check(long p, long q, long k, long l, long n) {
    const double a = alpha(p, q, n);
    const double d = modulus(k - p, l - q);
    return {std::abs(a - alpha(k, l, n)), 4.0 * a / static_cast<double>(n) * std::pow(2.0 + d, 4)};
}

BoundCheck alpha_lagrange_check(long p, long q, long k, long l, long n) {
    if (n < 1) throw DomainError("alpha_lagrange_check: n must be at least 1");
    const double nn = static_cast<double>(n);
    const double a = modulus(p, q);
    const double b = modulus(k, l);
    const double lhs = std::abs(std::pow(a / nn + 1.0, 4) - std::pow(b / nn + 1.0, 4));
    const double rhs = 4.0 * modulus(p - k, q - l) / nn * std::pow(std::max(a, b) / nn + 1.0, 3);
    return {lhs, rhs};
}

double riemann_alpha_sum(long n, double radius, int power) {
    if (n < 1) throw DomainError("riemann_alpha_sum: n must be at least 1");
    const long r = static_cast<long>(std::floor(radius));
    const double nn = static_cast<double>(n);
    double sum = 0.0;
    for (long k = -r; k <= r; ++k) {
        for (long l = -r; l <= r; ++l) {
            const double m = modulus(k, l);
            if (m <= radius) sum += std::pow(m / nn + 1.0, -power);
        }
    }
    return sum / (nn * nn);
}

double riemann_alpha_limit(int power) {
    if (power <= 2) throw DomainError("riemann_alpha_limit: power must exceed 2");
    return 2.0 * kPi / ((power - 1.0) * (power - 2.0));
}

double lambda_gap(Complex lambda) { return std::abs(lambda) - lambda.real(); }

double lambda_gap_identity(Complex lambda) {
    const double den = std::abs(lambda) + lambda.real();
    if (!(den > 0.0)) throw DomainError("lambda_gap_identity: |lambda| + Re(lambda) must be positive");
    return lambda.imag() * lambda.imag() / den;
}

double majorant_constant(double c) {
    if (!(c > 0.0)) throw DomainError("majorant_constant: C must be positive");
    const auto term = [c](double r) { return 4.0 * std::pow(2.0 + r, 4) * std::exp(-r / c); };
    double sum = term(0.0);
    // Terms decrease in r once r > 4c - 2; stop when a whole shell is negligible there.
    for (long s = 1;; ++s) {
        double shell = 0.0;
        for (long t = -s; t < s; ++t) {
            shell += term(modulus(s, t)) + term(modulus(-s, -t)) + term(modulus(-t, s)) + term(modulus(t, -s));
        }
        sum += shell;
        if (s > 4.0 * c && shell <= 1e-17 * sum) break;
        if (s > 1'000'000) throw ConvergenceError("majorant_constant: shells did not settle", sum, shell);
    }
    return c * std::exp(std::sqrt(2.0) / (2.0 * c)) * sum;
}

double boundary_deviation(const PoleFunction& f, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Complex z = std::polar(0.5, 2.0 * kPi * i / samples);
        worst = std::max(worst, std::abs(f(z) - 1.0));
    }
    return worst;
}

PoleFunction laurent_pole_function(std::function<Complex(Complex)> f, int samples, double residue_floor) {
    Complex residue = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Complex z = std::polar(0.5, 2.0 * kPi * i / samples);
        residue += f(z) * z;
    }
    residue /= static_cast<double>(samples);
    if (std::abs(residue) <= residue_floor) residue = 0.0;
    return {[f = std::move(f), residue](Complex z) { return f(z) - residue / z; }, residue};
}

namespace {

void check_pole_preconditions(const PoleFunction& f, double eps, const char* what) {
    if (!(eps > 0.0) || eps > 0.5) {
        throw PreconditionError(std::string(what) + ": eps must lie in (0, 1/2]");
    }
    if (boundary_deviation(f) > eps * (1.0 + 1e-12)) {
        throw PreconditionError(std::string(what) + ": |f - 1| exceeds eps on |z| = 1/2");
    }
}

}  // namespace

quadrature::QuadratureResult pole_integral_eq1(const PoleFunction& f, double eps,
                                               const quadrature::Options& options) {
    check_pole_preconditions(f, eps, "pole_integral_eq1");
    return quadrature::integrate_pole([&](Complex z) { return Complex(lambda_gap(f(z))); }, 0.0, 0.5,
                                      options);
}

quadrature::QuadratureResult pole_integral_eq2(const PoleFunction& f, double eps, double K,
                                               const quadrature::Options& options) {
    check_pole_preconditions(f, eps, "pole_integral_eq2");
    if (!(K >= 100.0)) throw PreconditionError("pole_integral_eq2: K must be at least 100");
    quadrature::QuadratureResult empty;
    empty.certified = true;
    const double a = std::abs(f.residue);
    // Bound on the regular part over the closed disk, from its boundary values (maximum modulus).
    double m = 0.0;
    for (int i = 0; i < 1024; ++i) {
        m = std::max(m, std::abs(f.regular_part(std::polar(0.5, 2.0 * kPi * i / 1024.0))));
    }
    m = 1.05 * m + 1e-12;
    if (a == 0.0) {
        if (m < K) return empty;  // |f| < K on the whole disk
        throw PreconditionError("pole_integral_eq2: regular part reaches K");
    }
    if (!(m < K)) throw PreconditionError("pole_integral_eq2: regular part reaches K");
    // |f| >= K for r <= a / (K + m) and |f| < K for r > a / (K - m).
    const double r_in = a / (K + m);
    const double r_out = std::min(0.5, a / (K - m));
    const auto crossing = [&](double theta) {
        const Complex u = std::polar(1.0, theta);
        double lo = r_in;
        double hi = r_out;
        for (int i = 0; i < 80 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std::abs(f(mid * u)) >= K ? lo : hi) = mid;
        }
        return lo;
    };
    double inner_error = 0.0;
    bool inner_certified = true;
    auto outer = quadrature::integrate_interval(
        [&](double theta) {
            const Complex u = std::polar(1.0, theta);
            const auto inner = quadrature::integrate_interval(
                [&](double r) { return Complex(std::abs(f(r * u)) * r); }, 0.0, crossing(theta), options);
            inner_error = std::max(inner_error, inner.error_estimate);
            inner_certified = inner_certified && inner.certified;
            return inner.value;
        },
        0.0, 2.0 * kPi, options);
    outer.error_estimate += 2.0 * kPi * inner_error;
    outer.certified = outer.certified && inner_certified;
    return outer;
}

PhiValue phi_n(const partition::SurfaceModel& model, std::span<const partition::PartitionAtom> atoms,
               long n, Complex z, double radius) {
    const auto& w = model.window();
    double farthest = 0.0;
    for (long l = w.l_min; l <= w.l_max; ++l) {
        for (long k = w.k_min; k <= w.k_max; ++k) {
            farthest = std::max(farthest, std::abs(z - lattice::lattice_point(k, l)));
        }
    }
    if (radius > farthest) throw WindowTooSmall("phi_n: radius reaches past every cell of the window");
    PhiValue out{0.0, 0.0};
    for (const auto& a : atoms) {
        const double d = std::abs(z - lattice::lattice_point(a.k, a.l));
        const double weight = alpha(a.k, a.l, n);
        if (d <= radius) {
            out.value += weight * a.evaluator(z);
        } else {
            out.tail += weight * a.decay_C * std::exp(-d / a.decay_C);
        }
    }
    return out;
}

std::vector<lattice::Cell> audited_cells(const partition::SurfaceModel& model) {
    std::vector<lattice::Cell> cells;
    const auto& w = model.window();
    for (long l = w.l_min; l <= w.l_max; ++l) {
        for (long k = w.k_min; k <= w.k_max; ++k) {
            bool inside = true;
            for (double dx : {-0.5, 0.5}) {
                for (double dy : {-0.5, 0.5}) {
                    inside = inside && model.in_audit_region(Complex(k + dx, l + dy));
                }
            }
            if (inside) cells.push_back({k, l});
        }
    }
    return cells;
}

ReichReport reich_audit(const partition::SurfaceModel& model,
                        std::span<const partition::PartitionAtom> atoms, const AuditOptions& options) {
    if (options.n_list.empty()) throw DomainError("reich_audit: empty n list");
    for (std::size_t i = 0; i < options.n_list.size(); ++i) {
        if (options.n_list[i] < 1 || (i > 0 && options.n_list[i] <= options.n_list[i - 1])) {
            throw DomainError("reich_audit: n list must be ascending positive integers");
        }
    }
    for (double K : options.k_list) {
        if (!(K >= 100.0)) throw DomainError("reich_audit: K entries must be at least 100");
    }
    if (!(options.tol > 0.0)) throw DomainError("reich_audit: tol must be positive");

    ReichReport report;
    report.n_values = options.n_list;
    report.k_values = options.k_list;
    std::vector<double> k_sorted = options.k_list;
    std::sort(k_sorted.begin(), k_sorted.end());
    const std::size_t nn = options.n_list.size();

    // Atoms present in the model, in window order, with their weights per n.
    std::vector<lattice::Cell> atom_cells;
    std::map<std::pair<long, long>, std::size_t> atom_index;
    for (const auto& a : atoms) {
        report.partition_C = std::max(report.partition_C, a.decay_C);
        if (!model.cell_nonempty(a.k, a.l)) continue;
        atom_index[{a.k, a.l}] = atom_cells.size();
        atom_cells.push_back({a.k, a.l});
    }
    if (atom_cells.empty()) throw DomainError("reich_audit: no atoms");
    report.majorant_C = majorant_constant(report.partition_C);
    std::vector<std::vector<double>> weights(nn, std::vector<double>(atom_cells.size()));
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < atom_cells.size(); ++j) {
            weights[i][j] = alpha(atom_cells[j].k, atom_cells[j].l, options.n_list[i]);
        }
    }
    const double atom_tol = options.tol / static_cast<double>(atom_cells.size());
    const auto phi_values = [&](Complex z) {
        const auto p = partition::evaluate_atoms(model, atom_cells, z, atom_tol).values;
        std::vector<Complex> phi(nn, 0.0);
        for (std::size_t i = 0; i < nn; ++i) {
            for (std::size_t j = 0; j < p.size(); ++j) phi[i] += weights[i][j] * p[j];
        }
        return phi;
    };

    // ---- Condition 1 and the fitted constant C1 on the Omega grid --------
    const auto grid = partition::omega_grid(model, options.grid_spacing, 0.5 * options.grid_spacing);
    std::vector<std::vector<Complex>> grid_phi(grid.size());
    std::vector<Complex> grid_target(grid.size());
    detail::parallel_for(grid.size(), [&](std::size_t g) {
        grid_phi[g] = phi_values(grid[g]);
        grid_target[g] = partition::window_projection(model, grid[g], options.tol);
    });
    report.target_min = std::numeric_limits<double>::infinity();
    report.target_max = -std::numeric_limits<double>::infinity();
    for (const auto& t : grid_target) {
        report.target_min = std::min(report.target_min, t.real());
        report.target_max = std::max(report.target_max, t.real());
    }
    std::vector<double> omega_max(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
        const long n = options.n_list[i];
        Condition1Row row{n, 0.0, 0.0, 0.0, true};
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const Complex phi = grid_phi[g][i];
            omega_max[i] = std::max(omega_max[i], std::abs(phi));
            const double dev = std::abs(phi - grid_target[g]);
            if (dev > row.max_deviation) {
                row.max_deviation = dev;
                row.witness = grid[g];
            }
            const auto cell = lattice::cell_of(grid[g]);
            if (!model.window().contains(cell.k, cell.l)) continue;
            const double a = alpha(cell.k, cell.l, n);
            row.weight_ratio = std::max(row.weight_ratio,
                                          static_cast<double>(n) * std::abs(phi - a * grid_target[g]) / a);
        }
        report.condition1.push_back(row);
    }
    report.c1 = report.condition1.front().weight_ratio;
    report.n_threshold = 2.0 * report.c1;
    report.condition1_pass = true;
    for (std::size_t i = 0; i < nn; ++i) {
        auto& row = report.condition1[i];
        row.pass = row.weight_ratio <= report.c1 * (1.0 + 1e-9) &&
                   (i == 0 || row.max_deviation < report.condition1[i - 1].max_deviation);
        if (!row.pass && report.condition1_pass) {
            report.witness = "condition 1 at n = " + std::to_string(row.n) + ", z = " + format_point(row.witness);
        }
        report.condition1_pass = report.condition1_pass && row.pass;
        if (static_cast<double>(row.n) < report.n_threshold) {
            report.warnings.push_back("n = " + std::to_string(row.n) +
                                      " is below the lambda-gap threshold 2 C1 = " +
                                      std::to_string(report.n_threshold));
        }
    }

    // ---- Cell integrals for conditions 2 and 3 ---------------------------
    report.cells = audited_cells(model);
    const std::size_t nc = report.cells.size();
    struct CellData {
        std::vector<double> omega_k, omega_g, inner_k, inner_g, local_k, local_g;
        std::vector<double> eps;
        std::vector<Complex> residue;
        Complex puncture;
    };
    std::vector<CellData> data(nc);
    detail::parallel_for(nc, [&](std::size_t c) {
        const auto cell = report.cells[c];
        const Complex center = lattice::lattice_point(cell.k, cell.l);
        auto& d = data[c];
        d.puncture = model.puncture(cell.k, cell.l).value_or(center);
        auto accumulate = [&](const std::vector<PolarNode>& nodes, std::vector<double>& k_sum,
                              std::vector<double>& g_sum) {
            k_sum.assign(nn, 0.0);
            g_sum.assign(nn, 0.0);
            for (const auto& node : nodes) {
                const auto phi = phi_values(node.z);
                for (std::size_t i = 0; i < nn; ++i) {
                    const double gap = lambda_gap(phi[i]);
                    k_sum[i] += node.kronrod * gap;
                    g_sum[i] += node.gauss * gap;
                }
            }
        };
        accumulate(omega_part_nodes(center), d.omega_k, d.omega_g);
        accumulate(disk_nodes(center, 0.25), d.inner_k, d.inner_g);
        accumulate(disk_nodes(d.puncture, 0.5), d.local_k, d.local_g);
        d.eps.assign(nn, 0.0);
        d.residue.assign(nn, 0.0);
        for (int s = 0; s < kCircleSamples; ++s) {
            const Complex u = std::polar(0.5, 2.0 * kPi * s / kCircleSamples);
            const auto phi = phi_values(d.puncture + u);
            for (std::size_t i = 0; i < nn; ++i) {
                const Complex f = phi[i] / alpha(cell.k, cell.l, options.n_list[i]);
                d.eps[i] = std::max(d.eps[i], std::abs(f - 1.0));
                d.residue[i] += f * u / static_cast<double>(kCircleSamples);
            }
        }
    });

    // C2: the largest ratio of the puncture-disk gap integral to alpha eps^2 where the local pole estimate applies.
    for (std::size_t c = 0; c < nc; ++c) {
        const auto cell = report.cells[c];
        for (std::size_t i = 0; i < nn; ++i) {
            report.max_residue = std::max(report.max_residue, std::abs(data[c].residue[i]));
            const double eps = data[c].eps[i];
            if (eps > 0.5 || eps == 0.0) continue;
            const double eq1 = data[c].local_k[i] / alpha(cell.k, cell.l, options.n_list[i]);
            report.c2 = std::max(report.c2, eq1 / (eps * eps));
        }
    }

    const double c1sq = report.c1 * report.c1;
    report.condition2_pass = true;
    std::vector<double> log_n, log_total;
    for (std::size_t i = 0; i < nn; ++i) {
        const long n = options.n_list[i];
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        Condition2Row row{n, 0.0, 0.0, 0.0, 0};
        const bool enforced = static_cast<double>(n) >= report.n_threshold;
        for (std::size_t c = 0; c < nc; ++c) {
            const auto cell = report.cells[c];
            const auto& d = data[c];
            const double a = alpha(cell.k, cell.l, n);
            const double value = d.omega_k[i] + d.inner_k[i];
            const double error = std::abs(d.omega_k[i] - d.omega_g[i]) + std::abs(d.inner_k[i] - d.inner_g[i]);
            const double bound = (1.0 + report.c2) * c1sq * a / n2;
            const bool pass = !enforced || value <= bound + error;
            row.total += value;
            row.quadrature_error += error;
            row.comparison += a / n2;
            if (!pass) {
                ++row.cells_failed;
                if (report.condition2_pass) {
                    report.witness = "condition 2 at n = " + std::to_string(n) + ", cell " +
                                     std::to_string(cell.k) + ":" + std::to_string(cell.l);
                }
                report.condition2_pass = false;
            }
            report.condition2_cells.push_back({n, 0.0, cell.k, cell.l, value, bound, pass});
        }
        if (row.total < 0.0) report.condition2_pass = false;
        if (i > 0 && !(row.total < report.condition2.back().total)) {
            if (report.condition2_pass) {
                report.witness = "condition 2 totals do not decrease at n = " + std::to_string(n);
            }
            report.condition2_pass = false;
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_total.push_back(std::log(std::max(row.total, 1e-300)));
        report.condition2.push_back(row);
    }
    report.condition2_slope = fit_slope(log_n, log_total);

    // ---- Condition 3 -----------------------------------------------------
    const double k_floor = std::max(100.0, 1.0 + report.c1);
    // Residues below the accuracy of the atom values are read as zero.
    const double residue_floor = 10.0 * options.tol;
    report.condition3_pass = true;
    for (double K : k_sorted) {
        if (K < k_floor) {
            report.warnings.push_back("K = " + std::to_string(K) + " is below max(100, 1 + C1); skipped");
        }
    }
    for (std::size_t i = 0; i < nn; ++i) {
        const long n = options.n_list[i];
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        double previous = std::numeric_limits<double>::infinity();
        for (double K : k_sorted) {
            if (K < k_floor) continue;
            Condition3Row row{n, K, omega_max[i], omega_max[i] < K, 0.0, 0.0};
            for (std::size_t c = 0; c < nc; ++c) {
                const auto cell = report.cells[c];
                const auto& d = data[c];
                const double a = alpha(cell.k, cell.l, n);
                double value = 0.0;
                bool pass = true;
                if (d.eps[i] > 0.5) {
                    pass = false;  // the local pole estimate does not apply
                } else if (std::abs(d.residue[i]) > residue_floor) {
                    const Complex w = d.puncture;
                    const PoleFunction f{[&, w, a, res = d.residue[i]](Complex z) {
                                             return phi_values(z + w)[i] / a - res / z;
                                         },
                                         d.residue[i]};
                    const double eps = std::max(d.eps[i], boundary_deviation(f));
                    if (eps <= 0.5) {
                        value = a * pole_integral_eq2(f, eps, K / a, {options.tol, options.tol, 1'000'000})
                                        .value.real();
                    } else {
                        pass = false;
                    }
                }
                // Without a pole, |f| <= 1 + eps < K / alpha on the disk by the maximum principle.
                const double bound = report.c2 * c1sq * a * a / (n2 * K);
                pass = pass && value <= bound + options.tol;
                row.total += value;
                row.bound += bound;
                report.condition3_cells.push_back({n, K, cell.k, cell.l, value, bound, pass});
                if (!pass && static_cast<double>(n) >= report.n_threshold) {
                    if (report.condition3_pass) {
                        report.witness = "condition 3 at n = " + std::to_string(n) + ", cell " +
                                         std::to_string(cell.k) + ":" + std::to_string(cell.l);
                    }
                    report.condition3_pass = false;
                }
            }
            if (!row.omega_empty || row.total > previous) {
                if (report.condition3_pass) {
                    report.witness = "condition 3 at n = " + std::to_string(n) + ", K = " + std::to_string(K);
                }
                report.condition3_pass = false;
            }
            previous = row.total;
            report.condition3.push_back(row);
        }
    }
    return report;
}

}  // namespace reichlab::reich
