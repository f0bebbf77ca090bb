#include "reichlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "parallel.hpp"

namespace reichlab::partition {

namespace {

using geom::kPi;

constexpr double kQuotientFill = 0.95;
constexpr double kDiskAuditRadius = 0.9;

fuchsian::FuchsianGroup group_for(const ModelOptions& options) {
    switch (options.kind) {
        case ModelKind::cyclic_quotient:
            return fuchsian::cyclic_group(options.cyclic_length);
        case ModelKind::gamma2_quotient:
            return fuchsian::gamma2_group();
        case ModelKind::disk:
        case ModelKind::punctured_window:
            break;
    }
    return fuchsian::trivial_group();
}

bool is_disk_kind(ModelKind kind) {
    return kind == ModelKind::disk || kind == ModelKind::punctured_window;
}

geom::RectRegion window_rect(const lattice::IndexWindow& w) {
    return {w.k_min - 0.5, w.k_max + 0.5, w.l_min - 0.5, w.l_max + 0.5};
}

quadrature::Options boundary_options(double tol) { return {tol, 1e-13, 1'000'000}; }

Complex boundary_integral(const bergman::PoincareKernel& kernel, const geom::BoundaryPath& path,
                          double tol, double& error) {
    if (path.empty()) return 0.0;
    const auto r = bergman::weighted_kernel_integral(kernel, path, boundary_options(tol));
    if (!r.certified) {
        throw ToleranceNotMet("atom quadrature did not reach tolerance", r.value.real(), 0.0);
    }
    error += r.error_estimate;
    return r.value;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::disk:
            return "disk";
        case ModelKind::cyclic_quotient:
            return "cyclic-quotient";
        case ModelKind::gamma2_quotient:
            return "gamma2-quotient";
        case ModelKind::punctured_window:
            return "punctured-window";
    }
    return "disk";
}

ModelKind parse_model_kind(std::string_view name) {
    for (auto kind : {ModelKind::disk, ModelKind::cyclic_quotient, ModelKind::gamma2_quotient,
                      ModelKind::punctured_window}) {
        if (to_string(kind) == name) return kind;
    }
    throw DomainError("unknown model kind '" + std::string(name) + "'");
}

SurfaceModel::SurfaceModel(const ModelOptions& options)
    : options_(options), group_(group_for(options)) {
    const auto& w = options_.window;
    if (w.count() == 0) throw DomainError("surface model: empty window");
    if (options_.word_depth < 0) throw DomainError("surface model: negative word depth");
    if (!(options_.puncture_radius > 0.0) || options_.puncture_radius >= 0.125) {
        throw DomainError("surface model: puncture radius must lie in (0, 1/8)");
    }
    geom::koebe_constants(options_.r0);  // validates r0
    const auto rect = window_rect(w);
    center_ = Complex(0.5 * (rect.x0 + rect.x1), 0.5 * (rect.y0 + rect.y1));
    const double half_w = 0.5 * (rect.x1 - rect.x0);
    const double half_h = 0.5 * (rect.y1 - rect.y0);
    if (is_disk_kind(options_.kind)) {
        scale_ = std::min(half_w, half_h);
        model_radius_ = 1.0;
        audit_radius_ = kDiskAuditRadius;
    } else {
        const double ball = std::tanh(fuchsian::embedded_radius(group_, 0.0, std::max(1, options_.word_depth)));
        model_radius_ = ball;
        audit_radius_ = kQuotientFill * ball;
        scale_ = std::hypot(half_w, half_h) / audit_radius_;
    }
    if (options_.kind == ModelKind::punctured_window) {
        quasilattice_ = lattice::make_quasilattice(options_.seed, options_.delta, w);
    }
}

bool SurfaceModel::contains(Complex z) const { return std::abs(to_chart(z)) < model_radius_; }

bool SurfaceModel::cell_nonempty(long k, long l) const {
    if (!window().contains(k, l)) return false;
    return !cell_path(k, l).empty();
}

geom::BoundaryPath SurfaceModel::cell_path(long k, long l) const {
    const Complex lo = to_chart(Complex(k - 0.5, l - 0.5));
    const Complex hi = to_chart(Complex(k + 0.5, l + 0.5));
    const geom::RectRegion rect{lo.real(), hi.real(), lo.imag(), hi.imag()};
    if (is_disk_kind(kind())) return geom::clipped_rect_boundary(rect);
    return geom::boundary(rect);
}

std::optional<Complex> SurfaceModel::puncture(long k, long l) const {
    if (!quasilattice_ || !window().contains(k, l)) return std::nullopt;
    return quasilattice_->point(k, l);
}

double SurfaceModel::truncation_error(const bergman::PoincareKernel& kernel) const {
    if (kernel.tail_mass() == 0.0) return 0.0;
    // |tail of B(zeta, w)| (1 - |w|^2)^2 <= 4 tail_mass / (1 - |w|)^2 over a cell of chart area 1 / scale^2.
    const double m = 1.0 - audit_radius_;
    return bergman::calibrated_reproducing_constant() * 4.0 * kernel.tail_mass() /
           (scale_ * scale_ * m * m);
}

AtomValues evaluate_atoms(const SurfaceModel& model, std::span<const lattice::Cell> cells,
                          Complex z, double tol) {
    if (!model.contains(z)) throw DomainError("evaluate_atoms: point outside the model");
    if (!(tol > 0.0)) throw DomainError("evaluate_atoms: tol must be positive");
    const double c = bergman::calibrated_reproducing_constant();
    const auto kernel = bergman::PoincareKernel::with_first(model.group(), model.to_chart(z),
                                                            model.options().word_depth);
    const double inner_tol = tol / c;
    AtomValues out;
    out.values.reserve(cells.size());
    out.error = 0.0;
    for (const auto& cell : cells) {
        double error = 0.0;
        Complex v = boundary_integral(kernel, model.cell_path(cell.k, cell.l), inner_tol, error);
        if (const auto w = model.puncture(cell.k, cell.l)) {
            const geom::BoundaryPath hole = {geom::Arc{
                model.to_chart(*w), model.options().puncture_radius / model.chart_scale(), 0.0, 2.0 * kPi}};
            v -= boundary_integral(kernel, hole, inner_tol, error);
        }
        out.values.push_back(c * v);
        out.error = std::max(out.error, c * error);
    }
    out.error += model.truncation_error(kernel);
    return out;
}

Complex window_projection(const SurfaceModel& model, Complex z, double tol) {
    if (!model.contains(z)) throw DomainError("window_projection: point outside the model");
    const double c = bergman::calibrated_reproducing_constant();
    const auto kernel = bergman::PoincareKernel::with_first(model.group(), model.to_chart(z),
                                                            model.options().word_depth);
    const auto& w = model.window();
    const Complex lo = model.to_chart(Complex(w.k_min - 0.5, w.l_min - 0.5));
    const Complex hi = model.to_chart(Complex(w.k_max + 0.5, w.l_max + 0.5));
    const geom::RectRegion rect{lo.real(), hi.real(), lo.imag(), hi.imag()};
    const auto path = model.kind() == ModelKind::disk || model.kind() == ModelKind::punctured_window
                          ? geom::clipped_rect_boundary(rect)
                          : geom::boundary(rect);
    double error = 0.0;
    Complex v = boundary_integral(kernel, path, 0.5 * tol / c, error);
    if (model.quasilattice()) {
        const double hole_tol = 0.5 * tol / (c * static_cast<double>(w.count()));
        for (long l = w.l_min; l <= w.l_max; ++l) {
            for (long k = w.k_min; k <= w.k_max; ++k) {
                const geom::BoundaryPath hole = {geom::Arc{
                    model.to_chart(*model.puncture(k, l)),
                    model.options().puncture_radius / model.chart_scale(), 0.0, 2.0 * kPi}};
                v -= boundary_integral(kernel, hole, hole_tol, error);
            }
        }
    }
    return c * v;
}

bergman::MeasurableQD cell_indicator(long k, long l) {
    return {[k, l](Complex z) {
                const auto cell = lattice::cell_of(z);
                return Complex(cell.k == k && cell.l == l ? 1.0 : 0.0);
            },
            geom::RectRegion{k - 0.5, k + 0.5, l - 0.5, l + 0.5}};
}

std::vector<Complex> omega_grid(const SurfaceModel& model, double spacing, double offset) {
    if (!(spacing > 0.0)) throw DomainError("omega_grid: spacing must be positive");
    const double reach = model.audit_radius() * model.chart_scale();
    const Complex c = model.chart_center();
    const auto first = [&](double lo) { return offset + spacing * std::ceil((lo - offset) / spacing); };
    std::vector<Complex> out;
    for (double y = first(c.imag() - reach); y <= c.imag() + reach; y += spacing) {
        for (double x = first(c.real() - reach); x <= c.real() + reach; x += spacing) {
            const Complex z(x, y);
            if (model.in_audit_region(z) && lattice::omega_contains(z)) out.push_back(z);
        }
    }
    return out;
}

double envelope_constant(double magnitude, double distance) {
    if (!(distance > 0.0)) throw DomainError("envelope_constant: distance must be positive");
    if (!std::isfinite(magnitude)) throw DomainError("envelope_constant: magnitude is not finite");
    const auto envelope = [distance](double c) { return c * std::exp(-distance / c); };
    if (envelope(kMinDecayC) >= magnitude) return kMinDecayC;
    double lo = kMinDecayC;
    double hi = std::max(1.0, 2.0 * magnitude);
    while (envelope(hi) < magnitude) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = std::sqrt(lo * hi);
        (envelope(mid) >= magnitude ? hi : lo) = mid;
    }
    return hi;
}

namespace {

std::function<Complex(Complex)> atom_evaluator(std::shared_ptr<const SurfaceModel> model, long k,
                                               long l, double tol) {
    return [model = std::move(model), k, l, tol](Complex z) {
        const lattice::Cell cell{k, l};
        return evaluate_atoms(*model, std::span(&cell, 1), z, tol).values[0];
    };
}

std::vector<lattice::Cell> nonempty_cells(const SurfaceModel& model) {
    std::vector<lattice::Cell> cells;
    const auto& w = model.window();
    for (long l = w.l_min; l <= w.l_max; ++l) {
        for (long k = w.k_min; k <= w.k_max; ++k) {
            if (model.cell_nonempty(k, l)) cells.push_back({k, l});
        }
    }
    return cells;
}

}  // namespace

PartitionAtom build_atom(const SurfaceModel& model, long k, long l, double tol) {
    if (!model.window().contains(k, l)) throw DomainError("build_atom: cell outside the window");
    auto shared = std::make_shared<const SurfaceModel>(model);
    PartitionAtom atom{k, l, kMinDecayC, atom_evaluator(shared, k, l, tol)};
    if (!model.cell_nonempty(k, l)) {
        atom.evaluator = [](Complex) { return Complex(0.0); };
        return atom;
    }
    const Complex center = lattice::lattice_point(k, l);
    try {
        for (const auto& z : omega_grid(model)) {
            atom.decay_C = std::max(atom.decay_C, envelope_constant(std::abs(atom.evaluator(z)),
                                                                    std::abs(z - center)));
        }
    } catch (const Error& e) {
        throw IndexedError(std::string("build_atom: ") + e.what(), k, l);
    }
    return atom;
}

std::vector<PartitionAtom> build_atoms(const SurfaceModel& model, double tol,
                                       std::span<const Complex> samples) {
    const auto cells = nonempty_cells(model);
    const double atom_tol = tol / static_cast<double>(std::max<std::size_t>(1, cells.size()));
    std::vector<std::vector<double>> fitted(samples.size());
    detail::parallel_for(samples.size(), [&](std::size_t i) {
        const auto values = evaluate_atoms(model, cells, samples[i], atom_tol).values;
        fitted[i].resize(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const double d = std::abs(samples[i] - lattice::lattice_point(cells[j].k, cells[j].l));
            fitted[i][j] = envelope_constant(std::abs(values[j]), d);
        }
    });
    auto shared = std::make_shared<const SurfaceModel>(model);
    std::vector<PartitionAtom> atoms;
    const auto& w = model.window();
    std::size_t j = 0;
    for (long l = w.l_min; l <= w.l_max; ++l) {
        for (long k = w.k_min; k <= w.k_max; ++k) {
            PartitionAtom atom{k, l, kMinDecayC, atom_evaluator(shared, k, l, atom_tol)};
            if (j < cells.size() && cells[j].k == k && cells[j].l == l) {
                for (const auto& row : fitted) atom.decay_C = std::max(atom.decay_C, row[j]);
                ++j;
            } else {
                atom.evaluator = [](Complex) { return Complex(0.0); };
            }
            atoms.push_back(std::move(atom));
        }
    }
    return atoms;
}

std::vector<PartitionAtom> build_atoms(const SurfaceModel& model, double tol) {
    const auto samples = omega_grid(model);
    return build_atoms(model, tol, samples);
}

std::vector<PartitionAtom> attach_atoms(const SurfaceModel& model, std::span<const long> ks,
                                        std::span<const long> ls, std::span<const double> decay_c,
                                        double tol) {
    if (ks.size() != ls.size() || ks.size() != decay_c.size()) {
        throw DomainError("attach_atoms: column lengths differ");
    }
    auto shared = std::make_shared<const SurfaceModel>(model);
    const double atom_tol = tol / static_cast<double>(std::max<std::size_t>(1, nonempty_cells(model).size()));
    std::vector<PartitionAtom> atoms;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!model.window().contains(ks[i], ls[i])) {
            throw IndexedError("attach_atoms: atom outside the model window", ks[i], ls[i]);
        }
        if (!(decay_c[i] > 0.0) || !std::isfinite(decay_c[i])) {
            throw IndexedError("attach_atoms: decay constant must be positive and finite", ks[i], ls[i]);
        }
        PartitionAtom atom{ks[i], ls[i], decay_c[i], atom_evaluator(shared, ks[i], ls[i], atom_tol)};
        if (!model.cell_nonempty(ks[i], ls[i])) atom.evaluator = [](Complex) { return Complex(0.0); };
        atoms.push_back(std::move(atom));
    }
    return atoms;
}

PartitionSum partition_sum(const SurfaceModel& model, std::span<const PartitionAtom> atoms,
                           Complex z, double radius) {
    const auto& w = model.window();
    double farthest = 0.0;
    for (long l = w.l_min; l <= w.l_max; ++l) {
        for (long k = w.k_min; k <= w.k_max; ++k) {
            farthest = std::max(farthest, std::abs(z - lattice::lattice_point(k, l)));
        }
    }
    if (radius > farthest) {
        throw WindowTooSmall("partition_sum: radius reaches past every cell of the window");
    }
    std::map<std::pair<long, long>, const PartitionAtom*> by_cell;
    for (const auto& a : atoms) by_cell[{a.k, a.l}] = &a;
    PartitionSum out{0.0, radius, 0.0, 0};
    for (long l = w.l_min; l <= w.l_max; ++l) {
        for (long k = w.k_min; k <= w.k_max; ++k) {
            const auto it = by_cell.find({k, l});
            if (it == by_cell.end()) {
                if (!model.cell_nonempty(k, l)) continue;
                throw IndexedError("partition_sum: no atom for a window cell", k, l);
            }
            const PartitionAtom& a = *it->second;
            const double d = std::abs(z - lattice::lattice_point(k, l));
            if (d <= radius) {
                out.value += a.evaluator(z);
                ++out.atoms_used;
            } else {
                out.tail_bound += a.decay_C * std::exp(-d / a.decay_C);
            }
        }
    }
    return out;
}

Complex mean_value_expand(const std::function<Complex(Complex)>& h, Complex z0, double tol) {
    const Complex center_value = h(z0);
    if (!std::isfinite(center_value.real()) || !std::isfinite(center_value.imag())) {
        throw DomainError("mean_value_expand: h is not finite at the centre");
    }
    const double r = 0.125;
    const auto area = quadrature::integrate_region(h, geom::DiskRegion{z0, r}, {tol, tol, 1'000'000});
    if (!area.certified) throw DomainError("mean_value_expand: area quadrature did not settle");
    const Complex mean = kMeanValuePrefactor * area.value;
    const double slack = std::max(1e-8, 1e3 * tol) * (1.0 + std::abs(center_value)) +
                         kMeanValuePrefactor * area.error_estimate;
    for (double radius : {r, 0.5 * r}) {
        const auto circle = quadrature::integrate_interval(
            [&](double t) { return h(z0 + std::polar(radius, 2.0 * kPi * t)); }, 0.0, 1.0,
            {tol, tol, 100'000});
        if (!circle.certified || std::abs(circle.value - mean) > slack) {
            throw DomainError("mean_value_expand: h is not holomorphic on the disk");
        }
    }
    if (std::abs(mean - center_value) > slack) {
        throw DomainError("mean_value_expand: h is not holomorphic on the disk");
    }
    return mean;
}

double pestimate_constant(double s0) {
    if (!(s0 > 0.0)) throw DomainError("pestimate_constant: s0 must be positive");
    return std::max(16.0 * std::exp(2.0 * s0 + 2.0), 2.0 / s0);
}

PestimateReport pestimate_audit(const SurfaceModel& model, const PartitionAtom& atom,
                                std::span<const Complex> samples) {
    PestimateReport report{atom.k, atom.l, atom.decay_C, pestimate_constant(model.s0()), {}, 0,
                           std::nullopt, true};
    const Complex center = lattice::lattice_point(atom.k, atom.l);
    for (const auto& z : samples) {
        if (!lattice::omega_contains(z)) {
            throw PreconditionError("pestimate_audit: sample outside Omega");
        }
        if (!model.contains(z)) throw PreconditionError("pestimate_audit: sample outside the model");
        const double d = std::abs(z - center);
        PestimateSample s{z, std::abs(atom.evaluator(z)),
                          atom.decay_C * std::exp(-d / atom.decay_C),
                          report.explicit_C * std::exp(-d / report.explicit_C)};
        if (s.magnitude > s.fitted_envelope) {
            ++report.violations;
            if (!report.witness) report.witness = z;
        }
        report.samples.push_back(s);
    }
    report.passed = report.violations == 0;
    return report;
}

}  // namespace reichlab::partition
