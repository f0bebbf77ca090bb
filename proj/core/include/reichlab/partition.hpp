#pragma once

// Partitions of unity P_{k,l} on finite-window surface models.
//
// A model places an index window of unit cells in a chart of the disk,
// zeta = (z - chart_center) / chart_scale, and projects cell indicators with
// the Bergman kernel of the model's group. P_{k,l} is read back in the z
// coordinate, so that sum_{k,l} P_{k,l} is the projection of the indicator
// of the whole window.
//
//   disk              trivial group; the disk inscribed in the window, cells
//                     clipped to it. The window indicator is the disk itself,
//                     so the atoms sum to exactly 1.
//   cyclic-quotient   the window scaled into an embedded ball of D / <A>.
//   gamma2-quotient   the same for the level-2 congruence group.
//   punctured-window  the disk model with a quasilattice of punctures; disks
//                     of radius puncture_radius around them are cut out of
//                     every cell. The kernel stays that of the disk.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reichlab/bergman.hpp"
#include "reichlab/fuchsian.hpp"
#include "reichlab/geom.hpp"
#include "reichlab/lattice.hpp"

namespace reichlab::partition {

enum class ModelKind { disk, cyclic_quotient, gamma2_quotient, punctured_window };

std::string_view to_string(ModelKind kind);
// Throws DomainError for unknown names.
ModelKind parse_model_kind(std::string_view name);

struct ModelOptions {
    ModelKind kind = ModelKind::disk;
    lattice::IndexWindow window = lattice::centered_window(8);
    double cyclic_length = 2.0;  // translation length of the cyclic generator
    int word_depth = 6;
    double puncture_radius = 1e-3;
    double r0 = 0.4;  // univalence radius; see geom::koebe_constants
    std::uint64_t seed = 0;
    double delta = 0.125;  // quasilattice perturbation for punctured-window
};

class SurfaceModel {
public:
    explicit SurfaceModel(const ModelOptions& options);

    const ModelOptions& options() const noexcept { return options_; }
    ModelKind kind() const noexcept { return options_.kind; }
    const lattice::IndexWindow& window() const noexcept { return options_.window; }
    const fuchsian::FuchsianGroup& group() const noexcept { return group_; }
    const std::optional<lattice::Quasilattice>& quasilattice() const noexcept { return quasilattice_; }
    double s0() const noexcept { return geom::koebe_constants(options_.r0).s0; }

    Complex chart_center() const noexcept { return center_; }
    double chart_scale() const noexcept { return scale_; }
    Complex to_chart(Complex z) const { return (z - center_) / scale_; }
    Complex from_chart(Complex zeta) const { return center_ + scale_ * zeta; }

    // Points where atoms may be evaluated: chart image inside the unit disk
    // (and, for quotients, inside the embedded ball).
    bool contains(Complex z) const;
    // Points used for sampling: chart radius at most audit_radius().
    bool in_audit_region(Complex z) const { return std::abs(to_chart(z)) <= audit_radius_; }
    double audit_radius() const noexcept { return audit_radius_; }

    // False for cells that miss the model entirely (corners of the disk model).
    bool cell_nonempty(long k, long l) const;
    // Chart-coordinate boundary of the cell, clipped to the disk model.
    geom::BoundaryPath cell_path(long k, long l) const;
    // Puncture w_{k,l} of the punctured-window model.
    std::optional<Complex> puncture(long k, long l) const;

    // Bound on the orbit truncation error of an atom value computed with this kernel.
    double truncation_error(const bergman::PoincareKernel& kernel) const;

private:
    ModelOptions options_;
    fuchsian::FuchsianGroup group_;
    std::optional<lattice::Quasilattice> quasilattice_;
    Complex center_;
    double scale_;
    double model_radius_;  // chart radius of the region where atoms live
    double audit_radius_;
};

// Values of P_{k,l}(z) for a list of cells, sharing one kernel orbit.
struct AtomValues {
    std::vector<Complex> values;
    double error;  // bound on the error of each value
};

// tol is the target absolute error of each value.
AtomValues evaluate_atoms(const SurfaceModel& model, std::span<const lattice::Cell> cells,
                          Complex z, double tol);

// Projection of the indicator of the whole window (what the atoms sum to), by
// one boundary integral around the window rather than cell by cell.
Complex window_projection(const SurfaceModel& model, Complex z, double tol);

// The indicator of W_{k,l} as a quadratic differential, support the cell.
bergman::MeasurableQD cell_indicator(long k, long l);

struct PartitionAtom {
    long k, l;
    double decay_C;
    std::function<Complex(Complex)> evaluator;
};

// Omega points on the grid x, y in offset + spacing * Z inside the model's
// audit region, in row-major order.
std::vector<Complex> omega_grid(const SurfaceModel& model, double spacing = 0.25, double offset = 0.125);

// Smallest C with C exp(-d / C) >= magnitude (d > 0), at least kMinDecayC.
double envelope_constant(double magnitude, double distance);
inline constexpr double kMinDecayC = 1e-6;

// Builds P_{k,l} and fits decay_C on the standard Omega grid. Quadrature
// failures are rethrown as IndexedError naming (k, l).
PartitionAtom build_atom(const SurfaceModel& model, long k, long l, double tol);

// All atoms of the window, each fitted on `samples`. Evaluating every atom at
// once per sample point shares the kernel orbit.
std::vector<PartitionAtom> build_atoms(const SurfaceModel& model, double tol,
                                       std::span<const Complex> samples);
std::vector<PartitionAtom> build_atoms(const SurfaceModel& model, double tol);

// Atoms with given certificates (e.g. read back from an atom table).
std::vector<PartitionAtom> attach_atoms(const SurfaceModel& model, std::span<const long> ks,
                                        std::span<const long> ls, std::span<const double> decay_c,
                                        double tol);

struct PartitionSum {
    Complex value;
    double truncation_radius;
    double tail_bound;
    std::size_t atoms_used;
};

// Sum over the atoms with |z - z_{k,l}| <= radius. Throws WindowTooSmall when
// radius reaches past every cell of the window.
PartitionSum partition_sum(const SurfaceModel& model, std::span<const PartitionAtom> atoms,
                           Complex z, double radius);

// (64 / pi) times the area integral of h over D(z0, 1/8). Throws DomainError
// when the quadrature does not settle or the circle means disagree with the
// area mean (a pole inside the disk).
Complex mean_value_expand(const std::function<Complex(Complex)>& h, Complex z0, double tol = 1e-10);
inline constexpr double kMeanValuePrefactor = 64.0 / geom::kPi;
inline constexpr double kNominalMeanValuePrefactor = 32.0 / geom::kPi;

// max{16 exp(2 s0 + 2), 2 / s0}.
double pestimate_constant(double s0);

struct PestimateSample {
    Complex z;
    double magnitude;        // |P(z)|
    double fitted_envelope;  // decay_C exp(-|z - z_{k,l}| / decay_C)
    double explicit_envelope;   // the same with pestimate_constant(s0)
};

struct PestimateReport {
    long k, l;
    double decay_C;
    double explicit_C;
    std::vector<PestimateSample> samples;
    std::size_t violations;
    std::optional<Complex> witness;  // first violating sample
    bool passed;
};

// Throws PreconditionError for samples outside Omega or outside the model.
PestimateReport pestimate_audit(const SurfaceModel& model, const PartitionAtom& atom,
                                std::span<const Complex> samples);

}  // namespace reichlab::partition
