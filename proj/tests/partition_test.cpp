#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "reichlab/partition.hpp"

namespace {

using reichlab::Complex;
using reichlab::DomainError;
using reichlab::PreconditionError;
using reichlab::WindowTooSmall;
using namespace reichlab::partition;
using reichlab::geom::kPi;
using reichlab::lattice::Cell;
using reichlab::lattice::centered_window;
using reichlab::lattice::lattice_point;

// Composite Simpson on [a, b] with n (even) panels.
template <typename F>
Complex simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    Complex s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// 3/pi times the integral of (1 - |w|^2)^2 (1 - zeta conj(w))^-4 over the chart
// rectangle clipped to the unit disk, by nested Simpson with clipped y-limits.
Complex atom_oracle(const SurfaceModel& model, long k, long l, Complex z, int n = 300) {
    const Complex lo = model.to_chart(Complex(k - 0.5, l - 0.5));
    const Complex hi = model.to_chart(Complex(k + 0.5, l + 0.5));
    const Complex zeta = model.to_chart(z);
    const double x0 = std::max(lo.real(), -1.0), x1 = std::min(hi.real(), 1.0);
    const auto column = [&](double x) {
        const double h = std::sqrt(std::max(0.0, 1.0 - x * x));
        const double y0 = std::max(lo.imag(), -h), y1 = std::min(hi.imag(), h);
        if (y1 <= y0) return Complex(0.0);
        return simpson(
            [&](double y) {
                const Complex w(x, y);
                const double s = 1.0 - std::norm(w);
                return s * s * std::pow(1.0 - zeta * std::conj(w), -4);
            },
            y0, y1, n);
    };
    return 3.0 / kPi * simpson(column, x0, x1, n);
}

SurfaceModel disk_model(long size) {
    ModelOptions o;
    o.window = centered_window(size);
    return SurfaceModel(o);
}

std::vector<Cell> all_cells(const SurfaceModel& model) {
    std::vector<Cell> cells;
    const auto& w = model.window();
    for (long l = w.l_min; l <= w.l_max; ++l)
        for (long k = w.k_min; k <= w.k_max; ++k) cells.push_back({k, l});
    return cells;
}

TEST(ModelKind, NamesRoundTrip) {
    for (auto kind : {ModelKind::disk, ModelKind::cyclic_quotient, ModelKind::gamma2_quotient,
                      ModelKind::punctured_window}) {
        EXPECT_EQ(parse_model_kind(to_string(kind)), kind);
    }
    EXPECT_THROW(parse_model_kind("torus"), DomainError);
}

TEST(SurfaceModel, DiskChartAndValidation) {
    const auto m = disk_model(4);
    EXPECT_EQ(m.chart_center(), Complex(-0.5, -0.5));
    EXPECT_DOUBLE_EQ(m.chart_scale(), 2.0);
    EXPECT_NEAR(std::abs(m.from_chart(m.to_chart(Complex(0.3, 0.7))) - Complex(0.3, 0.7)), 0.0, 1e-15);
    // Corner cells of an 8 x 8 window miss the inscribed disk.
    const auto big = disk_model(8);
    EXPECT_FALSE(big.cell_nonempty(-4, -4));
    EXPECT_TRUE(big.cell_nonempty(0, 0));
    ModelOptions o;
    o.puncture_radius = 0.2;
    EXPECT_THROW(SurfaceModel{o}, DomainError);
    o = {};
    o.window = {0, -1, 0, 0};
    EXPECT_THROW(SurfaceModel{o}, DomainError);
}

TEST(CellIndicator, OneOnTheCellOnly) {
    const auto f = cell_indicator(2, -1);
    EXPECT_EQ(f.evaluator(Complex(2.2, -0.8)), Complex(1.0));
    EXPECT_EQ(f.evaluator(Complex(2.6, -1.0)), Complex(0.0));
    EXPECT_EQ(f.evaluator(Complex(0.0, 0.0)), Complex(0.0));
    ASSERT_TRUE(f.support.has_value());
}

TEST(EvaluateAtoms, MatchesAreaOracle) {
    const auto m = disk_model(4);
    // (0, 0) lies inside the disk; (1, 1) is clipped by it.
    for (const Cell c : {Cell{0, 0}, Cell{1, 1}, Cell{-2, 0}}) {
        for (const Complex z : {Complex(0.1, 0.2), Complex(-1.3, 0.4)}) {
            const auto v = evaluate_atoms(m, std::span(&c, 1), z, 1e-10);
            const Complex oracle = atom_oracle(m, c.k, c.l, z);
            EXPECT_NEAR(std::abs(v.values[0] - oracle), 0.0, 2e-6) << c.k << "," << c.l;
        }
    }
}

TEST(EvaluateAtoms, DiskAtomsSumToOne) {
    for (long size : {2, 4, 8}) {
        const auto m = disk_model(size);
        const auto cells = all_cells(m);
        std::mt19937_64 gen(17 + size);
        std::uniform_real_distribution<double> u(-0.85, 0.85);
        for (int i = 0; i < 10; ++i) {
            const Complex zeta(u(gen), u(gen) * 0.5);
            const Complex z = m.from_chart(zeta);
            const auto v = evaluate_atoms(m, cells, z, 1e-10);
            Complex sum = 0.0;
            for (const auto& x : v.values) sum += x;
            EXPECT_NEAR(std::abs(sum - 1.0), 0.0, 1e-8) << size;
            EXPECT_NEAR(std::abs(window_projection(m, z, 1e-10) - 1.0), 0.0, 1e-8);
        }
    }
}

TEST(EvaluateAtoms, QuotientAtomsSumToWindowProjection) {
    for (auto kind : {ModelKind::cyclic_quotient, ModelKind::gamma2_quotient, ModelKind::punctured_window}) {
        ModelOptions o;
        o.kind = kind;
        o.window = centered_window(3);
        o.word_depth = 4;
        const SurfaceModel m(o);
        const auto cells = all_cells(m);
        for (const Complex z : {Complex(0.2, 0.3), Complex(-0.7, 0.45)}) {
            const auto v = evaluate_atoms(m, cells, z, 1e-10);
            Complex sum = 0.0;
            for (const auto& x : v.values) sum += x;
            EXPECT_NEAR(std::abs(sum - window_projection(m, z, 1e-10)), 0.0, 1e-7) << to_string(kind);
        }
    }
}

TEST(EvaluateAtoms, PuncturesRemoveTheirDisks) {
    ModelOptions o;
    o.window = centered_window(3);
    o.kind = ModelKind::punctured_window;
    o.puncture_radius = 0.05;
    const SurfaceModel punctured(o);
    o.kind = ModelKind::disk;
    const SurfaceModel plain(o);
    const Cell c{0, 0};
    const Complex z(0.3, -0.2);
    const Complex w = *punctured.puncture(0, 0);
    // 3/pi times the weighted kernel integrated over the hole, by polar Simpson.
    const Complex zw = punctured.to_chart(w), zz = punctured.to_chart(z);
    const double r = 0.05 / punctured.chart_scale();
    const Complex expected = 3.0 / kPi * simpson(
        [&](double rho) {
            return rho * simpson(
                       [&](double t) {
                           const Complex u = zw + std::polar(rho, t);
                           const double s = 1.0 - std::norm(u);
                           return s * s * std::pow(1.0 - zz * std::conj(u), -4);
                       },
                       0.0, 2.0 * kPi, 64);
        },
        0.0, r, 64);
    const Complex loss = evaluate_atoms(plain, std::span(&c, 1), z, 1e-12).values[0] -
                         evaluate_atoms(punctured, std::span(&c, 1), z, 1e-12).values[0];
    EXPECT_NEAR(std::abs(loss - expected), 0.0, 1e-6 * std::abs(expected));
    EXPECT_FALSE(plain.puncture(0, 0).has_value());
}

TEST(EvaluateAtoms, RejectsPointsOutsideTheModel) {
    const auto m = disk_model(4);
    const Cell c{0, 0};
    EXPECT_THROW(evaluate_atoms(m, std::span(&c, 1), Complex(5.0, 5.0), 1e-8), DomainError);
    EXPECT_THROW(evaluate_atoms(m, std::span(&c, 1), 0.0, 0.0), DomainError);
    EXPECT_THROW(window_projection(m, Complex(-5.0, 0.0), 1e-8), DomainError);
}

TEST(Atoms, DecayAlongARayAndDominateNeighbours) {
    const auto m = disk_model(8);
    const Cell c{0, 0};
    double previous = std::numeric_limits<double>::infinity();
    for (double t = 0.0; t <= 3.01; t += 0.5) {
        const Complex z = lattice_point(0, 0) + std::polar(t, -2.4);
        const double v = std::abs(evaluate_atoms(m, std::span(&c, 1), z, 1e-10).values[0]);
        EXPECT_LT(v, previous) << t;
        previous = v;
    }
    for (long k = -2; k <= 1; ++k) {
        for (long l = -2; l <= 1; ++l) {
            const std::vector<Cell> near = {{k, l}, {k + 1, l}, {k - 1, l}, {k, l + 1}, {k, l - 1}};
            const auto v = evaluate_atoms(m, near, lattice_point(k, l), 1e-10).values;
            for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(std::abs(v[0]), std::abs(v[i]));
        }
    }
}

TEST(EnvelopeConstant, SmallestAdmissibleConstant) {
    for (double m : {1e-9, 1e-3, 0.2, 0.9, 3.0}) {
        for (double d : {0.25, 1.0, 4.0}) {
            const double c = envelope_constant(m, d);
            EXPECT_GE(c * std::exp(-d / c), m * (1.0 - 1e-12));
            if (c > kMinDecayC) {
                const double smaller = c * (1.0 - 1e-9);
                EXPECT_LT(smaller * std::exp(-d / smaller), m);
            }
        }
    }
    EXPECT_EQ(envelope_constant(0.0, 1.0), kMinDecayC);
    EXPECT_THROW(envelope_constant(1.0, 0.0), DomainError);
}

TEST(BuildAtom, EnvelopeCoversItsGridAndIsStableUnderRefinement) {
    const auto m = disk_model(4);
    const auto atom = build_atom(m, 0, 0, 1e-10);
    const auto grid = omega_grid(m);
    ASSERT_FALSE(grid.empty());
    for (const auto& z : grid) {
        EXPECT_TRUE(reichlab::lattice::omega_contains(z));
        const double d = std::abs(z);
        EXPECT_LE(std::abs(atom.evaluator(z)), atom.decay_C * std::exp(-d / atom.decay_C) * (1 + 1e-12));
    }
    // Refit on a grid of half the spacing.
    double refit = kMinDecayC;
    for (const auto& z : omega_grid(m, 0.125, 0.0625)) {
        refit = std::max(refit, envelope_constant(std::abs(atom.evaluator(z)), std::abs(z)));
    }
    EXPECT_NEAR(refit, atom.decay_C, 0.1 * atom.decay_C);
    EXPECT_THROW(build_atom(m, 7, 0, 1e-10), DomainError);
}

TEST(BuildAtoms, AgreesWithSingleAtomBuilds) {
    const auto m = disk_model(3);
    const auto atoms = build_atoms(m, 1e-9);
    ASSERT_EQ(atoms.size(), 9u);
    for (const auto& a : atoms) {
        const auto single = build_atom(m, a.k, a.l, 1e-9 / 9.0);
        EXPECT_NEAR(a.decay_C, single.decay_C, 1e-6 * single.decay_C);
        EXPECT_NEAR(std::abs(a.evaluator(0.1) - single.evaluator(0.1)), 0.0, 1e-12);
    }
    const std::vector<long> ks = {0, 1}, ls = {0, 1};
    const std::vector<double> cs = {1.0, 2.0};
    const auto attached = attach_atoms(m, ks, ls, cs, 1e-9);
    EXPECT_EQ(attached[1].decay_C, 2.0);
    const std::vector<long> bad_k = {5};
    const std::vector<long> bad_l = {0};
    const std::vector<double> bad_c = {1.0};
    EXPECT_THROW(attach_atoms(m, bad_k, bad_l, bad_c, 1e-9), reichlab::IndexedError);
}

TEST(PartitionSum, TruncationBracketsWindowProjection) {
    const auto m = disk_model(6);
    const auto atoms = build_atoms(m, 1e-9);
    for (const Complex z : {Complex(-0.5, -0.5), Complex(0.3, -1.2)}) {
        const Complex full = window_projection(m, z, 1e-10);
        double previous_tail = std::numeric_limits<double>::infinity();
        for (double radius : {0.5, 1.5, 2.5, 3.5}) {
            const auto s = partition_sum(m, atoms, z, radius);
            EXPECT_LE(std::abs(s.value - full), s.tail_bound + 2e-9) << radius;
            EXPECT_LE(s.tail_bound, previous_tail);
            previous_tail = s.tail_bound;
        }
    }
    EXPECT_THROW(partition_sum(m, atoms, 0.0, 100.0), WindowTooSmall);
}

TEST(PartitionSum, MissingAtomIsNamed) {
    const auto m = disk_model(2);
    auto atoms = build_atoms(m, 1e-9);
    atoms.pop_back();
    try {
        partition_sum(m, atoms, Complex(-0.4, -0.4), 0.5);
        FAIL() << "expected IndexedError";
    } catch (const reichlab::IndexedError& e) {
        EXPECT_EQ(e.k(), 0);
        EXPECT_EQ(e.l(), 0);
    }
}

TEST(MeanValueExpand, HolomorphicFunctionsAndPoles) {
    const Complex z0(0.4, -0.3);
    EXPECT_NEAR(std::abs(mean_value_expand([](Complex) { return Complex(1.0); }, z0) - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(mean_value_expand([](Complex z) { return z; }, z0) - z0), 0.0, 1e-10);
    for (int degree = 2; degree <= 6; ++degree) {
        const auto p = [degree](Complex z) { return std::pow(z - Complex(0.1, 0.2), degree) + 3.0 * z; };
        EXPECT_NEAR(std::abs(mean_value_expand(p, z0) - p(z0)), 0.0, 1e-9) << degree;
    }
    EXPECT_NEAR(std::abs(mean_value_expand([](Complex z) { return std::exp(z); }, z0) - std::exp(z0)), 0.0, 1e-9);
    // A pole inside D(z0, 1/8) is detected.
    EXPECT_THROW(mean_value_expand([&](Complex z) { return 1.0 / (z - z0 - 0.05); }, z0), DomainError);
    EXPECT_THROW(mean_value_expand([](Complex z) { return 1.0 / z; }, 0.0), DomainError);
    // The nominal prefactor is off by exactly a factor two.
    EXPECT_DOUBLE_EQ(kMeanValuePrefactor, 2.0 * kNominalMeanValuePrefactor);
}

TEST(ExplicitDecayConstant, BranchesOfTheMaximum) {
    EXPECT_NEAR(pestimate_constant(0.125), 16.0 * std::exp(2.25), 1e-12);
    EXPECT_NEAR(pestimate_constant(0.125), 151.8, 0.05);
    EXPECT_NEAR(pestimate_constant(1.0), 873.57, 0.01);
    EXPECT_DOUBLE_EQ(pestimate_constant(1e-3), 2000.0);
    EXPECT_THROW(pestimate_constant(0.0), DomainError);
}

TEST(DecayAudit, FittedAtomPassesAndHalvedConstantFails) {
    const auto m = disk_model(4);
    const auto atom = build_atom(m, 0, 0, 1e-10);
    const auto samples = omega_grid(m);
    const auto report = pestimate_audit(m, atom, samples);
    EXPECT_TRUE(report.passed);
    EXPECT_EQ(report.violations, 0u);
    EXPECT_EQ(report.samples.size(), samples.size());
    EXPECT_DOUBLE_EQ(report.explicit_C, pestimate_constant(m.s0()));
    for (const auto& s : report.samples) EXPECT_LE(s.fitted_envelope, s.explicit_envelope);

    auto halved = atom;
    halved.decay_C *= 0.5;
    const auto failed = pestimate_audit(m, halved, samples);
    EXPECT_FALSE(failed.passed);
    ASSERT_TRUE(failed.witness.has_value());

    const std::vector<Complex> at_center = {lattice_point(0, 0)};
    EXPECT_THROW(pestimate_audit(m, atom, at_center), PreconditionError);
    const std::vector<Complex> outside = {Complex(30.125, 0.125)};
    EXPECT_THROW(pestimate_audit(m, atom, outside), PreconditionError);
}

}  // namespace
