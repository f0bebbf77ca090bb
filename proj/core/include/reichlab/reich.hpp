#pragma once

// The weights alpha_{p,q}(n), the sequence phi_n = sum alpha_{k,l}(n) P_{k,l},
// the inequalities it rests on, and the three-condition audit.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reichlab/partition.hpp"
#include "reichlab/quadrature.hpp"

namespace reichlab::reich {

// ((|z_{p,q}| / n) + 1)^-4. Throws DomainError for n < 1.
double alpha(long p, long q, long n);

struct BoundCheck {
    double lhs;
    double rhs;
    bool holds() const { return lhs <= rhs; }
};

// |alpha_{p,q} - alpha_{k,l}| against (4 alpha_{p,q} / n)(2 + |z_{k,l} - z_{p,q}|)^4.
BoundCheck alpha_diff_bound_check(long p, long q, long k, long l, long n);
// The mean value step: |(|z_{p,q}|/n + 1)^4 - (|z_{k,l}|/n + 1)^4| against
// (4 |z_{p,q} - z_{k,l}| / n)(max{|z_{k,l}|, |z_{p,q}|} / n + 1)^3.
BoundCheck alpha_lagrange_check(long p, long q, long k, long l, long n);

// n^-2 sum over |z_{k,l}| <= radius of ((|z_{k,l}| / n) + 1)^-power.
double riemann_alpha_sum(long n, double radius, int power);
// Its limit, the integral of (|z| + 1)^-power over the plane: 2 pi / ((power - 1)(power - 2)).
double riemann_alpha_limit(int power);

// |lambda| - Re(lambda).
double lambda_gap(Complex lambda);
// Im(lambda)^2 / (|lambda| + Re(lambda)); requires a positive denominator.
double lambda_gap_identity(Complex lambda);

// C exp(sqrt(2) / (2 C)) sum_{k,l} 4 (2 + |z_{k,l}|)^4 exp(-|z_{k,l}| / C).
double majorant_constant(double c);

// f(z) = regular_part(z) + residue / z on the closed disk of radius 1/2.
struct PoleFunction {
    std::function<Complex(Complex)> regular_part;
    Complex residue{};

    Complex operator()(Complex z) const { return regular_part(z) + residue / z; }
};

// max |f - 1| over the circle |z| = 1/2, sampled at `samples` points.
double boundary_deviation(const PoleFunction& f, int samples = 256);

// Residue from the trapezoidal rule for (1 / 2 pi i) of the contour integral
// of f over |z| = 1/2; the regular part is f minus the pole. Residues below
// residue_floor (the rule's accuracy) are set to zero.
PoleFunction laurent_pole_function(std::function<Complex(Complex)> f, int samples = 64,
                                   double residue_floor = 1e-10);

// Integral over D_{1/2} of |f| - Re f. PreconditionError when the boundary
// deviation exceeds eps or eps is outside (0, 1/2].
quadrature::QuadratureResult pole_integral_eq1(const PoleFunction& f, double eps,
                                               const quadrature::Options& options = {});

// Integral of |f| over S_K = {z in D_{1/2} : |f(z)| >= K}; K >= 100.
quadrature::QuadratureResult pole_integral_eq2(const PoleFunction& f, double eps, double K,
                                               const quadrature::Options& options = {});

struct PhiValue {
    Complex value;
    double tail;
};

// sum over |z_{k,l} - z| <= radius of alpha_{k,l}(n) P_{k,l}(z); the omitted
// atoms are bounded through their decay certificates.
PhiValue phi_n(const partition::SurfaceModel& model, std::span<const partition::PartitionAtom> atoms,
               long n, Complex z, double radius);

struct AuditOptions {
    std::vector<long> n_list = {64, 128, 256, 512, 1024};
    std::vector<double> k_list = {100, 200, 400, 800};
    double tol = 1e-8;
    double grid_spacing = 0.25;
};

struct CellRow {
    long n;
    double K;  // 0 for condition 2 rows
    long k, l;
    double value;
    double bound;
    bool pass;
};

struct Condition1Row {
    long n;
    double max_deviation;       // max over the Omega grid of |phi_n - target|
    Complex witness;
    double weight_ratio;      // max of n |phi_n - alpha_{p,q} target| / alpha_{p,q}
    bool pass;
};

struct Condition2Row {
    long n;
    double total;               // sum of cell integrals of |phi_n| - Re phi_n
    double quadrature_error;
    double comparison;          // n^-2 sum alpha over the audited cells
    std::size_t cells_failed;
};

struct Condition3Row {
    long n;
    double K;
    double omega_max;           // max over the Omega grid of |phi_n|
    bool omega_empty;           // S_{n,K} misses the Omega grid
    double total;
    double bound;
};

struct ReichReport {
    std::vector<long> n_values;
    std::vector<double> k_values;
    double partition_C = 0.0;   // max decay_C over the atoms
    double majorant_C = 0.0;    // majorant_constant(partition_C)
    double c1 = 0.0;            // fitted on the first n, then frozen
    double c2 = 0.0;            // largest gap-integral ratio to alpha eps^2 over the audited cells
    double n_threshold = 0.0;   // 2 c1, where the lambda-gap branch applies
    double max_residue = 0.0;   // largest fitted residue of f_{n,k,l} over the audited cells
    double target_min = 0.0, target_max = 0.0;  // window projection over the grid
    std::vector<lattice::Cell> cells;           // audited cells
    std::vector<Condition1Row> condition1;
    std::vector<Condition2Row> condition2;
    std::vector<CellRow> condition2_cells;
    double condition2_slope = 0.0;  // least-squares slope of log total against log n
    std::vector<Condition3Row> condition3;
    std::vector<CellRow> condition3_cells;
    bool condition1_pass = false;
    bool condition2_pass = false;
    bool condition3_pass = false;
    std::vector<std::string> warnings;
    std::optional<std::string> witness;  // first failing sub-audit
};

// Cells of the window whose closed square lies in the model's audit region.
std::vector<lattice::Cell> audited_cells(const partition::SurfaceModel& model);

ReichReport reich_audit(const partition::SurfaceModel& model,
                        std::span<const partition::PartitionAtom> atoms, const AuditOptions& options);

}  // namespace reichlab::reich
