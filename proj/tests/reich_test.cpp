#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "reichlab/reich.hpp"

namespace {

using reichlab::Complex;
using reichlab::DomainError;
using reichlab::PreconditionError;
using namespace reichlab::reich;
using reichlab::geom::kPi;
using reichlab::partition::ModelOptions;
using reichlab::partition::SurfaceModel;

template <typename F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Integral over {r e^{it} : r < rho(t)} of g, by polar Simpson (r g stays bounded for 1/|z| singularities).
template <typename G, typename Rho>
double polar_integral(G g, Rho rho, int n = 800) {
    return simpson(
        [&](double t) {
            const Complex u = std::polar(1.0, t);
            const double r_min = 1e-12 * rho(t);  // r g has a finite, nonzero limit at the pole
            return simpson([&](double r) { r = std::max(r, r_min); return r * g(r * u); }, 0.0, rho(t), n);
        },
        0.0, 2.0 * kPi, n);
}

double eq1_oracle(const PoleFunction& f) {
    return polar_integral([&](Complex z) { return lambda_gap(f(z)); }, [](double) { return 0.5; });
}

PoleFunction simple_pole(Complex a) {
    return {[](Complex) { return Complex(1.0); }, a};
}

TEST(Alpha, ExamplesAndMonotonicity) {
    EXPECT_EQ(alpha(0, 0, 7), 1.0);
    EXPECT_DOUBLE_EQ(alpha(3, 4, 5), 1.0 / 16.0);
    EXPECT_DOUBLE_EQ(alpha(-3, 4, 5), alpha(4, 3, 5));
    EXPECT_THROW(alpha(1, 1, 0), DomainError);
    for (long r = 0; r < 50; ++r) {
        EXPECT_GT(alpha(r, 0, 10), alpha(r + 1, 0, 10));
        EXPECT_LT(alpha(r + 1, 0, 10), alpha(r + 1, 0, 20));
    }
}

TEST(Alpha, DifferenceAndMeanValueBoundsHold) {
    std::mt19937_64 gen(29);
    std::uniform_int_distribution<long> idx(-300, 300);
    std::uniform_int_distribution<long> ns(1, 1000);
    for (int i = 0; i < 10000; ++i) {
        const long p = idx(gen), q = idx(gen), k = idx(gen), l = idx(gen), n = ns(gen);
        const auto diff = alpha_diff_bound_check(p, q, k, l, n);
        EXPECT_TRUE(diff.holds()) << p << " " << q << " " << k << " " << l << " " << n;
        const auto lagrange = alpha_lagrange_check(p, q, k, l, n);
        EXPECT_LE(lagrange.lhs, lagrange.rhs * (1.0 + 1e-12)) << p << " " << q << " " << k << " " << l << " " << n;
    }
    // Neighbours at distance one: the bound is attained up to the (2 + d)^4 slack.
    const auto near = alpha_diff_bound_check(10, 0, 11, 0, 10);
    EXPECT_GT(near.lhs, 0.0);
    EXPECT_EQ(alpha_diff_bound_check(3, 4, 3, 4, 9).lhs, 0.0);
}

TEST(LambdaGap, IdentityAndExample) {
    EXPECT_NEAR(lambda_gap(Complex(1.0, 0.3)), 0.044031, 1e-6);
    EXPECT_EQ(lambda_gap(Complex(2.0, 0.0)), 0.0);
    EXPECT_EQ(lambda_gap(Complex(-2.0, 0.0)), 4.0);
    EXPECT_THROW(lambda_gap_identity(Complex(-1.0, 0.0)), DomainError);
    std::mt19937_64 gen(31);
    for (double eps : {0.5, 0.1, 0.01}) {
        std::uniform_real_distribution<double> u(-eps, eps);
        for (int i = 0; i < 10000; ++i) {
            const Complex lambda(1.0 + u(gen), u(gen));
            const double gap = lambda_gap(lambda);
            EXPECT_NEAR(gap, lambda_gap_identity(lambda), 1e-12);
            EXPECT_GE(gap, 0.0);
            // On |lambda - 1| <= eps, gap <= Im^2 / (2 (1 - eps)).
            EXPECT_LE(gap, lambda.imag() * lambda.imag() / (2.0 * (1.0 - eps)) + 1e-15);
        }
    }
}

TEST(RiemannSums, ApproachTheirIntegrals) {
    EXPECT_NEAR(riemann_alpha_limit(4), kPi / 3.0, 1e-15);
    EXPECT_NEAR(riemann_alpha_limit(8), kPi / 21.0, 1e-15);
    EXPECT_THROW(riemann_alpha_limit(2), DomainError);
    const long n = 20;
    for (int power : {4, 8}) {
        const double s = riemann_alpha_sum(n, 40.0 * n, power);
        const double limit = riemann_alpha_limit(power);
        EXPECT_NEAR(s, limit, 0.02 * limit) << power;
    }
    // Larger n is a finer Riemann sum.
    const double coarse = std::abs(riemann_alpha_sum(5, 200.0, 4) - kPi / 3.0);
    const double fine = std::abs(riemann_alpha_sum(20, 800.0, 4) - kPi / 3.0);
    EXPECT_LT(fine, coarse);
}

TEST(MajorantConstant, MatchesDirectSummation) {
    for (double c : {0.5, 1.19172, 3.0}) {
        double brute = 0.0;
        for (long k = -300; k <= 300; ++k) {
            for (long l = -300; l <= 300; ++l) {
                const double r = std::hypot(double(k), double(l));
                brute += 4.0 * std::pow(2.0 + r, 4) * std::exp(-r / c);
            }
        }
        const double expected = c * std::exp(std::sqrt(2.0) / (2.0 * c)) * brute;
        EXPECT_NEAR(majorant_constant(c), expected, 1e-10 * expected) << c;
    }
    EXPECT_THROW(majorant_constant(0.0), DomainError);
}

TEST(LaurentPoleFunction, RecoversResidueAndRegularPart) {
    const auto f = laurent_pole_function([](Complex z) { return 2.0 + z + 0.01 / z + z * z; });
    EXPECT_NEAR(std::abs(f.residue - 0.01), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.regular_part(Complex(0.3, -0.1)) - (2.0 + Complex(0.3, -0.1) + Complex(0.3, -0.1) * Complex(0.3, -0.1))),
                0.0, 1e-13);
    const auto g = laurent_pole_function([](Complex z) { return std::exp(z) + 1e-12 / z; });
    EXPECT_EQ(g.residue, Complex(0.0));
}

TEST(BoundaryDeviation, CircleMaximum) {
    const PoleFunction f{[](Complex z) { return 1.0 + 0.2 * z; }, 0.0};
    EXPECT_NEAR(boundary_deviation(f), 0.1, 1e-15);
    EXPECT_NEAR(boundary_deviation(simple_pole(0.05)), 0.1, 1e-15);
}

TEST(PoleIntegralEq1, ConstantLinearAndPole) {
    const PoleFunction one{[](Complex) { return Complex(1.0); }, 0.0};
    EXPECT_NEAR(pole_integral_eq1(one, 0.1).value.real(), 0.0, 1e-14);

    std::vector<double> ratios;
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
        const PoleFunction linear{[eps](Complex z) { return 1.0 + eps * z; }, 0.0};
        const auto r = pole_integral_eq1(linear, eps, {1e-11, 1e-11, 1'000'000});
        EXPECT_NEAR(r.value.real(), eq1_oracle(linear), 1e-8) << eps;
        const auto pole = simple_pole(Complex(0.0, eps / 4.0));
        const auto p = pole_integral_eq1(pole, eps, {1e-10, 1e-10, 1'000'000});
        // The omitted core around the pole is carried in the estimate.
        EXPECT_LE(std::abs(p.value.real() - eq1_oracle(pole)), p.error_estimate + 1e-10) << eps;
        EXPECT_LT(p.error_estimate, 1e-3 * p.value.real());
        ratios.push_back(p.value.real() / (eps * eps));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    EXPECT_LT(*hi, 2.0 * *lo);
}

TEST(PoleIntegralEq1, Preconditions) {
    const auto f = simple_pole(0.05);  // deviation 0.1 on the circle
    EXPECT_THROW(pole_integral_eq1(f, 0.05), PreconditionError);
    EXPECT_THROW(pole_integral_eq1(f, 0.6), PreconditionError);
    EXPECT_THROW(pole_integral_eq1(f, 0.0), PreconditionError);
    EXPECT_NO_THROW(pole_integral_eq1(f, 0.1));
}

TEST(PoleIntegralEq2, ApolloniusDiskOracle) {
    const PoleFunction one{[](Complex) { return Complex(1.0); }, 0.0};
    EXPECT_EQ(pole_integral_eq2(one, 0.1, 100.0).value, Complex(0.0));
    const Complex a(0.03, -0.04);
    const auto f = simple_pole(a);
    std::vector<double> values;
    for (double K : {100.0, 200.0, 400.0, 800.0}) {
        // |1 + a/z| >= K is the disk |z - a / (K^2 - 1)| <= |a| K / (K^2 - 1).
        const Complex c = a / (K * K - 1.0);
        const double R = std::abs(a) * K / (K * K - 1.0);
        const auto rho = [&](double t) {
            const double b = std::real(std::conj(std::polar(1.0, t)) * c);
            return b + std::sqrt(R * R - std::norm(c) + b * b);
        };
        const double oracle = polar_integral([&](Complex z) { return std::abs(f(z)); }, rho);
        const auto r = pole_integral_eq2(f, 0.2, K, {1e-12, 1e-12, 1'000'000});
        EXPECT_NEAR(r.value.real(), oracle, 1e-7 * oracle) << K;
        values.push_back(r.value.real());
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double ratio = values[i - 1] / values[i];
        EXPECT_GE(ratio, 1.5);
        EXPECT_LE(ratio, 2.5);
    }
    EXPECT_THROW(pole_integral_eq2(f, 0.2, 50.0), PreconditionError);
    EXPECT_THROW(pole_integral_eq2(f, 0.05, 100.0), PreconditionError);
}

TEST(PoleIntegralEq2, RegularPartNearK) {
    const PoleFunction big{[](Complex) { return Complex(150.0); }, 0.0};
    // Deviation 149 violates the eps precondition first.
    EXPECT_THROW(pole_integral_eq2(big, 0.5, 100.0), PreconditionError);
}

class SmallDiskModel : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        ModelOptions o;
        o.window = reichlab::lattice::centered_window(6);
        model_ = new SurfaceModel(o);
        atoms_ = new std::vector<reichlab::partition::PartitionAtom>(reichlab::partition::build_atoms(*model_, 1e-9));
    }
    static void TearDownTestSuite() {
        delete atoms_;
        delete model_;
    }
    static SurfaceModel* model_;
    static std::vector<reichlab::partition::PartitionAtom>* atoms_;
};
SurfaceModel* SmallDiskModel::model_ = nullptr;
std::vector<reichlab::partition::PartitionAtom>* SmallDiskModel::atoms_ = nullptr;

TEST_F(SmallDiskModel, PhiTendsToThePartitionSum) {
    for (const Complex z : {Complex(-0.5, -0.5), Complex(0.3, -1.2)}) {
        const auto s = reichlab::partition::partition_sum(*model_, *atoms_, z, 2.5);
        const auto phi = phi_n(*model_, *atoms_, 1'000'000'000, z, 2.5);
        EXPECT_NEAR(std::abs(phi.value - s.value), 0.0, 1e-7);
        EXPECT_LE(phi.tail, s.tail_bound);
        // For moderate n the weights pull phi below the sum of the atoms.
        const auto small = phi_n(*model_, *atoms_, 4, z, 2.5);
        EXPECT_LT(small.value.real(), s.value.real());
    }
    EXPECT_THROW(phi_n(*model_, *atoms_, 4, 0.0, 100.0), reichlab::WindowTooSmall);
}

TEST_F(SmallDiskModel, AuditedCellsLieInTheAuditRegion) {
    const auto cells = audited_cells(*model_);
    ASSERT_FALSE(cells.empty());
    for (const auto& c : cells) {
        for (double dx : {-0.5, 0.5})
            for (double dy : {-0.5, 0.5}) EXPECT_TRUE(model_->in_audit_region(Complex(c.k + dx, c.l + dy)));
    }
    ModelOptions o;
    EXPECT_EQ(audited_cells(SurfaceModel(o)).size(), 24u);
}

TEST_F(SmallDiskModel, AuditIsSelfConsistent) {
    AuditOptions opts;
    opts.n_list = {4, 8, 16};
    opts.k_list = {100, 200};
    const auto r = reich_audit(*model_, *atoms_, opts);
    ASSERT_EQ(r.condition1.size(), 3u);
    ASSERT_EQ(r.condition2.size(), 3u);
    EXPECT_EQ(r.c1, r.condition1.front().weight_ratio);
    EXPECT_EQ(r.n_threshold, 2.0 * r.c1);
    EXPECT_NEAR(r.majorant_C, majorant_constant(r.partition_C), 1e-12 * r.majorant_C);
    EXPECT_GE(r.target_min, 0.99);
    EXPECT_LE(r.target_max, 1.01);
    const std::size_t nc = r.cells.size();
    EXPECT_EQ(r.condition2_cells.size(), 3 * nc);
    for (std::size_t i = 0; i < 3; ++i) {
        double total = 0.0;
        for (std::size_t c = 0; c < nc; ++c) total += r.condition2_cells[i * nc + c].value;
        EXPECT_NEAR(r.condition2[i].total, total, 1e-15 + 1e-12 * std::abs(total));
        EXPECT_GE(r.condition2[i].total, -r.condition2[i].quadrature_error);
    }
    // Deviation from the target shrinks as the weights flatten.
    EXPECT_LT(r.condition1[2].max_deviation, r.condition1[0].max_deviation);
    // Every n below 2 C1 is reported.
    std::size_t below = 0;
    for (long n : opts.n_list) below += static_cast<double>(n) < r.n_threshold;
    std::size_t warned = 0;
    for (const auto& w : r.warnings) warned += w.find("lambda-gap threshold") != std::string::npos;
    EXPECT_EQ(warned, below);
    // Condition 3 rows are ordered by n, then K.
    ASSERT_FALSE(r.condition3.empty());
    for (std::size_t i = 1; i < r.condition3.size(); ++i) {
        const auto& a = r.condition3[i - 1];
        const auto& b = r.condition3[i];
        EXPECT_TRUE(a.n < b.n || (a.n == b.n && a.K < b.K));
    }
}

TEST_F(SmallDiskModel, AuditRejectsBadOptions) {
    AuditOptions opts;
    opts.n_list = {};
    EXPECT_THROW(reich_audit(*model_, *atoms_, opts), DomainError);
    opts.n_list = {8, 4};
    EXPECT_THROW(reich_audit(*model_, *atoms_, opts), DomainError);
    opts.n_list = {4};
    opts.k_list = {50};
    EXPECT_THROW(reich_audit(*model_, *atoms_, opts), DomainError);
}

}  // namespace
