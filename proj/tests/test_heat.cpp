#include <gtest/gtest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qgraph/fem.hpp"
#include "qgraph/heat.hpp"
#include "support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

// -2 lambda int_0^inf e^{lambda w} g_t(s + w) dw by composite Simpson.
double h_integral(double s, double t, double lambda)
{
    const double upper = std::max(0.0, 2.0 * t * lambda) + 12.0 * std::sqrt(t) + (lambda < 0 ? 40.0 / -lambda : 0.0);
    const int n = 200000;
    const double dw = upper / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = i * dw;
        const double f = std::exp(lambda * w) * heat_gaussian(s + w, t);
        sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return -2.0 * lambda * sum * dw / 3.0;
}

} // namespace

TEST(Heat, ErfcxIsContinuous)
{
    for (double w : {-3.0, -0.5, 0.0, 1.0, 10.0, 24.999, 25.0, 25.001, 26.0, 40.0}) {
        const double direct = std::exp(w * w) * std::erfc(w);
        if (w <= 26.0) {
            EXPECT_NEAR(erfcx(w), direct, 1e-13 * direct);
        }
        EXPECT_GT(erfcx(w), 0.0);
    }
    EXPECT_NEAR(erfcx(1e6) * 1e6 * std::sqrt(M_PI), 1.0, 1e-10);
}

TEST(Heat, ScalarMatchesIntegral)
{
    for (double lambda : {-3.0, -0.4, 0.7, 2.5}) {
        for (double t : {0.05, 0.5, 2.0}) {
            for (double s : {0.0, 0.3, 2.0}) {
                const double exact = h_integral(s, t, lambda);
                EXPECT_NEAR(h_scalar(s, t, lambda), exact, 1e-9 * std::max(1.0, std::abs(exact)))
                    << lambda << " " << t << " " << s;
            }
        }
    }
    EXPECT_EQ(h_scalar(1.0, 1.0, 0.0), 0.0);
    EXPECT_THROW(h_scalar(1.0, 0.0, 1.0), HeatError);
}

TEST(Heat, MatrixMatchesMatrixFunctions)
{
    Rng rng(51);
    for (int n = 0; n < 5; ++n) {
        RMatrix h = random_hermitian(rng, 3, 1.5).real();
        const double s = 0.6, t = 0.3;
        // h_t(s; H) = -H exp(H^2 t - H s) erfc(s/(2 sqrt t) - H sqrt t); erfc through the
        // spectral decomposition of the shifted argument.
        RMatrix expo = (h * h * t - h * s).exp();
        Eigen::SelfAdjointEigenSolver<RMatrix> es(RMatrix::Identity(3, 3) * (s / (2 * std::sqrt(t))) - h * std::sqrt(t));
        RMatrix erfc_m = es.eigenvectors() * es.eigenvalues().unaryExpr([](double w) { return std::erfc(w); }).asDiagonal() *
                         es.eigenvectors().transpose();
        RMatrix exact = -h * expo * erfc_m;
        EXPECT_LT((h_matrix(s, t, h.cast<cplx>()) - exact.cast<cplx>()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Heat, StandardStarMassAndSymmetry)
{
    for (std::size_t d : {1u, 3u, 4u}) {
        StarHeatKernel kernel(HeatKernelSpec::standard(d));
        const double t = 0.4;
        for (std::size_t e = 0; e < d; ++e) {
            const double x = 0.2 + 0.3 * e;
            double mass = 0.0;
            const int n = 4000;
            const double dy = 12.0 / n;
            for (std::size_t f = 0; f < d; ++f) {
                for (int i = 0; i <= n; ++i) {
                    mass += kernel.entry(t, e, x, f, i * dy).real() * dy * (i == 0 || i == n ? 0.5 : 1.0);
                }
                EXPECT_NEAR(std::abs(kernel.entry(t, e, x, f, 0.7) - kernel.entry(t, f, 0.7, e, x)), 0.0, 1e-15);
            }
            EXPECT_NEAR(mass, 1.0, 1e-6);
        }
    }
}

TEST(Heat, DetectFamily)
{
    MetricGraph g = star(3);
    EXPECT_EQ(detect_heat_family(g, make_standard(g)).family, HeatFamily::standard);
    CMatrix h = CMatrix::Identity(3, 3);
    h(0, 1) = h(1, 0) = 0.5;
    HeatKernelSpec robin = detect_heat_family(g, validate_bc(g, 2.0 * h, 2.0 * CMatrix::Identity(3, 3)));
    EXPECT_EQ(robin.family, HeatFamily::robin);
    EXPECT_LT((robin.H - h).cwiseAbs().maxCoeff(), 1e-14);
    CMatrix a = CMatrix::Zero(3, 3), b = CMatrix::Identity(3, 3);
    a(0, 0) = 1.0;
    b(0, 0) = 0.0;
    EXPECT_THROW(detect_heat_family(g, validate_bc(g, a, b)), HeatError);
    MetricGraph line = interval(1.0);
    EXPECT_THROW(detect_heat_family(line, make_standard(line)), HeatError);
}

TEST(Heat, ApplyApproachesInitialData)
{
    StarHeatKernel kernel(HeatKernelSpec::standard(3));
    StarSamples psi = make_star_samples(3, 6.0, 1201);
    for (std::size_t i = 0; i < psi.grid.size(); ++i) {
        psi.values[1][i] = std::exp(-(psi.grid[i] - 2.0) * (psi.grid[i] - 2.0));
    }
    HeatApplyResult r = heat_apply(kernel, psi, 1e-4);
    for (std::size_t i = 200; i < 600; i += 50) {
        EXPECT_NEAR(r.output.values[1][i], psi.values[1][i], 1e-3);
        EXPECT_NEAR(r.output.values[0][i], 0.0, 1e-6);
    }
    EXPECT_GE(r.min_value, -1e-12);
    StarSamples even = make_star_samples(3, 6.0, 1200);
    EXPECT_EQ(even.grid.size() % 2, 1u);
}

TEST(Heat, RobinStarAgainstOracle)
{
    Rng rng(52);
    MetricGraph g = star(2);
    CMatrix h = random_hermitian(rng, 2, 1.0).real().cast<cplx>();
    StarHeatKernel kernel(HeatKernelSpec::robin(h));
    DiscreteForm form = assemble(g, validate_bc(g, h, CMatrix::Identity(2, 2)), 0.01, 6.0);
    const double t = 0.2;
    RMatrix oracle = oracle_heat_kernel(form, t);
    double worst = 0.0;
    for (std::size_t e = 0; e < 2; ++e) {
        for (std::size_t f = 0; f < 2; ++f) {
            for (std::size_t i = 0; i <= 200; i += 20) {
                for (std::size_t j = 0; j <= 200; j += 40) {
                    const double value = oracle(static_cast<Eigen::Index>(form.offset[e] + i),
                                                static_cast<Eigen::Index>(form.offset[f] + j));
                    const cplx exact = kernel.entry(t, e, form.nodes[e][i], f, form.nodes[f][j]);
                    worst = std::max(worst, std::abs(value - exact));
                }
            }
        }
    }
    EXPECT_LT(worst, 2e-3);
}
