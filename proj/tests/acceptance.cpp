// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/fem.hpp"
#include "qgraph/green.hpp"
#include "qgraph/heat.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/walks.hpp"
#include "support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::size_t count_negative(const SpectrumPart& part)
{
    std::size_t n = 0;
    for (const auto& e : part.values) {
        n += e.multiplicity;
    }
    return n;
}

// 1. number of negative eigenvalues <= n_+
Outcome negative_count()
{
    Rng rng(101);
    std::size_t cases = 0, ok = 0, equal_cases = 0, equal_ok = 0;
    const MetricGraph star3 = star(3);
    for (int n = 0; n < 120; ++n) {
        BoundaryConditions bc = random_bc(rng, star3);
        const std::size_t count = count_negative(negative_spectrum(star3, bc));
        const std::size_t bound = inertia(bc).n_plus;
        ++cases;
        ok += count <= bound;
        ++equal_cases;
        equal_ok += count == bound;
    }
    const MetricGraph g = lollipop_line(1.0);
    for (int n = 0; n < 120; ++n) {
        BoundaryConditions bc = random_bc(rng, g);
        const std::size_t count = count_negative(negative_spectrum(g, bc));
        ++cases;
        ok += count <= inertia(bc).n_plus;
    }
    return {ok == cases && equal_ok == equal_cases,
            std::to_string(ok) + "/" + std::to_string(cases) + " within n+, " + std::to_string(equal_ok) + "/" +
                std::to_string(equal_cases) + " equal without internal edges"};
}

// 2. bottom of the spectrum on a star is -||H_+||^2
Outcome star_bottom()
{
    Rng rng(202);
    const MetricGraph g = star(4);
    double worst = 0.0;
    int done = 0;
    while (done < 50) {
        CMatrix h = random_hermitian(rng, 4, 2.0);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        const double top = es.eigenvalues().maxCoeff();
        if (top <= 0.05) {
            continue;
        }
        CMatrix c = random_invertible(rng, 4);
        BoundaryConditions bc = validate_bc(g, c * h, c);
        SpectrumPart neg = negative_spectrum(g, bc);
        if (neg.values.empty()) {
            return {false, "no negative eigenvalue found for n+ > 0"};
        }
        worst = std::max(worst, std::abs(neg.values.front().lambda + top * top));
        ++done;
    }
    return {worst <= 1e-10, "50 stars, max |lambda_min + ||H+||^2| = " + sci(worst)};
}

double bisect_s(double t, double a, double tol)
{
    double lo = 0.0, hi = t + 2.0 / a + 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::tanh(a * mid / 2.0) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// 3. lower bound -s(||L_+||)^2
Outcome lower_bound()
{
    Rng rng(101);
    const MetricGraph star3 = star(3);
    for (int n = 0; n < 120; ++n) {
        random_bc(rng, star3);   // same stream as criterion 1
    }
    const MetricGraph g = lollipop_line(1.0);
    std::size_t ok = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 120; ++n) {
        BoundaryConditions bc = random_bc(rng, g);
        const Certificates c = certificates(g, bc);
        bool fine = true;
        for (const auto& e : negative_spectrum(g, bc).values) {
            fine = fine && e.lambda >= c.lower_bound - 1e-8;
            margin = std::min(margin, e.lambda - c.lower_bound);
        }
        ok += fine;
    }
    const double s1 = solve_s(1.0, 1.0);
    const double ref = bisect_s(1.0, 1.0, 1e-15);
    const bool pass = ok == 120 && std::abs(s1 - ref) <= 1e-4 && std::abs(s1 - 1.5434) <= 1e-4;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu/120 above -s^2 (min margin %s), s(1) = %.6f, bisection %.6f", ok,
                  sci(margin).c_str(), s1, ref);
    return {pass, buf};
}

// 4. Dirichlet interval against the exact values and the finite element oracle
Outcome dirichlet_interval()
{
    const MetricGraph g = interval(1.0);
    BoundaryConditions bc = validate_bc(g, CMatrix::Identity(2, 2), CMatrix::Zero(2, 2));
    SpectrumPart pos = positive_spectrum(g, bc, 10.0);
    const double pi2 = M_PI * M_PI;
    const std::vector<double> exact = {pi2, 4 * pi2, 9 * pi2};
    if (pos.values.size() != 3) {
        return {false, "expected 3 eigenvalues below k = 10, got " + std::to_string(pos.values.size())};
    }
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        err = std::max(err, std::abs(pos.values[i].lambda - exact[i]));
    }
    auto coarse = oracle_eigenvalues(assemble(g, bc, 1.0 / 200), 3);
    auto fine = oracle_eigenvalues(assemble(g, bc, 1.0 / 400), 3);
    bool bracket = true;
    double rmin = 1e300, rmax = 0.0;
    for (int i = 0; i < 3; ++i) {
        bracket = bracket && coarse[i] > fine[i] && fine[i] > exact[i];
        const double r = (coarse[i] - exact[i]) / (fine[i] - exact[i]);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    const bool pass = err <= 1e-6 && bracket && rmin >= 3.0 && rmax <= 5.0;
    return {pass, "max |k^2 - (n pi)^2| = " + sci(err) + ", oracle bracket " + (bracket ? "ok" : "broken") +
                      ", Richardson ratios in [" + sci(rmin) + ", " + sci(rmax) + "]"};
}

GraphPoint random_point(Rng& rng, const MetricGraph& g)
{
    const std::size_t e = std::uniform_int_distribution<std::size_t>(0, g.edge_count() - 1)(rng);
    const double len = g.kind(e) == EdgeKind::external ? 3.0 : g.edge_length(e);
    return {e, uniform(rng, 0.0, len)};
}

// 5. r(y, x; k) = conj r(x, y; -conj k), and the two formulas agree
Outcome green_symmetry()
{
    Rng rng(505);
    const std::vector<MetricGraph> graphs = {star(3), lollipop_line(1.3), interval_star(0.8), triangle(1.0, 0.7, 1.6)};
    double sym = 0.0, agree = 0.0;
    int done = 0, compared = 0;
    while (done < 100) {
        const MetricGraph& g = graphs[static_cast<std::size_t>(done) % graphs.size()];
        BoundaryConditions bc = random_bc(rng, g);
        const cplx k(uniform(rng, -6.0, 6.0), uniform(rng, 0.3, 4.0));
        const GraphPoint x = random_point(rng, g);
        const GraphPoint y = random_point(rng, g);
        try {
            const cplx a = greens_function(g, bc, y, x, k);
            const cplx b = greens_function(g, bc, x, y, -std::conj(k));
            sym = std::max(sym, std::abs(a - std::conj(b)));
            try {
                const cplx r = greens_function(g, bc, x, y, k, GreenFormula::resolvent);
                const cplx s = greens_function(g, bc, x, y, k, GreenFormula::scattering);
                agree = std::max(agree, std::abs(r - s));
                ++compared;
            } catch (const SingularScatteringError&) {
            }
        } catch (const NearEigenvalueError&) {
            continue;
        }
        ++done;
    }
    return {sym <= 1e-9 && agree <= 1e-9 && compared > 0,
            "100 samples, symmetry residual " + sci(sym) + ", formula gap " + sci(agree) + " over " +
                std::to_string(compared) + " samples"};
}

// 6. walk series against the closed form, and the matrix-power identity
Outcome walk_series()
{
    const MetricGraph g = interval_star(1.0);
    const BoundaryConditions bc = make_standard(g);
    Rng rng(606);
    bool within = true;
    double worst = 0.0;
    for (double kappa : {4.0, 6.0, 10.0}) {
        for (int n = 0; n < 20; ++n) {
            const GraphPoint x = random_point(rng, g);
            const GraphPoint y = random_point(rng, g);
            SeriesResult r = walk_series_green(g, bc, x, y, kappa, 12.0);
            const cplx closed = greens_function(g, bc, x, y, cplx(0.0, kappa));
            const double diff = std::abs(r.value - closed);
            within = within && diff <= r.bound();
            worst = std::max(worst, diff / r.bound());
        }
    }

    // sum over walks of combinatorial length m = [S (T S)^m]_{p, q}
    const EndpointIndex index(g);
    const auto n = static_cast<Eigen::Index>(index.dimension());
    double identity = 0.0;
    for (double kappa : {4.0, 6.0, 10.0}) {
        const CMatrix s = scattering_matrix(bc, cplx(0.0, kappa));
        CMatrix t = CMatrix::Zero(n, n);
        for (std::size_t i = 0; i < g.internal_count(); ++i) {
            const double decay = std::exp(-kappa * g.length(i));
            t(static_cast<Eigen::Index>(index.initial(i)), static_cast<Eigen::Index>(index.terminal(i))) = decay;
            t(static_cast<Eigen::Index>(index.terminal(i)), static_cast<Eigen::Index>(index.initial(i))) = decay;
        }
        const VertexScattering vs(g, bc, kappa);
        std::vector<CMatrix> sums(5, CMatrix::Zero(n, n));
        for (std::size_t p = 0; p < index.dimension(); ++p) {
            for (std::size_t q = 0; q < index.dimension(); ++q) {
                for (const Walk& w : enumerate_endpoint_walks(g, p, q, 4.0 * g.max_length() + 1e-9)) {
                    if (w.combinatorial_length() <= 4) {
                        sums[w.combinatorial_length()](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) +=
                            walk_weight(w, vs) * std::exp(-kappa * w.metric_length);
                    }
                }
            }
        }
        CMatrix power = s;
        for (int m = 0; m <= 4; ++m) {
            identity = std::max(identity, (sums[m] - power).cwiseAbs().maxCoeff());
            power = power * t * s;
        }
    }
    return {within && identity <= 1e-10, "60 pairs within bound (worst |diff|/bound " + sci(worst) +
                                             "), matrix-power identity residual " + sci(identity)};
}

double random_profile(Rng& rng, double x, const std::vector<std::array<double, 3>>& bumps)
{
    (void)rng;
    double v = 0.0;
    for (const auto& b : bumps) {
        v += b[2] * std::max(0.0, 1.0 - std::abs(x - b[0]) / b[1]);
    }
    return v;
}

// 7. positivity of Green's function and heat kernels for standard conditions
Outcome positivity()
{
    double min_green = std::numeric_limits<double>::infinity();
    bool green_ok = true;
    const std::vector<MetricGraph> graphs = {star(3), star(5), interval(1.0), interval_star(1.0), lollipop_line(0.7)};
    for (const auto& g : graphs) {
        const BoundaryConditions bc = make_standard(g);
        const GreenKernel kernel(g, bc, cplx(0.0, 10.0));
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            for (std::size_t f = 0; f < g.edge_count(); ++f) {
                for (double x : edge_samples(g, e, 11, 5.0)) {
                    for (double y : edge_samples(g, f, 11, 5.0)) {
                        const GreenValue v = kernel.evaluate({e, x}, {f, y});
                        green_ok = green_ok && v.value.real() > 0.0 &&
                                   std::abs(v.value.imag()) <= GREEN_SIGN_TOLERANCE * v.envelope;
                        min_green = std::min(min_green, v.value.real());
                    }
                }
            }
        }
    }

    double min_heat = std::numeric_limits<double>::infinity();
    for (std::size_t d : {1u, 2u, 3u, 5u}) {
        const StarHeatKernel kernel(HeatKernelSpec::standard(d));
        for (double t : {0.1, 1.0}) {
            for (std::size_t e = 0; e < d; ++e) {
                for (std::size_t f = 0; f < d; ++f) {
                    for (int i = 0; i <= 40; ++i) {
                        for (int j = 0; j <= 40; ++j) {
                            min_heat = std::min(min_heat, kernel.entry(t, e, 0.1 * i, f, 0.1 * j).real());
                        }
                    }
                }
            }
        }
    }
    for (const auto& g : {interval(1.0), interval(2.5)}) {
        const DiscreteForm form = assemble(g, make_standard(g), 1.0 / 100);
        for (double t : {0.1, 1.0}) {
            min_heat = std::min(min_heat, oracle_heat_kernel(form, t).minCoeff());
        }
    }

    Rng rng(707);
    double min_apply = std::numeric_limits<double>::infinity();
    const StarHeatKernel kernel(HeatKernelSpec::standard(3));
    for (int n = 0; n < 20; ++n) {
        StarSamples psi = make_star_samples(3, 6.0, 241);
        for (std::size_t e = 0; e < 3; ++e) {
            std::vector<std::array<double, 3>> bumps;
            const int count = std::uniform_int_distribution<int>(0, 3)(rng);
            for (int b = 0; b < count; ++b) {
                bumps.push_back({uniform(rng, 0.0, 4.0), uniform(rng, 0.1, 1.0), uniform(rng, 0.0, 2.0)});
            }
            for (std::size_t i = 0; i < psi.grid.size(); ++i) {
                psi.values[e][i] = random_profile(rng, psi.grid[i], bumps);
            }
        }
        for (double t : {0.1, 1.0}) {
            min_apply = std::min(min_apply, heat_apply(kernel, psi, t).min_value);
        }
    }
    const bool pass = green_ok && min_heat >= -1e-8 && min_apply >= -1e-8;
    return {pass, "min Green entry " + sci(min_green) + (green_ok ? " (all > 0)" : " (NOT all > 0)") +
                      ", min heat kernel entry " + sci(min_heat) + ", min evolved value " + sci(min_apply)};
}

// 8. closed-form Robin heat kernel solves the heat equation and the vertex condition
Outcome robin_heat()
{
    Rng rng(808);
    CMatrix h = random_hermitian(rng, 3, 1.5);
    const StarHeatKernel kernel(HeatKernelSpec::robin(h));
    const double dx = 1e-3, dt = 1e-4;
    double pde = 0.0, bc_res = 0.0;
    for (double t : {0.2, 0.5, 1.0}) {
        for (std::size_t e = 0; e < 3; ++e) {
            for (std::size_t f = 0; f < 3; ++f) {
                for (double x : {0.1, 0.4, 0.9, 1.7}) {
                    for (double y : {0.0, 0.3, 1.1}) {
                        auto p = [&](double xx, double tt) { return kernel.entry(tt, e, xx, f, y); };
                        const cplx pt = (-p(x, t + 2 * dt) + 8.0 * p(x, t + dt) - 8.0 * p(x, t - dt) +
                                         p(x, t - 2 * dt)) /
                                        (12.0 * dt);
                        const cplx pxx = (-p(x + 2 * dx, t) + 16.0 * p(x + dx, t) - 30.0 * p(x, t) +
                                          16.0 * p(x - dx, t) - p(x - 2 * dx, t)) /
                                         (12.0 * dx * dx);
                        pde = std::max(pde, std::abs(pt - pxx));
                    }
                }
            }
        }
        // d/dx p(0, y) + H p(0, y) = 0, five-point one-sided derivative
        for (double y : {0.0, 0.3, 1.1}) {
            for (std::size_t f = 0; f < 3; ++f) {
                for (std::size_t e = 0; e < 3; ++e) {
                    auto p = [&](std::size_t row, double xx) { return kernel.entry(t, row, xx, f, y); };
                    const cplx dp = (-25.0 * p(e, 0) + 48.0 * p(e, dx) - 36.0 * p(e, 2 * dx) + 16.0 * p(e, 3 * dx) -
                                     3.0 * p(e, 4 * dx)) /
                                    (12.0 * dx);
                    cplx hp = 0.0;
                    for (std::size_t g = 0; g < 3; ++g) {
                        hp += h(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(g)) * p(g, 0.0);
                    }
                    bc_res = std::max(bc_res, std::abs(dp + hp));
                }
            }
        }
    }

    // small t: p_{e e'} ~ delta (g(x-y) + g(x+y)) + 4 t H_{e e'} g_t(x+y) / (x+y), x + y = 1
    const double t = 1e-3, s = 1.0;
    double rel = 0.0;
    const CMatrix f = kernel.h(s, t);
    for (Eigen::Index e = 0; e < 3; ++e) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            const cplx asym = 4.0 * t * h(e, c) * heat_gaussian(s, t) / s;
            rel = std::max(rel, std::abs(-f(e, c) - asym) / std::abs(asym));
            const double x = 0.35, y = s - x;
            cplx exact = kernel.entry(t, static_cast<std::size_t>(e), x, static_cast<std::size_t>(c), y);
            cplx full = asym;
            if (e == c) {
                full += heat_gaussian(x - y, t) + heat_gaussian(x + y, t);
            }
            rel = std::max(rel, std::abs(exact - full) / std::abs(full));
        }
    }
    const bool pass = pde <= 1e-6 && bc_res <= 1e-6 && rel < 0.1;
    return {pass, "PDE residual " + sci(pde) + ", vertex residual " + sci(bc_res) + ", small-t relative error " +
                      sci(rel)};
}

// 9. zero modes
Outcome zero_mode_bound()
{
    const MetricGraph g = interval(1.0);
    const std::size_t neumann = zero_modes(g, make_standard(g)).dimension;
    const std::size_t dirichlet =
        zero_modes(g, validate_bc(g, CMatrix::Identity(2, 2), CMatrix::Zero(2, 2))).dimension;
    Rng rng(909);
    const std::vector<MetricGraph> graphs = {interval(1.0), triangle(1.0, 0.5, 2.0), lollipop_line(1.0), tadpole(1.2),
                                             interval_star(0.9)};
    std::size_t ok = 0, cases = 0, nonzero = 0;
    for (int n = 0; n < 200; ++n) {
        const MetricGraph& gr = graphs[static_cast<std::size_t>(n) % graphs.size()];
        RandomBcOptions o;
        o.l_min = -3.0;
        o.l_max = 0.0;
        o.zero_eigs = n % 3;
        const auto dim = static_cast<int>(gr.endpoint_dimension());
        o.kernel_dim = std::uniform_int_distribution<int>(0, dim - std::min(o.zero_eigs, dim))(rng);
        BoundaryConditions bc = random_bc(rng, gr, o);
        const Inertia in = inertia(bc);
        if (in.n_plus != 0) {
            continue;
        }
        const std::size_t k = zero_modes(gr, bc).dimension;
        nonzero += k > 0;
        ok += k <= in.n_zero;
        ++cases;
    }
    const bool pass = neumann == 1 && dirichlet == 0 && ok == cases && cases >= 100;
    return {pass, "Neumann dim " + std::to_string(neumann) + ", Dirichlet dim " + std::to_string(dirichlet) + ", " +
                      std::to_string(ok) + "/" + std::to_string(cases) + " random cases within n0 (" +
                      std::to_string(nonzero) + " with zero modes)"};
}

// 10. simplicity of the lowest eigenvalue for strictly positive conditions
Outcome simplicity()
{
    Rng rng(1010);
    int done = 0, simple = 0, tries = 0;
    while (done < 30 && tries < 1000) {
        ++tries;
        const std::size_t d = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        const auto n = static_cast<Eigen::Index>(d);
        const MetricGraph g = star(d);
        RMatrix h(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            h(i, i) = uniform(rng, -1.5, 1.0);
            for (Eigen::Index j = 0; j < i; ++j) {
                h(i, j) = h(j, i) = uniform(rng, 0.05, 1.0);
            }
        }
        CMatrix c = random_invertible(rng, n);
        BoundaryConditions bc = validate_bc(g, c * h.cast<cplx>(), c);
        if (inertia(bc).n_plus == 0) {
            continue;
        }
        if (!positivity_class(bc, default_kappa_grid(bc)).strictly_positive) {
            continue;
        }
        const SpectrumPart neg = negative_spectrum(g, bc);
        ++done;
        simple += !neg.values.empty() && neg.values.front().multiplicity == 1;
    }
    return {done == 30 && simple == 30, std::to_string(simple) + "/" + std::to_string(done) +
                                            " strictly positive stars with a simple lowest eigenvalue"};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"negative-count bound", negative_count},
        {"star bottom eigenvalue", star_bottom},
        {"lower bound and s(1)", lower_bound},
        {"Dirichlet interval vs oracle", dirichlet_interval},
        {"Green symmetry and formula agreement", green_symmetry},
        {"walk series agreement", walk_series},
        {"positivity scans", positivity},
        {"Robin heat kernel", robin_heat},
        {"zero modes", zero_mode_bound},
        {"simplicity of the ground state", simplicity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
