#include "qgraph/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qgraph {

namespace {

constexpr double HERMITIAN_TOLERANCE = 1e-10;
constexpr double SPECTRUM_GUARD = 1e-8;
constexpr double LOCALITY_TOLERANCE = 1e-10;

CMatrix normalizer(const CMatrix& a, const CMatrix& b)
{
    CMatrix gram = a * a.adjoint() + b * b.adjoint();
    return linalg::hermitian_function(gram, [](double x) { return 1.0 / std::sqrt(x); });
}

CanonicalForm compute_canonical(const CMatrix& an, const CMatrix& bn)
{
    const Eigen::Index n = an.rows();
    CanonicalForm cf;
    CMatrix kernel = linalg::null_space(bn, RANK_TOLERANCE, 1.0);
    cf.P = linalg::projector(kernel);
    CMatrix p_perp = CMatrix::Identity(n, n) - cf.P;

    // Pseudo-inverse of B with the rank cutoff used for the kernel.
    CMatrix b_pinv = CMatrix::Zero(n, n);
    if (kernel.cols() < n) {
        Eigen::JacobiSVD<CMatrix> svd(bn, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RVector& s = svd.singularValues();
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s(i) >= RANK_TOLERANCE * std::max(s(0), 1.0)) {
                b_pinv += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).adjoint();
            }
        }
    }
    CMatrix l = b_pinv * an * p_perp;
    l = p_perp * linalg::hermitian_part(l) * p_perp;
    cf.L = l;
    cf.A_hat = cf.P + cf.L;
    cf.B_hat = p_perp;
    return cf;
}

void check_square(const CMatrix& m, std::size_t dim, const char* name)
{
    if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
        std::ostringstream msg;
        msg << name << " is " << m.rows() << "x" << m.cols() << ", expected " << dim << "x" << dim;
        throw DimensionMismatchError(msg.str());
    }
}

// Checks (abcond) on a pair; returns the offending condition or empty.
std::string abcond_violation(const CMatrix& a, const CMatrix& b)
{
    const Eigen::Index n = a.rows();
    CMatrix joined(n, 2 * n);
    joined << a, b;
    if (linalg::rank(joined) < static_cast<std::size_t>(n)) {
        return "rank";
    }
    CMatrix c = normalizer(a, b);
    CMatrix an = c * a;
    CMatrix bn = c * b;
    CMatrix ab = an * bn.adjoint();
    if ((ab - ab.adjoint()).cwiseAbs().maxCoeff() > HERMITIAN_TOLERANCE) {
        return "hermitian";
    }
    return {};
}

std::optional<std::vector<LocalBlock>> detect_blocks(const BoundaryConditions& bc)
{
    const auto& sets = bc.vertex_sets();
    const Eigen::Index n = static_cast<Eigen::Index>(bc.dimension());
    CMatrix s = scattering_matrix(bc, cplx(1.0, 0.0));
    std::vector<Eigen::Index> owner(n);
    for (std::size_t v = 0; v < sets.size(); ++v) {
        for (std::size_t k : sets[v]) {
            owner[static_cast<Eigen::Index>(k)] = static_cast<Eigen::Index>(v);
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (owner[r] != owner[c] && std::abs(s(r, c)) > LOCALITY_TOLERANCE) {
                return std::nullopt;
            }
        }
    }
    // A block with S(1) as its scattering matrix: A = -(S - 1)/2, B = (S + 1)/(2i).
    std::vector<LocalBlock> blocks;
    for (const auto& set : sets) {
        const Eigen::Index d = static_cast<Eigen::Index>(set.size());
        CMatrix sv(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                sv(r, c) = s(static_cast<Eigen::Index>(set[r]), static_cast<Eigen::Index>(set[c]));
            }
        }
        CMatrix id = CMatrix::Identity(d, d);
        blocks.push_back({-0.5 * (sv - id), (sv + id) / (2.0 * I_UNIT)});
    }
    return blocks;
}

CMatrix scatter_blocks(const std::vector<std::vector<std::size_t>>& sets, const std::vector<CMatrix>& blocks,
                       Eigen::Index n)
{
    CMatrix out = CMatrix::Zero(n, n);
    for (std::size_t v = 0; v < sets.size(); ++v) {
        const auto& set = sets[v];
        for (std::size_t r = 0; r < set.size(); ++r) {
            for (std::size_t c = 0; c < set.size(); ++c) {
                out(static_cast<Eigen::Index>(set[r]), static_cast<Eigen::Index>(set[c])) =
                    blocks[v](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
    }
    return out;
}

enum class Sign { zero, positive, negative, nonreal };

Sign classify(cplx z, double tol)
{
    if (std::abs(z.imag()) > tol) {
        return Sign::nonreal;
    }
    if (z.real() > tol) {
        return Sign::positive;
    }
    if (z.real() < -tol) {
        return Sign::negative;
    }
    return Sign::zero;
}

// Sign of each entry of 1 + S(i kappa) = 2 sum_n L^n/kappa^n (n = 0 term is
// the projection onto Ran B^dagger) as kappa -> infinity, read off from the
// first nonvanishing coefficient.
std::vector<std::vector<Sign>> asymptotic_signs(const CanonicalForm& cf)
{
    const Eigen::Index n = cf.L.rows();
    const double scale = std::max(1.0, linalg::spectral_norm(cf.L));
    std::vector<std::vector<Sign>> out(n, std::vector<Sign>(n, Sign::zero));
    std::vector<std::vector<bool>> settled(n, std::vector<bool>(n, false));
    CMatrix term = CMatrix::Identity(n, n) - cf.P;
    double norm = 1.0;
    for (Eigen::Index order = 0; order <= 2 * n + 1; ++order) {
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                if (settled[r][c]) {
                    continue;
                }
                Sign s = classify(term(r, c), SIGN_TOLERANCE * norm);
                if (s != Sign::zero) {
                    out[r][c] = s;
                    settled[r][c] = true;
                }
            }
        }
        term = term * cf.L;
        norm *= scale;
    }
    return out;
}

struct GridFlags {
    bool positive = true;
    bool strict = true;
    bool local = true;
};

GridFlags flags_at(const CMatrix& m, const std::vector<std::vector<std::size_t>>& sets, bool local)
{
    GridFlags f;
    f.local = local;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            Sign s = classify(m(r, c), SIGN_TOLERANCE);
            if (s == Sign::negative || s == Sign::nonreal) {
                f.positive = false;
            }
            if (s != Sign::positive) {
                f.strict = false;
            }
        }
    }
    if (local) {
        for (const auto& set : sets) {
            for (std::size_t r : set) {
                for (std::size_t c : set) {
                    if (classify(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), SIGN_TOLERANCE) !=
                        Sign::positive) {
                        f.local = false;
                    }
                }
            }
        }
    }
    return f;
}

} // namespace

BoundaryConditions BoundaryConditions::validate(const MetricGraph& graph, CMatrix a, CMatrix b)
{
    const std::size_t dim = graph.endpoint_dimension();
    check_square(a, dim, "A");
    check_square(b, dim, "B");
    if (!a.allFinite() || !b.allFinite()) {
        throw BoundaryError("boundary matrices contain non-finite entries");
    }
    std::string violation = abcond_violation(a, b);
    if (violation == "rank") {
        throw RankDeficientError("(A,B) does not have maximal rank " + std::to_string(dim));
    }
    if (violation == "hermitian") {
        throw NonHermitianError("A B^dagger is not Hermitian");
    }

    BoundaryConditions bc;
    CMatrix c = normalizer(a, b);
    bc.an_ = c * a;
    bc.bn_ = c * b;
    bc.a_ = std::move(a);
    bc.b_ = std::move(b);
    bc.canonical_ = compute_canonical(bc.an_, bc.bn_);
    bc.l_spectrum_ = linalg::hermitian_eigenvalues(bc.canonical_.L);
    bc.vertex_sets_ = EndpointIndex(graph).partition();
    return bc;
}

double BoundaryConditions::l_plus_norm() const
{
    if (l_spectrum_.size() == 0) {
        return 0.0;
    }
    return std::max(0.0, l_spectrum_.maxCoeff());
}

std::optional<std::vector<LocalBlock>> BoundaryConditions::local_blocks() const
{
    if (witness_) {
        return witness_;
    }
    return detect_blocks(*this);
}

BoundaryConditions BoundaryConditions::with_witness(std::vector<LocalBlock> blocks) const
{
    if (blocks.size() != vertex_sets_.size()) {
        throw DimensionMismatchError("locality witness needs one block per vertex");
    }
    std::vector<CMatrix> as, bs;
    for (std::size_t v = 0; v < blocks.size(); ++v) {
        const std::size_t d = vertex_sets_[v].size();
        check_square(blocks[v].A, d, "A(v)");
        check_square(blocks[v].B, d, "B(v)");
        as.push_back(blocks[v].A);
        bs.push_back(blocks[v].B);
    }
    const Eigen::Index n = static_cast<Eigen::Index>(dimension());
    CMatrix ga = scatter_blocks(vertex_sets_, as, n);
    CMatrix gb = scatter_blocks(vertex_sets_, bs, n);
    CMatrix c = normalizer(ga, gb);
    CMatrix joined(2 * n, n);
    joined << -(c * gb).adjoint(), (c * ga).adjoint();
    CMatrix own(2 * n, n);
    own << -bn_.adjoint(), an_.adjoint();
    CMatrix diff = joined * joined.adjoint() - own * own.adjoint();
    if (diff.size() > 0 && diff.cwiseAbs().maxCoeff() > 1e-8) {
        throw NonLocalError("locality witness does not reproduce the boundary conditions");
    }
    BoundaryConditions out = *this;
    out.witness_ = std::move(blocks);
    return out;
}

CanonicalForm canonical_form(const BoundaryConditions& bc)
{
    return bc.canonical();
}

CMatrix scattering_matrix(const CMatrix& a, const CMatrix& b, cplx k)
{
    if (k == cplx(0.0, 0.0)) {
        throw std::invalid_argument("scattering matrix needs k != 0");
    }
    CMatrix plus = a + I_UNIT * k * b;
    CMatrix minus = a - I_UNIT * k * b;
    if (plus.size() == 0) {
        return plus;
    }
    double smin = linalg::smallest_singular_value(plus);
    double scale = std::max(linalg::spectral_norm(plus), 1.0);
    if (smin < 1e-12 * scale) {
        throw SingularScatteringError("A + ikB is singular", k);
    }
    return -plus.partialPivLu().solve(minus);
}

CMatrix scattering_matrix(const BoundaryConditions& bc, cplx k)
{
    if (k.real() == 0.0 && k.imag() > 0.0) {
        const RVector& ev = bc.l_spectrum();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i) - k.imag()) < SPECTRUM_GUARD) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "kappa = " << k.imag() << " is an eigenvalue of L";
                throw SingularScatteringError(msg.str(), k);
            }
        }
    }
    return scattering_matrix(bc.normalized_A(), bc.normalized_B(), k);
}

bool bc_equivalent(const BoundaryConditions& first, const BoundaryConditions& second)
{
    if (first.dimension() != second.dimension()) {
        return false;
    }
    CMatrix diff = form_matrices(first).P_M - form_matrices(second).P_M;
    return diff.size() == 0 || diff.cwiseAbs().maxCoeff() < 1e-8;
}

Inertia inertia(const BoundaryConditions& bc)
{
    CMatrix ab = bc.normalized_A() * bc.normalized_B().adjoint();
    linalg::InertiaCounts c = linalg::inertia_of(ab, HERMITIAN_TOLERANCE);
    return {c.positive, c.negative, c.zero};
}

LocalBlock standard_block(std::size_t degree)
{
    const Eigen::Index d = static_cast<Eigen::Index>(degree);
    if (d == 1) {
        return {CMatrix::Zero(1, 1), CMatrix::Identity(1, 1)};
    }
    CMatrix a = CMatrix::Zero(d, d);
    CMatrix b = CMatrix::Zero(d, d);
    for (Eigen::Index r = 0; r + 1 < d; ++r) {
        a(r, r) = 1.0;
        a(r, r + 1) = -1.0;
    }
    b.row(d - 1).setOnes();
    return {a, b};
}

BoundaryConditions assemble_local(const MetricGraph& graph, const std::vector<LocalBlock>& blocks)
{
    EndpointIndex index(graph);
    const auto& sets = index.partition();
    if (blocks.size() != sets.size()) {
        throw DimensionMismatchError("expected " + std::to_string(sets.size()) + " vertex blocks, got " +
                                     std::to_string(blocks.size()));
    }
    std::vector<CMatrix> as, bs;
    for (std::size_t v = 0; v < blocks.size(); ++v) {
        const std::size_t d = sets[v].size();
        try {
            check_square(blocks[v].A, d, "A(v)");
            check_square(blocks[v].B, d, "B(v)");
        } catch (const DimensionMismatchError& e) {
            throw DimensionMismatchError("vertex '" + graph.vertex_id(v) + "': " + e.what());
        }
        std::string violation = abcond_violation(blocks[v].A, blocks[v].B);
        if (!violation.empty()) {
            throw InvalidBlockError("vertex '" + graph.vertex_id(v) + "': block violates the " + violation +
                                    " condition");
        }
        as.push_back(blocks[v].A);
        bs.push_back(blocks[v].B);
    }
    const Eigen::Index n = static_cast<Eigen::Index>(index.dimension());
    BoundaryConditions bc =
        BoundaryConditions::validate(graph, scatter_blocks(sets, as, n), scatter_blocks(sets, bs, n));
    return bc.with_witness(blocks);
}

BoundaryConditions make_standard(const MetricGraph& graph)
{
    std::vector<LocalBlock> blocks;
    for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
        blocks.push_back(standard_block(graph.degree(v)));
    }
    return assemble_local(graph, blocks);
}

std::string PositivityReport::label() const
{
    if (locally_strictly_positive) {
        return "locally strictly positive";
    }
    if (strictly_positive) {
        return "strictly positive";
    }
    if (positive) {
        return "positive";
    }
    return "not positive";
}

std::vector<double> default_kappa_grid(const BoundaryConditions& bc, std::size_t points)
{
    const double norm = std::max(1.0, linalg::spectral_norm(bc.canonical().L));
    const double lo = 2.0 * bc.l_plus_norm() + 0.5;
    const double hi = std::max(1e3 * norm, 10.0 * lo);
    std::vector<double> grid;
    points = std::max<std::size_t>(points, 2);
    for (std::size_t i = 0; i < points; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1)));
    }
    return grid;
}

PositivityReport positivity_class(const BoundaryConditions& bc, std::span<const double> kappa_grid)
{
    if (kappa_grid.empty()) {
        throw PositivityGridError("kappa grid is empty");
    }
    const double floor = bc.l_plus_norm();
    for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
        if (!(kappa_grid[i] > 0.0)) {
            throw PositivityGridError("kappa grid must be positive");
        }
        if (i > 0 && !(kappa_grid[i] > kappa_grid[i - 1])) {
            throw PositivityGridError("kappa grid must be strictly ascending");
        }
        if (kappa_grid[i] <= floor + SPECTRUM_GUARD) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "kappa = " << kappa_grid[i] << " does not lie above the spectrum of L (max " << floor << ")";
            throw PositivityGridError(msg.str());
        }
    }

    PositivityReport report;
    report.method = "grid+asymptotic";
    const auto blocks = bc.local_blocks();
    report.local = blocks.has_value();
    const auto& sets = bc.vertex_sets();

    auto signs = asymptotic_signs(bc.canonical());
    report.asymptotic_positive = true;
    report.asymptotic_strict = true;
    for (const auto& row : signs) {
        for (Sign s : row) {
            if (s == Sign::negative || s == Sign::nonreal) {
                report.asymptotic_positive = false;
            }
            if (s != Sign::positive) {
                report.asymptotic_strict = false;
            }
        }
    }
    report.asymptotic_local = report.local;
    if (report.local) {
        for (const auto& set : sets) {
            for (std::size_t r : set) {
                for (std::size_t c : set) {
                    if (signs[r][c] != Sign::positive) {
                        report.asymptotic_local = false;
                    }
                }
            }
        }
    }

    // Walk the grid from the top down; the threshold is the last point of the
    // unbroken run that reaches the largest kappa.
    bool run_positive = true, run_strict = true, run_local = true;
    const Eigen::Index n = static_cast<Eigen::Index>(bc.dimension());
    for (std::size_t i = kappa_grid.size(); i-- > 0;) {
        CMatrix m = CMatrix::Identity(n, n) + scattering_matrix(bc, cplx(0.0, kappa_grid[i]));
        GridFlags f = flags_at(m, sets, report.local);
        run_positive = run_positive && f.positive;
        run_strict = run_strict && f.strict;
        run_local = run_local && f.local;
        if (run_positive) {
            report.positive_from = kappa_grid[i];
        }
        if (run_strict) {
            report.strict_from = kappa_grid[i];
        }
        if (run_local) {
            report.local_from = kappa_grid[i];
        }
    }
    report.positive = report.asymptotic_positive;
    report.strictly_positive = report.asymptotic_strict;
    report.locally_strictly_positive = report.asymptotic_local;
    return report;
}

FormMatrices form_matrices(const BoundaryConditions& bc)
{
    const CMatrix& a = bc.normalized_A();
    const CMatrix& b = bc.normalized_B();
    const Eigen::Index n = a.rows();
    CMatrix frame(2 * n, n);
    frame << -b.adjoint(), a.adjoint();
    FormMatrices out;
    out.P_M = frame * frame.adjoint();
    out.Q_M = -frame * (a * b.adjoint()) * frame.adjoint();
    return out;
}

} // namespace qgraph
