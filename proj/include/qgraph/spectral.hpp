#ifndef QGRAPH_SPECTRAL_HPP
#define QGRAPH_SPECTRAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

struct SecularSystem {
    cplx k;
    CMatrix X;
    CMatrix Y;
    CMatrix Z;        // A X + ik B Y
    CMatrix T;
    CMatrix R_plus;
    // ||Z - (A+ikB)(1 - S T) R_+|| / max(1, ||Z||); empty when A+ikB is singular.
    std::optional<double> factorization_residual;
};

SecularSystem secular_system(const MetricGraph& graph, const BoundaryConditions& bc, cplx k);

// T(k) on the endpoint basis.
CMatrix transfer_matrix(const MetricGraph& graph, cplx k);

// Z R_+^{-1} = (A + ikB) + (A - ikB) T for the row-normalized pair. Same kernel
// as Z, bounded entries for Im k >= 0.
CMatrix balanced_secular_matrix(const MetricGraph& graph, const BoundaryConditions& bc, cplx k);

struct Eigenvalue {
    double lambda = 0.0;
    std::size_t multiplicity = 0;
    double k = 0.0;          // sqrt|lambda|
    double residual = 0.0;   // sigma_min / ||Z|| at the root
};

struct ScanOptions {
    double step = 0.0;          // 0: automatic
    double accept = 1e-6;       // relative singular value threshold
    double refine = 1e-10;      // bracket width for the golden-section search
    double k_min = 1e-6;
};

struct SpectrumPart {
    std::vector<Eigenvalue> values;
    std::vector<std::string> notes;
    double step = 0.0;
};

// Eigenvalues k^2 with 0 < k <= k_max, ascending.
SpectrumPart positive_spectrum(const MetricGraph& graph, const BoundaryConditions& bc, double k_max,
                               const ScanOptions& options = {});

// Eigenvalues -kappa^2 < 0, ascending.
SpectrumPart negative_spectrum(const MetricGraph& graph, const BoundaryConditions& bc,
                               const ScanOptions& options = {});

// Upper end of the negative scan, beyond which no eigenvalue can lie.
double negative_scan_limit(const MetricGraph& graph, const BoundaryConditions& bc);

struct ZeroModes {
    std::size_t dimension = 0;
    // Columns are coefficient vectors (alpha_1..alpha_I, beta_1..beta_I) of
    // psi_i(x) = alpha_i + beta_i x.
    CMatrix basis;
};

ZeroModes zero_modes(const MetricGraph& graph, const BoundaryConditions& bc);

// s(t) with s tanh(a s / 2) = t.
double solve_s(double t, double a, double tol = 1e-14);

struct Certificates {
    std::size_t n_plus_bound = 0;
    double lower_bound = 0.0;
    double s_value = 0.0;
    double l_plus_norm = 0.0;
    std::optional<double> min_length;
};

Certificates certificates(const MetricGraph& graph, const BoundaryConditions& bc);

struct SpectrumReport {
    SpectrumPart negative;
    ZeroModes zero;
    SpectrumPart positive;
    Certificates certificates;
    std::size_t negative_count = 0;
    bool count_ok = false;
    bool lower_bound_ok = false;
};

SpectrumReport spectrum_report(const MetricGraph& graph, const BoundaryConditions& bc, double k_max,
                               const ScanOptions& options = {});

} // namespace qgraph

#endif
