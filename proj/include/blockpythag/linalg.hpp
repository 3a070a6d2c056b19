#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blockpythag/complex_matrix.hpp"

namespace blockpythag {

// Tolerances shared across the library. Residual bounds are relative to
// (1 + ||input||_F) unless noted otherwise at the call site.
struct Tol {
    static constexpr double eps_unitary_per_dim = 1e-12;  // isometry defect per dimension
    static constexpr double eps_recon = 1e-10;            // eig/svd reconstruction
    static constexpr double eps_herm = 1e-8;              // accepted hermitian asymmetry
    static constexpr double eps_psd = 1e-10;              // negative eigenvalue clamp
    static constexpr double eps_dec = 1e-10;              // certificate residuals
    static constexpr double eps_fun = 1e-8;               // loewner margins, functional
    static constexpr double eps_rank = 1e-10;             // pseudo-power rank cutoff
};

// Pivot order of the cyclic Jacobi sweeps. Row-major is the default
// everywhere; the column-major path exists so results can be reproduced
// through an independent rounding path.
enum class SweepOrder { RowMajor, ColMajor };

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HermEigResult {
    std::vector<double> values;  // nonincreasing
    ComplexMatrix vectors;       // unitary, column j pairs with values[j]
    int sweeps = 0;
};

// Cyclic Jacobi for Hermitian matrices. Deterministic: fixed sweep order,
// capped at 64 sweeps, eigenvalues sorted nonincreasing with stable ties,
// and in each eigenvector the entry of largest modulus is made real
// positive (ties broken by lowest index). Inputs with relative hermitian
// defect above Tol::eps_herm are rejected; smaller defects are symmetrized.
HermEigResult herm_eig(const ComplexMatrix& h, SweepOrder order = SweepOrder::RowMajor);

struct SvdResult {
    ComplexMatrix left;            // rows x k isometry, k = min(rows, cols)
    std::vector<double> singular;  // nonincreasing, length k
    ComplexMatrix right;           // cols x k isometry
};

// Economy SVD computed from herm_eig of A*A plus left-vector recovery with
// re-orthonormalization. Zero/rank-deficient inputs get deterministically
// completed orthonormal frames.
SvdResult svd(const ComplexMatrix& a, SweepOrder order = SweepOrder::RowMajor);

std::vector<double> singular_values(const ComplexMatrix& a,
                                    SweepOrder order = SweepOrder::RowMajor);

// |A| = (A*A)^{1/2}, a cols x cols PSD matrix.
ComplexMatrix abs_value(const ComplexMatrix& a);

// PSD square root. Eigenvalues in [-eps_psd * (1 + ||h||_2), 0) are
// clamped to zero; anything lower is a domain error.
ComplexMatrix sqrt_psd(const ComplexMatrix& h);

// Isometry factor W of A = W|A| for rows >= cols, with deterministic
// completion of the kernel columns against the canonical basis.
ComplexMatrix polar_isometry(const ComplexMatrix& a);

// Spectral functional calculus f(H) for Hermitian H. Domain checks belong
// to the caller; eigenvalues are mapped through f as-is.
ComplexMatrix apply_fn(const ComplexMatrix& h, const std::function<double(double)>& f);

// Eigenvalues clamped below `cut` are sent to 0 before raising to `p`
// (so negative p never touches the numerical kernel).
ComplexMatrix pseudo_power(const ComplexMatrix& h, double p);

struct LoewnerResult {
    bool holds = false;
    double margin = 0.0;  // lambda_min(X - Y)
};

// Checks X >= Y in the Loewner order: margin = lambda_min(X - Y) >= -tol.
LoewnerResult loewner_geq(const ComplexMatrix& x, const ComplexMatrix& y, double tol);

struct DominanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// For Hermitian P, Q with lambda_j(P) <= lambda_j(Q) for all j (within
// tol), returns unitary U with P <= U Q U*. U maps the sorted eigenbasis
// of Q onto the sorted eigenbasis of P.
ComplexMatrix dominance_conjugation(const ComplexMatrix& p, const ComplexMatrix& q,
                                    double tol);

// Same dominance data, reported as a margin without throwing.
double eigen_dominance_margin(const ComplexMatrix& p, const ComplexMatrix& q);

double spectral_norm(const ComplexMatrix& a);

}  // namespace blockpythag
