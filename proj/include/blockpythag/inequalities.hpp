#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "blockpythag/linalg.hpp"
#include "blockpythag/partition.hpp"

namespace blockpythag {

// Margins are reported relative to (1 + ||A||_2^2); a check passes when
// every margin clears -ineq_margin_tol.
inline constexpr double ineq_margin_tol = 1e-9;

struct InequalityReport {
    std::string name;
    std::map<std::string, double> parameters;
    std::vector<double> margins;  // relative, nonnegative when the claim holds
    double min_margin = 0.0;
    bool pass = false;
    std::string note;  // human-readable payload for failures
};

// mu^2_{sum(J)+1}(A) <= sum_k mu^2_{J_k+1}(A_k) with 0-based J entries and
// zero padding for out-of-range singular values. Computable for any
// partition; the bound is only guaranteed on compatible ones.
InequalityReport check_cor_sing(const PartitionedMatrix& pm,
                                const std::vector<std::size_t>& j_multi);

// mu^2_j(A) - mu^2_j(A_k) <= sum_{l != k} mu^2_1(A_l), j 1-based, k a
// 0-based block position.
InequalityReport check_cor_var(const PartitionedMatrix& pm, std::size_t k,
                               std::size_t j);

// (sum_i mu_i(M)^q)^{1/q}, scaled to avoid overflow for large q. q > 0.
double schatten_norm(const ComplexMatrix& m, double q);

// r^{2/q-1} sum_k ||A_k||_q^2 <= ||A||_q^2 <= sum_k ||A_k||_q^2 for q >= 2,
// both bounds reversed for 0 < q < 2. Margins: {lower, upper} in the
// orientation that the theorem asserts for the given q.
InequalityReport check_bhatia_kittaneh(const PartitionedMatrix& pm, double q);

// Three blocks: (tr |A|^{2p})^{1/p} <= sum_k (tr |A_k|^{2p})^{1/p}, p >= 1.
InequalityReport check_trace_triangle(const PartitionedMatrix& pm, double p);

struct HyperplaneSpec {
    ComplexMatrix h;            // d x 1 unit vector
    double beta_normal = 0.0;   // ||Ah||^2 - |<h,Ah>|^2
    double beta_min = 0.0;      // min(||Ah||^2, ||A*h||^2) - |<h,Ah>|^2
    double beta_sum = 0.0;      // ||Ah||^2 + ||A*h||^2 - |<h,Ah>|^2
};

// Compression of square A onto the hyperplane orthogonal to h, expressed
// in the deterministic orthonormal basis Q of h^perp obtained from the
// Householder reflector that sends the phase-normalized h to +e_last
// (that column is then dropped). Returns (Q^* A Q, spec).
std::pair<ComplexMatrix, HyperplaneSpec> compress_hyperplane(const ComplexMatrix& a,
                                                             const ComplexMatrix& h);

// mu_j^2(A) >= mu_j^2(A_S) >= mu_{j+1}^2(A) - beta_min for j = 1..d-1.
// Margins hold the d-1 upper gaps first, then the d-1 lower gaps.
InequalityReport check_interlacing(const ComplexMatrix& a, const ComplexMatrix& h);

// mu_j^2(A) - mu_j^2(A_S) <= beta_sum for j = 1..d-1.
InequalityReport check_compression_drop(const ComplexMatrix& a,
                                        const ComplexMatrix& h);

}  // namespace blockpythag
