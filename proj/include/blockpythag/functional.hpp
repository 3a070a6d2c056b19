#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockpythag/inequalities.hpp"
#include "blockpythag/linalg.hpp"
#include "blockpythag/partition.hpp"
#include "blockpythag/pythagoras.hpp"
#include "blockpythag/scalar_function.hpp"

namespace blockpythag {

// Raised when a witness search exhausts its budget. Existence of the witness
// is guaranteed by the underlying theorem in every reachable configuration,
// so this always means the search was insufficient, not that a
// counterexample was found.
struct SearchFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SplitOptions {
    std::size_t max_iters = 200;
    std::size_t restarts = 50;
    std::uint64_t seed = 0;
};

struct SearchTrace {
    std::size_t iterations = 0;
    std::size_t restarts = 0;
};

struct SplitWitness {
    ComplexMatrix u;
    ComplexMatrix v;
    SearchTrace trace;
};

// Unitaries (U, V) with g(a+b) >= U g(a) U* + V g(b) V* for PSD a, b and a
// caller-validated nondecreasing convex g with g(0) <= 0. Alternating
// dominance matching with seeded random restarts; throws SearchFailureError
// when the budget runs out.
SplitWitness two_term_convex_split(const std::function<double(double)>& g,
                                   const ComplexMatrix& a, const ComplexMatrix& b,
                                   const SplitOptions& opts = {});

// Mirror image: g(a+b) <= U g(a) U* + V g(b) V* for concave g, g(0) >= 0.
// The verified inequality replaces g below the rank cutoff of a+b by its
// chord through the origin (identical to g from the cutoff upward), so
// kernel noise is never pulled up to g(noise) by an unbounded slope at 0.
SplitWitness two_term_concave_split(const std::function<double(double)>& g,
                                    const ComplexMatrix& a, const ComplexMatrix& b,
                                    const SplitOptions& opts = {});

struct FunctionalCertificate {
    std::string name;
    // Reading "host-side expression <direction> witnessed block sum".
    std::string direction;  // "<=" or ">="
    std::string status;     // "verified" or "limit-case"
    std::vector<ComplexMatrix> witnesses;
    // Relative lambda_min of the asserted difference, scaled by
    // 1 + max spectral norm of the two sides. For limit-case certificates
    // this is the margin of the chord-modified statement.
    double loewner_margin = 0.0;
    // Margin of the plain statement; equals loewner_margin except in the
    // limit case, where it is recorded without being enforced.
    double direct_margin = 0.0;
    double witness_defect = 0.0;  // worst ||W*W - I||_max over the witnesses
    SearchTrace trace;
    std::string note;
};

// |A| <= sum_k W_k |A_k| W_k* for any tiling partition; witnesses are
// host_cols x block_cols isometries built from a polar peel plus
// real-part dominance steps.
FunctionalCertificate thompson_sum(const PartitionedMatrix& pm);

// psi(|A|) >= sum_k V_k psi(|A_k|) V_k* for nondecreasing psi with
// psi(sqrt(t)) convex and psi(0) = 0, on compatible or four-block
// partitions.
FunctionalCertificate th_convex(const PartitionedMatrix& pm, const ScalarFunction& psi,
                                const SplitOptions& opts = {});

// phi(|A|) <= sum_k U_k phi(|A_k|) U_k* for nonnegative phi with
// phi(sqrt(t)) concave. For phi(0) > 0 the certificate goes through the
// chord modification at the smallest eigenvalue of |A|; when |A| is
// singular the result is downgraded to limit-case status (see
// direct_margin).
FunctionalCertificate cor_concave(const PartitionedMatrix& pm, const ScalarFunction& phi,
                                  const SplitOptions& opts = {});

// 2^{2-p} |A|^p <= sum_k V_k |A_k|^p V_k* on four-block partitions for
// p >= 2, reversed for 0 < p < 2; equality at p = 2.
FunctionalCertificate cor_four2(const PartitionedMatrix& pm, double p);

// Equality of sqrt(r) |A| and the row-block absolute value sum on the
// all-ones r x r matrix, r in {2, 3}. margins[0] is 1 - residual/1e-12, so
// the report passes exactly when the residual stays within 1e-12.
InequalityReport sharp_constant_check(std::size_t r);

// |A|^q <= sum_k c_k^q u_k u_k* with c_k the k-th column norm, 0 < q <= 2;
// witnesses are the unit columns u_k.
FunctionalCertificate cor_column_bound(const ComplexMatrix& a, double q,
                                       const SplitOptions& opts = {});

// |A|^p >= sum_k r_k^p u_k u_k* with r_k the k-th row norm, p >= 2.
FunctionalCertificate cor_row_bound(const ComplexMatrix& a, double p,
                                    const SplitOptions& opts = {});

// {Tr |A|^{qs}}^{1/s} vs the blockwise sum on grid partitions:
// sum-dominates for 0 < q <= 2, s >= 1; reversed for q >= 2, 0 < s <= 1.
InequalityReport schatten_power_traces(const PartitionedMatrix& pm, double q, double s);

}  // namespace blockpythag
