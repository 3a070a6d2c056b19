#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockpythag/linalg.hpp"
#include "blockpythag/partition.hpp"

namespace blockpythag {

// One frame per block, U_k of shape host_cols x cols(block k). The product
// of these Stiefel manifolds is the search space for decomposition
// feasibility on partitions the closed-form routes do not cover.
struct StiefelPoint {
    std::vector<ComplexMatrix> frames;
};

struct SearchConfig {
    std::size_t max_iters = 2000;  // accepted-step budget per start
    std::size_t restarts = 8;      // random starts after the deterministic one
    std::uint64_t seed = 0;
    double step0 = 1.0;          // initial Armijo trial step
    double target = 1e-8;        // residual at which a start stops as converged
    bool warm_start = true;      // seed from decompose() when the shape allows
};

struct SearchResult {
    double best_residual = 0.0;  // ||G_host - sum U_k G_k U_k*||_F at `point`
    std::size_t iterations = 0;  // accepted steps, all starts combined
    std::size_t restarts = 0;    // random starts actually taken
    std::uint64_t seed = 0;
    bool converged = false;      // best_residual <= config.target
    StiefelPoint point;
    // Objective (squared residual) along the start that produced `point`:
    // the initial value first, then one entry per accepted step.
    std::vector<double> objective_trace;
};

// F(U) = ||G_host - sum_k U_k G_k U_k*||_F^2 where G_host and G_k are the
// squared moduli A*A of the host and of each block. Defined for arbitrary
// frames of the right shapes; isometry is not assumed.
double feasibility_objective(const PartitionedMatrix& pm, const StiefelPoint& u);

// Euclidean gradient of `feasibility_objective`: component k is
//   4 (sum_l U_l G_l U_l* - G_host) U_k G_k,
// and the derivative along a perturbation D is Re sum_k tr(grad_k* D_k).
std::vector<ComplexMatrix> feasibility_gradient(const PartitionedMatrix& pm,
                                                const StiefelPoint& u);

// Orthogonal projection of an ambient direction onto the tangent space of
// the Stiefel manifold at isometry u: g - u (u*g + g*u)/2.
ComplexMatrix stiefel_project(const ComplexMatrix& u, const ComplexMatrix& g);

// Polar retraction: the closest isometry to u + step.
ComplexMatrix stiefel_retract(const ComplexMatrix& u, const ComplexMatrix& step);

// Local search on the product Stiefel manifold minimizing
// `feasibility_objective`, in three phases per start: alternating
// orthogonal-Procrustes alignment of the factored identity
// [U_1 G_1^(1/2) | ...] = G_host^(1/2) Q, then cyclic sweeps that set each
// frame to its closed-form exact minimizer with the others fixed, then
// Riemannian gradient descent with Armijo backtracking on the remaining
// step budget. Deterministic for fixed (input, config): one deterministic
// start (the certificate witnesses when the shape is compatible and
// warm_start is set, canonical column embeddings otherwise) followed by
// seeded random restarts. The objective never increases along accepted
// steps. A large final residual only means no witness was found within
// budget; it is never evidence of infeasibility.
SearchResult feasibility_search(const PartitionedMatrix& pm,
                                const SearchConfig& config = {});

// Minimum over index tuples (j_1, ..., j_r), j_k in [0, #sv(A_k)] with
// sum j_k < #sv(host), of
//   sum_k mu_{j_k+1}(A_k)^2 - mu_{j_1+...+j_r+1}(host)^2
// with out-of-range block singular values read as zero. A decomposition on
// this partition would force every such margin to be nonnegative, so a
// negative value rules one out for this instance. Margins are absolute.
// The minimizing tuple is written to *argmin when given.
double necessary_condition_margin(const PartitionedMatrix& pm,
                                  SweepOrder order = SweepOrder::RowMajor,
                                  std::vector<std::size_t>* argmin = nullptr);

struct ScanReport {
    std::size_t trials = 0;  // random instances drawn (the given host is extra)
    std::uint64_t seed = 0;
    double min_margin = 0.0;  // over all instances and index tuples
    std::vector<std::size_t> min_indices;
    ComplexMatrix min_host;
    double ascent_margin = 0.0;  // after adversarial refinement of min_host
    ComplexMatrix ascent_host;
    // Best margin found, re-evaluated through both Jacobi sweep orders.
    double recheck_row_major = 0.0;
    double recheck_col_major = 0.0;
    bool counterexample_candidate = false;  // both rechecks below -1e-6
    std::vector<std::string> notes;
};

// Randomized scan of the necessary condition on the partition shape of
// `pm`: evaluates the provided host, then `trials` hosts with entries
// uniform on the complex unit disk, then refines the worst instance by
// gradient descent on its margin over the matrix entries. A counterexample
// candidate is only flagged when the refined margin stays below -1e-6
// under both eigensolver sweep orders.
ScanReport necessary_condition_scan(const PartitionedMatrix& pm, std::size_t trials,
                                    std::uint64_t seed);

}  // namespace blockpythag
