#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blockpythag/linalg.hpp"
#include "blockpythag/partition.hpp"

namespace blockpythag {

struct IncompatibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MajorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// For PSD M blocked conformally with `sizes` along the diagonal, returns
// isometries U_i (n x sizes[i]) with M = sum_i U_i M_ii U_i^*. Built from
// the column groups of M^{1/2}.
std::vector<ComplexMatrix> multi_block_diag_split(const ComplexMatrix& m,
                                                  const std::vector<std::size_t>& sizes);

// The 2x2 special case: M = U1 M11 U1^* + U2 M22 U2^* with M11 the leading
// p x p block.
std::pair<ComplexMatrix, ComplexMatrix> two_block_split(const ComplexMatrix& m,
                                                        std::size_t p);

// Witnessed identity |A|^2 = sum_k U_k |A_k|^2 U_k^* over the blocks of a
// partition, with |X|^2 meaning X^* X throughout.
struct PythagorasCertificate {
    std::vector<std::string> block_names;   // partition order
    std::vector<ComplexMatrix> witnesses;   // host_cols x cols(block) isometries
    std::string route;                      // how the witnesses were built
    double residual = 0.0;                  // Frobenius defect of the identity
    double witness_defect = 0.0;            // max_k ||U_k^* U_k - I||_max
};

// Certificate for a column- or row-compatible partition (column branch
// preferred when both are available). Throws IncompatibilityError when
// neither set of index sets is pairwise same-or-disjoint.
PythagorasCertificate decompose(const PartitionedMatrix& pm);

// Four contiguous blocks: direct route when the partition is compatible,
// otherwise one full-height or full-width block is peeled off with a 2x2
// split and the remaining three blocks are decomposed recursively. The
// route string records the case tag and the peeled block.
PythagorasCertificate decompose4(const PartitionedMatrix& pm);

struct CertificateCheck {
    bool ok = false;
    double residual = 0.0;
    double witness_defect = 0.0;
};

// Re-measures a certificate against the data it claims to certify.
// ok requires residual <= eps_dec * (1 + ||A||_F^2) and witness defects
// below eps_unitary_per_dim * host_cols.
CertificateCheck check_certificate(const PartitionedMatrix& pm,
                                   const PythagorasCertificate& cert);

// The averaged converse identity: with r blocks,
//   (+)_k |A_k|^2 = (1/r) sum_{j=0}^{r-1} V_j |A|^2 V_j^*
// for isometries V_j of shape N x host_cols, N = sum_k cols(A_k).
struct DirectSumAverage {
    std::vector<std::string> block_names;   // slot order of the direct sum
    std::vector<std::size_t> slot_offsets;  // start index of each slot
    ComplexMatrix direct_sum;               // N x N block diagonal of A_k^* A_k
    std::vector<ComplexMatrix> isometries;  // r matrices, N x host_cols
    double residual = 0.0;
    double isometry_defect = 0.0;
};

DirectSumAverage direct_sum_average(const PartitionedMatrix& pm);

// For Hermitian A, B with lambda(A) majorized by lambda(B): exactly n
// unitaries U_i with A = (1/n) sum_i U_i B U_i^*. The majorization
// premise is checked within `tol` (relative to 1 + ||A||_F + ||B||_F)
// and violated premises raise MajorizationError.
struct MajorizationAverage {
    std::vector<ComplexMatrix> unitaries;
    double residual = 0.0;             // ||A - average||_F
    double majorization_margin = 0.0;  // min partial-sum slack, >= -tol*scale
};

MajorizationAverage majorization_average(const ComplexMatrix& a, const ComplexMatrix& b,
                                         double tol = Tol::eps_fun);

}  // namespace blockpythag
