#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockpythag/complex_matrix.hpp"

namespace blockpythag {

// A positioned submatrix: sorted row and column index sets inside a host.
// Index sets do not have to be contiguous.
struct BlockSpec {
    std::string name;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

struct Partition {
    std::size_t host_rows = 0;
    std::size_t host_cols = 0;
    std::vector<BlockSpec> blocks;
};

struct ValidationError {
    std::string message;
    // First offending cell in row-major order, when applicable.
    std::optional<std::pair<std::size_t, std::size_t>> cell;
};

// Checks the index sets are sorted, unique and in range, and that the
// blocks tile every host cell exactly once. Returns the first failure.
std::optional<ValidationError> validate(const Partition& p);

struct CompatibilityReport {
    bool column_compatible = false;
    bool row_compatible = false;
    // Block indices grouped by identical column (resp. row) index sets,
    // in increasing leading-index order. Empty when not compatible.
    std::vector<std::vector<std::size_t>> column_groups;
    std::vector<std::vector<std::size_t>> row_groups;
    // Start offsets of each group in the relabeled (concatenated) order.
    std::vector<std::size_t> column_alphas;
    std::vector<std::size_t> row_alphas;
};

// Pairwise same-or-disjoint test on column sets and on row sets.
CompatibilityReport compatibility(const Partition& p);

// Case tags of the four-block analysis. "A" is the block containing cell
// (0,0); B the block containing the cell just right of A's top row, C the
// block containing the cell just below A's first column.
enum class FourBlockCase {
    FullHeightA,  // A spans every row
    FullWidthA,   // A spans every column
    Case3a,       // B shorter than A
    Case3bI,      // B matches A's height, C wider than cols(A)+cols(B)
    Case3bII,     // B matches A's height, C exactly cols(A)+cols(B) wide
    Case3bIII,    // B matches A's height, C narrower
    Case3cIV,     // B taller than A but not full height
    Case3cV,      // B spans every row
};

std::string to_string(FourBlockCase c);

// Requires a valid 4-block partition with contiguous index ranges.
FourBlockCase fourblock_classify(const Partition& p);

struct PartitionedMatrix {
    ComplexMatrix host;
    Partition partition;
};

// Extract the positioned submatrix of `host` described by `b`.
ComplexMatrix extract_block(const ComplexMatrix& host, const BlockSpec& b);

// d' x m embedding whose columns are the canonical basis vectors at the
// block's column indices (host_cols x cols(b)).
ComplexMatrix column_embedding(std::size_t host_cols, const BlockSpec& b);

// Throws std::invalid_argument unless `p` validates against `host`'s shape.
PartitionedMatrix make_partitioned(ComplexMatrix host, Partition p);

// ---- builders ----------------------------------------------------------

// Grid partition: contiguous row strips x column strips. Sizes must sum to
// the host dimensions. Block names are "r<i>c<j>".
Partition grid_partition(const std::vector<std::size_t>& row_sizes,
                         const std::vector<std::size_t>& col_sizes);

enum class ThreeBlockLayout {
    RowStack,   // three full-width row strips
    ColStack,   // three full-height column strips
    TopWide,    // full-width top strip, bottom split into two column blocks
    LeftTall,   // full-height left strip, right split into two row blocks
};

// sizes = (a, b): for RowStack/ColStack the first two strip sizes (third is
// the remainder); for TopWide a = top height, b = width of the lower-left
// block; for LeftTall a = left width, b = height of the upper-right block.
Partition three_block(std::size_t host_rows, std::size_t host_cols,
                      ThreeBlockLayout layout, std::size_t a, std::size_t b);

// Five-block pinwheel around a center block. Row sizes (r1,r2,r3) and
// column sizes (c1,c2,c3) select the three bands in each direction; the
// defaults reproduce the 5x5 layout with a 1x1 center:
//   A = rows[0,r1) x cols[0,c1+c2)      B = rows[0,r1+r2) x cols[c1+c2,..)
//   X = rows[r1,r1+r2) x cols[c1,c1+c2) D = rows[r1,..) x cols[0,c1)
//   C = rows[r1+r2,..) x cols[c1,..)
Partition pinwheel5(std::size_t r1 = 2, std::size_t r2 = 1, std::size_t r3 = 2,
                    std::size_t c1 = 2, std::size_t c2 = 1, std::size_t c3 = 2);

// d x d host split for hyperplane compression experiments: leading
// (d-1)x(d-1) block, the last row without its corner, and the last column.
Partition hyperplane_split(std::size_t d);

}  // namespace blockpythag
