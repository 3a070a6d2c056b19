#include "blockpythag/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace blockpythag {

namespace {

std::optional<ValidationError> check_index_set(const std::vector<std::size_t>& idx,
                                               std::size_t bound,
                                               const std::string& block,
                                               const char* what) {
    if (idx.empty()) {
        return ValidationError{"block '" + block + "' has an empty " + what + " set",
                               std::nullopt};
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= bound) {
            return ValidationError{"block '" + block + "' has a " + what +
                                       " index out of range",
                                   std::nullopt};
        }
        if (k > 0 && idx[k] <= idx[k - 1]) {
            return ValidationError{"block '" + block + "' " + what +
                                       " indices are not strictly increasing",
                                   std::nullopt};
        }
    }
    return std::nullopt;
}

bool contiguous(const std::vector<std::size_t>& idx) {
    return idx.back() - idx.front() + 1 == idx.size();
}

// Sorted index sets: equal, disjoint, or neither.
bool disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j])
            return false;
        if (a[i] < b[j])
            ++i;
        else
            ++j;
    }
    return true;
}

void canonicalize(Partition& p) {
    std::stable_sort(p.blocks.begin(), p.blocks.end(),
                     [](const BlockSpec& x, const BlockSpec& y) {
                         if (x.rows.front() != y.rows.front())
                             return x.rows.front() < y.rows.front();
                         return x.cols.front() < y.cols.front();
                     });
}

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
    std::vector<std::size_t> r(to - from);
    std::iota(r.begin(), r.end(), from);
    return r;
}

}  // namespace

std::optional<ValidationError> validate(const Partition& p) {
    if (p.host_rows == 0 || p.host_cols == 0)
        return ValidationError{"host must have at least one row and one column",
                               std::nullopt};
    if (p.blocks.empty())
        return ValidationError{"partition has no blocks", std::nullopt};

    std::set<std::string> names;
    for (const auto& b : p.blocks) {
        if (b.name.empty())
            return ValidationError{"every block needs a non-empty name", std::nullopt};
        if (!names.insert(b.name).second)
            return ValidationError{"duplicate block name '" + b.name + "'",
                                   std::nullopt};
        if (auto err = check_index_set(b.rows, p.host_rows, b.name, "row"))
            return err;
        if (auto err = check_index_set(b.cols, p.host_cols, b.name, "column"))
            return err;
    }

    std::vector<unsigned> cover(p.host_rows * p.host_cols, 0);
    for (const auto& b : p.blocks)
        for (std::size_t i : b.rows)
            for (std::size_t j : b.cols)
                ++cover[i * p.host_cols + j];
    for (std::size_t i = 0; i < p.host_rows; ++i) {
        for (std::size_t j = 0; j < p.host_cols; ++j) {
            unsigned c = cover[i * p.host_cols + j];
            if (c == 1)
                continue;
            std::string msg = c == 0 ? "cell is not covered by any block"
                                     : "cell is covered by more than one block";
            return ValidationError{msg, std::make_pair(i, j)};
        }
    }
    return std::nullopt;
}

namespace {

// Shared grouping logic for both directions. Returns false when two index
// sets overlap without being equal.
bool group_by_sets(const Partition& p,
                   const std::vector<std::size_t> BlockSpec::*sets,
                   const std::vector<std::size_t> BlockSpec::*other,
                   std::vector<std::vector<std::size_t>>& groups,
                   std::vector<std::size_t>& alphas) {
    const auto& blocks = p.blocks;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            const auto& a = blocks[i].*sets;
            const auto& b = blocks[j].*sets;
            if (a != b && !disjoint(a, b))
                return false;
        }
    }
    // Disjoint sorted sets compare lexicographically by their first entry,
    // so map order is already leading-index order.
    std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_set;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        by_set[blocks[i].*sets].push_back(i);

    groups.clear();
    alphas.clear();
    std::size_t off = 0;
    for (auto& [key, members] : by_set) {
        std::sort(members.begin(), members.end(), [&](std::size_t x, std::size_t y) {
            return (blocks[x].*other).front() < (blocks[y].*other).front();
        });
        alphas.push_back(off);
        off += key.size();
        groups.push_back(std::move(members));
    }
    return true;
}

}  // namespace

CompatibilityReport compatibility(const Partition& p) {
    CompatibilityReport rep;
    rep.column_compatible = group_by_sets(p, &BlockSpec::cols, &BlockSpec::rows,
                                          rep.column_groups, rep.column_alphas);
    if (!rep.column_compatible) {
        rep.column_groups.clear();
        rep.column_alphas.clear();
    }
    rep.row_compatible = group_by_sets(p, &BlockSpec::rows, &BlockSpec::cols,
                                       rep.row_groups, rep.row_alphas);
    if (!rep.row_compatible) {
        rep.row_groups.clear();
        rep.row_alphas.clear();
    }
    return rep;
}

std::string to_string(FourBlockCase c) {
    switch (c) {
        case FourBlockCase::FullHeightA: return "full-height-A";
        case FourBlockCase::FullWidthA: return "full-width-A";
        case FourBlockCase::Case3a: return "3a";
        case FourBlockCase::Case3bI: return "3b-i";
        case FourBlockCase::Case3bII: return "3b-ii";
        case FourBlockCase::Case3bIII: return "3b-iii";
        case FourBlockCase::Case3cIV: return "3c-iv";
        case FourBlockCase::Case3cV: return "3c-v";
    }
    return "?";
}

FourBlockCase fourblock_classify(const Partition& p) {
    if (p.blocks.size() != 4)
        throw std::invalid_argument("fourblock_classify needs exactly 4 blocks, got " +
                                    std::to_string(p.blocks.size()));
    if (auto err = validate(p))
        throw std::invalid_argument("fourblock_classify: " + err->message);
    for (const auto& b : p.blocks) {
        if (!contiguous(b.rows) || !contiguous(b.cols))
            throw std::invalid_argument("fourblock_classify: block '" + b.name +
                                        "' is not a contiguous range");
    }

    auto block_at = [&](std::size_t i, std::size_t j) -> const BlockSpec& {
        for (const auto& b : p.blocks) {
            if (std::binary_search(b.rows.begin(), b.rows.end(), i) &&
                std::binary_search(b.cols.begin(), b.cols.end(), j))
                return b;
        }
        throw std::logic_error("validated partition left a cell uncovered");
    };

    const BlockSpec& blk_a = block_at(0, 0);
    if (blk_a.rows.size() == p.host_rows)
        return FourBlockCase::FullHeightA;
    if (blk_a.cols.size() == p.host_cols)
        return FourBlockCase::FullWidthA;

    const std::size_t a = blk_a.rows.size();
    const BlockSpec& blk_b = block_at(0, blk_a.cols.size());
    const std::size_t b = blk_b.rows.size();
    if (b < a)
        return FourBlockCase::Case3a;
    if (b == a) {
        const BlockSpec& blk_c = block_at(a, 0);
        const std::size_t width = blk_a.cols.size() + blk_b.cols.size();
        if (blk_c.cols.size() > width)
            return FourBlockCase::Case3bI;
        if (blk_c.cols.size() == width)
            return FourBlockCase::Case3bII;
        return FourBlockCase::Case3bIII;
    }
    if (b == p.host_rows)
        return FourBlockCase::Case3cV;
    return FourBlockCase::Case3cIV;
}

ComplexMatrix extract_block(const ComplexMatrix& host, const BlockSpec& b) {
    ComplexMatrix out(b.rows.size(), b.cols.size());
    for (std::size_t i = 0; i < b.rows.size(); ++i)
        for (std::size_t j = 0; j < b.cols.size(); ++j)
            out(i, j) = host(b.rows[i], b.cols[j]);
    return out;
}

ComplexMatrix column_embedding(std::size_t host_cols, const BlockSpec& b) {
    ComplexMatrix e(host_cols, b.cols.size());
    for (std::size_t j = 0; j < b.cols.size(); ++j)
        e(b.cols[j], j) = 1.0;
    return e;
}

PartitionedMatrix make_partitioned(ComplexMatrix host, Partition p) {
    if (host.rows() != p.host_rows || host.cols() != p.host_cols)
        throw std::invalid_argument("partition host shape " +
                                    std::to_string(p.host_rows) + "x" +
                                    std::to_string(p.host_cols) +
                                    " does not match the matrix");
    if (auto err = validate(p))
        throw std::invalid_argument("invalid partition: " + err->message);
    return PartitionedMatrix{std::move(host), std::move(p)};
}

Partition grid_partition(const std::vector<std::size_t>& row_sizes,
                         const std::vector<std::size_t>& col_sizes) {
    if (row_sizes.empty() || col_sizes.empty())
        throw std::invalid_argument("grid_partition needs at least one strip each way");
    for (std::size_t s : row_sizes)
        if (s == 0)
            throw std::invalid_argument("grid_partition: zero row strip");
    for (std::size_t s : col_sizes)
        if (s == 0)
            throw std::invalid_argument("grid_partition: zero column strip");

    Partition p;
    p.host_rows = std::accumulate(row_sizes.begin(), row_sizes.end(), std::size_t{0});
    p.host_cols = std::accumulate(col_sizes.begin(), col_sizes.end(), std::size_t{0});
    std::size_t roff = 0;
    for (std::size_t i = 0; i < row_sizes.size(); ++i) {
        std::size_t coff = 0;
        for (std::size_t j = 0; j < col_sizes.size(); ++j) {
            BlockSpec b;
            b.name = "r" + std::to_string(i) + "c" + std::to_string(j);
            b.rows = range(roff, roff + row_sizes[i]);
            b.cols = range(coff, coff + col_sizes[j]);
            p.blocks.push_back(std::move(b));
            coff += col_sizes[j];
        }
        roff += row_sizes[i];
    }
    return p;
}

Partition three_block(std::size_t host_rows, std::size_t host_cols,
                      ThreeBlockLayout layout, std::size_t a, std::size_t b) {
    Partition p;
    p.host_rows = host_rows;
    p.host_cols = host_cols;
    auto blk = [](std::string name, std::vector<std::size_t> rows,
                  std::vector<std::size_t> cols) {
        return BlockSpec{std::move(name), std::move(rows), std::move(cols)};
    };
    switch (layout) {
        case ThreeBlockLayout::RowStack:
            if (a == 0 || b == 0 || a + b >= host_rows)
                throw std::invalid_argument("three_block: row strip sizes do not fit");
            p.blocks.push_back(blk("top", range(0, a), range(0, host_cols)));
            p.blocks.push_back(blk("mid", range(a, a + b), range(0, host_cols)));
            p.blocks.push_back(blk("bot", range(a + b, host_rows), range(0, host_cols)));
            break;
        case ThreeBlockLayout::ColStack:
            if (a == 0 || b == 0 || a + b >= host_cols)
                throw std::invalid_argument("three_block: column strip sizes do not fit");
            p.blocks.push_back(blk("left", range(0, host_rows), range(0, a)));
            p.blocks.push_back(blk("mid", range(0, host_rows), range(a, a + b)));
            p.blocks.push_back(blk("right", range(0, host_rows), range(a + b, host_cols)));
            break;
        case ThreeBlockLayout::TopWide:
            if (a == 0 || a >= host_rows || b == 0 || b >= host_cols)
                throw std::invalid_argument("three_block: strip sizes do not fit");
            p.blocks.push_back(blk("top", range(0, a), range(0, host_cols)));
            p.blocks.push_back(blk("bottomLeft", range(a, host_rows), range(0, b)));
            p.blocks.push_back(blk("bottomRight", range(a, host_rows), range(b, host_cols)));
            break;
        case ThreeBlockLayout::LeftTall:
            if (a == 0 || a >= host_cols || b == 0 || b >= host_rows)
                throw std::invalid_argument("three_block: strip sizes do not fit");
            p.blocks.push_back(blk("left", range(0, host_rows), range(0, a)));
            p.blocks.push_back(blk("topRight", range(0, b), range(a, host_cols)));
            p.blocks.push_back(blk("bottomRight", range(b, host_rows), range(a, host_cols)));
            break;
    }
    canonicalize(p);
    return p;
}

Partition pinwheel5(std::size_t r1, std::size_t r2, std::size_t r3,
                    std::size_t c1, std::size_t c2, std::size_t c3) {
    if (r1 == 0 || r2 == 0 || r3 == 0 || c1 == 0 || c2 == 0 || c3 == 0)
        throw std::invalid_argument("pinwheel5: every band needs positive size");
    Partition p;
    p.host_rows = r1 + r2 + r3;
    p.host_cols = c1 + c2 + c3;
    p.blocks = {
        {"A", range(0, r1), range(0, c1 + c2)},
        {"B", range(0, r1 + r2), range(c1 + c2, p.host_cols)},
        {"X", range(r1, r1 + r2), range(c1, c1 + c2)},
        {"D", range(r1, p.host_rows), range(0, c1)},
        {"C", range(r1 + r2, p.host_rows), range(c1, p.host_cols)},
    };
    canonicalize(p);
    return p;
}

Partition hyperplane_split(std::size_t d) {
    if (d < 2)
        throw std::invalid_argument("hyperplane_split needs d >= 2");
    Partition p;
    p.host_rows = d;
    p.host_cols = d;
    p.blocks = {
        {"principal", range(0, d - 1), range(0, d - 1)},
        {"lastRow", {d - 1}, range(0, d - 1)},
        {"lastCol", range(0, d), {d - 1}},
    };
    canonicalize(p);
    return p;
}

}  // namespace blockpythag
