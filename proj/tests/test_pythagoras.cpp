#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "blockpythag/pythagoras.hpp"
#include "test_support.hpp"

using namespace blockpythag;
using namespace blockpythag::testing;

namespace {

double cert_bound(const ComplexMatrix& host) {
    const double f = host.norm_fro();
    return Tol::eps_dec * (1.0 + f * f);
}

ComplexMatrix block_gram(const ComplexMatrix& host, const BlockSpec& b) {
    const ComplexMatrix a = extract_block(host, b);
    return (a.adjoint() * a).hermitize();
}

// Re-evaluates the certified identity from scratch.
double identity_residual(const PartitionedMatrix& pm, const PythagorasCertificate& c) {
    ComplexMatrix acc(pm.partition.host_cols, pm.partition.host_cols);
    for (std::size_t k = 0; k < c.witnesses.size(); ++k)
        acc += c.witnesses[k] * block_gram(pm.host, pm.partition.blocks[k]) *
               c.witnesses[k].adjoint();
    return ((pm.host.adjoint() * pm.host).hermitize() - acc).norm_fro();
}

}  // namespace

TEST_CASE("two_block_split on the all-ones 2x2") {
    ComplexMatrix m{{1, 1}, {1, 1}};
    auto [u1, u2] = two_block_split(m, 1);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(u1(0, 0) - cplx(s)) < 1e-14);
    CHECK(std::abs(u1(1, 0) - cplx(s)) < 1e-14);
    CHECK(std::abs(u2(0, 0) - cplx(s)) < 1e-14);
    CHECK(std::abs(u2(1, 0) - cplx(s)) < 1e-14);
}

TEST_CASE("multi_block_diag_split reassembles the input") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t parts = 1 + trial % 4;
        std::vector<std::size_t> sizes;
        std::size_t n = 0;
        std::uniform_int_distribution<std::size_t> sz(1, 3);
        for (std::size_t i = 0; i < parts; ++i) {
            sizes.push_back(sz(rng));
            n += sizes.back();
        }
        const ComplexMatrix m = rand_psd(rng, n, 1 + n / 2);
        const std::vector<ComplexMatrix> us = multi_block_diag_split(m, sizes);
        ComplexMatrix acc(n, n);
        std::size_t off = 0;
        for (std::size_t i = 0; i < parts; ++i) {
            CHECK(unitary_defect(us[i]) <= n * Tol::eps_unitary_per_dim);
            ComplexMatrix mii(sizes[i], sizes[i]);
            for (std::size_t a = 0; a < sizes[i]; ++a)
                for (std::size_t b = 0; b < sizes[i]; ++b) mii(a, b) = m(off + a, off + b);
            acc += us[i] * mii * us[i].adjoint();
            off += sizes[i];
        }
        CHECK((m - acc).norm_fro() <= 1e-11 * (1.0 + m.norm_fro()));
    }
    CHECK_THROWS_AS(multi_block_diag_split(ComplexMatrix::identity(3), {1, 1}),
                    std::invalid_argument);
}

TEST_CASE("decompose on grids uses the column branch with shared witnesses") {
    std::mt19937_64 rng(102);
    const Partition p = grid_partition({2, 1}, {2, 2});
    const ComplexMatrix host = rand_matrix(rng, 3, 4);
    const PartitionedMatrix pm = make_partitioned(host, p);
    const PythagorasCertificate c = decompose(pm);
    CHECK(c.route == "column");
    CHECK(c.residual <= cert_bound(host));
    CHECK(c.witness_defect <= 4 * Tol::eps_unitary_per_dim);
    CHECK(identity_residual(pm, c) <= cert_bound(host));
    // Blocks over the same columns share one witness, entry for entry.
    REQUIRE(c.block_names[0] == "r0c0");
    REQUIRE(c.block_names[2] == "r1c0");
    CHECK(c.witnesses[0].data() == c.witnesses[2].data());
    REQUIRE(c.block_names[1] == "r0c1");
    REQUIRE(c.block_names[3] == "r1c1");
    CHECK(c.witnesses[1].data() == c.witnesses[3].data());
}

TEST_CASE("decompose picks the row branch when only rows align") {
    std::mt19937_64 rng(103);
    const Partition p = three_block(3, 4, ThreeBlockLayout::TopWide, 1, 2);
    const ComplexMatrix host = rand_matrix(rng, 3, 4);
    const PartitionedMatrix pm = make_partitioned(host, p);
    const PythagorasCertificate c = decompose(pm);
    CHECK(c.route == "row");
    CHECK(c.residual <= cert_bound(host));
    for (const ComplexMatrix& u : c.witnesses) CHECK(u.rows() == 4);
}

TEST_CASE("column branch wins when both are available") {
    std::mt19937_64 rng(104);
    const Partition p = three_block(2, 6, ThreeBlockLayout::ColStack, 2, 3);
    const ComplexMatrix host = rand_matrix(rng, 2, 6);
    const PythagorasCertificate c = decompose(make_partitioned(host, p));
    CHECK(c.route == "column");
    CHECK(c.residual <= cert_bound(host));
}

TEST_CASE("decompose rejects the pinwheel") {
    const Partition p = pinwheel5();
    std::mt19937_64 rng(105);
    const ComplexMatrix host = rand_matrix(rng, 5, 5);
    CHECK_THROWS_AS(decompose(make_partitioned(host, p)), IncompatibilityError);
}

TEST_CASE("all-ones row strips: identity witnesses already certify") {
    // For the 3x3 all-ones host cut into three rows, each |A_k|^2 is the
    // all-ones 3x3 and |A|^2 = 3 * ones, so U_k = I works exactly.
    ComplexMatrix host{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
    const Partition p = three_block(3, 3, ThreeBlockLayout::RowStack, 1, 1);
    const PartitionedMatrix pm = make_partitioned(host, p);

    PythagorasCertificate manual;
    for (const BlockSpec& b : p.blocks) {
        manual.block_names.push_back(b.name);
        manual.witnesses.push_back(ComplexMatrix::identity(3));
    }
    manual.route = "handbuilt";
    const CertificateCheck chk = check_certificate(pm, manual);
    CHECK(chk.ok);
    CHECK(chk.residual < 1e-14);
    CHECK(chk.witness_defect == 0.0);

    const PythagorasCertificate c = decompose(pm);
    CHECK(c.residual <= cert_bound(host));
}

TEST_CASE("check_certificate flags corrupted witnesses") {
    std::mt19937_64 rng(106);
    const Partition p = grid_partition({1, 1}, {1, 1});
    const ComplexMatrix host = rand_matrix(rng, 2, 2);
    const PartitionedMatrix pm = make_partitioned(host, p);
    PythagorasCertificate c = decompose(pm);
    REQUIRE(check_certificate(pm, c).ok);

    PythagorasCertificate bad = c;
    bad.witnesses[0](0, 0) += 0.5;
    CHECK_FALSE(check_certificate(pm, bad).ok);

    PythagorasCertificate wrong_shape = c;
    wrong_shape.witnesses[0] = ComplexMatrix::zero(3, 1);
    CHECK_THROWS_AS(check_certificate(pm, wrong_shape), std::invalid_argument);
}

TEST_CASE("decompose4 routes: direct when compatible, peel otherwise") {
    std::mt19937_64 rng(107);
    auto blk = [](std::string name, std::size_t r0, std::size_t r1, std::size_t c0,
                  std::size_t c1) {
        BlockSpec b;
        b.name = std::move(name);
        for (std::size_t i = r0; i < r1; ++i) b.rows.push_back(i);
        for (std::size_t j = c0; j < c1; ++j) b.cols.push_back(j);
        return b;
    };

    SUBCASE("grid goes direct") {
        const ComplexMatrix host = rand_matrix(rng, 3, 3);
        const Partition p = grid_partition({1, 2}, {2, 1});
        const PythagorasCertificate c = decompose4(make_partitioned(host, p));
        CHECK(c.route == "3b-iii+column");
        CHECK(c.residual <= cert_bound(host));
    }
    SUBCASE("full-width strip is peeled by a row split") {
        Partition p;
        p.host_rows = 3;
        p.host_cols = 3;
        p.blocks = {blk("a", 0, 2, 0, 1), blk("b", 0, 1, 1, 3), blk("d", 1, 2, 1, 3),
                    blk("c", 2, 3, 0, 3)};
        REQUIRE_FALSE(validate(p).has_value());
        const ComplexMatrix host = rand_matrix(rng, 3, 3);
        const PartitionedMatrix pm = make_partitioned(host, p);
        const PythagorasCertificate c = decompose4(pm);
        CHECK(c.route == "3a+peel:c+column");
        CHECK(c.residual <= cert_bound(host));
        CHECK(identity_residual(pm, c) <= cert_bound(host));
    }
    SUBCASE("full-height strip is peeled by a column split") {
        Partition p;
        p.host_rows = 3;
        p.host_cols = 3;
        p.blocks = {blk("A", 0, 1, 0, 2), blk("B", 0, 3, 2, 3), blk("C", 1, 3, 0, 1),
                    blk("D", 1, 3, 1, 2)};
        REQUIRE_FALSE(validate(p).has_value());
        const ComplexMatrix host = rand_matrix(rng, 3, 3);
        const PartitionedMatrix pm = make_partitioned(host, p);
        const PythagorasCertificate c = decompose4(pm);
        CHECK(c.route == "3c-v+peel:B+row");
        CHECK(c.residual <= cert_bound(host));
        CHECK(identity_residual(pm, c) <= cert_bound(host));
    }
}

TEST_CASE("decompose4 certifies every brute-forced four-block tiling") {
    std::mt19937_64 rng(108);
    for (auto [n, m] : std::vector<std::pair<std::size_t, std::size_t>>{
             {2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 3}}) {
        for (const Partition& p : all_tilings(n, m, 4)) {
            const ComplexMatrix host = rand_matrix(rng, n, m);
            const PartitionedMatrix pm = make_partitioned(host, p);
            PythagorasCertificate c;
            REQUIRE_NOTHROW(c = decompose4(pm));
            CHECK(c.residual <= cert_bound(host));
            CHECK(c.witness_defect <= m * Tol::eps_unitary_per_dim);
        }
    }
}

TEST_CASE("decompose handles every brute-forced three-block tiling") {
    std::mt19937_64 rng(109);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::size_t m = 1; m <= 3; ++m) {
            for (const Partition& p : all_tilings(n, m, 3)) {
                const ComplexMatrix host = rand_matrix(rng, n, m);
                const PartitionedMatrix pm = make_partitioned(host, p);
                PythagorasCertificate c;
                REQUIRE_NOTHROW(c = decompose(pm));
                CHECK(c.residual <= cert_bound(host));
            }
        }
    }
}

TEST_CASE("direct_sum_average recovers the block direct sum") {
    std::mt19937_64 rng(110);
    SUBCASE("2x2 grid") {
        const Partition p = grid_partition({1, 2}, {2, 1});
        const ComplexMatrix host = rand_matrix(rng, 3, 3);
        const DirectSumAverage d = direct_sum_average(make_partitioned(host, p));
        REQUIRE(d.isometries.size() == 4);
        CHECK(d.residual <= cert_bound(host));
        CHECK(d.isometry_defect <= 6 * Tol::eps_unitary_per_dim);
        // Slots follow the partition order.
        CHECK(d.slot_offsets == std::vector<std::size_t>{0, 2, 3, 5});
        CHECK(d.direct_sum.rows() == 6);
    }
    SUBCASE("column stack") {
        const Partition p = three_block(2, 4, ThreeBlockLayout::ColStack, 1, 2);
        const ComplexMatrix host = rand_matrix(rng, 2, 4);
        const DirectSumAverage d = direct_sum_average(make_partitioned(host, p));
        REQUIRE(d.isometries.size() == 3);
        CHECK(d.residual <= cert_bound(host));
        for (const ComplexMatrix& v : d.isometries) {
            CHECK(v.rows() == 4);
            CHECK(v.cols() == 4);
        }
    }
    SUBCASE("single block") {
        Partition p;
        p.host_rows = 2;
        p.host_cols = 3;
        BlockSpec b;
        b.name = "all";
        b.rows = {0, 1};
        b.cols = {0, 1, 2};
        p.blocks.push_back(b);
        const ComplexMatrix host = rand_matrix(rng, 2, 3);
        const DirectSumAverage d = direct_sum_average(make_partitioned(host, p));
        REQUIRE(d.isometries.size() == 1);
        CHECK(d.residual <= cert_bound(host));
    }
}

TEST_CASE("majorization_average rebuilds the averaged matrix") {
    SUBCASE("straddle pair selection regression") {
        // Mixing the extreme pair (8,1) toward 6 would leave {3,3}, which
        // cannot majorize (5,1); the tight pair (8,3) must be chosen.
        const ComplexMatrix a{{6, 0, 0}, {0, 5, 0}, {0, 0, 1}};
        const ComplexMatrix b{{8, 0, 0}, {0, 3, 0}, {0, 0, 1}};
        const MajorizationAverage r = majorization_average(a, b);
        REQUIRE(r.unitaries.size() == 3);
        CHECK(r.residual <= 1e-12 * 20);
        CHECK(r.majorization_margin >= 0.0);
        for (const ComplexMatrix& u : r.unitaries)
            CHECK(unitary_defect(u) <= 3 * Tol::eps_unitary_per_dim);
    }
    SUBCASE("diagonal of a matrix against its spectrum") {
        std::mt19937_64 rng(111);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + trial % 5;
            const ComplexMatrix b = rand_herm(rng, n);
            ComplexMatrix a(n, n);
            for (std::size_t i = 0; i < n; ++i) a(i, i) = b(i, i);
            const MajorizationAverage r = majorization_average(a, b);
            REQUIRE(r.unitaries.size() == n);
            CHECK(r.residual <= 1e-10 * (1.0 + b.norm_fro()));
        }
    }
    SUBCASE("averages of rotated copies majorize") {
        std::mt19937_64 rng(112);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + trial % 5;
            const ComplexMatrix b = rand_herm(rng, n);
            ComplexMatrix acc(n, n);
            const int terms = 2 + trial % 3;
            for (int t = 0; t < terms; ++t) {
                const ComplexMatrix u = rand_unitary(rng, n);
                acc += u * b * u.adjoint();
            }
            acc *= cplx(1.0 / terms, 0.0);
            const ComplexMatrix a = acc.hermitize();
            const MajorizationAverage r = majorization_average(a, b);
            CHECK(r.majorization_margin >= -1e-10);
            CHECK(r.residual <= 1e-9 * (1.0 + b.norm_fro()));
        }
    }
    SUBCASE("premise violations throw") {
        CHECK_THROWS_AS(majorization_average(ComplexMatrix{{2, 0}, {0, 0}},
                                             ComplexMatrix::identity(2)),
                        MajorizationError);
        CHECK_THROWS_AS(majorization_average(ComplexMatrix::identity(2),
                                             2.0 * ComplexMatrix::identity(2)),
                        MajorizationError);
    }
}
