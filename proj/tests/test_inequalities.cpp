#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "blockpythag/inequalities.hpp"
#include "test_support.hpp"

using namespace blockpythag;
using namespace blockpythag::testing;

namespace {

ComplexMatrix rand_unit(std::mt19937_64& rng, std::size_t d) {
    ComplexMatrix v = rand_matrix(rng, d, 1);
    double n = v.norm_fro();
    while (n < 1e-6) {
        v = rand_matrix(rng, d, 1);
        n = v.norm_fro();
    }
    return cplx(1.0 / n, 0.0) * v;
}

double sv_or_zero(const std::vector<double>& s, std::size_t j) {
    return j <= s.size() ? s[j - 1] : 0.0;
}

// Margin scale used by every report.
double rel_scale(const ComplexMatrix& a) {
    const double top = spectral_norm(a);
    return 1.0 + top * top;
}

PartitionedMatrix rand_partitioned(std::mt19937_64& rng, Partition p) {
    ComplexMatrix host = rand_matrix(rng, p.host_rows, p.host_cols);
    return make_partitioned(std::move(host), std::move(p));
}

}  // namespace

TEST_CASE("cor_sing matches a hand-evaluated three-block bound") {
    std::mt19937_64 rng(201);
    const PartitionedMatrix pm =
        rand_partitioned(rng, three_block(9, 5, ThreeBlockLayout::RowStack, 3, 3));

    const std::vector<std::size_t> j_multi{2, 1, 0};
    const InequalityReport rep = check_cor_sing(pm, j_multi);
    CHECK(rep.name == "cor_sing");
    CHECK(rep.pass);
    CHECK(rep.parameters.at("lhs_index") == 4.0);
    CHECK(rep.margins.size() == 1);

    // mu_4^2(host) <= mu_3^2(A) + mu_2^2(B) + mu_1^2(C), recomputed directly.
    const std::vector<double> hs = singular_values(pm.host);
    double rhs = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        const std::vector<double> bs =
            singular_values(extract_block(pm.host, pm.partition.blocks[k]));
        const double v = sv_or_zero(bs, j_multi[k] + 1);
        rhs += v * v;
    }
    const double lhs = sv_or_zero(hs, 4) * sv_or_zero(hs, 4);
    CHECK(rhs - lhs >= -1e-9 * rel_scale(pm.host));
    CHECK(rep.margins[0] * rel_scale(pm.host) ==
          doctest::Approx(rhs - lhs).epsilon(1e-10));
}

TEST_CASE("cor_sing zero multi-index bounds the top singular value") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const PartitionedMatrix pm =
            rand_partitioned(rng, grid_partition({2, 3}, {2, 2, 1}));
        const InequalityReport rep =
            check_cor_sing(pm, std::vector<std::size_t>(6, 0));
        CHECK(rep.pass);

        const double top = spectral_norm(pm.host);
        double rhs = 0.0;
        for (const BlockSpec& b : pm.partition.blocks) {
            const double s = spectral_norm(extract_block(pm.host, b));
            rhs += s * s;
        }
        CHECK(top * top <= rhs + 1e-9 * rel_scale(pm.host));
        CHECK(rep.margins[0] * rel_scale(pm.host) ==
              doctest::Approx(rhs - top * top).epsilon(1e-9));
    }
}

TEST_CASE("cor_sing exhaustive multi-index sweep on 6x6 compatible partitions") {
    std::mt19937_64 rng(203);
    const std::vector<Partition> parts{
        grid_partition({2, 4}, {3, 3}),
        grid_partition({1, 2, 3}, {6}),
        grid_partition({3, 3}, {2, 2, 2}),
        three_block(6, 6, ThreeBlockLayout::TopWide, 2, 3),
    };
    for (const Partition& p : parts) {
        const PartitionedMatrix pm = rand_partitioned(rng, p);
        const std::size_t r = p.blocks.size();
        std::vector<std::size_t> j(r, 0);
        std::size_t swept = 0;
        while (true) {
            const InequalityReport rep = check_cor_sing(pm, j);
            CHECK(rep.min_margin >= -1e-9);
            CHECK(rep.pass);
            ++swept;
            std::size_t pos = 0;
            while (pos < r && j[pos] == 3) j[pos++] = 0;
            if (pos == r) break;
            ++j[pos];
        }
        std::size_t expected = 1;
        for (std::size_t k = 0; k < r; ++k) expected *= 4;
        CHECK(swept == expected);
    }

    const PartitionedMatrix pm = rand_partitioned(rng, grid_partition({6}, {6}));
    CHECK_THROWS_AS(check_cor_sing(pm, {0, 0}), std::invalid_argument);
}

TEST_CASE("cor_var collapses to zero slack on a single block") {
    std::mt19937_64 rng(204);
    const PartitionedMatrix pm = rand_partitioned(rng, grid_partition({4}, {3}));
    for (std::size_t j = 1; j <= 4; ++j) {
        const InequalityReport rep = check_cor_var(pm, 0, j);
        CHECK(rep.pass);
        CHECK(std::abs(rep.margins[0]) <= 1e-13);
    }
}

TEST_CASE("cor_var slack on a block diagonal host is the off-block mass") {
    ComplexMatrix host(4, 4);
    host(0, 0) = 5.0;
    host(1, 1) = 1.0;
    host(2, 2) = 2.0;
    host(3, 3) = 1.0;
    const PartitionedMatrix pm =
        make_partitioned(host, grid_partition({2, 2}, {2, 2}));

    // Dominant block r0c0 carries the host's top singular value, so the
    // slack is exactly the sum of the other blocks' top squares: 0 + 0 + 4.
    const InequalityReport rep = check_cor_var(pm, 0, 1);
    CHECK(rep.pass);
    CHECK(rep.parameters.at("k") == 0.0);
    CHECK(rep.margins[0] * rel_scale(host) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("cor_var holds across random three-block partitions") {
    std::mt19937_64 rng(205);
    const ThreeBlockLayout layouts[] = {
        ThreeBlockLayout::RowStack, ThreeBlockLayout::ColStack,
        ThreeBlockLayout::TopWide, ThreeBlockLayout::LeftTall};
    for (int trial = 0; trial < 40; ++trial) {
        const PartitionedMatrix pm = rand_partitioned(
            rng, three_block(5, 5, layouts[trial % 4], 2, 2));
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t j = 1; j <= 4; ++j) {
                const InequalityReport rep = check_cor_var(pm, k, j);
                CHECK(rep.pass);
                CHECK(rep.min_margin >= -1e-9);
            }
    }
    const PartitionedMatrix pm =
        rand_partitioned(rng, three_block(4, 4, ThreeBlockLayout::RowStack, 1, 1));
    CHECK_THROWS_AS(check_cor_var(pm, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_cor_var(pm, 0, 0), std::invalid_argument);
}

TEST_CASE("schatten_norm oracles") {
    ComplexMatrix d34(2, 2);
    d34(0, 0) = 3.0;
    d34(1, 1) = 4.0;
    CHECK(schatten_norm(d34, 1.0) == doctest::Approx(7.0).epsilon(1e-13));
    CHECK(schatten_norm(d34, 2.0) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(schatten_norm(d34, 200.0) == doctest::Approx(4.0).epsilon(1e-12));

    std::mt19937_64 rng(206);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = rand_matrix(rng, 3 + trial % 3, 4);
        CHECK(schatten_norm(a, 2.0) ==
              doctest::Approx(a.norm_fro()).epsilon(1e-12));
    }

    // Rank one: every q returns the single singular value.
    const ComplexMatrix u = rand_matrix(rng, 5, 1);
    const ComplexMatrix v = rand_matrix(rng, 4, 1);
    const ComplexMatrix outer = u * v.adjoint();
    const double top = u.norm_fro() * v.norm_fro();
    for (double q : {0.5, 1.0, 2.0, 3.0, 17.0})
        CHECK(schatten_norm(outer, q) == doctest::Approx(top).epsilon(1e-11));

    CHECK(schatten_norm(ComplexMatrix(3, 2), 0.5) == 0.0);
    CHECK_THROWS_AS(schatten_norm(d34, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(schatten_norm(d34, -3.0), std::invalid_argument);
}

TEST_CASE("bhatia_kittaneh margins vanish at q = 2") {
    std::mt19937_64 rng(207);
    for (int trial = 0; trial < 10; ++trial) {
        const PartitionedMatrix pm =
            rand_partitioned(rng, grid_partition({2, 3, 1}, {4, 2}));
        const InequalityReport rep = check_bhatia_kittaneh(pm, 2.0);
        CHECK(rep.pass);
        CHECK(rep.parameters.at("scaling") == 1.0);
        CHECK(std::abs(rep.margins[0]) <= 1e-12);
        CHECK(std::abs(rep.margins[1]) <= 1e-12);
    }
}

TEST_CASE("bhatia_kittaneh tightness probes") {
    // Identity split into singleton rows: every block has unit norm and the
    // averaged bound is an equality at every q.
    ComplexMatrix eye = ComplexMatrix::identity(4);
    const PartitionedMatrix rows =
        make_partitioned(eye, grid_partition({1, 1, 1, 1}, {4}));
    for (double q : {3.0, 4.0, 40.0}) {
        const InequalityReport rep = check_bhatia_kittaneh(rows, q);
        CHECK(rep.pass);
        CHECK(std::abs(rep.margins[0]) <= 1e-12);
    }

    // All-ones host: the plain sum bound is an equality at every q.
    ComplexMatrix ones(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) ones(i, j) = 1.0;
    const PartitionedMatrix ones_rows =
        make_partitioned(ones, grid_partition({1, 1, 1, 1}, {4}));
    for (double q : {0.5, 1.0, 3.0, 4.0}) {
        const InequalityReport rep = check_bhatia_kittaneh(ones_rows, q);
        CHECK(rep.pass);
        // The plain sum bound is margins[1] in either orientation.
        CHECK(std::abs(rep.margins[1]) <= 1e-11);
    }
}

TEST_CASE("bhatia_kittaneh random suites in both orientations") {
    std::mt19937_64 rng(208);
    const std::vector<Partition> parts{
        grid_partition({2, 3}, {1, 4}),
        grid_partition({5}, {2, 2, 1}),
        three_block(6, 4, ThreeBlockLayout::LeftTall, 2, 3),
    };
    for (double q : {0.5, 1.0, 3.0, 4.0})
        for (const Partition& p : parts)
            for (int trial = 0; trial < 10; ++trial) {
                const PartitionedMatrix pm = rand_partitioned(rng, p);
                const InequalityReport rep = check_bhatia_kittaneh(pm, q);
                CHECK(rep.pass);
                CHECK(rep.min_margin >= -1e-9);
            }
    const PartitionedMatrix pm = rand_partitioned(rng, grid_partition({5}, {5}));
    CHECK_THROWS_AS(check_bhatia_kittaneh(pm, 0.0), std::invalid_argument);
}

TEST_CASE("trace_triangle equality cases and errors") {
    std::mt19937_64 rng(209);
    const PartitionedMatrix pm = rand_partitioned(
        rng, three_block(5, 6, ThreeBlockLayout::ColStack, 2, 2));
    const InequalityReport unit = check_trace_triangle(pm, 1.0);
    CHECK(unit.pass);
    CHECK(std::abs(unit.margins[0]) <= 1e-12);

    // Rank-one host: every block is rank at most one, so the bound is the
    // Frobenius identity for every p.
    const ComplexMatrix u = rand_matrix(rng, 5, 1);
    const ComplexMatrix v = rand_matrix(rng, 6, 1);
    const PartitionedMatrix rank1 = make_partitioned(
        u * v.adjoint(), three_block(5, 6, ThreeBlockLayout::ColStack, 3, 2));
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const InequalityReport rep = check_trace_triangle(rank1, p);
        CHECK(rep.pass);
        CHECK(std::abs(rep.margins[0]) <= 1e-10);
    }

    const PartitionedMatrix four =
        rand_partitioned(rng, grid_partition({2, 2}, {2, 2}));
    CHECK_THROWS_AS(check_trace_triangle(four, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(check_trace_triangle(pm, 0.9), std::invalid_argument);
}

TEST_CASE("trace_triangle random p = 2 suite") {
    std::mt19937_64 rng(210);
    const ThreeBlockLayout layouts[] = {
        ThreeBlockLayout::RowStack, ThreeBlockLayout::ColStack,
        ThreeBlockLayout::TopWide, ThreeBlockLayout::LeftTall};
    for (int trial = 0; trial < 40; ++trial) {
        const PartitionedMatrix pm = rand_partitioned(
            rng, three_block(6, 5, layouts[trial % 4], 2, 2));
        const InequalityReport rep = check_trace_triangle(pm, 2.0);
        CHECK(rep.pass);
        CHECK(rep.min_margin >= -1e-9);
    }
}

TEST_CASE("compress_hyperplane oracles") {
    std::mt19937_64 rng(211);

    // Last canonical vector: exact leading principal submatrix.
    const ComplexMatrix a = rand_matrix(rng, 4, 4);
    ComplexMatrix e4(4, 1);
    e4(3, 0) = 1.0;
    const auto [lead, lead_spec] = compress_hyperplane(a, e4);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(lead(i, j) - a(i, j)) == 0.0);
    CHECK(lead_spec.beta_min >= -1e-12);

    // Identity host: compression stays the identity, the interlacing betas
    // vanish, and beta_sum is the leftover ||h||^2 term.
    const ComplexMatrix h5 = rand_unit(rng, 5);
    const auto [id_s, id_spec] = compress_hyperplane(ComplexMatrix::identity(5), h5);
    CHECK((id_s - ComplexMatrix::identity(4)).norm_max() <= 1e-14);
    CHECK(std::abs(id_spec.beta_normal) <= 1e-14);
    CHECK(std::abs(id_spec.beta_min) <= 1e-14);
    CHECK(id_spec.beta_sum == doctest::Approx(1.0).epsilon(1e-13));

    // diag(1,-1) compressed along the diagonal direction collapses to zero.
    ComplexMatrix refl(2, 2);
    refl(0, 0) = 1.0;
    refl(1, 1) = -1.0;
    ComplexMatrix diag_h(2, 1);
    diag_h(0, 0) = diag_h(1, 0) = 1.0 / std::sqrt(2.0);
    const auto [v_s, v_spec] = compress_hyperplane(refl, diag_h);
    CHECK(v_s.rows() == 1);
    CHECK(std::abs(v_s(0, 0)) <= 1e-14);
    CHECK(std::abs(vdot(diag_h, refl * diag_h)) <= 1e-14);
    CHECK(v_spec.beta_min == doctest::Approx(1.0).epsilon(1e-13));

    // Pinned reflector orientation: regression for the 2x2 compression value
    // (Q = (-1, 1)/sqrt(2) under the nonnegative-last-entry convention).
    ComplexMatrix probe{{1, 20}, {300, 4}};
    const auto [p_s, p_spec] = compress_hyperplane(probe, diag_h);
    CHECK(p_s(0, 0).real() == doctest::Approx(-157.5).epsilon(1e-13));
    CHECK(std::abs(p_s(0, 0).imag()) <= 1e-13);

    ComplexMatrix bad(2, 1);
    bad(0, 0) = 0.7;
    CHECK_THROWS_AS(compress_hyperplane(refl, bad), std::invalid_argument);
    CHECK_THROWS_AS(compress_hyperplane(rand_matrix(rng, 2, 3), diag_h),
                    std::invalid_argument);
    CHECK_THROWS_AS(compress_hyperplane(ComplexMatrix::identity(1),
                                        ComplexMatrix{{1}}),
                    std::invalid_argument);
}

TEST_CASE("hyperplane scalars are ordered and phase independent") {
    std::mt19937_64 rng(212);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 5;
        const ComplexMatrix a = rand_matrix(rng, d, d);
        const ComplexMatrix h = rand_unit(rng, d);
        const auto [a_s, spec] = compress_hyperplane(a, h);
        CHECK(spec.beta_min >= -1e-12);
        CHECK(spec.beta_min <= spec.beta_normal + 1e-13);
        CHECK(spec.beta_normal <= spec.beta_sum + 1e-13);

        // A global phase on h targets the same hyperplane and the same basis.
        std::uniform_real_distribution<double> ang(0.0, 6.28318);
        const cplx z = std::polar(1.0, ang(rng));
        const auto [b_s, b_spec] = compress_hyperplane(a, z * h);
        CHECK((a_s - b_s).norm_max() <= 1e-12);
        CHECK(b_spec.beta_sum == doctest::Approx(spec.beta_sum).epsilon(1e-10));
    }
}

TEST_CASE("compression singular values ignore the basis choice") {
    std::mt19937_64 rng(213);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 3 + trial % 4;
        const ComplexMatrix a = rand_matrix(rng, d, d);
        const ComplexMatrix h = rand_unit(rng, d);
        const auto [a_s, spec] = compress_hyperplane(a, h);
        const ComplexMatrix omega = rand_unitary(rng, d - 1);
        const ComplexMatrix rotated = omega.adjoint() * (a_s * omega);
        const std::vector<double> s0 = singular_values(a_s);
        const std::vector<double> s1 = singular_values(rotated);
        for (std::size_t j = 0; j < s0.size(); ++j)
            CHECK(std::abs(s0[j] - s1[j]) <= 1e-10 * (1.0 + s0.front()));
    }
}

TEST_CASE("interlacing is sharp for unitaries") {
    std::mt19937_64 rng(214);
    for (std::size_t d = 2; d <= 6; ++d) {
        const ComplexMatrix u = rand_unitary(rng, d);
        const ComplexMatrix h = rand_unit(rng, d);
        const auto [u_s, spec] = compress_hyperplane(u, h);
        const std::vector<double> s = singular_values(u_s);
        for (std::size_t j = 1; j <= d - 2; ++j)
            CHECK(s[j - 1] == doctest::Approx(1.0).epsilon(1e-10));
        const double corner = std::abs(vdot(h, u * h));
        CHECK(s[d - 2] == doctest::Approx(corner).epsilon(1e-9));

        const InequalityReport rep = check_interlacing(u, h);
        CHECK(rep.pass);
        CHECK(rep.margins.size() == 2 * (d - 1));
        // The lowest gap is an equality: mu_{d-1}^2(U_S) = mu_d^2(U) - beta.
        CHECK(std::abs(rep.margins[2 * (d - 1) - 1]) <= 1e-9);
    }
}

TEST_CASE("interlacing removes an eigenvalue when h is an eigenvector") {
    std::mt19937_64 rng(215);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 3 + trial % 4;
        const ComplexMatrix u = rand_unitary(rng, d);
        std::vector<double> lam(d);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        for (double& l : lam) l = dist(rng);
        ComplexMatrix a(d, d);
        for (std::size_t k = 0; k < d; ++k) {
            const ComplexMatrix col = u.col(k);
            a += cplx(lam[k], 0.0) * (col * col.adjoint());
        }
        const std::size_t drop = trial % d;
        const ComplexMatrix h = u.col(drop);

        const auto [a_s, spec] = compress_hyperplane(a, h);
        CHECK(std::abs(spec.beta_min) <= 1e-10);
        std::vector<double> expect;
        for (std::size_t k = 0; k < d; ++k)
            if (k != drop) expect.push_back(std::abs(lam[k]));
        std::sort(expect.rbegin(), expect.rend());
        const std::vector<double> got = singular_values(a_s);
        REQUIRE(got.size() == expect.size());
        for (std::size_t j = 0; j < got.size(); ++j)
            CHECK(got[j] == doctest::Approx(expect[j]).epsilon(1e-9));

        CHECK(check_interlacing(a, h).pass);
    }
}

TEST_CASE("interlacing holds on random matrices") {
    std::mt19937_64 rng(216);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 7;
        const ComplexMatrix a = rand_matrix(rng, d, d);
        const ComplexMatrix h = rand_unit(rng, d);
        const InequalityReport rep = check_interlacing(a, h);
        CHECK(rep.pass);
        CHECK(rep.min_margin >= -1e-9);

        const auto [a_s, spec] = compress_hyperplane(a, h);
        const std::vector<double> full = singular_values(a);
        const std::vector<double> comp = singular_values(a_s);
        const double beta = std::max(spec.beta_min, 0.0);
        for (std::size_t j = 0; j < d - 1; ++j) {
            // The unsquared corollary is weaker; both directions checked raw.
            CHECK(full[j] >= comp[j] - 1e-10 * (1.0 + full.front()));
            CHECK(comp[j] >= sv_or_zero(full, j + 2) - std::sqrt(beta) -
                                 1e-9 * (1.0 + full.front()));
        }
    }
}

TEST_CASE("compression_drop bounds and tightness") {
    std::mt19937_64 rng(217);

    const ComplexMatrix h = rand_unit(rng, 4);
    const InequalityReport eye = check_compression_drop(ComplexMatrix::identity(4), h);
    CHECK(eye.pass);
    for (double m : eye.margins) CHECK(m == doctest::Approx(0.5).epsilon(1e-12));

    // Rank one aligned with h: the drop saturates the bound.
    const ComplexMatrix aligned = cplx(3.0, 0.0) * (h * h.adjoint());
    const InequalityReport tight = check_compression_drop(aligned, h);
    CHECK(tight.pass);
    CHECK(std::abs(tight.margins[0]) <= 1e-11);

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + trial % 6;
        const ComplexMatrix a = rand_matrix(rng, d, d);
        const InequalityReport rep = check_compression_drop(a, rand_unit(rng, d));
        CHECK(rep.pass);
        CHECK(rep.margins.size() == d - 1);
    }
}

TEST_CASE("checkers outside their hypothesis record margins without asserting") {
    std::mt19937_64 rng(218);
    const Partition pin = pinwheel5();
    for (int trial = 0; trial < 20; ++trial) {
        const PartitionedMatrix pm = rand_partitioned(rng, pin);

        // The pinwheel is neither row nor column compatible, so these bounds
        // carry no guarantee; the reports must still be well formed so the
        // margins can be logged and handed to the counterexample search.
        const InequalityReport sing =
            check_cor_sing(pm, std::vector<std::size_t>(5, 1));
        CHECK(std::isfinite(sing.min_margin));
        CHECK(sing.pass == (sing.min_margin >= -ineq_margin_tol));

        const InequalityReport var = check_cor_var(pm, 2, 2);
        CHECK(std::isfinite(var.min_margin));

        for (double q : {1.0, 3.0}) {
            const InequalityReport bk = check_bhatia_kittaneh(pm, q);
            CHECK(std::isfinite(bk.min_margin));
            CHECK(bk.pass == (bk.min_margin >= -ineq_margin_tol));
            CHECK(bk.margins.size() == 2);
        }
    }
}
