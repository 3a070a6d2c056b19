#include "blockpythag/pythagoras.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace blockpythag {

namespace {

ComplexMatrix gram(const ComplexMatrix& a) { return (a.adjoint() * a).hermitize(); }

// n x k matrix whose t-th column is the canonical basis vector e_{idx[t]}.
ComplexMatrix selection(const std::vector<std::size_t>& idx, std::size_t n) {
    ComplexMatrix p(n, idx.size());
    for (std::size_t t = 0; t < idx.size(); ++t) p(idx[t], t) = 1.0;
    return p;
}

double isometry_defect(const ComplexMatrix& u) {
    return (u.adjoint() * u - ComplexMatrix::identity(u.cols())).norm_max();
}

void measure(const PartitionedMatrix& pm, PythagorasCertificate& cert) {
    const ComplexMatrix g = gram(pm.host);
    ComplexMatrix acc(g.rows(), g.cols());
    double defect = 0.0;
    for (std::size_t k = 0; k < pm.partition.blocks.size(); ++k) {
        const ComplexMatrix ak = extract_block(pm.host, pm.partition.blocks[k]);
        acc += cert.witnesses[k] * gram(ak) * cert.witnesses[k].adjoint();
        defect = std::max(defect, isometry_defect(cert.witnesses[k]));
    }
    cert.residual = (g - acc).norm_fro();
    cert.witness_defect = defect;
}

PythagorasCertificate column_route(const PartitionedMatrix& pm,
                                   const CompatibilityReport& rep) {
    const Partition& part = pm.partition;
    PythagorasCertificate cert;
    cert.route = "column";
    cert.witnesses.resize(part.blocks.size());
    for (const BlockSpec& b : part.blocks) cert.block_names.push_back(b.name);

    std::vector<std::size_t> concat;
    std::vector<std::size_t> sizes;
    for (const auto& grp : rep.column_groups) {
        const auto& cset = part.blocks[grp.front()].cols;
        concat.insert(concat.end(), cset.begin(), cset.end());
        sizes.push_back(cset.size());
    }
    const ComplexMatrix pi = selection(concat, part.host_cols);
    const ComplexMatrix m = (pi.adjoint() * gram(pm.host) * pi).hermitize();
    const std::vector<ComplexMatrix> us = multi_block_diag_split(m, sizes);
    for (std::size_t q = 0; q < rep.column_groups.size(); ++q) {
        // One witness per column group, shared by its stacked blocks.
        const ComplexMatrix u = pi * us[q];
        for (std::size_t k : rep.column_groups[q]) cert.witnesses[k] = u;
    }
    return cert;
}

PythagorasCertificate row_route(const PartitionedMatrix& pm,
                                const CompatibilityReport& rep) {
    const Partition& part = pm.partition;
    PythagorasCertificate cert;
    cert.route = "row";
    cert.witnesses.resize(part.blocks.size());
    for (const BlockSpec& b : part.blocks) cert.block_names.push_back(b.name);

    for (const auto& grp : rep.row_groups) {
        // The strip of rows shared by this group; its blocks tile the
        // strip left to right, so their column sets cover every column.
        const auto& rset = part.blocks[grp.front()].rows;
        const ComplexMatrix strip =
            selection(rset, part.host_rows).adjoint() * pm.host;
        std::vector<std::size_t> concat;
        std::vector<std::size_t> sizes;
        for (std::size_t k : grp) {
            concat.insert(concat.end(), part.blocks[k].cols.begin(),
                          part.blocks[k].cols.end());
            sizes.push_back(part.blocks[k].cols.size());
        }
        const ComplexMatrix pi = selection(concat, part.host_cols);
        const ComplexMatrix m = (pi.adjoint() * gram(strip) * pi).hermitize();
        const std::vector<ComplexMatrix> us = multi_block_diag_split(m, sizes);
        for (std::size_t t = 0; t < grp.size(); ++t)
            cert.witnesses[grp[t]] = pi * us[t];
    }
    return cert;
}

void check_shape(const PartitionedMatrix& pm) {
    if (pm.host.rows() != pm.partition.host_rows ||
        pm.host.cols() != pm.partition.host_cols)
        throw std::invalid_argument("host shape does not match the partition");
    if (auto err = validate(pm.partition))
        throw std::invalid_argument("invalid partition: " + err->message);
}

}  // namespace

std::vector<ComplexMatrix> multi_block_diag_split(const ComplexMatrix& m,
                                                  const std::vector<std::size_t>& sizes) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("multi_block_diag_split: square input required");
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (total != m.rows() || sizes.empty())
        throw std::invalid_argument("multi_block_diag_split: sizes must sum to the dimension");
    for (std::size_t s : sizes)
        if (s == 0) throw std::invalid_argument("multi_block_diag_split: zero block size");

    const ComplexMatrix t = sqrt_psd(m);
    std::vector<ComplexMatrix> out;
    out.reserve(sizes.size());
    std::size_t off = 0;
    for (std::size_t s : sizes) {
        out.push_back(polar_isometry(t.col_range(off, s)));
        off += s;
    }
    return out;
}

std::pair<ComplexMatrix, ComplexMatrix> two_block_split(const ComplexMatrix& m,
                                                        std::size_t p) {
    if (p == 0 || p >= m.rows())
        throw std::invalid_argument("two_block_split: need 0 < p < dim");
    std::vector<ComplexMatrix> us = multi_block_diag_split(m, {p, m.rows() - p});
    return {std::move(us[0]), std::move(us[1])};
}

PythagorasCertificate decompose(const PartitionedMatrix& pm) {
    check_shape(pm);
    const CompatibilityReport rep = compatibility(pm.partition);
    PythagorasCertificate cert;
    if (rep.column_compatible)
        cert = column_route(pm, rep);
    else if (rep.row_compatible)
        cert = row_route(pm, rep);
    else
        throw IncompatibilityError(
            "partition blocks are neither column nor row compatible");
    measure(pm, cert);
    return cert;
}

PythagorasCertificate decompose4(const PartitionedMatrix& pm) {
    check_shape(pm);
    const FourBlockCase tag = fourblock_classify(pm.partition);
    const CompatibilityReport rep = compatibility(pm.partition);
    if (rep.column_compatible || rep.row_compatible) {
        PythagorasCertificate cert = decompose(pm);
        cert.route = to_string(tag) + "+" + cert.route;
        return cert;
    }

    const Partition& part = pm.partition;
    const std::size_t nblocks = part.blocks.size();
    std::size_t peel = nblocks;
    bool column_peel = true;
    for (std::size_t k = 0; k < nblocks; ++k) {
        if (part.blocks[k].rows.size() == part.host_rows) {
            peel = k;
            column_peel = true;
            break;
        }
    }
    if (peel == nblocks) {
        for (std::size_t k = 0; k < nblocks; ++k) {
            if (part.blocks[k].cols.size() == part.host_cols) {
                peel = k;
                column_peel = false;
                break;
            }
        }
    }
    if (peel == nblocks)
        throw IncompatibilityError(
            "four-block partition has no full-height or full-width block to peel");

    const BlockSpec& pb = part.blocks[peel];
    PythagorasCertificate cert;
    cert.witnesses.resize(nblocks);
    for (const BlockSpec& b : part.blocks) cert.block_names.push_back(b.name);

    // Remaining blocks keep their relative order in the sub-partition.
    Partition sub;
    std::vector<std::size_t> parent_index;
    ComplexMatrix subhost;
    ComplexMatrix rest_witness;  // maps sub-host columns back into host columns

    if (column_peel) {
        std::vector<std::size_t> comp;
        for (std::size_t c = 0; c < part.host_cols; ++c)
            if (!std::binary_search(pb.cols.begin(), pb.cols.end(), c))
                comp.push_back(c);

        std::vector<std::size_t> concat = pb.cols;
        concat.insert(concat.end(), comp.begin(), comp.end());
        const ComplexMatrix pi = selection(concat, part.host_cols);
        const ComplexMatrix m = (pi.adjoint() * gram(pm.host) * pi).hermitize();
        auto [u_peel, u_rest] = two_block_split(m, pb.cols.size());
        cert.witnesses[peel] = pi * u_peel;
        rest_witness = pi * u_rest;

        subhost = pm.host * selection(comp, part.host_cols);
        std::vector<std::size_t> colpos(part.host_cols, 0);
        for (std::size_t t = 0; t < comp.size(); ++t) colpos[comp[t]] = t;
        sub.host_rows = part.host_rows;
        sub.host_cols = comp.size();
        for (std::size_t k = 0; k < nblocks; ++k) {
            if (k == peel) continue;
            BlockSpec b = part.blocks[k];
            for (std::size_t& c : b.cols) c = colpos[c];
            sub.blocks.push_back(std::move(b));
            parent_index.push_back(k);
        }
    } else {
        // A full-width strip splits off additively: |A|^2 = |P|^2 + |M|^2.
        cert.witnesses[peel] = ComplexMatrix::identity(part.host_cols);
        rest_witness = ComplexMatrix::identity(part.host_cols);

        std::vector<std::size_t> comp;
        for (std::size_t r = 0; r < part.host_rows; ++r)
            if (!std::binary_search(pb.rows.begin(), pb.rows.end(), r))
                comp.push_back(r);
        subhost = selection(comp, part.host_rows).adjoint() * pm.host;
        std::vector<std::size_t> rowpos(part.host_rows, 0);
        for (std::size_t t = 0; t < comp.size(); ++t) rowpos[comp[t]] = t;
        sub.host_rows = comp.size();
        sub.host_cols = part.host_cols;
        for (std::size_t k = 0; k < nblocks; ++k) {
            if (k == peel) continue;
            BlockSpec b = part.blocks[k];
            for (std::size_t& r : b.rows) r = rowpos[r];
            sub.blocks.push_back(std::move(b));
            parent_index.push_back(k);
        }
    }

    const PythagorasCertificate subcert =
        decompose(make_partitioned(std::move(subhost), std::move(sub)));
    for (std::size_t t = 0; t < parent_index.size(); ++t)
        cert.witnesses[parent_index[t]] = rest_witness * subcert.witnesses[t];
    cert.route = to_string(tag) + "+peel:" + pb.name + "+" + subcert.route;
    measure(pm, cert);
    return cert;
}

CertificateCheck check_certificate(const PartitionedMatrix& pm,
                                   const PythagorasCertificate& cert) {
    check_shape(pm);
    const std::size_t nblocks = pm.partition.blocks.size();
    if (cert.witnesses.size() != nblocks || cert.block_names.size() != nblocks)
        throw std::invalid_argument("certificate does not match the partition");
    for (std::size_t k = 0; k < nblocks; ++k) {
        if (cert.block_names[k] != pm.partition.blocks[k].name)
            throw std::invalid_argument("certificate block order does not match");
        if (cert.witnesses[k].rows() != pm.partition.host_cols ||
            cert.witnesses[k].cols() != pm.partition.blocks[k].cols.size())
            throw std::invalid_argument("witness shape mismatch at block '" +
                                        cert.block_names[k] + "'");
    }
    PythagorasCertificate copy = cert;
    measure(pm, copy);
    CertificateCheck out;
    out.residual = copy.residual;
    out.witness_defect = copy.witness_defect;
    const double g2 = pm.host.norm_fro() * pm.host.norm_fro();
    out.ok = out.residual <= Tol::eps_dec * (1.0 + g2) &&
             out.witness_defect <=
                 Tol::eps_unitary_per_dim * static_cast<double>(pm.partition.host_cols);
    return out;
}

DirectSumAverage direct_sum_average(const PartitionedMatrix& pm) {
    const PythagorasCertificate cert = decompose(pm);
    const Partition& part = pm.partition;
    const std::size_t r = part.blocks.size();
    const std::size_t dc = part.host_cols;

    DirectSumAverage out;
    std::size_t n_total = 0;
    for (const BlockSpec& b : part.blocks) {
        out.block_names.push_back(b.name);
        out.slot_offsets.push_back(n_total);
        n_total += b.cols.size();
    }

    ComplexMatrix x(dc, n_total);
    out.direct_sum = ComplexMatrix(n_total, n_total);
    for (std::size_t k = 0; k < r; ++k) {
        const ComplexMatrix ak = extract_block(pm.host, part.blocks[k]);
        const ComplexMatrix g = gram(ak);
        const std::size_t off = out.slot_offsets[k];
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j)
                out.direct_sum(off + i, off + j) = g(i, j);
        const ComplexMatrix ua = cert.witnesses[k] * abs_value(ak);
        for (std::size_t i = 0; i < dc; ++i)
            for (std::size_t j = 0; j < ua.cols(); ++j) x(i, off + j) = ua(i, j);
    }

    // X X^* = |A|^2 and X^* X share their spectrum with |A|^2 (+) 0, so an
    // eigenbasis matching turns one into the other.
    const ComplexMatrix xtx = (x.adjoint() * x).hermitize();
    ComplexMatrix padded(n_total, n_total);
    const ComplexMatrix g = gram(pm.host);
    for (std::size_t i = 0; i < dc; ++i)
        for (std::size_t j = 0; j < dc; ++j) padded(i, j) = g(i, j);
    const HermEigResult e1 = herm_eig(xtx);
    const HermEigResult e2 = herm_eig(padded);
    const ComplexMatrix w1 = (e1.vectors * e2.vectors.adjoint()).col_range(0, dc);

    // Slotwise phase pinching: the j-th isometry scales slot k by the
    // (j*k)-th power of the primitive r-th root of unity.
    const double two_pi = 2.0 * std::numbers::pi;
    double defect = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
        ComplexMatrix vj(n_total, dc);
        for (std::size_t k = 0; k < r; ++k) {
            const std::size_t off = out.slot_offsets[k];
            const std::size_t mk = part.blocks[k].cols.size();
            const cplx z = std::polar(1.0, two_pi * static_cast<double>((j * k) % r) /
                                               static_cast<double>(r));
            for (std::size_t i = 0; i < mk; ++i)
                for (std::size_t c = 0; c < dc; ++c) vj(off + i, c) = z * w1(off + i, c);
        }
        defect = std::max(defect, isometry_defect(vj));
        out.isometries.push_back(std::move(vj));
    }
    out.isometry_defect = defect;

    ComplexMatrix acc(n_total, n_total);
    for (const ComplexMatrix& vj : out.isometries) acc += vj * g * vj.adjoint();
    acc *= cplx(1.0 / static_cast<double>(r), 0.0);
    out.residual = (out.direct_sum - acc).norm_fro();
    return out;
}

MajorizationAverage majorization_average(const ComplexMatrix& a, const ComplexMatrix& b,
                                         double tol) {
    if (!a.same_shape(b) || a.rows() != a.cols())
        throw std::invalid_argument("majorization_average: square same-shape inputs");
    const HermEigResult ea = herm_eig(a);
    const HermEigResult eb = herm_eig(b);
    const std::size_t n = a.rows();
    const double scale = 1.0 + a.norm_fro() + b.norm_fro();

    double margin = std::numeric_limits<double>::infinity();
    double pa = 0.0, pb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        pa += ea.values[k];
        pb += eb.values[k];
        if (k + 1 < n) margin = std::min(margin, pb - pa);
    }
    if (n == 1) margin = 0.0;
    if (std::abs(pa - pb) > tol * scale)
        throw MajorizationError("majorization_average: traces differ beyond tolerance");
    if (margin < -tol * scale)
        throw MajorizationError(
            "majorization_average: eigenvalue partial sums are not majorized");

    // Rotation chain realizing the target diagonal: for each target value,
    // mix the tightest straddling pair of still-free diagonal entries.
    // Rotations always pair two free coordinates, so the free principal
    // submatrix stays diagonal throughout.
    std::vector<double> cur = eb.values;
    const std::vector<double>& tgt = ea.values;
    std::vector<bool> frozen(n, false);
    std::vector<std::size_t> pos(n, 0);
    ComplexMatrix q = ComplexMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double tau = tgt[k];
        std::ptrdiff_t hi = -1, lo = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i]) continue;
            if (cur[i] >= tau) {
                if (hi < 0 || cur[i] < cur[hi]) hi = static_cast<std::ptrdiff_t>(i);
            } else {
                if (lo < 0 || cur[i] > cur[lo]) lo = static_cast<std::ptrdiff_t>(i);
            }
        }
        if (hi >= 0 && (lo < 0 || cur[hi] - tau <= 1e-12 * scale)) {
            frozen[hi] = true;
            pos[k] = static_cast<std::size_t>(hi);
        } else if (hi < 0) {
            // Only reachable through premise slack; the residual absorbs it.
            frozen[lo] = true;
            pos[k] = static_cast<std::size_t>(lo);
        } else {
            const double chi = cur[hi], clo = cur[lo];
            const double c2 = std::clamp((tau - clo) / (chi - clo), 0.0, 1.0);
            const double c = std::sqrt(c2);
            const double s = std::sqrt(1.0 - c2);
            for (std::size_t j = 0; j < n; ++j) {
                const cplx qh = q(hi, j), ql = q(lo, j);
                q(hi, j) = c * qh + s * ql;
                q(lo, j) = -s * qh + c * ql;
            }
            cur[lo] = chi + clo - tau;
            cur[hi] = tau;
            frozen[hi] = true;
            pos[k] = static_cast<std::size_t>(hi);
        }
    }

    // Reorder so target k sits at diagonal position k, then average the
    // n phase pinchings of that matrix back down to its diagonal.
    ComplexMatrix pq(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) pq(k, j) = q(pos[k], j);

    MajorizationAverage out;
    out.majorization_margin = margin;
    const double two_pi = 2.0 * std::numbers::pi;
    const ComplexMatrix right = pq * eb.vectors.adjoint();
    for (std::size_t i = 0; i < n; ++i) {
        ComplexMatrix u = ea.vectors;  // will absorb F^i on its columns
        for (std::size_t k = 0; k < n; ++k) {
            const cplx z = std::polar(1.0, two_pi * static_cast<double>((i * k) % n) /
                                               static_cast<double>(n));
            for (std::size_t row = 0; row < n; ++row) u(row, k) *= z;
        }
        out.unitaries.push_back(u * right);
    }

    ComplexMatrix acc(n, n);
    for (const ComplexMatrix& u : out.unitaries) acc += u * b * u.adjoint();
    acc *= cplx(1.0 / static_cast<double>(n), 0.0);
    out.residual = (a - acc).norm_fro();
    return out;
}

}  // namespace blockpythag
