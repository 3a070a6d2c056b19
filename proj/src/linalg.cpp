#include "blockpythag/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blockpythag {

namespace {

// One complex Jacobi rotation annihilating H(p,q). H stays Hermitian by
// construction; V accumulates the rotation on the right.
void jacobi_rotate(ComplexMatrix& h, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const cplx b = h(p, q);
    const double ab = std::abs(b);
    if (ab == 0.0) return;
    const cplx phase = b / ab;  // e^{i theta}, theta = arg b
    const double app = h(p, p).real();
    const double aqq = h(q, q).real();
    const double tau = (aqq - app) / (2.0 * ab);
    double t;
    if (tau == 0.0) {
        t = 1.0;
    } else {
        t = (tau > 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx se = s * std::conj(phase);  // s * e^{-i theta}

    const std::size_t n = h.rows();
    // Column update: H <- H * G with G = [c, s; -s e^{-it}, c e^{-it}] in
    // the (p,q) plane, then row update H <- G* H.
    for (std::size_t i = 0; i < n; ++i) {
        const cplx hip = h(i, p), hiq = h(i, q);
        h(i, p) = c * hip - se * hiq;
        h(i, q) = s * hip + c * std::conj(phase) * hiq;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const cplx hpj = h(p, j), hqj = h(q, j);
        h(p, j) = c * hpj - s * phase * hqj;
        h(q, j) = s * hpj + c * phase * hqj;
    }
    // Restore exact structure on the worked entries.
    h(p, p) = cplx(app - t * ab, 0.0);
    h(q, q) = cplx(aqq + t * ab, 0.0);
    h(p, q) = 0.0;
    h(q, p) = 0.0;

    for (std::size_t i = 0; i < v.rows(); ++i) {
        const cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip - se * viq;
        v(i, q) = s * vip + c * std::conj(phase) * viq;
    }
}

double offdiag_norm(const ComplexMatrix& h) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            if (i != j) s += std::norm(h(i, j));
    return std::sqrt(s);
}

void fix_phase(ComplexMatrix& vectors, std::size_t j) {
    std::size_t best = 0;
    double bestmod = -1.0;
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        const double m = std::abs(vectors(i, j));
        if (m > bestmod) {
            bestmod = m;
            best = i;
        }
    }
    if (bestmod <= 0.0) return;
    const cplx ph = std::conj(vectors(best, j)) / bestmod;
    for (std::size_t i = 0; i < vectors.rows(); ++i) vectors(i, j) *= ph;
    vectors(best, j) = cplx(std::abs(vectors(best, j)), 0.0);
}

}  // namespace

HermEigResult herm_eig(const ComplexMatrix& h_in, SweepOrder order) {
    if (h_in.rows() != h_in.cols())
        throw std::invalid_argument("herm_eig: square matrix required");
    if (!h_in.all_finite()) throw DomainError("herm_eig: nonfinite entries");
    const std::size_t n = h_in.rows();
    const double scale = h_in.norm_fro();
    if (h_in.herm_defect() > Tol::eps_herm * std::max(scale, 1e-300) && scale > 0.0)
        throw DomainError("herm_eig: input is not Hermitian within tolerance");

    ComplexMatrix h = h_in.hermitize();
    ComplexMatrix v = ComplexMatrix::identity(n);

    HermEigResult res;
    if (n == 0) {
        res.vectors = v;
        return res;
    }

    const double stop = 1e-15 * std::max(scale, 1e-300);
    const int max_sweeps = 64;
    int sweep = 0;
    while (offdiag_norm(h) > stop) {
        if (sweep >= max_sweeps)
            throw ConvergenceError("herm_eig: Jacobi did not converge in 64 sweeps");
        if (order == SweepOrder::RowMajor) {
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(h, v, p, q);
        } else {
            for (std::size_t q = 1; q < n; ++q)
                for (std::size_t p = 0; p < q; ++p) jacobi_rotate(h, v, p, q);
        }
        ++sweep;
    }
    res.sweeps = sweep;

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = h(i, i).real();
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return diag[a] > diag[b]; });

    res.values.resize(n);
    res.vectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = diag[idx[j]];
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, idx[j]);
        fix_phase(res.vectors, j);
    }
    return res;
}

namespace {

// Modified Gram-Schmidt of column j of u against columns [0, j), two
// passes. Returns the norm of what is left.
double mgs_column(ComplexMatrix& u, std::size_t j) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
            cplx c = 0.0;
            for (std::size_t i = 0; i < u.rows(); ++i) c += std::conj(u(i, k)) * u(i, j);
            for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) -= c * u(i, k);
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) s += std::norm(u(i, j));
    return std::sqrt(s);
}

// Fill column j so the frame stays orthonormal: the canonical basis
// vector with the largest residual against all other columns (ties ->
// lowest index, so the result is deterministic). The best residual norm
// is at least 1/sqrt(rows) whenever a complement direction exists.
void complete_column(ComplexMatrix& u, std::size_t j) {
    auto residual = [&](std::size_t e) {
        for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) = (i == e) ? 1.0 : 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < u.cols(); ++k) {
                if (k == j) continue;
                cplx c = 0.0;
                for (std::size_t i = 0; i < u.rows(); ++i)
                    c += std::conj(u(i, k)) * u(i, j);
                for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) -= c * u(i, k);
            }
        }
        double s = 0.0;
        for (std::size_t i = 0; i < u.rows(); ++i) s += std::norm(u(i, j));
        return std::sqrt(s);
    };

    std::size_t best = 0;
    double best_nrm = -1.0;
    for (std::size_t e = 0; e < u.rows(); ++e) {
        const double nrm = residual(e);
        if (nrm > best_nrm + 1e-12) {
            best_nrm = nrm;
            best = e;
        }
    }
    if (best_nrm < 1e-8) throw std::runtime_error("orthonormal completion failed");
    const double nrm = residual(best);
    for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) /= nrm;
}

SvdResult svd_tall(const ComplexMatrix& a, SweepOrder order) {
    const std::size_t m = a.rows(), n = a.cols();
    const HermEigResult eig = herm_eig((a.adjoint() * a).hermitize(), order);

    // sigma_j = ||A v_j|| rather than sqrt(lambda_j): keeps the per-column
    // reconstruction error at rounding level even for tiny singular values.
    std::vector<double> sig(n);
    ComplexMatrix av(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * eig.vectors(k, j);
            av(i, j) = s;
        }
        double s2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) s2 += std::norm(av(i, j));
        sig[j] = std::sqrt(s2);
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    SvdResult r;
    r.singular.resize(n);
    r.left = ComplexMatrix(m, n);
    r.right = ComplexMatrix(n, n);
    const double zero_cut = 1e-14 * (1.0 + a.norm_fro());
    std::vector<std::size_t> null_cols;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = idx[j];
        r.singular[j] = sig[src];
        for (std::size_t i = 0; i < n; ++i) r.right(i, j) = eig.vectors(i, src);
        if (sig[src] <= zero_cut) {
            null_cols.push_back(j);
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) r.left(i, j) = av(i, src) / sig[src];
        const double nrm = mgs_column(r.left, j);
        if (nrm <= 1e-3) {
            null_cols.push_back(j);
            for (std::size_t i = 0; i < m; ++i) r.left(i, j) = 0.0;
        } else {
            for (std::size_t i = 0; i < m; ++i) r.left(i, j) /= nrm;
        }
    }
    for (std::size_t j : null_cols) complete_column(r.left, j);
    return r;
}

}  // namespace

SvdResult svd(const ComplexMatrix& a, SweepOrder order) {
    if (a.empty()) throw std::invalid_argument("svd: empty matrix");
    if (!a.all_finite()) throw DomainError("svd: nonfinite entries");
    if (a.rows() >= a.cols()) return svd_tall(a, order);
    SvdResult t = svd_tall(a.adjoint(), order);
    SvdResult r;
    r.left = std::move(t.right);
    r.right = std::move(t.left);
    r.singular = std::move(t.singular);
    return r;
}

std::vector<double> singular_values(const ComplexMatrix& a, SweepOrder order) {
    return svd(a, order).singular;
}

ComplexMatrix abs_value(const ComplexMatrix& a) {
    // Built from the SVD rather than sqrt_psd(A*A): sigma = ||A v|| keeps
    // kernel directions at rounding level instead of sqrt(eps).
    const SvdResult s = svd(a);
    const std::size_t n = a.cols();
    const std::size_t k = s.singular.size();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                acc += s.right(i, t) * s.singular[t] * std::conj(s.right(j, t));
            out(i, j) = acc;
            out(j, i) = std::conj(acc);
        }
    for (std::size_t i = 0; i < n; ++i) out(i, i) = cplx(out(i, i).real(), 0.0);
    return out;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& h) {
    const HermEigResult eig = herm_eig(h);
    const double top = eig.values.empty() ? 0.0 : std::max(std::abs(eig.values.front()),
                                                           std::abs(eig.values.back()));
    std::vector<double> root(eig.values.size());
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        double lam = eig.values[j];
        if (lam < 0.0) {
            if (lam < -Tol::eps_psd * (1.0 + top))
                throw DomainError("sqrt_psd: matrix is not PSD within tolerance");
            lam = 0.0;
        }
        root[j] = std::sqrt(lam);
    }
    const std::size_t n = h.rows();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eig.vectors(i, k) * root[k] * std::conj(eig.vectors(j, k));
            out(i, j) = s;
            out(j, i) = std::conj(s);
        }
    for (std::size_t i = 0; i < n; ++i) out(i, i) = cplx(out(i, i).real(), 0.0);
    return out;
}

ComplexMatrix polar_isometry(const ComplexMatrix& a) {
    if (a.rows() < a.cols())
        throw std::invalid_argument("polar_isometry: rows >= cols required");
    const SvdResult s = svd(a);
    return s.left * s.right.adjoint();
}

ComplexMatrix apply_fn(const ComplexMatrix& h, const std::function<double(double)>& f) {
    const HermEigResult eig = herm_eig(h);
    const std::size_t n = h.rows();
    ComplexMatrix out(n, n);
    std::vector<double> fv(n);
    for (std::size_t k = 0; k < n; ++k) {
        fv[k] = f(eig.values[k]);
        if (!std::isfinite(fv[k])) throw DomainError("apply_fn: f(eigenvalue) not finite");
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eig.vectors(i, k) * fv[k] * std::conj(eig.vectors(j, k));
            out(i, j) = s;
            out(j, i) = std::conj(s);
        }
    for (std::size_t i = 0; i < n; ++i) out(i, i) = cplx(out(i, i).real(), 0.0);
    return out;
}

ComplexMatrix pseudo_power(const ComplexMatrix& h, double p) {
    const HermEigResult eig = herm_eig(h);
    const double top = eig.values.empty() ? 0.0 : std::abs(eig.values.front());
    const double cut = Tol::eps_rank * (1.0 + top);
    return apply_fn(h, [p, cut](double lam) {
        if (lam <= cut) return 0.0;
        return std::pow(lam, p);
    });
}

LoewnerResult loewner_geq(const ComplexMatrix& x, const ComplexMatrix& y, double tol) {
    const HermEigResult eig = herm_eig((x - y).hermitize());
    LoewnerResult r;
    r.margin = eig.values.empty() ? 0.0 : eig.values.back();
    r.holds = r.margin >= -tol;
    return r;
}

double eigen_dominance_margin(const ComplexMatrix& p, const ComplexMatrix& q) {
    const HermEigResult ep = herm_eig(p);
    const HermEigResult eq = herm_eig(q);
    if (ep.values.size() != eq.values.size())
        throw std::invalid_argument("eigen_dominance_margin: dimension mismatch");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ep.values.size(); ++j)
        m = std::min(m, eq.values[j] - ep.values[j]);
    return m;
}

ComplexMatrix dominance_conjugation(const ComplexMatrix& p, const ComplexMatrix& q,
                                    double tol) {
    const HermEigResult ep = herm_eig(p);
    const HermEigResult eq = herm_eig(q);
    if (ep.values.size() != eq.values.size())
        throw std::invalid_argument("dominance_conjugation: dimension mismatch");
    for (std::size_t j = 0; j < ep.values.size(); ++j)
        if (ep.values[j] > eq.values[j] + tol)
            throw DominanceError("dominance_conjugation: lambda_j(P) > lambda_j(Q) at j=" +
                                 std::to_string(j + 1));
    return ep.vectors * eq.vectors.adjoint();
}

double spectral_norm(const ComplexMatrix& a) {
    const std::vector<double> s = singular_values(a);
    return s.empty() ? 0.0 : s.front();
}

}  // namespace blockpythag
