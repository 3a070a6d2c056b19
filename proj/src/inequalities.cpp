#include "blockpythag/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blockpythag {

namespace {

// Squared singular value at 1-based index j, zero beyond the list.
double sv2_at(const std::vector<double>& s, std::size_t j) {
    if (j == 0 || j > s.size()) return 0.0;
    return s[j - 1] * s[j - 1];
}

// Divides margins by (1 + ||A||_2^2) and fills min/pass/note.
void finalize(InequalityReport& rep, double top_sv) {
    const double scale = 1.0 + top_sv * top_sv;
    for (double& m : rep.margins) m /= scale;
    if (rep.margins.empty()) {
        rep.min_margin = 0.0;
    } else {
        auto it = std::min_element(rep.margins.begin(), rep.margins.end());
        rep.min_margin = *it;
        if (rep.min_margin < -ineq_margin_tol) {
            std::ostringstream os;
            os << "violated at margin " << (it - rep.margins.begin())
               << ": relative slack " << rep.min_margin;
            rep.note = os.str();
        }
    }
    rep.pass = rep.min_margin >= -ineq_margin_tol;
}

}  // namespace

InequalityReport check_cor_sing(const PartitionedMatrix& pm,
                                const std::vector<std::size_t>& j_multi) {
    const std::size_t r = pm.partition.blocks.size();
    if (j_multi.size() != r)
        throw std::invalid_argument("multi-index length must match the block count");

    const std::vector<double> host_sv = singular_values(pm.host);
    std::size_t lhs_index = 1;
    double rhs = 0.0;
    InequalityReport rep;
    rep.name = "cor_sing";
    for (std::size_t k = 0; k < r; ++k) {
        lhs_index += j_multi[k];
        const ComplexMatrix blk = extract_block(pm.host, pm.partition.blocks[k]);
        rhs += sv2_at(singular_values(blk), j_multi[k] + 1);
        rep.parameters["j" + std::to_string(k)] = static_cast<double>(j_multi[k]);
    }
    rep.parameters["blocks"] = static_cast<double>(r);
    rep.parameters["lhs_index"] = static_cast<double>(lhs_index);
    rep.margins = {rhs - sv2_at(host_sv, lhs_index)};
    finalize(rep, host_sv.empty() ? 0.0 : host_sv.front());
    return rep;
}

InequalityReport check_cor_var(const PartitionedMatrix& pm, std::size_t k,
                               std::size_t j) {
    const std::size_t r = pm.partition.blocks.size();
    if (k >= r) throw std::invalid_argument("block position out of range");
    if (j == 0) throw std::invalid_argument("singular value index is 1-based");

    std::vector<std::size_t> j_multi(r, 0);
    j_multi[k] = j - 1;
    InequalityReport rep = check_cor_sing(pm, j_multi);
    rep.name = "cor_var";
    rep.parameters.clear();
    rep.parameters["k"] = static_cast<double>(k);
    rep.parameters["j"] = static_cast<double>(j);
    rep.parameters["blocks"] = static_cast<double>(r);
    return rep;
}

double schatten_norm(const ComplexMatrix& m, double q) {
    if (!(q > 0.0))
        throw std::invalid_argument("schatten_norm requires q > 0");
    const std::vector<double> s = singular_values(m);
    const double top = s.empty() ? 0.0 : s.front();
    if (top <= 0.0) return 0.0;
    double acc = 0.0;
    // Values below the rank tolerance are solver noise on rank-deficient
    // input; for q < 1 they would otherwise dominate the sum.
    for (double v : s)
        if (v > Tol::eps_rank * top) acc += std::pow(v / top, q);
    return top * std::pow(acc, 1.0 / q);
}

InequalityReport check_bhatia_kittaneh(const PartitionedMatrix& pm, double q) {
    if (!(q > 0.0))
        throw std::invalid_argument("check_bhatia_kittaneh requires q > 0");
    const std::size_t r = pm.partition.blocks.size();
    const std::vector<double> host_sv = singular_values(pm.host);
    const double host_norm = schatten_norm(pm.host, q);
    const double host_sq = host_norm * host_norm;
    double block_sum = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        const double b =
            schatten_norm(extract_block(pm.host, pm.partition.blocks[k]), q);
        block_sum += b * b;
    }
    const double c = std::pow(static_cast<double>(r), 2.0 / q - 1.0);

    InequalityReport rep;
    rep.name = "bhatia_kittaneh";
    rep.parameters["q"] = q;
    rep.parameters["blocks"] = static_cast<double>(r);
    rep.parameters["host_sq"] = host_sq;
    rep.parameters["block_sum_sq"] = block_sum;
    rep.parameters["scaling"] = c;
    // margins[0] is the averaged bound, margins[1] the plain sum bound; both
    // flip orientation below q = 2.
    if (q >= 2.0)
        rep.margins = {host_sq - c * block_sum, block_sum - host_sq};
    else
        rep.margins = {c * block_sum - host_sq, host_sq - block_sum};
    finalize(rep, host_sv.empty() ? 0.0 : host_sv.front());
    return rep;
}

InequalityReport check_trace_triangle(const PartitionedMatrix& pm, double p) {
    if (pm.partition.blocks.size() != 3)
        throw std::invalid_argument("trace triangle bound needs exactly three blocks");
    if (!(p >= 1.0))
        throw std::invalid_argument("trace triangle bound requires p >= 1");

    const std::vector<double> host_sv = singular_values(pm.host);
    const double lhs = std::pow(schatten_norm(pm.host, 2.0 * p), 2.0);
    double rhs = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
        rhs += std::pow(
            schatten_norm(extract_block(pm.host, pm.partition.blocks[k]), 2.0 * p),
            2.0);

    InequalityReport rep;
    rep.name = "trace_triangle";
    rep.parameters["p"] = p;
    rep.parameters["host_power_trace"] = lhs;
    rep.parameters["block_power_trace_sum"] = rhs;
    rep.margins = {rhs - lhs};
    finalize(rep, host_sv.empty() ? 0.0 : host_sv.front());
    return rep;
}

std::pair<ComplexMatrix, HyperplaneSpec> compress_hyperplane(const ComplexMatrix& a,
                                                             const ComplexMatrix& h) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("compression needs a square matrix");
    const std::size_t d = a.rows();
    if (d < 2)
        throw std::invalid_argument("compression needs dimension at least 2");
    if (h.rows() != d || h.cols() != 1)
        throw std::invalid_argument("hyperplane vector shape mismatch");
    if (std::abs(h.norm_fro() - 1.0) > 1e-12)
        throw std::invalid_argument("hyperplane vector must have unit norm");

    // Phase-normalize so the last entry is real and nonnegative, then
    // reflect that vector onto +e_last; the reflector's first d-1 columns
    // are an orthonormal basis of the hyperplane.
    cplx phase(1.0, 0.0);
    const double tail = std::abs(h(d - 1, 0));
    if (tail > 0.0) phase = h(d - 1, 0) / tail;
    ComplexMatrix v = std::conj(phase) * h;
    v(d - 1, 0) = cplx(tail - 1.0, 0.0);
    double vv = 0.0;
    for (std::size_t i = 0; i < d; ++i) vv += std::norm(v(i, 0));

    ComplexMatrix basis(d, d - 1);
    if (vv <= 1e-24) {
        for (std::size_t i = 0; i + 1 < d; ++i) basis(i, i) = 1.0;
    } else {
        const double f = 2.0 / vv;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j + 1 < d; ++j) {
                cplx e = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
                basis(i, j) = e - f * v(i, 0) * std::conj(v(j, 0));
            }
    }

    HyperplaneSpec spec;
    spec.h = h;
    const ComplexMatrix ah = a * h;
    const ComplexMatrix aah = a.adjoint() * h;
    const double nah = ah.norm_fro() * ah.norm_fro();
    const double naah = aah.norm_fro() * aah.norm_fro();
    const double diag = std::norm(vdot(h, ah));
    spec.beta_normal = nah - diag;
    spec.beta_min = std::min(nah, naah) - diag;
    spec.beta_sum = nah + naah - diag;

    return {basis.adjoint() * (a * basis), spec};
}

InequalityReport check_interlacing(const ComplexMatrix& a, const ComplexMatrix& h) {
    const auto [a_s, spec] = compress_hyperplane(a, h);
    const std::vector<double> full = singular_values(a);
    const std::vector<double> comp = singular_values(a_s);
    const std::size_t d = a.rows();

    InequalityReport rep;
    rep.name = "interlacing";
    rep.parameters["dim"] = static_cast<double>(d);
    rep.parameters["beta_min"] = spec.beta_min;
    rep.parameters["beta_normal"] = spec.beta_normal;
    rep.parameters["beta_sum"] = spec.beta_sum;
    for (std::size_t j = 1; j < d; ++j)
        rep.margins.push_back(sv2_at(full, j) - sv2_at(comp, j));
    for (std::size_t j = 1; j < d; ++j)
        rep.margins.push_back(sv2_at(comp, j) - sv2_at(full, j + 1) + spec.beta_min);
    finalize(rep, full.empty() ? 0.0 : full.front());
    return rep;
}

InequalityReport check_compression_drop(const ComplexMatrix& a,
                                        const ComplexMatrix& h) {
    const auto [a_s, spec] = compress_hyperplane(a, h);
    const std::vector<double> full = singular_values(a);
    const std::vector<double> comp = singular_values(a_s);
    const std::size_t d = a.rows();

    InequalityReport rep;
    rep.name = "compression_drop";
    rep.parameters["dim"] = static_cast<double>(d);
    rep.parameters["beta_sum"] = spec.beta_sum;
    for (std::size_t j = 1; j < d; ++j)
        rep.margins.push_back(spec.beta_sum - (sv2_at(full, j) - sv2_at(comp, j)));
    finalize(rep, full.empty() ? 0.0 : full.front());
    return rep;
}

}  // namespace blockpythag
