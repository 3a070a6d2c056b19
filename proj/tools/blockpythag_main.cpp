#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "blockpythag/functional.hpp"
#include "blockpythag/inequalities.hpp"
#include "blockpythag/serialization.hpp"
#include "blockpythag/witness_search.hpp"

using namespace blockpythag;

namespace {

// Exit codes, kept stable:
//   0 success, all asserted checks passed
//   1 I/O, schema, or input-contract errors (including hypothesis violations)
//   2 the partition admits no closed-form decomposition route
//   3 witness search exhausted its budget (the witness still exists)
//   4 a theorem-backed numerical check failed
constexpr int kOk = 0;
constexpr int kInput = 1;
constexpr int kIncompatible = 2;
constexpr int kSearchShortfall = 3;
constexpr int kCheckFailed = 4;

void diag(const std::string& msg) { std::cerr << "blockpythag: " << msg << "\n"; }

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const SchemaError& e) {
        diag(e.what());
        return kInput;
    } catch (const HypothesisError& e) {
        diag(e.what());
        return kInput;
    } catch (const IncompatibilityError& e) {
        diag(std::string(e.what()) +
             " (no closed-form route; the `search` command explores such shapes numerically)");
        return kIncompatible;
    } catch (const SearchFailureError& e) {
        diag(e.what());
        return kSearchShortfall;
    } catch (const std::invalid_argument& e) {
        diag(e.what());
        return kInput;
    } catch (const std::exception& e) {
        diag(std::string("numerical failure: ") + e.what());
        return kCheckFailed;
    }
}

ComplexMatrix load_matrix(const std::string& path) {
    return matrix_from_json(read_json_file(path));
}

PartitionedMatrix load_partitioned(const std::string& mpath, const std::string& ppath) {
    ComplexMatrix host = load_matrix(mpath);
    Partition part = partition_from_json(read_json_file(ppath));
    try {
        return make_partitioned(std::move(host), std::move(part));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string(e.what()));
    }
}

ComplexMatrix disk_host(std::uint64_t seed, std::size_t rows, std::size_t cols) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ComplexMatrix h(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double rad = std::sqrt(u01(rng));
            const double ang = 2.0 * std::numbers::pi * u01(rng);
            h(i, j) = cplx(rad * std::cos(ang), rad * std::sin(ang));
        }
    return h;
}

// ---- decompose -----------------------------------------------------------

struct DecomposeCfg {
    std::string matrix, partition, out;
    bool four = false;
    double tol = 1e-10;
};

int cmd_decompose(const DecomposeCfg& cfg) {
    const PartitionedMatrix pm = load_partitioned(cfg.matrix, cfg.partition);
    PythagorasCertificate cert;
    try {
        cert = cfg.four ? decompose4(pm) : decompose(pm);
    } catch (const IncompatibilityError& e) {
        std::string hint = cfg.four ? "the `search` command explores such shapes numerically"
                                    : "try --four for contiguous 2x2 layouts, or the "
                                      "`search` command for numerical exploration";
        diag(std::string(e.what()) + " (" + hint + ")");
        return kIncompatible;
    }
    write_json_file(cfg.out, certificate_to_json(cert));

    const double fro = pm.host.norm_fro();
    const double bound = cfg.tol * (1.0 + fro * fro);
    const double defect_bound = Tol::eps_unitary_per_dim * static_cast<double>(pm.host.cols());
    const bool pass = cert.residual <= bound && cert.witness_defect <= defect_bound;

    json summary;
    summary["wrote"] = cfg.out;
    summary["route"] = cert.route;
    summary["residual"] = cert.residual;
    summary["residualBound"] = bound;
    summary["witnessDefect"] = cert.witness_defect;
    summary["pass"] = pass;
    std::cout << summary.dump() << "\n";
    if (!pass) diag("certificate exceeds the residual bound");
    return pass ? kOk : kCheckFailed;
}

// ---- verify --------------------------------------------------------------

struct VerifyCfg {
    std::string matrix, partition;
    std::string suite = "all";
    std::optional<double> q;
    std::uint64_t seed = 0;
};

int cmd_verify(const VerifyCfg& cfg) {
    const PartitionedMatrix pm = load_partitioned(cfg.matrix, cfg.partition);
    const CompatibilityReport comp = compatibility(pm.partition);
    const bool backed = comp.column_compatible || comp.row_compatible;
    const std::size_t r = pm.partition.blocks.size();
    std::mt19937_64 rng(cfg.seed);

    bool backed_failure = false;
    auto emit = [&](const InequalityReport& rep) {
        json j = report_to_json(rep);
        j["theoremBacked"] = backed;
        std::cout << j.dump() << "\n";
        if (backed && !rep.pass) backed_failure = true;
    };
    auto skip = [&](const std::string& name, const std::string& why) {
        json j;
        j["name"] = name;
        j["skipped"] = true;
        j["reason"] = why;
        std::cout << j.dump() << "\n";
    };

    const bool want_sing = cfg.suite == "sing" || cfg.suite == "all";
    const bool want_schatten = cfg.suite == "schatten" || cfg.suite == "all";
    const bool want_trace = cfg.suite == "trace" || cfg.suite == "all";

    if (want_sing) {
        std::uniform_int_distribution<std::size_t> entry(0, 3);
        std::vector<std::vector<std::size_t>> indices(1, std::vector<std::size_t>(r, 0));
        for (int t = 0; t < 24; ++t) {
            std::vector<std::size_t> j(r);
            for (auto& x : j) x = entry(rng);
            indices.push_back(std::move(j));
        }
        for (const auto& j : indices) emit(check_cor_sing(pm, j));

        std::uniform_int_distribution<std::size_t> pick_k(0, r - 1);
        std::uniform_int_distribution<std::size_t> pick_j(
            1, std::min(pm.host.rows(), pm.host.cols()));
        for (int t = 0; t < 10; ++t) emit(check_cor_var(pm, pick_k(rng), pick_j(rng)));
    }

    if (want_schatten) {
        const std::vector<double> qs =
            cfg.q ? std::vector<double>{*cfg.q}
                  : std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
        for (double q : qs) {
            try {
                emit(check_bhatia_kittaneh(pm, q));
            } catch (const std::invalid_argument& e) {
                if (cfg.q) throw;
                skip("bhatia-kittaneh", e.what());
            }
        }
    }

    if (want_trace) {
        const std::vector<double> ps =
            cfg.q ? std::vector<double>{*cfg.q} : std::vector<double>{1.0, 1.5, 2.0};
        for (double p : ps) {
            try {
                emit(check_trace_triangle(pm, p));
            } catch (const std::invalid_argument& e) {
                if (cfg.suite == "trace") throw;
                skip("trace-triangle", e.what());
            }
        }
    }

    if (backed_failure) {
        diag("a theorem-backed check failed");
        return kCheckFailed;
    }
    return kOk;
}

// ---- compress ------------------------------------------------------------

struct CompressCfg {
    std::string matrix, hvec;
    bool normal = false;
};

int cmd_compress(const CompressCfg& cfg) {
    const ComplexMatrix a = load_matrix(cfg.matrix);
    const ComplexMatrix h = load_matrix(cfg.hvec);
    if (h.cols() != 1 || h.rows() != a.rows())
        throw SchemaError("h must be a column vector matching the matrix dimension");
    if (std::abs(h.norm_fro() - 1.0) > 1e-12)
        throw SchemaError("h must be a unit vector (got ||h|| = " +
                          std::to_string(h.norm_fro()) + ")");
    if (cfg.normal) {
        const ComplexMatrix comm = a * a.adjoint() - a.adjoint() * a;
        const double fro = a.norm_fro();
        if (comm.norm_fro() > 1e-8 * (1.0 + fro * fro))
            throw SchemaError("--normal given, but the matrix is not normal "
                              "(||AA* - A*A||_F = " +
                              std::to_string(comm.norm_fro()) + ")");
    }

    const auto [compressed, spec] = compress_hyperplane(a, h);
    json out = hyperplane_to_json(compressed, spec);

    const InequalityReport inter = check_interlacing(a, h);
    const InequalityReport drop = check_compression_drop(a, h);
    out["interlacing"] = report_to_json(inter);
    out["drop"] = report_to_json(drop);
    bool pass = inter.pass && drop.pass;

    if (cfg.normal) {
        // Normal matrices tighten the lower interlacing gap to use
        // beta_normal directly.
        const std::vector<double> mu = singular_values(a);
        const std::vector<double> ms = singular_values(compressed);
        const double scale = 1.0 + mu[0] * mu[0];
        InequalityReport rep;
        rep.name = "hyperplane-interlacing-normal";
        rep.parameters["betaNormal"] = spec.beta_normal;
        for (std::size_t j = 0; j + 1 < mu.size(); ++j) {
            rep.margins.push_back((mu[j] * mu[j] - ms[j] * ms[j]) / scale);
            rep.margins.push_back(
                (ms[j] * ms[j] - mu[j + 1] * mu[j + 1] + spec.beta_normal) / scale);
        }
        rep.min_margin = *std::min_element(rep.margins.begin(), rep.margins.end());
        rep.pass = rep.min_margin >= -ineq_margin_tol;
        if (!rep.pass) rep.note = "normal interlacing bound violated";
        out["interlacingNormal"] = report_to_json(rep);
        pass = pass && rep.pass;
    }

    std::cout << out.dump() << "\n";
    if (!pass) {
        diag("a compression bound failed");
        return kCheckFailed;
    }
    return kOk;
}

// ---- functional ----------------------------------------------------------

struct FunctionalCfg {
    std::string matrix, partition, out;
    std::string psi, phi;
    std::optional<double> p;
    std::uint64_t seed = 0;
    std::size_t max_iters = 200;
    std::size_t restarts = 50;
};

int cmd_functional(const FunctionalCfg& cfg) {
    const PartitionedMatrix pm = load_partitioned(cfg.matrix, cfg.partition);
    SplitOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.restarts = cfg.restarts;
    opts.seed = cfg.seed;

    FunctionalCertificate cert;
    if (!cfg.psi.empty())
        cert = th_convex(pm, parse_function_spec(cfg.psi), opts);
    else if (!cfg.phi.empty())
        cert = cor_concave(pm, parse_function_spec(cfg.phi), opts);
    else
        cert = cor_four2(pm, *cfg.p);

    const json j = functional_to_json(cert);
    if (!cfg.out.empty()) write_json_file(cfg.out, j);
    std::cout << j.dump() << "\n";

    const bool pass = cert.loewner_margin >= -Tol::eps_fun;
    if (!pass) diag("certificate margin below tolerance");
    return pass ? kOk : kCheckFailed;
}

// ---- search --------------------------------------------------------------

int cmd_search(const std::string& manifest_path) {
    const SearchManifest m = manifest_from_json(read_json_file(manifest_path));
    for (const std::uint64_t seed : m.seeds) {
        ComplexMatrix host = m.host
                                 ? *m.host
                                 : disk_host(seed, m.partition.host_rows,
                                             m.partition.host_cols);
        const PartitionedMatrix pm = make_partitioned(std::move(host), m.partition);
        if (m.mode == "search") {
            SearchConfig cfg = m.budget;
            cfg.seed = seed;
            const SearchResult res = feasibility_search(pm, cfg);
            std::cout << search_result_to_json(res).dump() << "\n";
            std::cerr << "seed " << seed << ": residual " << res.best_residual << " after "
                      << res.iterations << " iterations, " << res.restarts
                      << " restarts" << (res.converged ? " (converged)" : "") << "\n";
        } else {
            const ScanReport rep = necessary_condition_scan(pm, m.trials, seed);
            std::cout << scan_report_to_json(rep).dump() << "\n";
            std::cerr << "seed " << seed << ": min margin " << rep.ascent_margin
                      << (rep.counterexample_candidate ? " COUNTEREXAMPLE CANDIDATE"
                                                       : "")
                      << "\n";
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Pythagorean block decompositions, operator inequalities and witness "
        "search for partitioned matrices.\n"
        "Exit codes: 0 ok, 1 input/schema error, 2 incompatible partition, "
        "3 search budget exhausted, 4 numerical check failed."};
    app.require_subcommand(1);

    // Reserved: caps worker pools once parallel pipelines land; accepted and
    // validated so scripts can set it today.
    if (const char* threads = std::getenv("BLOCKPYTHAG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(threads, &end, 10);
        if (end == threads || *end != '\0' || v < 1)
            diag("ignoring invalid BLOCKPYTHAG_THREADS value");
    }

    int rc = kOk;

    DecomposeCfg dec;
    auto* cdec = app.add_subcommand(
        "decompose", "Write a Pythagorean decomposition certificate for a tiling");
    cdec->add_option("--matrix", dec.matrix, "host matrix JSON file")->required();
    cdec->add_option("--partition", dec.partition, "partition JSON file")->required();
    cdec->add_option("--out", dec.out, "certificate output path")->required();
    cdec->add_flag("--four", dec.four,
                   "use the four-block analysis instead of the compatible route");
    cdec->add_option("--tol", dec.tol,
                     "relative residual bound, scaled by 1 + ||A||_F^2");
    cdec->callback([&] { rc = guarded([&] { return cmd_decompose(dec); }); });

    VerifyCfg ver;
    auto* cver = app.add_subcommand(
        "verify", "Run singular-value / Schatten / trace inequality suites");
    cver->add_option("--matrix", ver.matrix, "host matrix JSON file")->required();
    cver->add_option("--partition", ver.partition, "partition JSON file")->required();
    cver->add_option("--suite", ver.suite, "sing, schatten, trace or all")
        ->check(CLI::IsMember({"sing", "schatten", "trace", "all"}));
    cver->add_option("--q", ver.q, "exponent override for schatten/trace suites");
    cver->add_option("--seed", ver.seed, "seed for randomized index draws");
    cver->callback([&] { rc = guarded([&] { return cmd_verify(ver); }); });

    CompressCfg cmp;
    auto* ccmp = app.add_subcommand(
        "compress", "Hyperplane compression with interlacing and drop bounds");
    ccmp->set_help_flag("--help", "print help");  // frees -h for the vector option
    ccmp->add_option("--matrix", cmp.matrix, "square matrix JSON file")->required();
    ccmp->add_option("--h", cmp.hvec, "unit column vector JSON file")->required();
    ccmp->add_flag("--normal", cmp.normal,
                   "assert the matrix is normal and check the tighter bound");
    ccmp->callback([&] { rc = guarded([&] { return cmd_compress(cmp); }); });

    FunctionalCfg fun;
    auto* cfun = app.add_subcommand(
        "functional", "Functional-calculus certificates over a tiling");
    cfun->add_option("--matrix", fun.matrix, "host matrix JSON file")->required();
    cfun->add_option("--partition", fun.partition, "partition JSON file")->required();
    auto* stmt = cfun->add_option_group("statement", "exactly one statement to certify");
    stmt->add_option("--psi", fun.psi,
                     "convex direction, e.g. pow:p=3 (psi(sqrt t) convex, psi(0)=0)");
    stmt->add_option("--phi", fun.phi,
                     "concave direction, e.g. pow:p=1 or affine:a=1,b=1");
    stmt->add_option("--p", fun.p, "four-block power inequality exponent");
    stmt->require_option(1);
    cfun->add_option("--seed", fun.seed, "seed for witness-search restarts");
    cfun->add_option("--max-iters", fun.max_iters, "search iteration budget");
    cfun->add_option("--restarts", fun.restarts, "search restart budget");
    cfun->add_option("--out", fun.out, "also write the certificate to this path");
    cfun->callback([&] { rc = guarded([&] { return cmd_functional(fun); }); });

    std::string manifest;
    auto* csea = app.add_subcommand(
        "search", "Run a feasibility/scan experiment manifest, one JSON line per seed");
    csea->add_option("--manifest", manifest, "experiment manifest JSON file")->required();
    csea->callback([&] { rc = guarded([&] { return cmd_search(manifest); }); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }
    return rc;
}
