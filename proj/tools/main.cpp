// Command-line front end: analyze a local connection, emit a Levelt normal
// form from a datum, decide equivalence of two data, or analyze a global
// Fuchsian system. All machine output is deterministic JSON.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "logconn/logconn.hpp"

namespace {

using logconn::ordered_json;

int classify_exit(const std::exception& e) {
    if (dynamic_cast<const logconn::ParseError*>(&e)) return 1;
    if (dynamic_cast<const logconn::ClusterAmbiguity*>(&e) ||
        dynamic_cast<const logconn::StepFailure*>(&e) ||
        dynamic_cast<const logconn::TruncationFailure*>(&e) ||
        dynamic_cast<const logconn::NonFinite*>(&e))
        return 3;  // numerical refusal: cannot decide at this tolerance
    return 2;      // structural/validation failure
}

const char* exit_label(int code) {
    switch (code) {
        case 1: return "parse error";
        case 2: return "validation failure";
        case 3: return "numerical refusal";
        default: return "error";
    }
}

template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        const int code = classify_exit(e);
        std::cerr << "error (" << exit_label(code) << "): " << e.what() << "\n";
        return code;
    }
}

void print_matrix(std::ostream& os, const logconn::CMatrix& M, const std::string& indent) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        os << indent;
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            const logconn::complexd v = M(r, c);
            os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
            if (c + 1 < M.cols()) os << "  ";
        }
        os << "\n";
    }
}

struct CommonOpts {
    double rtol = logconn::default_rtol;
    double tol = logconn::default_tol;
    int degree = 25;
    int trials = 64;
    unsigned long seed = 0;
    bool json = false;
};

int run_analyze(const std::string& file, const CommonOpts& opt) {
    const auto t_start = std::chrono::steady_clock::now();
    const ordered_json input = logconn::parse_file(file);
    const logconn::PolyConnection conn = logconn::connection_from_json(input);

    const logconn::CMatrix A0 = logconn::residue(conn);
    const logconn::AdditiveJC jc = logconn::additive_jc(A0, opt.tol);
    const logconn::ResonanceData res = logconn::resonance_basis(jc.S, opt.tol);
    const logconn::CMatrix M = logconn::monodromy(conn, opt.rtol);
    const double det_residual =
        std::abs(M.determinant() - std::exp(logconn::two_pi_i * A0.trace()));
    const logconn::LinearizabilityResult lin = logconn::linearizability(conn, opt.rtol);
    const logconn::MonodromyDatum datum = logconn::functor_L(conn, opt.rtol, opt.degree);
    const double vtol =
        std::max(opt.tol, logconn::monodromy_cluster_tol(conn.n, std::min(opt.rtol, 1e-12)));
    const logconn::ValidationReport val = logconn::validate_datum(datum, vtol);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);

    if (opt.json) {
        ordered_json out;
        out["input"] = input;
        out["tolerances"] = {{"rtol", opt.rtol}, {"tol", opt.tol}, {"degree", opt.degree},
                             {"datum_tol", vtol}};
        out["residue"] = logconn::matrix_to_json(A0);
        out["residue_semisimple"] = logconn::matrix_to_json(jc.S);
        out["residue_nilpotent"] = logconn::matrix_to_json(jc.N);
        out["resonant"] = res.resonant;
        out["u_N_dimension"] = res.algebra.basis.size();
        out["monodromy"] = logconn::matrix_to_json(M);
        out["monodromy_det_residual"] = det_residual;
        out["linearizable"] = lin.linearizable;
        if (lin.linearizable)
            out["linearization_witness_residual"] = lin.conjugacy.witness_residual;
        else
            out["linearizability_reason"] = lin.conjugacy.reason;
        out["datum"] = logconn::datum_to_json(datum);
        out["validation"] = {{"pass", val.pass},
                             {"weight_support_residual", val.weight_support_residual},
                             {"chi_residual", val.chi_residual},
                             {"semisimple_residual", val.semisimple_residual}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "connection: n = " << conn.n << ", degree " << conn.degree() << "\n";
        std::cout << "residue A_0 (tol " << opt.tol << "):\n";
        print_matrix(std::cout, A0, "  ");
        std::cout << "resonant: " << (res.resonant ? "yes" : "no")
                  << "  (dim u_N(S) = " << res.algebra.basis.size() << ")\n";
        std::cout << "monodromy (rtol " << opt.rtol << "):\n";
        print_matrix(std::cout, M, "  ");
        std::cout << "det identity residual: " << det_residual << "\n";
        std::cout << "linearizable: " << (lin.linearizable ? "yes" : "no");
        if (!lin.linearizable) std::cout << "  (" << lin.conjugacy.reason << ")";
        std::cout << "\n";
        std::cout << "datum frame h (strict linearization at z = 1):\n";
        print_matrix(std::cout, datum.h, "  ");
        std::cout << "validation (tol " << vtol << "): " << (val.pass ? "pass" : "FAIL")
                  << "  residuals: support " << val.weight_support_residual << ", chi "
                  << val.chi_residual << ", semisimple " << val.semisimple_residual << "\n";
        std::cout << "elapsed: " << elapsed.count() << " s\n";
    }
    return val.pass ? 0 : 2;
}

int run_normal_form(const std::string& file, const std::string& out_path,
                    const CommonOpts& opt) {
    const ordered_json input = logconn::parse_file(file);
    const logconn::MonodromyDatum d = logconn::datum_from_json(input);
    const logconn::ValidationReport val = logconn::validate_datum(d, opt.tol);
    if (!val.pass) {
        std::cerr << "datum fails validation (tol " << opt.tol << "):\n"
                  << "  weight support residual: " << val.weight_support_residual << "\n"
                  << "  chi residual:            " << val.chi_residual << "\n"
                  << "  semisimple residual:     " << val.semisimple_residual << "\n";
        return 2;
    }
    const logconn::PolyConnection conn = logconn::functor_R(d, opt.tol);
    const ordered_json out = logconn::connection_to_json(conn);
    if (out_path.empty())
        std::cout << out.dump(2) << "\n";
    else
        logconn::write_json_file(out, out_path);
    return 0;
}

int run_equiv(const std::string& f1, const std::string& f2, const CommonOpts& opt) {
    const logconn::MonodromyDatum d1 = logconn::datum_from_json(logconn::parse_file(f1));
    const logconn::MonodromyDatum d2 = logconn::datum_from_json(logconn::parse_file(f2));
    const logconn::EquivalenceResult r =
        logconn::equivalent(d1, d2, opt.trials, opt.seed, opt.tol);
    if (opt.json) {
        ordered_json out;
        out["verdict"] = r.verdict == logconn::EquivVerdict::equivalent ? "equivalent"
                         : r.verdict == logconn::EquivVerdict::inequivalent_certified
                             ? "inequivalent-certified"
                             : "undecided";
        if (r.verdict == logconn::EquivVerdict::equivalent) {
            out["witness"] = logconn::matrix_to_json(r.witness);
            out["residual"] = r.residual;
        } else {
            out["reason"] = r.reason;
        }
        std::cout << out.dump(2) << "\n";
    } else {
        switch (r.verdict) {
            case logconn::EquivVerdict::equivalent:
                std::cout << "equivalent (residual " << r.residual << "), witness:\n";
                print_matrix(std::cout, r.witness, "  ");
                break;
            case logconn::EquivVerdict::inequivalent_certified:
                std::cout << "inequivalent-certified: " << r.reason << "\n";
                break;
            case logconn::EquivVerdict::undecided:
                std::cout << "undecided: " << r.reason << "\n";
                break;
        }
    }
    switch (r.verdict) {
        case logconn::EquivVerdict::equivalent: return 0;
        case logconn::EquivVerdict::inequivalent_certified: return 4;
        default: return 5;
    }
}

void emit_loop_csv(const logconn::FuchsianSystem& sys, const logconn::GlobalMonodromy& gm,
                   const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw logconn::Error("cannot write csv: " + path);
    const int samples = 64;
    for (size_t k = 0; k < gm.gens.loops.size(); ++k) {
        const logconn::PathSpec& loop = gm.gens.loops[k];
        out << "# loop " << k << " (pole index " << gm.gens.order[k] << ")\n";
        out << "theta";
        for (Eigen::Index r = 0; r < sys.n(); ++r)
            for (Eigen::Index c = 0; c < sys.n(); ++c)
                out << ",re_" << r << "_" << c << ",im_" << r << "_" << c;
        out << "\n";
        logconn::CMatrix F = logconn::cidentity(sys.n());
        for (int s = 0; s <= samples; ++s) {
            if (s > 0) {
                logconn::PathSpec arc = loop;
                arc.turns = 1.0 / samples;
                arc.start_angle = loop.start_angle + 2.0 * logconn::pi * (s - 1) / samples;
                F = logconn::detail::fuchsian_transport(sys, arc, logconn::default_rtol) * F;
            }
            out << 2.0 * logconn::pi * s / samples;
            for (Eigen::Index r = 0; r < sys.n(); ++r)
                for (Eigen::Index c = 0; c < sys.n(); ++c)
                    out << "," << F(r, c).real() << "," << F(r, c).imag();
            out << "\n";
        }
    }
}

int run_global(const std::string& file, const std::string& csv_path, const CommonOpts& opt) {
    const ordered_json input = logconn::parse_file(file);
    const logconn::FuchsianSystem sys = logconn::system_from_json(input);
    const logconn::GlobalReport rep = logconn::assemble_global_datum(sys, opt.rtol, opt.tol);
    if (!csv_path.empty()) emit_loop_csv(sys, rep.monodromy, csv_path);

    bool all_ok = true;
    for (const auto& pr : rep.poles) all_ok = all_ok && !pr.search_failed;

    if (opt.json) {
        ordered_json out;
        out["input"] = input;
        out["tolerances"] = {{"rtol", opt.rtol}, {"tol", opt.tol}, {"datum_tol", rep.tol}};
        out["basepoint"] = logconn::detail::complex_to_json(sys.basepoint);
        out["product_residual"] = rep.monodromy.product_residual;
        out["residue_at_infinity"] = logconn::matrix_to_json(rep.A_infinity);
        out["monodromy_at_infinity"] = logconn::matrix_to_json(rep.monodromy.M_inf);
        ordered_json poles = ordered_json::array();
        for (const auto& pr : rep.poles) {
            ordered_json p;
            p["pole_index"] = pr.pole_index;
            p["pole"] = logconn::detail::complex_to_json(pr.pole);
            p["monodromy"] = logconn::matrix_to_json(pr.M);
            p["charpoly_residual"] = pr.charpoly_residual;
            p["search_failed"] = pr.search_failed;
            if (pr.search_failed) {
                p["message"] = pr.message;
            } else {
                p["h"] = logconn::matrix_to_json(pr.h);
                p["validation"] = {
                    {"pass", pr.validation.pass},
                    {"weight_support_residual", pr.validation.weight_support_residual},
                    {"chi_residual", pr.validation.chi_residual},
                    {"semisimple_residual", pr.validation.semisimple_residual}};
            }
            poles.push_back(std::move(p));
        }
        out["poles"] = std::move(poles);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "system: n = " << sys.n() << ", " << sys.poles.size()
                  << " poles, basepoint " << sys.basepoint.real() << "+"
                  << sys.basepoint.imag() << "i\n";
        std::cout << "product relation |M_inf M_m ... M_1 - I| = "
                  << rep.monodromy.product_residual << "\n";
        for (const auto& pr : rep.poles) {
            std::cout << "pole " << pr.pole_index << " at " << pr.pole.real() << "+"
                      << pr.pole.imag() << "i: charpoly residual " << pr.charpoly_residual;
            if (pr.search_failed)
                std::cout << "  [assembly failed: " << pr.message << "]";
            else
                std::cout << "  validation " << (pr.validation.pass ? "pass" : "FAIL")
                          << " (chi residual " << pr.validation.chi_residual << ")";
            std::cout << "\n";
        }
    }
    return all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis of logarithmic connections and their monodromy data"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string file, file2, out_path, csv_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--rtol", opt.rtol, "ODE relative tolerance");
        sub->add_option("--tol", opt.tol, "algebraic clustering tolerance");
        sub->add_option("--seed", opt.seed, "RNG seed");
        sub->add_option("--trials", opt.trials, "randomized trial count");
        sub->add_option("--degree", opt.degree, "series truncation order");
        sub->add_flag("--json", opt.json, "machine-readable JSON output");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "analyze a local connection file");
    analyze->add_option("file", file, "connection JSON file")->required();
    add_common(analyze);

    CLI::App* nf = app.add_subcommand("normal-form", "Levelt normal form from a datum file");
    nf->add_option("file", file, "datum JSON file")->required();
    nf->add_option("-o,--output", out_path, "output connection file (default stdout)");
    add_common(nf);

    CLI::App* eq = app.add_subcommand("equiv", "decide equivalence of two datum files");
    eq->add_option("file1", file, "first datum JSON file")->required();
    eq->add_option("file2", file2, "second datum JSON file")->required();
    add_common(eq);

    CLI::App* gl = app.add_subcommand("global", "analyze a global Fuchsian system file");
    gl->add_option("file", file, "system JSON file")->required();
    gl->add_option("--csv", csv_path, "emit fundamental-solution samples along loops");
    add_common(gl);

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(analyze)) return guarded([&] { return run_analyze(file, opt); });
    if (app.got_subcommand(nf))
        return guarded([&] { return run_normal_form(file, out_path, opt); });
    if (app.got_subcommand(eq)) return guarded([&] { return run_equiv(file, file2, opt); });
    if (app.got_subcommand(gl)) return guarded([&] { return run_global(file, csv_path, opt); });
    return 1;
}
