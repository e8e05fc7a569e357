// Command-line front end: every operation behind stable JSON input/output.
//
// Exit codes: 0 computed, 1 negative mathematical verdict (unstable,
// condition fails, degenerate, ...), 2 input/schema error, 3 numerical
// inconclusiveness (no convergence at the requested tolerance).

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bidisk/generators.hpp"
#include "bidisk/gwcd.hpp"
#include "bidisk/json_io.hpp"
#include "bidisk/kernels.hpp"
#include "bidisk/measures.hpp"
#include "bidisk/stability.hpp"

namespace {

using namespace bidisk;
namespace io = bidisk::io;
using io::json;
using io::ojson;

struct CommonOpts {
    std::string input = "-";
    std::string output = "-";
    std::vector<int> level;
    double tol = 1e-8;
    double quad_tol = 1e-12;
    int grid = 64;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_level) {
    cmd->add_option("-i,--input", opts.input, "input JSON file, or - for stdin");
    cmd->add_option("-o,--output", opts.output, "output JSON file, or - for stdout");
    if (with_level)
        cmd->add_option("--level", opts.level, "level n,m")->delimiter(',')->expected(2);
    cmd->add_option("--tol", opts.tol, "verdict tolerance (default 1e-8)");
    cmd->add_option("--quad-tol", opts.quad_tol, "quadrature tolerance (default 1e-12)");
    cmd->add_option("--grid", opts.grid, "quadrature starting grid (default 64)");
}

json read_input(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        text = buf.str();
    } else {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open input file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON input: ") + e.what());
    }
}

void write_output(const std::string& path, const ojson& value) {
    const std::string text = io::dump(value);
    if (path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(path);
        if (!out) throw InputError("cannot open output file: " + path);
        out << text;
    }
}

QuadratureOptions<double> quad_opts(const CommonOpts& opts) {
    QuadratureOptions<double> q;
    q.tol = opts.quad_tol;
    q.initial_grid = opts.grid;
    return q;
}

std::pair<int, int> require_level(const CommonOpts& opts) {
    if (opts.level.size() != 2) throw InputError("this command requires --level n,m");
    if (opts.level[0] < 0 || opts.level[1] < 0) throw InputError("level must be nonnegative");
    return {opts.level[0], opts.level[1]};
}

ojson complex_pair(std::complex<double> v) { return ojson::array({v.real(), v.imag()}); }

ojson verdict_json(const StabilityVerdict<double>& v) {
    ojson out;
    out["stable"] = v.stable;
    if (v.witness) {
        out["witness"] = ojson::array(
            {complex_pair(v.witness->first), complex_pair(v.witness->second)});
    }
    out["min_modulus"] = v.min_modulus;
    out["method"] = v.method == StabilityMethod::both ? "both" : "sweep";
    if (v.constants) {
        out["thm11_c"] = v.constants->thm_c;
        out["sos_c"] = v.constants->sos_c;
    }
    if (v.certificate) {
        out["certificate"] = io::to_json(*v.certificate);
        out["certificate_residual"] = v.certificate_residual;
    }
    return out;
}

ojson basis_json(const std::vector<BiPoly<double>>& polys) {
    ojson arr = ojson::array();
    for (const auto& p : polys) arr.push_back(io::to_json(p));
    return arr;
}

SubspaceSpec spec_from_opts(const std::string& subspace_name_opt, const std::string& spec_inline,
                            int n, int m) {
    if (!spec_inline.empty()) {
        json parsed;
        try {
            parsed = json::parse(spec_inline);
        } catch (const json::parse_error& e) {
            throw InputError(std::string("invalid --spec JSON: ") + e.what());
        }
        return io::subspace_spec_from_json(parsed);
    }
    return resolve(parse_subspace_name(subspace_name_opt), n, m);
}

SosCertificate<double> certificate_from_input(const json& j) {
    // accept both a bare certificate object and the wrapped form emitted by
    // the stable command
    if (j.is_object() && j.contains("certificate"))
        return io::certificate_from_json(j["certificate"]);
    return io::certificate_from_json(j);
}

int run(int argc, char** argv) {
    CLI::App app{"orthogonal polynomials, reproducing kernels, and stability "
                 "certificates on the bidisk"};
    app.require_subcommand(1);
    app.footer(R"(JSON schemas (complex numbers are [re, im]; floats carry 17 significant digits):
  polynomial   {"n":int, "m":int, "coeffs":[[re,im], ...]}
               (n+1)(m+1) entries in j-major order: index(j,k) = j*(m+1)+k
  kernel       {"n":int, "m":int, "coeffs":[[re,im], ...]}
               ((n+1)(m+1))^2 entries in (j,k,l,s) lexicographic j-major order
  measure      {"kind":"lebesgue"}
               {"kind":"bs", "q":polynomial, "c":real?}
               {"kind":"grid", "N":int, "values":[real, ...]}  (theta-major)
               {"kind":"moments", "Jmax":int, "Kmax":int,
                "entries":[[re,im], ...]}  ((j,k) lexicographic from (-Jmax,-Kmax))
  spec         {"span":[[j,k], ...], "perp":[[j,k], ...]}  with perp inside span
  certificate  {"level":[n,m], "c":real, "target":polynomial,
                "A":[polynomial, ...], "B":[...], "C":[...]?}

Exit codes: 0 computed, 1 negative mathematical verdict, 2 input error,
3 numerically inconclusive at the requested tolerance.)");

    int exit_verdict = 0;

    // ---- measure-driven commands -------------------------------------
    CommonOpts mo;
    auto* cmd_moments = app.add_subcommand("moments", "Fourier moments of a measure");
    add_common(cmd_moments, mo, true);
    cmd_moments->callback([&] {
        auto [jmax, kmax] = require_level(mo);
        auto measure = io::measure_from_json(read_input(mo.input));
        write_output(mo.output, io::to_json(moments(measure, jmax, kmax, quad_opts(mo))));
    });

    CommonOpts go;
    auto* cmd_gram = app.add_subcommand("gram", "full-box Gram matrix at a level");
    add_common(cmd_gram, go, true);
    cmd_gram->callback([&] {
        auto [n, m] = require_level(go);
        auto measure = io::measure_from_json(read_input(go.input));
        auto table = moments(measure, n, m, quad_opts(go));
        auto g = gram(table, IndexSet::box(n, m).elems());
        ojson out;
        ojson ordering = ojson::array(), entries = ojson::array();
        for (const auto& [j, k] : g.ordering) ordering.push_back(ojson::array({j, k}));
        for (int r = 0; r < g.entries.rows(); ++r)
            for (int c = 0; c < g.entries.cols(); ++c)
                entries.push_back(complex_pair(g.entries(r, c)));
        out["ordering"] = std::move(ordering);
        out["entries"] = std::move(entries);
        write_output(go.output, out);
    });

    CommonOpts no;
    auto* cmd_nd = app.add_subcommand("nondegenerate", "positive definiteness of the box Gram");
    add_common(cmd_nd, no, true);
    cmd_nd->callback([&] {
        auto [n, m] = require_level(no);
        auto measure = io::measure_from_json(read_input(no.input));
        auto rep = is_nondegenerate(measure, n, m, 1e-10, quad_opts(no));
        ojson out;
        out["verdict"] = rep.verdict;
        out["min_pivot"] = rep.min_pivot;
        write_output(no.output, out);
        if (!rep.verdict) exit_verdict = 1;
    });

    CommonOpts ko;
    std::string k_subspace = "box", k_spec;
    auto* cmd_kernel = app.add_subcommand("kernel", "reproducing kernel of a subspace");
    add_common(cmd_kernel, ko, true);
    cmd_kernel->add_option("--subspace", k_subspace,
                           "named subspace: box llperp urperp rperpdn rperpup uperplt "
                           "uperprt urperplt llperprt dperprt sm");
    cmd_kernel->add_option("--spec", k_spec, "inline SubspaceSpec JSON overriding --subspace");
    cmd_kernel->callback([&] {
        auto [n, m] = require_level(ko);
        auto measure = io::measure_from_json(read_input(ko.input));
        auto spec = spec_from_opts(k_subspace, k_spec, n, m);
        auto table = moments(measure, n, m, quad_opts(ko));
        write_output(ko.output, io::to_json(kernel_of_subspace(table, spec, n, m)));
    });

    CommonOpts bo;
    std::string b_subspace = "box", b_spec;
    auto* cmd_basis = app.add_subcommand("basis", "orthonormal basis of a subspace");
    add_common(cmd_basis, bo, true);
    cmd_basis->add_option("--subspace", b_subspace, "named subspace (see kernel)");
    cmd_basis->add_option("--spec", b_spec, "inline SubspaceSpec JSON overriding --subspace");
    cmd_basis->callback([&] {
        auto [n, m] = require_level(bo);
        auto measure = io::measure_from_json(read_input(bo.input));
        auto spec = spec_from_opts(b_subspace, b_spec, n, m);
        auto table = moments(measure, n, m, quad_opts(bo));
        ojson out;
        out["polys"] = basis_json(orthonormal_basis(table, spec).polys);
        write_output(bo.output, out);
    });

    CommonOpts oo;
    auto* cmd_opoly = app.add_subcommand("opoly", "distinguished orthogonal polynomial");
    add_common(cmd_opoly, oo, true);
    cmd_opoly->callback([&] {
        auto [n, m] = require_level(oo);
        auto measure = io::measure_from_json(read_input(oo.input));
        auto p = gw_polynomial(measure, n, m, quad_opts(oo));
        ojson out;
        out["p"] = io::to_json(p.poly);
        out["phase_fallback"] = p.phase_fallback;
        write_output(oo.output, out);
    });

    CommonOpts co;
    auto* cmd_gw = app.add_subcommand("check-gw", "automatic orthogonality condition");
    add_common(cmd_gw, co, true);
    cmd_gw->callback([&] {
        auto [n, m] = require_level(co);
        auto measure = io::measure_from_json(read_input(co.input));
        auto gw = check_gw(measure, n, m, co.tol, quad_opts(co));
        ojson out;
        out["holds"] = gw.holds;
        out["deviation"] = gw.deviation;
        write_output(co.output, out);
        if (!gw.holds) exit_verdict = 1;
    });

    CommonOpts io_;
    auto* cmd_identity = app.add_subcommand("identity", "fundamental kernel identity report");
    add_common(cmd_identity, io_, true);
    cmd_identity->callback([&] {
        auto [n, m] = require_level(io_);
        auto measure = io::measure_from_json(read_input(io_.input));
        auto rep = fundamental_identity(measure, n, m, quad_opts(io_));
        ojson out;
        out["p"] = io::to_json(rep.p.poly);
        out["lhs"] = io::to_json(rep.lhs);
        ojson parts = ojson::array();
        for (const auto& part : rep.rhs_parts) {
            ojson pj;
            pj["name"] = part.name;
            pj["multiplier"] = mul_tag_name(part.tag);
            pj["kernel"] = io::to_json(part.kernel);
            parts.push_back(std::move(pj));
        }
        out["rhs_parts"] = std::move(parts);
        out["residual"] = rep.residual;
        out["bracket_sup"] = rep.bracket_sup;
        write_output(io_.output, out);
    });

    CommonOpts cdo;
    auto* cmd_cd = app.add_subcommand("cd", "Christoffel-Darboux decomposition");
    add_common(cmd_cd, cdo, true);
    cmd_cd->callback([&] {
        auto [n, m] = require_level(cdo);
        auto measure = io::measure_from_json(read_input(cdo.input));
        auto cd = cd_decompose(measure, n, m, cdo.tol, quad_opts(cdo));
        ojson out;
        out["p"] = io::to_json(cd.p.poly);
        ojson line1, line2;
        line1["A"] = basis_json(cd.a_down);
        line1["B"] = basis_json(cd.b_right);
        line2["A"] = basis_json(cd.a_up);
        line2["B"] = basis_json(cd.b_left);
        out["line1"] = std::move(line1);
        out["line2"] = std::move(line2);
        out["residual_line1"] = cd.residual_line1;
        out["residual_line2"] = cd.residual_line2;
        out["cross_residual"] = cd.cross_residual;
        write_output(cdo.output, out);
    });

    CommonOpts rto;
    auto* cmd_rt = app.add_subcommand("roundtrip", "approximation-theorem round trip");
    add_common(cmd_rt, rto, true);
    cmd_rt->callback([&] {
        auto [n, m] = require_level(rto);
        auto measure = io::measure_from_json(read_input(rto.input));
        auto rt = bs_roundtrip(measure, n, m, rto.tol, quad_opts(rto));
        ojson out;
        out["gw_holds"] = rt.gw_holds;
        out["gw_deviation"] = rt.gw_deviation;
        out["p_stable"] = rt.p_stable;
        out["kernel_match"] = rt.kernel_match;
        out["p"] = io::to_json(rt.p.poly);
        write_output(rto.output, out);
        if (!rt.gw_holds || !rt.p_stable || !(rt.kernel_match < rto.tol)) exit_verdict = 1;
    });

    // ---- polynomial-driven commands ----------------------------------
    CommonOpts cwo;
    double cw_r = 1.0 - std::pow(2.0, -10);
    auto* cmd_cw = app.add_subcommand("cole-wermer", "two-family sum-of-squares decomposition");
    add_common(cmd_cw, cwo, true);
    cmd_cw->add_option("--r", cw_r, "dilation radius in (0,1] (default 1 - 2^-10)");
    cmd_cw->callback([&] {
        auto p = io::bipoly_from_json(read_input(cwo.input));
        int n = p.deg_z(), m = p.deg_w();
        if (cwo.level.size() == 2) {
            n = cwo.level[0];
            m = cwo.level[1];
        }
        auto cw = cole_wermer(p, n, m, cw_r, quad_opts(cwo));
        ojson out = io::to_json(cw.certificate);
        out["residual"] = cw.residual;
        out["p_distance"] = cw.p_distance;
        out["r"] = cw.r;
        write_output(cwo.output, out);
    });

    CommonOpts gpo;
    auto* cmd_gpoly = app.add_subcommand("gpoly", "exact quotient by (1 - w.omega~)");
    add_common(cmd_gpoly, gpo, false);
    cmd_gpoly->callback([&] {
        auto q = io::bipoly_from_json(read_input(gpo.input));
        auto g = g_polynomial_check(q, 1e-10);
        ojson out;
        out["G"] = io::to_json(g.g);
        out["w_degree"] = g.w_degree;
        out["residual"] = g.residual;
        write_output(gpo.output, out);
    });

    CommonOpts sto;
    auto* cmd_stable = app.add_subcommand("stable", "closed-bidisk stability verdict");
    add_common(cmd_stable, sto, false);
    cmd_stable->callback([&] {
        auto q = io::bipoly_from_json(read_input(sto.input));
        auto verdict = is_stable(q, SweepGrid{}, quad_opts(sto), sto.tol);
        write_output(sto.output, verdict_json(verdict));
        if (!verdict.stable) exit_verdict = 1;
    });

    CommonOpts cno;
    auto* cmd_const = app.add_subcommand("constant", "sharp stability constants");
    add_common(cmd_const, cno, false);
    cmd_const->callback([&] {
        auto q = io::bipoly_from_json(read_input(cno.input));
        auto c = stability_constant(q, quad_opts(cno));
        ojson out;
        out["thm11_c"] = c.thm_c;
        out["sos_c"] = c.sos_c;
        write_output(cno.output, out);
    });

    CommonOpts ceo;
    auto* cmd_certify = app.add_subcommand("certify", "three-family stability certificate");
    add_common(cmd_certify, ceo, false);
    cmd_certify->callback([&] {
        auto q = io::bipoly_from_json(read_input(ceo.input));
        auto res = stability_certificate(q, quad_opts(ceo));
        ojson out = io::to_json(res.certificate);
        out["residual"] = res.residual;
        out["thm11_c"] = res.constants.thm_c;
        out["sos_c"] = res.constants.sos_c;
        write_output(ceo.output, out);
    });

    CommonOpts vo;
    int v_samples = 4096;
    auto* cmd_verify = app.add_subcommand("verify", "independent certificate verification");
    add_common(cmd_verify, vo, false);
    cmd_verify->add_option("--samples", v_samples, "bidisk sample count (default 4096)");
    cmd_verify->add_option("--seed", vo.seed, "sample stream offset");
    cmd_verify->callback([&] {
        auto cert = certificate_from_input(read_input(vo.input));
        auto rep = verify_certificate(cert, v_samples, vo.seed);
        const double scale = sup_coeff(cert.target);
        const bool pass =
            rep.coeff_residual < vo.tol && rep.min_margin >= -vo.tol * scale * scale;
        ojson out;
        out["coeff_residual"] = rep.coeff_residual;
        out["min_margin"] = rep.min_margin;
        out["pass"] = pass;
        write_output(vo.output, out);
        if (!pass) exit_verdict = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        ojson err;
        err["error"]["code"] = e.code();
        err["error"]["message"] = e.what();
        std::cout << io::dump(err);
        switch (e.error_class()) {
            case ErrorClass::verdict: return 1;
            case ErrorClass::input: return 2;
            case ErrorClass::numeric: return 3;
        }
        return 2;
    } catch (const std::exception& e) {
        ojson err;
        err["error"]["code"] = "Internal";
        err["error"]["message"] = e.what();
        std::cout << io::dump(err);
        return 2;
    }
    return exit_verdict;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
