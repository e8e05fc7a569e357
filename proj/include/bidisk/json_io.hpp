#pragma once

#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "bidisk/bipoly.hpp"
#include "bidisk/certificate.hpp"
#include "bidisk/errors.hpp"
#include "bidisk/kernelpoly.hpp"
#include "bidisk/kernels.hpp"
#include "bidisk/measures.hpp"

namespace bidisk::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// serialization (ordered objects + 17 significant digit floats, so emitted
// bytes are deterministic and doubles round-trip losslessly)

inline void dump_to(const ojson& v, std::string& out) {
    switch (v.type()) {
        case ojson::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += ojson(it.key()).dump();
                out += ':';
                dump_to(it.value(), out);
            }
            out += '}';
            break;
        }
        case ojson::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& e : v) {
                if (!first) out += ',';
                first = false;
                dump_to(e, out);
            }
            out += ']';
            break;
        }
        case ojson::value_t::number_float: {
            const double x = v.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                break;
            }
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out += buf;
            break;
        }
        default:
            out += v.dump();
    }
}

inline std::string dump(const ojson& v) {
    std::string out;
    dump_to(v, out);
    out += '\n';
    return out;
}

inline ojson complex_json(Cplx v) { return ojson::array({v.real(), v.imag()}); }

inline Cplx complex_from(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("complex values are encoded as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

// ---------------------------------------------------------------------------
// BiPoly: {"n": int, "m": int, "coeffs": [[re,im], ...]} in j-major order

inline ojson to_json(const BiPoly<double>& p) {
    ojson out;
    out["n"] = p.deg_z();
    out["m"] = p.deg_w();
    ojson coeffs = ojson::array();
    for (int j = 0; j <= p.deg_z(); ++j)
        for (int k = 0; k <= p.deg_w(); ++k) coeffs.push_back(complex_json(p.coeffs()(j, k)));
    out["coeffs"] = std::move(coeffs);
    return out;
}

inline BiPoly<double> bipoly_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("coeffs"))
        throw InputError("polynomial object needs fields n, m, coeffs");
    const int n = j["n"].get<int>(), m = j["m"].get<int>();
    if (n < 0 || m < 0) throw InputError("polynomial degrees must be nonnegative");
    const auto& coeffs = j["coeffs"];
    if (!coeffs.is_array() || coeffs.size() != static_cast<size_t>((n + 1) * (m + 1)))
        throw InputError("polynomial needs exactly (n+1)(m+1) coefficients");
    BiPoly<double> p(n, m);
    size_t idx = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= m; ++b) p.at(a, b) = complex_from(coeffs[idx++]);
    return p;
}

// ---------------------------------------------------------------------------
// KernelPoly: coeffs in (j,k,l,s) lexicographic j-major order

inline ojson to_json(const KernelPoly<double>& k) {
    ojson out;
    out["n"] = k.deg_z();
    out["m"] = k.deg_w();
    ojson coeffs = ojson::array();
    for (int j = 0; j <= k.deg_z(); ++j)
        for (int kk = 0; kk <= k.deg_w(); ++kk)
            for (int l = 0; l <= k.deg_z(); ++l)
                for (int s = 0; s <= k.deg_w(); ++s)
                    coeffs.push_back(complex_json(k.at(j, kk, l, s)));
    out["coeffs"] = std::move(coeffs);
    return out;
}

inline KernelPoly<double> kernelpoly_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("coeffs"))
        throw InputError("kernel object needs fields n, m, coeffs");
    const int n = j["n"].get<int>(), m = j["m"].get<int>();
    if (n < 0 || m < 0) throw InputError("kernel level must be nonnegative");
    const size_t side = static_cast<size_t>((n + 1) * (m + 1));
    const auto& coeffs = j["coeffs"];
    if (!coeffs.is_array() || coeffs.size() != side * side)
        throw InputError("kernel needs exactly ((n+1)(m+1))^2 coefficients");
    KernelPoly<double> k(n, m);
    size_t idx = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= m; ++b)
            for (int l = 0; l <= n; ++l)
                for (int s = 0; s <= m; ++s) k.at(a, b, l, s) = complex_from(coeffs[idx++]);
    return k;
}

// ---------------------------------------------------------------------------
// MomentTable: entries in (j,k) lexicographic order from (-Jmax,-Kmax)

inline ojson to_json(const MomentTable<double>& t) {
    ojson out;
    out["Jmax"] = t.jmax();
    out["Kmax"] = t.kmax();
    ojson entries = ojson::array();
    for (int j = -t.jmax(); j <= t.jmax(); ++j)
        for (int k = -t.kmax(); k <= t.kmax(); ++k) entries.push_back(complex_json(t.at(j, k)));
    out["entries"] = std::move(entries);
    return out;
}

inline MomentTable<double> moment_table_from_json(const json& j) {
    if (!j.is_object() || !j.contains("Jmax") || !j.contains("Kmax") || !j.contains("entries"))
        throw InputError("moment table needs fields Jmax, Kmax, entries");
    const int jmax = j["Jmax"].get<int>(), kmax = j["Kmax"].get<int>();
    if (jmax < 0 || kmax < 0) throw InputError("moment window must be nonnegative");
    const auto& entries = j["entries"];
    const size_t count = static_cast<size_t>(2 * jmax + 1) * (2 * kmax + 1);
    if (!entries.is_array() || entries.size() != count)
        throw InputError("moment table needs exactly (2Jmax+1)(2Kmax+1) entries");
    CoeffGrid<double> raw(2 * jmax + 1, 2 * kmax + 1);
    size_t idx = 0;
    for (int a = -jmax; a <= jmax; ++a)
        for (int b = -kmax; b <= kmax; ++b) raw(a + jmax, b + kmax) = complex_from(entries[idx++]);
    return MomentTable<double>::from_entries(jmax, kmax, std::move(raw));
}

// ---------------------------------------------------------------------------
// Measure: {"kind": "lebesgue" | "bs" | "grid" | "moments", ...}

inline ojson to_json(const Measure<double>& m) {
    ojson out;
    if (m.is_lebesgue()) {
        out["kind"] = "lebesgue";
    } else if (m.is_bernstein_szego()) {
        out["kind"] = "bs";
        out["q"] = to_json(m.as_bernstein_szego().q);
        if (m.as_bernstein_szego().c) out["c"] = *m.as_bernstein_szego().c;
    } else if (m.is_grid_density()) {
        out["kind"] = "grid";
        out["N"] = m.as_grid_density().grid_n;
        ojson values = ojson::array();
        for (double v : m.as_grid_density().values) values.push_back(v);
        out["values"] = std::move(values);
    } else {
        out["kind"] = "moments";
        out["moments"] = to_json(m.as_moments().table);
    }
    return out;
}

inline Measure<double> measure_from_json(const json& j) {
    if (!j.is_object()) throw InputError("measure must be a JSON object");
    // a bare moment table (as emitted by the moments command) is a measure
    if (!j.contains("kind") && j.contains("Jmax") && j.contains("Kmax"))
        return Measure<double>::from_moments(moment_table_from_json(j));
    if (!j.contains("kind")) throw InputError("measure object needs a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "lebesgue") return Measure<double>::lebesgue();
    if (kind == "bs") {
        if (!j.contains("q")) throw InputError("bs measure embeds a polynomial under q");
        std::optional<double> c;
        if (j.contains("c")) c = j["c"].get<double>();
        return Measure<double>::bernstein_szego(bipoly_from_json(j["q"]), c);
    }
    if (kind == "grid") {
        if (!j.contains("N") || !j.contains("values"))
            throw InputError("grid measure needs fields N and values");
        const int n = j["N"].get<int>();
        const auto& values = j["values"];
        if (!values.is_array()) throw InputError("grid values must be an array");
        std::vector<double> v;
        v.reserve(values.size());
        for (const auto& e : values) {
            if (!e.is_number()) throw InputError("grid values must be numbers");
            v.push_back(e.get<double>());
        }
        return Measure<double>::grid_density(n, std::move(v));
    }
    if (kind == "moments") {
        // accept either an embedded object or the table fields inline
        const json& t = j.contains("moments") ? j["moments"] : j;
        return Measure<double>::from_moments(moment_table_from_json(t));
    }
    throw InputError("unknown measure kind: " + kind);
}

// ---------------------------------------------------------------------------
// SubspaceSpec: {"span": [[j,k],...], "perp": [[j,k],...]}

inline ojson to_json(const SubspaceSpec& s) {
    ojson out;
    ojson span = ojson::array(), perp = ojson::array();
    for (const auto& [j, k] : s.span.elems()) span.push_back(ojson::array({j, k}));
    for (const auto& [j, k] : s.perp.elems()) perp.push_back(ojson::array({j, k}));
    out["span"] = std::move(span);
    out["perp"] = std::move(perp);
    return out;
}

inline IndexSet index_set_from_json(const json& j) {
    if (!j.is_array()) throw InputError("index sets are arrays of [j,k] pairs");
    std::vector<Index2> elems;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw InputError("index entries are [j,k] pairs");
        elems.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return IndexSet(std::move(elems));
}

inline SubspaceSpec subspace_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("span"))
        throw InputError("subspace spec needs a span index set");
    SubspaceSpec out{index_set_from_json(j["span"]),
                     j.contains("perp") ? index_set_from_json(j["perp"]) : IndexSet{}};
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// SosCertificate

inline ojson to_json(const SosCertificate<double>& cert) {
    ojson out;
    out["level"] = ojson::array({cert.deg_z, cert.deg_w});
    out["c"] = cert.c;
    out["target"] = to_json(cert.target);
    ojson a = ojson::array(), b = ojson::array();
    for (const auto& p : cert.a_polys) a.push_back(to_json(p));
    for (const auto& p : cert.b_polys) b.push_back(to_json(p));
    out["A"] = std::move(a);
    out["B"] = std::move(b);
    if (cert.c_polys) {
        ojson c = ojson::array();
        for (const auto& p : *cert.c_polys) c.push_back(to_json(p));
        out["C"] = std::move(c);
    }
    return out;
}

inline SosCertificate<double> certificate_from_json(const json& j) {
    if (!j.is_object() || !j.contains("level") || !j.contains("c") || !j.contains("target") ||
        !j.contains("A") || !j.contains("B"))
        throw InputError("certificate needs fields level, c, target, A, B");
    SosCertificate<double> cert;
    cert.deg_z = j["level"][0].get<int>();
    cert.deg_w = j["level"][1].get<int>();
    cert.c = j["c"].get<double>();
    if (!(cert.c > 0)) throw InputError("certificate constant must be positive");
    cert.target = bipoly_from_json(j["target"]);
    for (const auto& e : j["A"]) cert.a_polys.push_back(bipoly_from_json(e));
    for (const auto& e : j["B"]) cert.b_polys.push_back(bipoly_from_json(e));
    if (j.contains("C")) {
        std::vector<BiPoly<double>> c;
        for (const auto& e : j["C"]) c.push_back(bipoly_from_json(e));
        cert.c_polys = std::move(c);
    }
    return cert;
}

} // namespace bidisk::io
