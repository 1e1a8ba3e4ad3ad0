#pragma once

// JSON form of counterexample records. Integers are written as decimal strings.

#include "hasse/pipeline.hpp"

#include <json.hpp>

#include <string>

namespace nlohmann {

template <>
struct adl_serializer<mpz_class> {
    static void to_json(json& j, const mpz_class& x) { j = x.get_str(); }
    static void from_json(const json& j, mpz_class& x) {
        if (j.is_number_integer()) {
            x = hasse::parse_int(std::to_string(j.get<long long>()));
        } else {
            x = hasse::parse_int(j.get<std::string>());
        }
    }
};

}  // namespace nlohmann

namespace hasse {

using nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(CertKind, {{CertKind::hensel_witness, "hensel_witness"},
                                        {CertKind::cubic_root_split, "cubic_root_split"},
                                        {CertKind::quadratic_split, "quadratic_split"},
                                        {CertKind::exhaustive_smooth_point, "exhaustive_smooth_point"},
                                        {CertKind::real_witness, "real_witness"}})

namespace detail {

template <class T>
json optional_json(const std::optional<T>& x) {
    return x ? json(*x) : json(nullptr);
}

template <class T>
void optional_from(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    } else {
        out.reset();
    }
}

}  // namespace detail

inline void to_json(json& j, const Provenance& p) {
    j = json{{"P", p.P}, {"iota", p.iota}, {"D", p.D}, {"pairs", p.pairs}, {"l", p.l},
             {"m", p.m}, {"L", p.L},       {"n", p.n}};
}

inline void from_json(const json& j, Provenance& p) {
    j.at("P").get_to(p.P);
    j.at("iota").get_to(p.iota);
    j.at("D").get_to(p.D);
    j.at("pairs").get_to(p.pairs);
    j.at("l").get_to(p.l);
    j.at("m").get_to(p.m);
    j.at("L").get_to(p.L);
    j.at("n").get_to(p.n);
}

inline void to_json(json& j, const TernaryForm& f) {
    json terms = json::array();
    for (const auto& t : f.terms) terms.push_back(json::array({t.i, t.j, t.k, t.coef.get_str()}));
    j = json{{"degree", f.degree}, {"terms", terms}, {"provenance", detail::optional_json(f.provenance)}};
}

inline void from_json(const json& j, TernaryForm& f) {
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
        terms.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(), t.at(3).get<Int>()});
    }
    f = make_form(j.at("degree").get<int>(), terms);
    detail::optional_from(j, "provenance", f.provenance);
}

inline void to_json(json& j, const ConditionItem& c) {
    j = json{{"index", c.index}, {"applicable", c.applicable}, {"pass", c.pass}, {"detail", c.detail}};
}

inline void from_json(const json& j, ConditionItem& c) {
    j.at("index").get_to(c.index);
    j.at("applicable").get_to(c.applicable);
    j.at("pass").get_to(c.pass);
    j.at("detail").get_to(c.detail);
}

inline void to_json(json& j, const ConditionReport& r) { j = json{{"items", r.items}, {"pass", r.pass}}; }

inline void from_json(const json& j, ConditionReport& r) {
    j.at("items").get_to(r.items);
    j.at("pass").get_to(r.pass);
}

inline void to_json(json& j, const LocalCertificate& c) {
    j = json{{"kind", c.kind}, {"l", c.l}};
    switch (c.kind) {
        case CertKind::hensel_witness:
        case CertKind::exhaustive_smooth_point:
            j["point"] = c.point;
            j["t"] = c.t;
            j["partial"] = c.partial;
            break;
        case CertKind::cubic_root_split:
            j["root"] = c.root;
            break;
        case CertKind::quadratic_split:
            j["root"] = c.root;
            j["pair_index"] = c.pair_index;
            break;
        case CertKind::real_witness:
            j["direction"] = c.direction;
            j["base"] = c.base;
            j["s_lo"] = c.s_lo;
            j["s_hi"] = c.s_hi;
            j["q"] = c.q;
            break;
    }
}

inline void from_json(const json& j, LocalCertificate& c) {
    c = LocalCertificate{};
    j.at("kind").get_to(c.kind);
    j.at("l").get_to(c.l);
    if (j.contains("point")) j.at("point").get_to(c.point);
    if (j.contains("t")) j.at("t").get_to(c.t);
    if (j.contains("partial")) j.at("partial").get_to(c.partial);
    if (j.contains("root")) j.at("root").get_to(c.root);
    if (j.contains("pair_index")) j.at("pair_index").get_to(c.pair_index);
    if (j.contains("direction")) {
        j.at("direction").get_to(c.direction);
        j.at("base").get_to(c.base);
        j.at("s_lo").get_to(c.s_lo);
        j.at("s_hi").get_to(c.s_hi);
        j.at("q").get_to(c.q);
    }
}

inline void to_json(json& j, const DescentCertificate& c) {
    j = json{{"m", c.m},
             {"rho", c.rho_value},
             {"delta", c.delta_value},
             {"delta_symbol", c.delta_symbol},
             {"degenerate", c.degenerate},
             {"ck_checked", c.ck_checked},
             {"ck_nonzero", c.ck_nonzero}};
}

inline void from_json(const json& j, DescentCertificate& c) {
    j.at("m").get_to(c.m);
    j.at("rho").get_to(c.rho_value);
    j.at("delta").get_to(c.delta_value);
    j.at("delta_symbol").get_to(c.delta_symbol);
    j.at("degenerate").get_to(c.degenerate);
    j.at("ck_checked").get_to(c.ck_checked);
    j.at("ck_nonzero").get_to(c.ck_nonzero);
}

inline void to_json(json& j, const VerificationReport& v) {
    json pts{{"height", v.points.height},
             {"separable", v.points.separable},
             {"candidates", v.points.candidates},
             {"exact_checks", v.points.exact_checks},
             {"point", detail::optional_json(v.points.point)}};
    j = json{{"overall", v.overall},
             {"unit", {{"ok", v.unit_ok}, {"detail", v.unit_detail}}},
             {"form", {{"ok", v.form_ok}, {"detail", v.form_detail}}},
             {"local_conditions", v.local},
             {"global_conditions", v.global},
             {"nonsingular", {{"ok", v.nonsingular.ok}, {"witness", v.nonsingular.witness}}},
             {"descent", {{"ok", v.descent.ok}, {"reason", v.descent.reason}, {"certificate", v.descent.cert}}},
             {"local_bound", v.local_bound},
             {"certificates", v.certificates.certificates},
             {"certificate_failures", v.certificates.failures},
             {"coverage",
              {{"ok", v.coverage.ok},
               {"rules", v.coverage.rules},
               {"individually_certified", v.coverage.individually_certified},
               {"failure", v.coverage.failure}}},
             {"real", {{"ok", v.real_ok}, {"certificate", detail::optional_json(v.real)}}},
             {"point_search", {{"ok", v.points_ok}, {"result", pts}}}};
}

inline void from_json(const json& j, VerificationReport& v) {
    v = VerificationReport{};
    j.at("overall").get_to(v.overall);
    j.at("unit").at("ok").get_to(v.unit_ok);
    j.at("unit").at("detail").get_to(v.unit_detail);
    j.at("form").at("ok").get_to(v.form_ok);
    j.at("form").at("detail").get_to(v.form_detail);
    j.at("local_conditions").get_to(v.local);
    j.at("global_conditions").get_to(v.global);
    j.at("nonsingular").at("ok").get_to(v.nonsingular.ok);
    j.at("nonsingular").at("witness").get_to(v.nonsingular.witness);
    j.at("descent").at("ok").get_to(v.descent.ok);
    j.at("descent").at("reason").get_to(v.descent.reason);
    j.at("descent").at("certificate").get_to(v.descent.cert);
    j.at("local_bound").get_to(v.local_bound);
    j.at("certificates").get_to(v.certificates.certificates);
    j.at("certificate_failures").get_to(v.certificates.failures);
    const auto& cov = j.at("coverage");
    cov.at("ok").get_to(v.coverage.ok);
    cov.at("rules").get_to(v.coverage.rules);
    cov.at("individually_certified").get_to(v.coverage.individually_certified);
    cov.at("failure").get_to(v.coverage.failure);
    j.at("real").at("ok").get_to(v.real_ok);
    detail::optional_from(j.at("real"), "certificate", v.real);
    const auto& ps = j.at("point_search");
    ps.at("ok").get_to(v.points_ok);
    const auto& res = ps.at("result");
    res.at("height").get_to(v.points.height);
    res.at("separable").get_to(v.points.separable);
    res.at("candidates").get_to(v.points.candidates);
    res.at("exact_checks").get_to(v.points.exact_checks);
    detail::optional_from(res, "point", v.points.point);
}

inline void to_json(json& j, const Counterexample& r) {
    json pairs = json::array();
    for (const auto& f : r.pairs) pairs.push_back({{"b", f.b}, {"c", f.c}, {"q", f.q}});
    j = json{{"params", {{"p", r.params.p}, {"P", r.params.P}, {"iota", r.params.iota}, {"n", r.n}}},
             {"unit", {{"alpha", r.unit.a}, {"beta", r.unit.b}, {"gamma", r.unit.c}}},
             {"pairs", pairs},
             {"descent", {{"a", r.descent.a}, {"c", r.descent.c}, {"l", r.descent.l}, {"m", r.m}}},
             {"L", r.L},
             {"form", r.form},
             {"verification", r.verification},
             {"divergences", r.divergences}};
}

inline void from_json(const json& j, Counterexample& r) {
    r = Counterexample{};
    const auto& p = j.at("params");
    p.at("p").get_to(r.params.p);
    p.at("P").get_to(r.params.P);
    p.at("iota").get_to(r.params.iota);
    p.at("n").get_to(r.n);
    const auto& u = j.at("unit");
    r.unit = RingElement(u.at("alpha").get<Int>(), u.at("beta").get<Int>(), u.at("gamma").get<Int>());
    for (const auto& f : j.at("pairs")) {
        FormPrime fp;
        f.at("b").get_to(fp.b);
        f.at("c").get_to(fp.c);
        f.at("q").get_to(fp.q);
        r.pairs.push_back(fp);
    }
    const auto& d = j.at("descent");
    d.at("a").get_to(r.descent.a);
    d.at("c").get_to(r.descent.c);
    d.at("l").get_to(r.descent.l);
    d.at("m").get_to(r.m);
    j.at("L").get_to(r.L);
    j.at("form").get_to(r.form);
    if (j.contains("verification") && !j.at("verification").is_null()) j.at("verification").get_to(r.verification);
    if (j.contains("divergences")) j.at("divergences").get_to(r.divergences);
}

enum class Format { json, latex, summary };

inline std::string summary_line(const Counterexample& r) {
    return "p=" + std::to_string(r.params.p) + " n=" + std::to_string(r.n) + " P=" + std::to_string(r.params.P) +
           " iota=" + std::to_string(r.params.iota) + " l=" + r.descent.l.get_str() + " m=" + std::to_string(r.m) +
           " pairs=" + std::to_string(r.pairs.size()) + " verified=" + (r.verification.overall ? "yes" : "no");
}

inline std::string emit(const Counterexample& r, Format format) {
    switch (format) {
        case Format::json: return json(r).dump(2);
        case Format::latex: return render_latex(r.form);
        case Format::summary: return summary_line(r);
    }
    return {};
}

inline Counterexample parse_record(const std::string& text) { return json::parse(text).get<Counterexample>(); }

}  // namespace hasse
