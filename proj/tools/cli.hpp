#pragma once

// Command-line front end. dispatch() returns the process exit code:
// 0 success, 2 budget or search exhausted, 3 verification failed, 64 usage error.

#include "hasse/hasse.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace hasse::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_exhausted = 2;
inline constexpr int exit_unverified = 3;
inline constexpr int exit_usage = 64;

/// q rounded to `digits` decimals, toward +infinity when `up`, else toward -infinity.
inline std::string decimal(const Rational& q, int digits, bool up) {
    Int scale = pow(Int(10), static_cast<unsigned long>(digits));
    Rational s = q * Rational(scale);
    Int v;
    if (up) {
        mpz_cdiv_q(v.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
    } else {
        mpz_fdiv_q(v.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
    }
    bool neg = v < 0;
    std::string d = Int(abs(v)).get_str();
    if (d.size() <= static_cast<std::size_t>(digits)) d.insert(0, static_cast<std::size_t>(digits) + 1 - d.size(), '0');
    d.insert(d.size() - static_cast<std::size_t>(digits), ".");
    return (neg ? "-" : "") + d;
}

inline int exit_code_for(Errc e) {
    switch (e) {
        case Errc::budget_exhausted:
        case Errc::search_exhausted: return exit_exhausted;
        case Errc::verification_failed: return exit_unverified;
        case Errc::degree_incompatible: return exit_usage;
        default: return 1;
    }
}

inline void print_report(std::ostream& out, const VerificationReport& v) {
    auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
    out << "unit: " << mark(v.unit_ok) << " " << v.unit_detail << "\n";
    out << "form: " << mark(v.form_ok) << " " << v.form_detail << "\n";
    for (const auto& it : v.global.items) {
        out << "condition " << it.index << ": " << (it.applicable ? mark(it.pass) : "n/a") << " " << it.detail << "\n";
    }
    out << "nonsingular: " << mark(v.nonsingular.ok) << (v.nonsingular.ok ? "" : " " + v.nonsingular.witness) << "\n";
    out << "descent: " << mark(v.descent.ok);
    if (v.descent.ok) {
        out << " m=" << v.descent.cert.m;
        if (!v.descent.cert.degenerate) {
            out << " rho=" << v.descent.cert.rho_value << " delta=" << v.descent.cert.delta_value
                << " symbol=" << v.descent.cert.delta_symbol;
        }
    } else {
        out << " " << v.descent.reason;
    }
    out << "\n";
    out << "local certificates (l <= " << v.local_bound << "): " << mark(v.certificates.ok()) << " "
        << v.certificates.certificates.size() << " primes";
    for (long l : v.certificates.failures) out << " missing " << l;
    out << "\n";
    out << "coverage (l > " << v.local_bound << "): " << mark(v.coverage.ok);
    if (!v.coverage.individually_certified.empty()) {
        out << " extra primes";
        for (long l : v.coverage.individually_certified) out << " " << l;
    }
    if (!v.coverage.ok) out << " " << v.coverage.failure;
    out << "\n";
    out << "real point: " << mark(v.real_ok) << "\n";
    out << "point search (height " << v.points.height << "): " << mark(v.points_ok);
    if (v.points.point) {
        const auto& p = *v.points.point;
        out << " found (" << p[0] << ", " << p[1] << ", " << p[2] << ")";
    }
    out << "\n";
    out << "overall: " << mark(v.overall) << "\n";
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Explicit plane curves violating the local-global principle"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "construct and verify counterexamples of degree n");
    long g_p = 0;
    int g_n = 0;
    int g_count = 1;
    bool g_reproduce = false, g_prefer_2p = false;
    std::string g_format = "text", g_min_l = "0", g_cache;
    long g_local_bound = 1000, g_height = 1000;
    gen->add_option("--p", g_p, "odd prime p")->required()->check(CLI::PositiveNumber);
    gen->add_option("--n", g_n, "odd degree n >= 5")->required()->check(CLI::PositiveNumber);
    gen->add_option("--count", g_count, "number of records with disjoint pair tuples")->check(CLI::PositiveNumber);
    gen->add_flag("--reproduce-section5", g_reproduce, "pin the worked-example data and report divergences");
    gen->add_flag("--prefer-2p", g_prefer_2p, "use P = 2p when both P = p and P = 2p are admissible");
    gen->add_option("--min-l", g_min_l, "lower bound for the descent prime");
    gen->add_option("--format", g_format, "text, json, latex or summary")
        ->check(CLI::IsMember({"text", "json", "latex", "summary"}));
    gen->add_option("--local-bound", g_local_bound, "certify every prime up to this bound")->check(CLI::PositiveNumber);
    gen->add_option("--height", g_height, "point-search height (0 skips)")->check(CLI::NonNegativeNumber);
    gen->add_option("--cache", g_cache, "fundamental-unit cache file");

    // verify
    auto* ver = app.add_subcommand("verify", "re-verify a JSON record from its raw integers");
    std::string v_input, v_format = "text";
    long v_local_bound = 1000, v_height = 1000;
    ver->add_option("--input", v_input, "record file (JSON)")->required();
    ver->add_option("--local-bound", v_local_bound)->check(CLI::PositiveNumber);
    ver->add_option("--height", v_height)->check(CLI::NonNegativeNumber);
    ver->add_option("--format", v_format)->check(CLI::IsMember({"text", "json"}));

    // aacm-scan
    auto* scan = app.add_subcommand("aacm-scan", "check beta != 0 mod p for P = p, 2p and odd primes p < max");
    long s_max = 0;
    int s_jobs = 1;
    bool s_three = false;
    std::string s_cache;
    long s_chain = UnitBudget{}.max_chain_steps;
    scan->add_option("--max", s_max, "scan primes below this bound")->required()->check(CLI::PositiveNumber);
    scan->add_option("--jobs", s_jobs)->check(CLI::PositiveNumber);
    scan->add_option("--cache", s_cache);
    scan->add_option("--max-chain-steps", s_chain, "reduction budget per field")->check(CLI::PositiveNumber);
    scan->add_flag("--include-three", s_three, "also scan p = 3");

    // search-primes
    auto* sp = app.add_subcommand("search-primes", "list coefficient-pair or descent primes");
    long sp_p = 0;
    std::size_t sp_count = 10;
    std::string sp_kind = "pairs", sp_template = "paper", sp_min_l = "0";
    bool sp_prefer_2p = false;
    sp->add_option("--p", sp_p)->required()->check(CLI::PositiveNumber);
    sp->add_option("--kind", sp_kind)->check(CLI::IsMember({"pairs", "descent"}));
    sp->add_option("--count", sp_count)->check(CLI::PositiveNumber);
    sp->add_option("--template", sp_template)->check(CLI::IsMember({"paper", "section5"}));
    sp->add_option("--min-l", sp_min_l);
    sp->add_flag("--prefer-2p", sp_prefer_2p);

    // density
    auto* den = app.add_subcommand("density", "enclose the density of the exceptional set");
    long d_bound = 0;
    den->add_option("--prime-bound", d_bound)->required()->check(CLI::Range(2L, 100'000'000L));

    // unit
    auto* un = app.add_subcommand("unit", "fundamental unit of Z[P^(1/3)]");
    long u_P = 0;
    std::string u_backend = "reduction";
    un->add_option("--P", u_P)->required()->check(CLI::Range(2L, 1'000'000'000L));
    un->add_option("--backend", u_backend)->check(CLI::IsMember({"reduction", "enumeration"}));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (*gen) {
            GenerateOptions opt;
            opt.count = g_count;
            opt.reproduce_section5 = g_reproduce;
            opt.preference = g_prefer_2p ? Preference::prefer_2p : Preference::prefer_p;
            opt.min_l = parse_int(g_min_l);
            opt.verify.local_bound = g_local_bound;
            opt.verify.height = g_height;
            std::optional<UnitCache> cache;
            if (!g_cache.empty()) {
                cache.emplace(g_cache);
                opt.cache = &*cache;
            }
            auto records = generate_all(g_p, g_n, opt);
            for (const auto& r : records) {
                if (g_format == "json") {
                    out << json(r).dump() << "\n";
                } else if (g_format == "latex") {
                    out << emit(r, Format::latex) << "\n";
                } else if (g_format == "summary") {
                    out << emit(r, Format::summary) << "\n";
                } else {
                    out << emit(r, Format::summary) << "\n" << emit(r, Format::latex) << "\n";
                    for (const auto& d : r.divergences) out << "divergence: " << d << "\n";
                }
            }
            return exit_ok;
        }
        if (*ver) {
            std::ifstream in(v_input);
            if (!in) {
                err << "cannot read " << v_input << "\n";
                return exit_usage;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            Counterexample r;
            try {
                r = parse_record(buf.str());
            } catch (const std::exception& e) {
                err << "malformed record: " << e.what() << "\n";
                return exit_usage;
            }
            VerifyOptions vo;
            vo.local_bound = v_local_bound;
            vo.height = v_height;
            VerificationReport v = verify(r, vo);
            if (v_format == "json") {
                out << json(v).dump() << "\n";
            } else {
                print_report(out, v);
            }
            if (!v.overall) err << "verification failed: " << v.failure() << "\n";
            return v.overall ? exit_ok : exit_unverified;
        }
        if (*scan) {
            ScanOptions so;
            so.jobs = s_jobs;
            so.include_three = s_three;
            so.budget.max_chain_steps = s_chain;
            std::optional<UnitCache> cache;
            if (!s_cache.empty()) {
                cache.emplace(s_cache);
                so.cache = &*cache;
            }
            AacmScanReport rep = aacm_scan(s_max, so);
            out << "primes checked: " << rep.primes_checked << "\n";
            out << "exceptions: " << rep.exceptions.size() << "\n";
            for (const auto& e : rep.exceptions) {
                out << "exception p=" << e.p << " P=" << e.P << " unit=" << e.unit.element << "\n";
            }
            for (long p : rep.skipped) out << "skipped p=" << p << " (budget)\n";
            return rep.skipped.empty() ? exit_ok : exit_exhausted;
        }
        if (*sp) {
            FieldParams fp = make_field_params(sp_p, sp_prefer_2p ? Preference::prefer_2p : Preference::prefer_p);
            FundamentalUnit u = fundamental_unit(fp);
            fp.iota = classify_iota(u, sp_p);
            out << "p=" << fp.p << " P=" << fp.P << " iota=" << fp.iota << "\n";
            if (sp_kind == "pairs") {
                auto tmpl = sp_template == "section5" ? PairTemplate::section5 : PairTemplate::paper;
                for (const auto& f : search_coefficient_pairs(fp, sp_count, tmpl)) {
                    out << "b=" << f.b << " c=" << f.c << " q=" << f.q << " X=" << f.X << " Y=" << f.Y
                        << " branch=" << f.branch << "\n";
                }
            } else {
                for (const auto& d : search_descent_primes(fp, sp_count, parse_int(sp_min_l))) {
                    out << "a=" << d.a << " c=" << d.c << " l=" << d.l << " A=" << d.A << " C=" << d.C << "\n";
                }
            }
            return exit_ok;
        }
        if (*den) {
            DensityReport r = density_report(d_bound);
            out << "primes <= " << r.prime_bound << ": " << r.prime_count << "\n";
            out << "d(M) in [" << decimal(r.d_M.lo, 10, false) << ", " << decimal(r.d_M.hi, 10, true) << "]\n";
            out << "d(M) < " << decimal(r.d_M.hi, 7, true) << "\n";
            out << "odd ratio > " << decimal(r.odd_ratio.lo, 5, false) << "\n";
            return exit_ok;
        }
        if (*un) {
            if (is_perfect_cube(Int(u_P))) {
                err << "P must not be a cube\n";
                return exit_usage;
            }
            FieldParams fp;
            fp.P = u_P;
            fp.p = u_P;
            auto backend = u_backend == "enumeration" ? UnitBackend::enumeration : UnitBackend::reduction;
            FundamentalUnit u = fundamental_unit(fp, backend);
            out << "P=" << u_P << " unit=" << u.element << " norm=" << norm(u.element, Int(u_P))
                << " backend=" << backend_name(backend) << "\n";
            return exit_ok;
        }
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

inline int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, out, err);
}

}  // namespace hasse::cli
