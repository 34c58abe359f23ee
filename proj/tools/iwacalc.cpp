// iwacalc: exact calculator for Zp[[T]]-module structure data.
//
// Subcommands operate on module description files (JSON) and print a short
// human-readable report; --json switches to a machine-readable payload with
// stable key order. Exit codes: 0 success, 1 validation error, 2 verification
// suite failure, 3 internal inconsistency.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "iwasawa/sampling.hpp"
#include "iwasawa/serialize.hpp"

using namespace iwasawa;

namespace {

void emit(const Json& payload, bool json_out, const std::string& human) {
    if (json_out)
        std::cout << payload.dump(2) << "\n";
    else
        std::cout << human;
}

std::string context_line(const PrecisionContext& ctx) {
    return "p=" + ctx.prime().str() + " prec=" + std::to_string(ctx.prec) +
           " n_cap=" + std::to_string(ctx.n_cap);
}

int run_invariants(const std::string& path, bool json_out) {
    const ElementaryModule e = canonical_form(load_module_file(path));
    Json out;
    out["command"] = "invariants";
    out["input_digest"] = input_digest(e);
    out["p"] = int_to_json(e.ctx.prime());
    out["prec"] = e.ctx.prec;
    out["rank"] = e.rank;
    out["lambda"] = lambda_invariant(e);
    out["mu"] = mu_invariant(e);
    out["module"] = to_string(e);
    out["description"] = module_to_description(e);
    std::string human;
    human += "module:  " + to_string(e) + "\n";
    human += "context: " + context_line(e.ctx) + "\n";
    human += "rank:    " + std::to_string(e.rank) + "\n";
    human += "lambda:  " + std::to_string(lambda_invariant(e)) + "\n";
    human += "mu:      " + std::to_string(mu_invariant(e)) + "\n";
    if (is_cotorsion(e)) {
        const CharIdeal c = char_ideal_symbolic(e);
        out["char_ideal"] = char_ideal_to_json(c, e.ctx);
        human += "char:    " + to_string(c, e.ctx) + "\n";
    } else {
        out["char_ideal"] = nullptr;
        human += "char:    (module has positive rank)\n";
    }
    Json warn = Json::array();
    for (const auto& w : duplicate_generic_warnings(e)) {
        warn.push_back(w);
        human += "note:    " + w + "\n";
    }
    out["warnings"] = std::move(warn);
    human += "digest:  " + input_digest(e) + "\n";
    emit(out, json_out, human);
    return 0;
}

int run_functor(const std::string& which_raw, const std::string& path, bool json_out) {
    std::string which = which_raw;
    for (auto& c : which) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (which != "F" && which != "G")
        throw validation_error("functor must be F or G, got '" + which_raw + "'");
    const ElementaryModule e = canonical_form(load_module_file(path));
    const ElementaryModule image = which == "F" ? F_closed(e) : G_closed(e);
    Json out;
    out["command"] = "functor";
    out["which"] = which;
    out["input_digest"] = input_digest(e);
    out["input"] = to_string(e);
    out["image"] = to_string(image);
    out["image_lambda"] = lambda_invariant(image);
    out["image_mu"] = mu_invariant(image);
    out["description"] = module_to_description(image);
    std::string human;
    human += "input:   " + to_string(e) + "\n";
    human += which == "F" ? "functor: F (colimit side, twisted generics)\n"
                          : "functor: G (inverse-limit side)\n";
    human += "image:   " + to_string(image) + "\n";
    human += "lambda:  " + std::to_string(lambda_invariant(image)) + "\n";
    human += "mu:      " + std::to_string(mu_invariant(image)) + "\n";
    human += "payload: " + module_to_description(image).dump() + "\n";
    emit(out, json_out, human);
    return 0;
}

int run_disassemble(const std::string& path, const std::string& mode_raw, bool json_out) {
    DisassemblyMode mode;
    if (mode_raw == "strict")
        mode = DisassemblyMode::Strict;
    else if (mode_raw == "extended")
        mode = DisassemblyMode::Extended;
    else
        throw validation_error("mode must be strict or extended, got '" + mode_raw + "'");
    const ElementaryModule e = canonical_form(load_module_file(path));
    const DisassemblyResult r = disassemble_selmer(e, mode);
    const bool char_ok = char_ideal_symbolic(direct_sum(r.e_sha, torsion_part(r.e_mw))) ==
                         char_ideal_symbolic(torsion_part(e));
    Json out;
    out["command"] = "disassemble";
    out["input_digest"] = input_digest(e);
    out["selmer"] = to_string(e);
    out["result"] = disassembly_to_json(r);
    out["char_consistent"] = char_ok;
    out["mw_level0_ambiguous"] = mw_level0_ambiguous(r.e_mw);
    std::string human;
    human += "selmer:  " + to_string(e) + "\n";
    human += "mode:    " + to_string(mode) + "\n";
    human += "mw:      " + to_string(r.e_mw) + "\n";
    human += "sha:     " + to_string(r.e_sha) + "\n";
    human += std::string("char-ideal consistency: ") + (char_ok ? "ok" : "MISMATCH") + "\n";
    if (mw_level0_ambiguous(r.e_mw))
        human += "note:    level-0 tower factors on the mw side; their module-theoretic\n"
                 "         meaning is not settled, treat with care\n";
    emit(out, json_out, human);
    if (!char_ok) throw consistency_error("disassembly broke characteristic-ideal multiplicativity");
    return 0;
}

int run_growth(const std::string& path, int n_max, bool json_out) {
    const ElementaryModule e = canonical_form(load_module_file(path));
    if (n_max < 0) n_max = e.ctx.n_cap;
    if (n_max > e.ctx.n_cap)
        throw validation_error("--n-max " + std::to_string(n_max) + " exceeds n_cap " +
                               std::to_string(e.ctx.n_cap));
    const OracleReport rep = validate_G_against_oracle(e);
    const GrowthFit fit = growth_fit(e);
    Json out;
    out["command"] = "growth";
    out["input_digest"] = input_digest(e);
    out["module"] = to_string(e);
    out["fit"] = growth_fit_to_json(fit);
    Json levels = Json::array();
    std::string human;
    human += "module:  " + to_string(e) + "\n";
    human += "context: " + context_line(e.ctx) + "\n";
    human += "   n        e_n  predicted\n";
    for (const auto& lv : rep.per_level) {
        if (lv.n > n_max) continue;
        Json rec;
        rec["n"] = lv.n;
        rec["observed"] = lv.observed;
        rec["predicted"] = lv.predicted;
        levels.push_back(std::move(rec));
        char buf[64];
        std::snprintf(buf, sizeof buf, "%4d %10ld %10ld\n", lv.n, lv.observed, lv.predicted);
        human += buf;
    }
    out["levels"] = std::move(levels);
    out["law_holds"] = rep.law_holds;
    char fitbuf[128];
    std::snprintf(fitbuf, sizeof fitbuf, "fit:     mu=%ld lambda=%ld nu=%ld n0=%d\n", fit.mu,
                  fit.lambda, fit.nu, fit.n0);
    human += fitbuf;
    human += "law:     e_n = p^n*mu + n*lambda + nu for n >= " + std::to_string(fit.n0) + "\n";
    emit(out, json_out, human);
    return 0;
}

PrecisionContext pick_context(DetRng& rng, std::optional<int> p, std::optional<int> prec) {
    if (!p) {
        PrecisionContext base = sample_context(rng);
        if (!prec) return base;
        return make_context(base.prime().convert_to<long>(), *prec);
    }
    return make_context(*p, prec.value_or(8));
}

struct SuiteResult {
    std::string name;
    int passed = 0;
    int total = 0;
};

SuiteResult suite_functors(unsigned long long seed, int samples, std::optional<int> p,
                           std::optional<int> prec) {
    DetRng rng(seed);
    FamilyOptions fo;
    fo.generic_max_exp = 2;
    FamilyOptions coprime = fo;
    coprime.allow_cyclotomic = false;
    SuiteResult r{"functors", 0, samples};
    for (int t = 0; t < samples; ++t) {
        const PrecisionContext ctx = pick_context(rng, p, prec);
        bool ok = check_F_iota_G(sample_module(rng, ctx, fo));
        ok = ok && check_reconstruction(sample_module(rng, ctx, coprime));
        if (ok) ++r.passed;
    }
    return r;
}

SuiteResult suite_growth(unsigned long long seed, int samples, std::optional<int> p,
                         std::optional<int> prec) {
    DetRng rng(seed);
    SuiteResult r{"growth", 0, samples};
    for (int t = 0; t < samples; ++t) {
        const PrecisionContext ctx = pick_context(rng, p, prec);
        const OracleReport rep = validate_G_against_oracle(sample_module(rng, ctx, FamilyOptions{}));
        if (rep.law_holds && rep.threshold_n0 <= 2) ++r.passed;
    }
    return r;
}

SuiteResult suite_roundtrip(unsigned long long seed, int samples, std::optional<int> p,
                            std::optional<int> prec) {
    DetRng rng(seed);
    SuiteResult r{"roundtrip", 0, samples};
    for (int t = 0; t < samples; ++t) {
        const PrecisionContext ctx = pick_context(rng, p, prec);
        const Int pm = ctx.coeff_modulus();
        bool ok = true;
        {
            const DistinguishedPoly g = sample_distinguished(rng, ctx, 4);
            const DistinguishedPoly tw = iota_twist_poly(iota_twist_poly(g, ctx), ctx);
            ok = ok && reduce_mod(tw.poly, pm) == reduce_mod(g.poly, pm);
        }
        {
            const ElementaryModule mw = sample_mw_module(rng, ctx, ctx.n_cap - 1);
            ok = ok && mw_from_rank_sequence(rank_sequence_from_mw(mw), ctx) == canonical_form(mw);
        }
        {
            const IntPoly f = sample_poly_nonzero(rng, ctx, 5);
            const PreparedForm pf = weierstrass_prepare(f, ctx);
            IntPoly back = pf.unit * pf.dist.poly;
            for (int k = 0; k < pf.mu_exp; ++k) back = ctx.prime() * back;
            ok = ok && congruent_mod(back, f, pm);
        }
        if (ok) ++r.passed;
    }
    return r;
}

int run_verify(const std::string& suite, unsigned long long seed, int samples,
               std::optional<int> p, std::optional<int> prec, bool json_out) {
    if (samples < 1) throw validation_error("--samples must be >= 1");
    std::vector<SuiteResult> results;
    if (suite == "functors" || suite == "all") results.push_back(suite_functors(seed, samples, p, prec));
    if (suite == "growth" || suite == "all") results.push_back(suite_growth(seed, samples, p, prec));
    if (suite == "roundtrip" || suite == "all")
        results.push_back(suite_roundtrip(seed, samples, p, prec));
    if (results.empty())
        throw validation_error("--suite must be functors, growth, roundtrip or all, got '" + suite +
                               "'");
    bool all_ok = true;
    Json out;
    out["command"] = "verify";
    out["suite"] = suite;
    out["seed"] = seed;
    out["samples"] = samples;
    Json suites = Json::array();
    std::string human;
    for (const auto& r : results) {
        all_ok = all_ok && r.passed == r.total;
        Json rec;
        rec["name"] = r.name;
        rec["passed"] = r.passed;
        rec["total"] = r.total;
        suites.push_back(std::move(rec));
        human += "suite " + r.name + ": " + std::to_string(r.passed) + "/" +
                 std::to_string(r.total) + "\n";
    }
    out["suites"] = std::move(suites);
    out["ok"] = all_ok;
    human += std::string("verify: ") + (all_ok ? "PASS" : "FAIL") + " (seed " +
             std::to_string(seed) + ")\n";
    emit(out, json_out, human);
    return all_ok ? 0 : 2;
}

int run_feq(const std::string& path_a, const std::string& path_b, bool json_out) {
    const ElementaryModule a = canonical_form(load_module_file(path_a));
    const ElementaryModule b = canonical_form(load_module_file(path_b));
    if (a.ctx != b.ctx)
        throw validation_error("inputs use different contexts: " + context_line(a.ctx) + " vs " +
                               context_line(b.ctx));
    const bool verdict = functional_equation_check(a, b);
    Json out;
    out["command"] = "feq";
    out["input_digest_a"] = input_digest(a);
    out["input_digest_b"] = input_digest(b);
    out["side_a"] = to_string(a);
    out["side_b"] = to_string(b);
    out["satisfied"] = verdict;
    std::string human;
    human += "side A:  " + to_string(a) + "\n";
    human += "side B:  " + to_string(b) + "\n";
    human += "twist of B: " + to_string(iota_twist_module(b)) + "\n";
    human += std::string("functional equation: ") + (verdict ? "SATISFIED" : "VIOLATED") + "\n";
    if (is_cotorsion(a) && is_cotorsion(b)) {
        const ShaComparison cmp = sha_comparison(a, b);
        out["comparison"] = sha_comparison_to_json(cmp);
        human += std::string("invariants equal: ") + (cmp.invariants_equal ? "yes" : "no") + "\n";
        human += "level deltas:";
        for (long d : cmp.per_level_delta) human += " " + std::to_string(d);
        human += "\n";
        if (cmp.invariants_equal)
            human += "size ratio bounded by p^" + std::to_string(cmp.ratio_bound_exp) +
                     " from level " + std::to_string(cmp.stable_from) + " on\n";
    } else {
        out["comparison"] = nullptr;
    }
    emit(out, json_out, human);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact calculator for Zp[[T]]-module structure data"};
    app.require_subcommand(1);

    bool json_out = false;
    std::string file_a, file_b, which, mode = "strict", suite = "all";
    int n_max = -1, samples = 100;
    unsigned long long seed = 1729;
    std::optional<int> opt_p, opt_prec;
    int p_flag = 0, prec_flag = 0;

    auto* inv = app.add_subcommand("invariants", "rank, lambda, mu and characteristic ideal");
    inv->add_option("file", file_a, "module description file")->required();
    inv->add_flag("--json", json_out, "machine-readable output");

    auto* fun = app.add_subcommand("functor", "closed-form image under F or G");
    fun->add_option("which", which, "F or G")->required();
    fun->add_option("file", file_a, "module description file")->required();
    fun->add_flag("--json", json_out, "machine-readable output");

    auto* dis = app.add_subcommand("disassemble", "split a Selmer-type module into mw and sha parts");
    dis->add_option("file", file_a, "module description file")->required();
    dis->add_option("--mode", mode, "strict or extended (default strict)");
    dis->add_flag("--json", json_out, "machine-readable output");

    auto* gro = app.add_subcommand("growth", "per-level torsion sizes and the exact growth fit");
    gro->add_option("file", file_a, "module description file")->required();
    gro->add_option("--n-max", n_max, "truncate the printed table at this level (fit uses all levels)");
    gro->add_flag("--json", json_out, "machine-readable output");

    auto* ver = app.add_subcommand("verify", "seeded randomized verification suites");
    ver->add_option("--suite", suite, "functors, growth, roundtrip or all (default all)");
    ver->add_option("--seed", seed, "rng seed (default 1729)");
    ver->add_option("--samples", samples, "samples per suite (default 100)");
    ver->add_option("--p", p_flag, "fix the prime (default: alternate 3 and 5)");
    ver->add_option("--prec", prec_flag, "coefficient precision (default 8)");
    ver->add_flag("--json", json_out, "machine-readable output");

    auto* feq = app.add_subcommand("feq", "algebraic functional equation between two modules");
    feq->add_option("file_a", file_a, "module description for side A")->required();
    feq->add_option("file_b", file_b, "module description for side B")->required();
    feq->add_flag("--json", json_out, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (p_flag != 0) opt_p = p_flag;
    if (prec_flag != 0) opt_prec = prec_flag;

    try {
        if (inv->parsed()) return run_invariants(file_a, json_out);
        if (fun->parsed()) return run_functor(which, file_a, json_out);
        if (dis->parsed()) return run_disassemble(file_a, mode, json_out);
        if (gro->parsed()) return run_growth(file_a, n_max, json_out);
        if (ver->parsed()) return run_verify(suite, seed, samples, opt_p, opt_prec, json_out);
        if (feq->parsed()) return run_feq(file_a, file_b, json_out);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const consistency_error& e) {
        std::cerr << "internal inconsistency: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
