// JSON serialization of module descriptions and report payloads. Key order is
// fixed (insertion order) so identical inputs produce byte-identical output.
// Integers are emitted as JSON numbers when they fit in 64 bits and as decimal
// strings otherwise; both forms are accepted on input.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "iwasawa/arithmetic.hpp"

namespace iwasawa {

using Json = nlohmann::ordered_json;

inline Json int_to_json(const Int& v) {
    static const Int lo = std::numeric_limits<std::int64_t>::min();
    static const Int hi = std::numeric_limits<std::int64_t>::max();
    if (v >= lo && v <= hi) return Json(v.convert_to<std::int64_t>());
    return Json(v.str());
}

inline Int int_from_json(const Json& j, const std::string& what) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (i == s.size()) throw validation_error(what + ": empty integer literal");
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                throw validation_error(what + ": not a decimal integer: " + s);
        return Int(s);
    }
    throw validation_error(what + ": expected an integer or decimal string");
}

inline Json poly_to_json(const IntPoly& f) {
    Json a = Json::array();
    for (const Int& c : f.c) a.push_back(int_to_json(c));
    return a;
}

inline IntPoly poly_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw validation_error(what + ": expected a coefficient array");
    IntPoly f;
    int i = 0;
    for (const auto& c : j) f.c.push_back(int_from_json(c, what + "[" + std::to_string(i++) + "]"));
    f.normalize();
    return f;
}

/// Canonical description payload: p, prec, rank, mu_parts, lambda_parts.
/// The module is canonicalized first, so equal modules serialize identically.
inline Json module_to_description(const ElementaryModule& e) {
    const ElementaryModule c = canonical_form(e);
    Json out;
    out["p"] = int_to_json(c.ctx.prime());
    out["prec"] = c.ctx.prec;
    out["rank"] = c.rank;
    Json mu_parts = Json::array();
    Json lambda_parts = Json::array();
    for (const auto& fp : c.factors) {
        switch (fp.factor.kind) {
            case FactorKind::MuPrime:
                mu_parts.push_back(fp.exp);
                break;
            case FactorKind::Cyclotomic: {
                Json rec;
                rec["kind"] = "nu";
                rec["level"] = fp.factor.level;
                rec["exp"] = fp.exp;
                lambda_parts.push_back(std::move(rec));
                break;
            }
            case FactorKind::Generic: {
                Json rec;
                rec["kind"] = "poly";
                rec["coeffs"] = poly_to_json(fp.factor.g.poly);
                rec["exp"] = fp.exp;
                lambda_parts.push_back(std::move(rec));
                break;
            }
        }
    }
    out["mu_parts"] = std::move(mu_parts);
    out["lambda_parts"] = std::move(lambda_parts);
    return out;
}

namespace detail {

inline void require_keys(const Json& j, const std::vector<std::string>& required,
                         const std::vector<std::string>& optional, const std::string& what) {
    if (!j.is_object()) throw validation_error(what + ": expected an object");
    for (const auto& k : required)
        if (!j.contains(k)) throw validation_error(what + ": missing field '" + k + "'");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const auto& r : required) known = known || k == r;
        for (const auto& o : optional) known = known || k == o;
        if (!known) throw validation_error(what + ": unknown field '" + k + "'");
    }
}

inline int small_count(const Json& j, const std::string& what, long lo, long hi) {
    const Int v = int_from_json(j, what);
    if (v < lo || v > hi)
        throw validation_error(what + ": value " + v.str() + " out of range [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v.convert_to<long>());
}

}  // namespace detail

/// Parses and validates a description payload. Diagnostics name the failing
/// factor by its position in the file.
inline ElementaryModule module_from_description(const Json& j) {
    detail::require_keys(j, {"p", "prec", "rank", "mu_parts", "lambda_parts"}, {"comment"},
                         "module description");
    const int p = detail::small_count(j["p"], "p", 3, 1 << 20);
    const int prec = detail::small_count(j["prec"], "prec", 2, 1 << 20);
    const PrecisionContext ctx = make_context(p, prec);
    const long rank = detail::small_count(j["rank"], "rank", 0, 1L << 20);
    std::vector<FactorPower> factors;
    if (!j["mu_parts"].is_array()) throw validation_error("mu_parts: expected an array");
    int i = 0;
    for (const auto& part : j["mu_parts"]) {
        const std::string what = "mu_parts[" + std::to_string(i++) + "]";
        FactorPower fp{mu_prime_factor(), detail::small_count(part, what, 1, 1 << 20)};
        factors.push_back(std::move(fp));
    }
    if (!j["lambda_parts"].is_array()) throw validation_error("lambda_parts: expected an array");
    i = 0;
    for (const auto& part : j["lambda_parts"]) {
        const std::string what = "lambda_parts[" + std::to_string(i++) + "]";
        if (!part.is_object() || !part.contains("kind") || !part["kind"].is_string())
            throw validation_error(what + ": expected an object with a 'kind' string");
        const std::string kind = part["kind"].get<std::string>();
        try {
            if (kind == "nu") {
                detail::require_keys(part, {"kind", "level"}, {"exp", "comment"}, what);
                const int level = detail::small_count(part["level"], what + ".level", 0, 1 << 20);
                const int exp =
                    part.contains("exp") ? detail::small_count(part["exp"], what + ".exp", 1, 1 << 20) : 1;
                FactorPower fp{cyclotomic_factor(level), exp};
                validate_factor(fp, ctx);
                factors.push_back(std::move(fp));
            } else if (kind == "poly") {
                detail::require_keys(part, {"kind", "coeffs"}, {"exp", "comment"}, what);
                const IntPoly f = poly_from_json(part["coeffs"], what + ".coeffs");
                const int exp =
                    part.contains("exp") ? detail::small_count(part["exp"], what + ".exp", 1, 1 << 20) : 1;
                FactorPower fp{generic_factor(make_distinguished(f, ctx)), exp};
                validate_factor(fp, ctx);
                factors.push_back(std::move(fp));
            } else {
                throw validation_error("kind must be 'nu' or 'poly', got '" + kind + "'");
            }
        } catch (const validation_error& err) {
            throw validation_error(what + ": " + err.what());
        }
    }
    return make_elementary(ctx, rank, std::move(factors));
}

inline ElementaryModule module_from_description_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& err) {
        throw validation_error(std::string("module description: ") + err.what());
    }
    return module_from_description(j);
}

inline ElementaryModule load_module_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return module_from_description_text(buf.str());
}

/// FNV-1a over the canonical serialization; stable fingerprint for reports.
inline std::string input_digest(const ElementaryModule& e) {
    const std::string s = module_to_description(e).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline Json growth_fit_to_json(const GrowthFit& f) {
    Json out;
    out["mu"] = f.mu;
    out["lambda"] = f.lambda;
    out["nu"] = f.nu;
    out["n0"] = f.n0;
    return out;
}

inline Json levels_to_json(const std::vector<LevelObservation>& levels) {
    Json out = Json::array();
    for (const auto& lv : levels) {
        Json rec;
        rec["n"] = lv.n;
        rec["observed"] = lv.observed;
        rec["predicted"] = lv.predicted;
        out.push_back(std::move(rec));
    }
    return out;
}

inline Json oracle_report_to_json(const OracleReport& r) {
    Json out;
    out["subject"] = to_string(r.subject);
    out["law_holds"] = r.law_holds;
    out["fitted_nu"] = r.fitted_nu;
    out["threshold_n0"] = r.threshold_n0;
    out["levels"] = levels_to_json(r.per_level);
    out["coprime_exact_ok"] =
        r.coprime_exact_ok.has_value() ? Json(*r.coprime_exact_ok) : Json(nullptr);
    return out;
}

inline Json rank_sequence_to_json(const RankSequence& rs) {
    Json out;
    out["p"] = int_to_json(rs.p);
    out["ranks"] = rs.ranks;
    return out;
}

inline Json char_ideal_to_json(const CharIdeal& c, const PrecisionContext& ctx) {
    Json out;
    out["mu"] = c.mu_total;
    Json fac = Json::array();
    for (const auto& [poly, exp] : c.dist_factors) {
        Json rec;
        rec["coeffs"] = poly_to_json(poly);
        rec["exp"] = exp;
        fac.push_back(std::move(rec));
    }
    out["factors"] = std::move(fac);
    out["rendered"] = to_string(c, ctx);
    return out;
}

inline Json disassembly_to_json(const DisassemblyResult& r) {
    Json out;
    out["mode"] = to_string(r.mode);
    out["mw"] = module_to_description(r.e_mw);
    out["mw_rendered"] = to_string(r.e_mw);
    out["sha"] = module_to_description(r.e_sha);
    out["sha_rendered"] = to_string(r.e_sha);
    return out;
}

inline Json sha_comparison_to_json(const ShaComparison& s) {
    Json out;
    out["invariants_equal"] = s.invariants_equal;
    out["ratio_bound_exp"] = s.ratio_bound_exp;
    out["stable_from"] = s.stable_from;
    out["per_level_delta"] = s.per_level_delta;
    return out;
}

}  // namespace iwasawa
