#include <catch2/catch_amalgamated.hpp>

#include "iwasawa/sampling.hpp"
#include "iwasawa/serialize.hpp"

using namespace iwasawa;

namespace {

const PrecisionContext C3 = make_context(3, 8);

ElementaryModule M(long rank, std::vector<FactorPower> f, PrecisionContext ctx = C3) {
    return make_elementary(ctx, rank, std::move(f));
}

FactorPower mu(int f) { return {mu_prime_factor(), f}; }
FactorPower cyc(int k, int e = 1) { return {cyclotomic_factor(k), e}; }
FactorPower gen(std::vector<Int> coeffs, int e = 1, PrecisionContext ctx = C3) {
    return {generic_factor(make_distinguished(IntPoly{std::move(coeffs)}, ctx)), e};
}

}  // namespace

TEST_CASE("integer json round trip") {
    CHECK(int_to_json(Int(42)) == Json(42));
    CHECK(int_to_json(Int(-7)) == Json(-7));
    CHECK(int_to_json(Int("9223372036854775807")) == Json(9223372036854775807LL));
    const Int big("1208925819614629174706176");  // 2^80
    CHECK(int_to_json(big).is_string());
    CHECK(int_from_json(int_to_json(big), "x") == big);
    CHECK(int_from_json(int_to_json(-big), "x") == -big);
    CHECK(int_from_json(Json("123"), "x") == 123);
    CHECK(int_from_json(Json("-5"), "x") == -5);
    CHECK_THROWS_AS(int_from_json(Json("12x"), "x"), validation_error);
    CHECK_THROWS_AS(int_from_json(Json(""), "x"), validation_error);
    CHECK_THROWS_AS(int_from_json(Json("-"), "x"), validation_error);
    CHECK_THROWS_AS(int_from_json(Json(1.5), "x"), validation_error);
    CHECK_THROWS_AS(int_from_json(Json::array(), "x"), validation_error);
}

TEST_CASE("module description round trip") {
    auto check_roundtrip = [](const ElementaryModule& e) {
        auto j = module_to_description(e);
        auto back = module_from_description(j);
        CHECK(back == canonical_form(e));
        CHECK(module_to_description(back).dump() == j.dump());
    };
    check_roundtrip(M(1, {mu(1), cyc(1, 2), gen({-3, 1})}));
    check_roundtrip(zero_module(C3));
    check_roundtrip(M(3, {}));
    check_roundtrip(M(0, {mu(2), mu(1)}));
    SECTION("random modules") {
        DetRng rng(314);
        FamilyOptions fo;
        fo.generic_max_exp = 2;
        for (int t = 0; t < 30; ++t) {
            auto ctx = sample_context(rng);
            check_roundtrip(sample_module(rng, ctx, fo));
        }
    }
    SECTION("coefficients beyond 64 bits serialize as strings") {
        auto ctx = make_context(3, 60);
        auto e = canonical_form(M(0, {gen({-3, 1}, 1, ctx)}, ctx));
        auto j = module_to_description(e);
        CHECK(j["lambda_parts"][0]["coeffs"][0].is_string());
        CHECK(module_from_description(j) == e);
    }
}

TEST_CASE("module description field layout") {
    auto j = module_to_description(M(1, {mu(2), cyc(1), gen({3, 0, 1})}));
    CHECK(j["p"] == 3);
    CHECK(j["prec"] == 8);
    CHECK(j["rank"] == 1);
    CHECK(j["mu_parts"] == Json::array({2}));
    REQUIRE(j["lambda_parts"].size() == 2);
    CHECK(j["lambda_parts"][0]["kind"] == "nu");
    CHECK(j["lambda_parts"][0]["level"] == 1);
    CHECK(j["lambda_parts"][0]["exp"] == 1);
    CHECK(j["lambda_parts"][1]["kind"] == "poly");
    CHECK(j["lambda_parts"][1]["coeffs"] == Json::array({3, 0, 1}));
}

TEST_CASE("module description parsing accepts sugar") {
    auto e = module_from_description_text(R"({
        "p": 3, "prec": 8, "rank": 0,
        "comment": "exp defaults to 1",
        "mu_parts": [],
        "lambda_parts": [{"kind": "nu", "level": 1}]
    })");
    CHECK(e == canonical_form(M(0, {cyc(1)})));
}

TEST_CASE("module description rejections") {
    auto parse = [](const std::string& text) { return module_from_description_text(text); };
    auto base = [](const std::string& lambda) {
        return R"({"p": 3, "prec": 8, "rank": 0, "mu_parts": [], "lambda_parts": [)" + lambda +
               "]}";
    };
    CHECK_THROWS_AS(parse("{"), validation_error);
    CHECK_THROWS_AS(parse(R"({"p": 3})"), validation_error);
    CHECK_THROWS_AS(parse(R"({"p": 3, "prec": 8, "rank": 0, "mu_parts": [], "lambda_parts": [], "bogus": 1})"),
                    validation_error);
    CHECK_THROWS_AS(parse(R"({"p": 4, "prec": 8, "rank": 0, "mu_parts": [], "lambda_parts": []})"),
                    validation_error);
    CHECK_THROWS_AS(parse(R"({"p": 3, "prec": 1, "rank": 0, "mu_parts": [], "lambda_parts": []})"),
                    validation_error);
    CHECK_THROWS_AS(parse(R"({"p": 3, "prec": 8, "rank": -1, "mu_parts": [], "lambda_parts": []})"),
                    validation_error);
    CHECK_THROWS_AS(parse(R"({"p": 3, "prec": 8, "rank": 0, "mu_parts": [0], "lambda_parts": []})"),
                    validation_error);
    CHECK_THROWS_AS(parse(base(R"({"kind": "what"})")), validation_error);
    CHECK_THROWS_AS(parse(base(R"({"kind": "nu", "level": 9})")), validation_error);
    CHECK_THROWS_AS(parse(base(R"({"kind": "nu", "level": 1, "exp": 0})")), validation_error);
    CHECK_THROWS_AS(parse(base(R"({"kind": "poly", "coeffs": [1, 1]})")), validation_error);
    CHECK_THROWS_AS(parse(base(R"({"kind": "poly", "coeffs": [1.5, 1]})")), validation_error);
    CHECK_THROWS_AS(parse(base(R"({"kind": "poly", "coeffs": [5]})")), validation_error);
    SECTION("tower-divisible polynomial is rejected with its position") {
        try {
            parse(base(R"({"kind": "poly", "coeffs": [3, 3, 1]})"));
            FAIL("expected rejection");
        } catch (const validation_error& err) {
            CHECK(std::string(err.what()).find("lambda_parts[0]") != std::string::npos);
        }
    }
}

TEST_CASE("input digest") {
    auto a = M(0, {gen({-3, 1})});
    auto b = M(0, {gen({3, 1})});
    CHECK(input_digest(a).size() == 16);
    CHECK(input_digest(a) == input_digest(canonical_form(a)));
    CHECK(input_digest(a) != input_digest(b));
}

TEST_CASE("report payload serializers") {
    CHECK(growth_fit_to_json(GrowthFit{1, 2, -3, 1}).dump() ==
          R"({"mu":1,"lambda":2,"nu":-3,"n0":1})");
    auto rs = rank_sequence_to_json(RankSequence{3, {1, 5, 11}});
    CHECK(rs.dump() == R"({"p":3,"ranks":[1,5,11]})");
    SECTION("oracle report shape") {
        auto rep = validate_G_against_oracle(M(0, {gen({-3, 1})}));
        auto j = oracle_report_to_json(rep);
        CHECK(j["law_holds"] == true);
        CHECK(j["levels"].size() == 5);
        CHECK(j["levels"][2]["observed"] == 3);
        CHECK(j["coprime_exact_ok"] == true);
    }
    SECTION("disassembly payload") {
        auto j = disassembly_to_json(disassemble_selmer(M(1, {cyc(1, 2)})));
        CHECK(j["mode"] == "strict");
        CHECK(j["mw_rendered"] == "L + L/nu_1");
        CHECK(j["sha_rendered"] == "L/nu_1");
        CHECK(module_from_description(j["mw"]) == canonical_form(M(1, {cyc(1)})));
    }
    SECTION("char ideal payload") {
        auto c = char_ideal_symbolic(M(0, {mu(2), gen({-3, 1}, 2)}));
        auto j = char_ideal_to_json(c, C3);
        CHECK(j["mu"] == 2);
        CHECK(j["rendered"] == "3^2 * (T - 3)^2");
    }
}
