#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracle.hpp"
#include "support.hpp"
#include "wfoeil/errors.hpp"
#include "wfoeil/formula.hpp"
#include "wfoeil/parser.hpp"
#include "wfoeil/semantics.hpp"

using namespace wfoeil;

namespace {

const char* kSystem =
    "wcb 1\nsemiring natural\n"
    "type t { port a weight 2 port b weight 3 }\n"
    "type u { port c weight 5 }\n"
    "instances { t = 2 u = 1 }\n";

struct Fixture {
    ParametricSystem sys = parse_system(kSystem);
    SystemView view{sys, *sys.instances};
    std::vector<Word> words = support::words_over(view.enumerate_interactions(), 2);

    FormulaPtr parse(std::string_view text) const { return parse_formula(text, sys); }
    bool rejected(std::string_view text) const {
        try {
            parse_formula(text, sys);
            return false;
        } catch (const ParseError&) {
            return true;
        }
    }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "well-formed formulas are accepted") {
    CHECK_FALSE(rejected("E x:t . a(x)"));
    CHECK_FALSE(rejected("A x:t E y:u . a(x) * c(y)"));
    CHECK_FALSE(rejected("Sum x:t . hashw(a(x), c(1))"));
    CHECK_FALSE(rejected("ProdC x:t . Sum y:u . hashw(a(x), c(y))"));
    CHECK_FALSE(rejected("E x:t E y:t (x != y) . a(x) & b(y)"));
    CHECK_FALSE(rejected("2 (.) (a(1) (+) 3)"));
    CHECK_FALSE(rejected("!((a(1) | b(1)) * c(1))"));
}

TEST_CASE_FIXTURE(Fixture, "ill-formed formulas are rejected") {
    // Negated non-PIL operand with a variable bound by an existential concatenation quantifier.
    CHECK(rejected("SumC x:t . !(true * a(x))"));
    CHECK(rejected("Ec x:t . !(a(x) * b(x))"));
    // Negation may only apply to PIL disjunctions/conjunctions at the EPIL level.
    CHECK(rejected("!((a(1) * b(1)) | c(1))"));
    // Sort errors.
    CHECK(rejected("E x:t . c(x)"));
    CHECK(rejected("E x:t E y:u . x = y"));
    // Weighted under unweighted.
    CHECK(rejected("E x:t . hashw(a(x))"));
    CHECK(rejected("a(1) & 2"));
    // Constants outside the carrier, unknown names, bad instances.
    CHECK(rejected("1/2"));
    CHECK(rejected("d(1)"));
    CHECK(rejected("a(0)"));
    CHECK(rejected("hash(a(1), b(1))"));
    CHECK(rejected("E x:t . y = x"));
}

TEST_CASE_FIXTURE(Fixture, "validator reports spans") {
    const auto f = parse_formula_unchecked("a(1) & E x:t . c(x)", sys);
    const auto diags = validate(*f, sys);
    REQUIRE_FALSE(diags.empty());
    CHECK(diags.front().span.start >= 7);
}

TEST_CASE_FIXTURE(Fixture, "layers") {
    CHECK(layer_diagnostics(*parse("a(1) & !b(2)"), Layer::pil).empty());
    CHECK_FALSE(layer_diagnostics(*parse("a(1) * b(2)"), Layer::pil).empty());
    CHECK(layer_diagnostics(*parse("a(1) * b(2)"), Layer::epil).empty());
    CHECK_FALSE(layer_diagnostics(*parse("2 (.) a(1)"), Layer::epil).empty());
    CHECK(layer_diagnostics(*parse("2 (.) a(1)"), Layer::wepil).empty());
    CHECK_FALSE(layer_diagnostics(*parse("E x:t . a(x)"), Layer::epil).empty());
    CHECK(layer_diagnostics(*parse("E x:t . a(x)"), Layer::foeil).empty());
    CHECK_FALSE(layer_diagnostics(*parse("Sum x:t . a(x) (x) 2"), Layer::foeil).empty());
    CHECK_THROWS_AS(parse_formula("a(1) * b(1)", sys, Layer::pil), ParseError);
}

TEST_CASE_FIXTURE(Fixture, "layer flags") {
    CHECK(parse("a(1) | !b(1)")->pil);
    CHECK_FALSE(parse("a(1) * b(1)")->pil);
    CHECK(parse("a(1) * b(1)")->epil);
    CHECK_FALSE(parse("E x:t . a(x)")->epil);
    CHECK(parse("2 (+) a(1)")->weighted);
    CHECK_FALSE(parse("a(1) ~ b(1)")->weighted);
}

TEST_CASE_FIXTURE(Fixture, "free variables") {
    const auto f = parse_formula_unchecked("a(x:t) & E y:t . b(y) & c(z:u)", sys);
    const auto free = free_variables(*f);
    CHECK(free == std::set<Variable>{{"x", 0}, {"z", 1}});
    CHECK(free_variables(*parse("E x:t . a(x)")).empty());
    const auto shadow = parse_formula_unchecked("a(x:t) * E x:t . b(x)", sys);
    CHECK(free_variables(*shadow) == std::set<Variable>{{"x", 0}});
}

TEST_CASE_FIXTURE(Fixture, "macro expansion agrees with the native macro") {
    const oracle::Oracle o(view);
    // Variables and fixed instances cannot be mixed: the expansion would compare them.
    CHECK_THROWS_AS(expand_hash_macro(*parse("E x:t . hash(a(x), c(1))")->children[0], sys), ValidationError);
    for (auto text : {"hash(a(1), c(1))", "hash(b(2))", "E x:t E y:u . hash(a(x), c(y))",
                      "E x:t E y:t (x != y) . hash(a(x), b(y))", "hashw(a(1), c(1))",
                      "Sum x:t . hashw(b(x))", "ProdC x:t Sum y:u . hashw(a(x), c(y))"}) {
        CAPTURE(text);
        const auto f = parse(text);
        const auto expanded = expand_all_macros(f, sys);
        CHECK(validate(*expanded, sys).empty());
        for (const auto& w : words) {
            CAPTURE(view.word_name(w));
            if (f->weighted) CHECK(o.value(*f, w) == o.value(*expanded, w));
            else CHECK(o.sat(*f, w) == o.sat(*expanded, w));
        }
    }
}

TEST_CASE_FIXTURE(Fixture, "macro expansion shape") {
    const auto f = parse("hash(a(1), c(1))");
    const auto expanded = expand_hash_macro(*f, sys);
    // The macro abbreviates a PIL conjunction.
    CHECK(expanded->pil);
    CHECK(expanded->kind == NodeKind::conjunction);
}

TEST_CASE_FIXTURE(Fixture, "alpha renaming preserves semantics") {
    const oracle::Oracle o(view);
    for (auto text : {"E x:t . (a(x) * E x:t . b(x))", "Sum x:t . (hashw(a(x)) (.) Sum x:t . hashw(b(x)))",
                      "A x:t . (E y:t . a(y)) | (E x:u . c(x))", "SumS x:t SumS y:u . hashw(a(x), c(y))"}) {
        CAPTURE(text);
        const auto f = parse(text);
        const auto renamed = alpha_rename(f);
        CHECK(validate(*renamed, sys).empty());
        for (const auto& w : words) {
            CAPTURE(view.word_name(w));
            if (f->weighted) CHECK(o.value(*f, w) == o.value(*renamed, w));
            else CHECK(o.sat(*f, w) == o.sat(*renamed, w));
        }
    }
}

TEST_CASE_FIXTURE(Fixture, "structural equality and quantifier keywords") {
    CHECK(structurally_equal(*parse("a(1) & b(2)"), *parse("(a(1)) & (b(2))")));
    CHECK_FALSE(structurally_equal(*parse("a(1) & b(2)"), *parse("b(2) & a(1)")));
    CHECK(quantifier_keyword(Quantifier::sum_shuffle) == "SumS");
    CHECK(quantifier_keyword(Quantifier::forall_concat) == "Ac");
}

TEST_CASE_FIXTURE(Fixture, "constraint sugar") {
    const oracle::Oracle o(view);
    // Existential: x != y conjoined; universal: implication.
    const auto ex = parse("E x:t E y:t (x != y) . a(x) * a(y)");
    const auto ex_plain = parse("E x:t E y:t . !(x = y) & (a(x) * a(y))");
    const auto un = parse("A x:t A y:t (x != y) . a(x) | b(y)");
    const auto un_plain = parse("A x:t A y:t . x = y | (a(x) | b(y))");
    for (const auto& w : words) {
        CHECK(o.sat(*ex, w) == o.sat(*ex_plain, w));
        CHECK(o.sat(*un, w) == o.sat(*un_plain, w));
    }
}
