#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "wfoeil/errors.hpp"
#include "wfoeil/semiring.hpp"

using namespace wfoeil;
using support::rat;

TEST_CASE("built-in operations") {
    const auto& mp = builtin("min-plus");
    CHECK(mp.equal(mp.add(Value::real(3), Value::real(5)), Value::real(3)));
    CHECK(mp.equal(mp.mul(Value::real(3), Value::real(5)), Value::real(8)));
    CHECK(mp.equal(mp.add(Value::real(3), mp.zero), Value::real(3)));
    CHECK(mp.zero == Value::infinity());
    CHECK(mp.one == Value::real(0));

    const auto& xp = builtin("max-plus");
    CHECK(xp.equal(xp.add(Value::real(3), Value::real(5)), Value::real(5)));
    CHECK(xp.zero == Value::neg_infinity());

    const auto& nat = builtin("natural");
    for (long x : {0L, 1L, 7L, 1000L}) {
        CHECK(nat.mul(Value(x), nat.one) == Value(x));
        CHECK(nat.add(Value(x), nat.zero) == Value(x));
    }

    const auto& vit = builtin("viterbi");
    CHECK(vit.equal(vit.mul(Value::real(0.5), Value::real(0.5)), Value::real(0.25)));
    CHECK(vit.equal(vit.add(Value::real(0.5), Value::real(0.25)), Value::real(0.5)));

    const auto& fz = builtin("fuzzy");
    CHECK(fz.equal(fz.mul(Value::real(0.3), Value::real(0.6)), Value::real(0.3)));
    CHECK(fz.equal(fz.add(Value::real(0.3), Value::real(0.6)), Value::real(0.6)));

    const auto& b = builtin("boolean");
    CHECK(b.add(Value(1), Value(1)) == Value(1));
    CHECK(b.mul(Value(1), Value(0)) == Value(0));
}

TEST_CASE("aliases and unknown names") {
    CHECK(builtin("tropical").kind == SemiringKind::min_plus);
    CHECK(builtin("minplus").kind == SemiringKind::min_plus);
    CHECK(builtin("maxplus").kind == SemiringKind::max_plus);
    CHECK_THROWS_AS(builtin("octonions"), ConfigError);
}

TEST_CASE("only the rationals are a skew field") {
    for (auto name : builtin_names()) {
        CAPTURE(name);
        CHECK(builtin(name).is_skew_field == (name == "rational"));
    }
}

TEST_CASE("every built-in semiring satisfies the laws") {
    for (auto name : builtin_names()) {
        CAPTURE(name);
        const auto report = check_laws(builtin(name), 1000);
        CHECK(report.samples == 1000);
        CHECK(report.ok());
    }
}

TEST_CASE("law checking is deterministic per seed") {
    const auto a = check_laws(builtin("viterbi"), 200, 7);
    const auto b = check_laws(builtin("viterbi"), 200, 7);
    CHECK(a.ok() == b.ok());
    CHECK(a.samples == b.samples);
}

TEST_CASE("a broken multiplication is caught with a distributivity witness") {
    SemiringSpec broken;
    broken.name = "broken";
    broken.kind = SemiringKind::custom;
    broken.zero = Value(0);
    broken.one = Value(1);
    broken.custom_add = [](const Value& a, const Value& b) { return Value::exact(a.rational() + b.rational()); };
    broken.custom_mul = [](const Value& a, const Value& b) { return Value::exact(a.rational() - b.rational()); };
    broken.sampler = [](std::mt19937_64& rng) { return Value(static_cast<long>(rng() % 10)); };

    const auto report = check_laws(broken, 200);
    REQUIRE_FALSE(report.ok());
    bool distributivity = false;
    for (const auto& v : report.violations) {
        if (v.axiom != "distributivity") continue;
        distributivity = true;
        // a * (b + c) != a * b + a * c for the reported triple.
        const Value lhs = broken.mul(v.a, broken.add(v.b, v.c));
        const Value rhs = broken.add(broken.mul(v.a, v.b), broken.mul(v.a, v.c));
        CHECK_FALSE(broken.equal(lhs, rhs));
    }
    CHECK(distributivity);
}

TEST_CASE("weight literals") {
    const auto& q = builtin("rational");
    CHECK(q.parse("2/3") == rat(2, 3));
    CHECK(q.parse("-4/6") == rat(-2, 3));
    CHECK(q.parse("0.25") == rat(1, 4));
    CHECK(q.format(rat(2, 3)) == "2/3");

    const auto& mp = builtin("min-plus");
    CHECK(mp.parse("inf") == Value::infinity());
    CHECK(mp.format(Value::infinity()) == "inf");

    const auto& nat = builtin("natural");
    CHECK_THROWS(nat.parse("2/3"));
    CHECK_THROWS(nat.parse("-1"));
    CHECK_THROWS(nat.parse("abc"));
}

TEST_CASE("carrier membership") {
    CHECK(builtin("natural").contains(Value(4)));
    CHECK_FALSE(builtin("natural").contains(rat(1, 2)));
    CHECK(builtin("viterbi").contains(Value::real(0.5)));
    CHECK_FALSE(builtin("viterbi").contains(Value::real(1.5)));
    CHECK_FALSE(builtin("boolean").contains(Value(2)));
}

TEST_CASE("sums and products over ranges") {
    const auto& nat = builtin("natural");
    std::vector<Value> xs{Value(2), Value(3), Value(4)};
    CHECK(sum_of(nat, xs) == Value(9));
    CHECK(product_of(nat, xs) == Value(24));
    CHECK(sum_of(nat, {}) == nat.zero);
    CHECK(product_of(nat, {}) == nat.one);
}

TEST_CASE("rational embedding") {
    CHECK(builtin("natural").to_rational(Value(5)) == mpq_class(5));
    CHECK_THROWS_AS(builtin("min-plus").to_rational(Value::infinity()), CapabilityError);
    CHECK_THROWS_AS(builtin("viterbi").to_rational(Value::real(0.5)), CapabilityError);
}
