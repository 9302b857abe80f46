#include "wfoeil/semiring.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "wfoeil/errors.hpp"

namespace wfoeil {

Value Value::exact(mpq_class q) {
    Value v;
    q.canonicalize();
    v.q_ = std::move(q);
    v.tag_ = Tag::exact;
    return v;
}

Value Value::real(double d) {
    Value v;
    v.d_ = d;
    v.tag_ = Tag::real;
    return v;
}

Value Value::infinity() {
    Value v;
    v.tag_ = Tag::pos_inf;
    return v;
}

Value Value::neg_infinity() {
    Value v;
    v.tag_ = Tag::neg_inf;
    return v;
}

double Value::as_double() const {
    switch (tag_) {
    case Tag::exact: return q_.get_d();
    case Tag::real: return d_;
    case Tag::pos_inf: return HUGE_VAL;
    case Tag::neg_inf: return -HUGE_VAL;
    }
    return 0.0;
}

bool operator==(const Value& a, const Value& b) {
    if (a.tag_ != b.tag_) return false;
    switch (a.tag_) {
    case Value::Tag::exact: return a.q_ == b.q_;
    case Value::Tag::real: return a.d_ == b.d_;
    default: return true;
    }
}

namespace {

std::string format_double(double d) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string Value::debug_string() const {
    switch (tag_) {
    case Tag::exact: return q_.get_str();
    case Tag::real: return format_double(d_);
    case Tag::pos_inf: return "inf";
    case Tag::neg_inf: return "-inf";
    }
    return "?";
}

namespace {

// Accepts -?digits, -?digits.digits, -?digits/digits.
std::optional<mpq_class> parse_rational_literal(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
        negative = s[0] == '-';
        i = 1;
    }
    auto digits = [&](std::size_t from) {
        std::size_t j = from;
        while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
        return j;
    };
    std::size_t int_end = digits(i);
    if (int_end == i) return std::nullopt;
    mpz_class whole(std::string(s.substr(i, int_end - i)), 10);
    mpq_class q;
    if (int_end == s.size()) {
        q = mpq_class(whole);
    } else if (s[int_end] == '.') {
        std::size_t frac_end = digits(int_end + 1);
        if (frac_end == int_end + 1 || frac_end != s.size()) return std::nullopt;
        std::string frac(s.substr(int_end + 1, frac_end - int_end - 1));
        mpz_class num(frac, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        q = mpq_class(whole) + mpq_class(num, den);
    } else if (s[int_end] == '/') {
        std::size_t den_end = digits(int_end + 1);
        if (den_end == int_end + 1 || den_end != s.size()) return std::nullopt;
        mpz_class den(std::string(s.substr(int_end + 1, den_end - int_end - 1)), 10);
        if (den == 0) return std::nullopt;
        q = mpq_class(whole, den);
    } else {
        return std::nullopt;
    }
    q.canonicalize();
    if (negative) q = -q;
    return q;
}

bool inexact_equal(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Value random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 9);
    int mode = pick(rng);
    if (mode == 0) return Value(0);
    if (mode == 1) return Value(1);
    std::uniform_int_distribution<long> num(-50, 50);
    std::uniform_int_distribution<long> den(1, 20);
    return Value::exact(mpq_class(num(rng), den(rng)));
}

Value random_natural(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 9);
    int mode = pick(rng);
    if (mode == 0) return Value(0);
    if (mode == 1) return Value(1);
    if (mode == 2) {
        mpz_class big;
        std::uniform_int_distribution<unsigned long> chunk;
        big = chunk(rng);
        big *= chunk(rng);
        return Value::exact(mpq_class(big));
    }
    std::uniform_int_distribution<long> n(0, 1000);
    return Value(n(rng));
}

Value random_unit(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 9);
    int mode = pick(rng);
    if (mode == 0) return Value::real(0.0);
    if (mode == 1) return Value::real(1.0);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return Value::real(d(rng));
}

Value random_extended(std::mt19937_64& rng, Value sentinel) {
    std::uniform_int_distribution<int> pick(0, 9);
    int mode = pick(rng);
    if (mode == 0) return sentinel;
    if (mode == 1) return Value::real(0.0);
    std::uniform_real_distribution<double> d(0.0, 100.0);
    return Value::real(d(rng));
}

SemiringSpec make_builtin(SemiringKind kind) {
    SemiringSpec s;
    s.kind = kind;
    switch (kind) {
    case SemiringKind::boolean:
        s.name = "boolean";
        s.zero = Value(0);
        s.one = Value(1);
        break;
    case SemiringKind::natural:
        s.name = "natural";
        s.zero = Value(0);
        s.one = Value(1);
        break;
    case SemiringKind::rational:
        s.name = "rational";
        s.zero = Value(0);
        s.one = Value(1);
        s.is_skew_field = true;
        break;
    case SemiringKind::min_plus:
        s.name = "min-plus";
        s.zero = Value::infinity();
        s.one = Value::real(0.0);
        s.is_exact = false;
        break;
    case SemiringKind::max_plus:
        s.name = "max-plus";
        s.zero = Value::neg_infinity();
        s.one = Value::real(0.0);
        s.is_exact = false;
        break;
    case SemiringKind::viterbi:
        s.name = "viterbi";
        s.zero = Value::real(0.0);
        s.one = Value::real(1.0);
        s.is_exact = false;
        break;
    case SemiringKind::fuzzy:
        s.name = "fuzzy";
        s.zero = Value::real(0.0);
        s.one = Value::real(1.0);
        s.is_exact = false;
        break;
    case SemiringKind::custom: break;
    }
    return s;
}

}  // namespace

Value SemiringSpec::add(const Value& a, const Value& b) const {
    switch (kind) {
    case SemiringKind::boolean:
        return Value((a.rational() != 0 || b.rational() != 0) ? 1 : 0);
    case SemiringKind::natural:
    case SemiringKind::rational: return Value::exact(a.rational() + b.rational());
    case SemiringKind::min_plus:
        if (a.tag() == Value::Tag::pos_inf) return b;
        if (b.tag() == Value::Tag::pos_inf) return a;
        return Value::real(std::min(a.real_value(), b.real_value()));
    case SemiringKind::max_plus:
        if (a.tag() == Value::Tag::neg_inf) return b;
        if (b.tag() == Value::Tag::neg_inf) return a;
        return Value::real(std::max(a.real_value(), b.real_value()));
    case SemiringKind::viterbi:
    case SemiringKind::fuzzy:
        return Value::real(std::max(a.real_value(), b.real_value()));
    case SemiringKind::custom: return custom_add(a, b);
    }
    return a;
}

Value SemiringSpec::mul(const Value& a, const Value& b) const {
    switch (kind) {
    case SemiringKind::boolean:
        return Value((a.rational() != 0 && b.rational() != 0) ? 1 : 0);
    case SemiringKind::natural:
    case SemiringKind::rational: return Value::exact(a.rational() * b.rational());
    case SemiringKind::min_plus:
        if (a.is_infinite() || b.is_infinite()) return Value::infinity();
        return Value::real(a.real_value() + b.real_value());
    case SemiringKind::max_plus:
        if (a.is_infinite() || b.is_infinite()) return Value::neg_infinity();
        return Value::real(a.real_value() + b.real_value());
    case SemiringKind::viterbi: return Value::real(a.real_value() * b.real_value());
    case SemiringKind::fuzzy: return Value::real(std::min(a.real_value(), b.real_value()));
    case SemiringKind::custom: return custom_mul(a, b);
    }
    return a;
}

bool SemiringSpec::equal(const Value& a, const Value& b) const {
    if (is_exact || a.tag() != Value::Tag::real || b.tag() != Value::Tag::real) {
        if (a.tag() == Value::Tag::exact && b.tag() == Value::Tag::exact) return a == b;
        if (a.tag() != b.tag()) return false;
        if (a.tag() != Value::Tag::real) return true;
    }
    return inexact_equal(a.real_value(), b.real_value(), tolerance);
}

bool SemiringSpec::contains(const Value& v) const {
    switch (kind) {
    case SemiringKind::boolean: return v.is_exact() && (v.rational() == 0 || v.rational() == 1);
    case SemiringKind::natural:
        return v.is_exact() && v.rational().get_den() == 1 && v.rational() >= 0;
    case SemiringKind::rational: return v.is_exact();
    case SemiringKind::min_plus:
        return v.tag() == Value::Tag::pos_inf ||
               (v.tag() == Value::Tag::real && v.real_value() >= -tolerance);
    case SemiringKind::max_plus:
        return v.tag() == Value::Tag::neg_inf ||
               (v.tag() == Value::Tag::real && v.real_value() >= -tolerance);
    case SemiringKind::viterbi:
    case SemiringKind::fuzzy:
        return v.tag() == Value::Tag::real && v.real_value() >= -tolerance &&
               v.real_value() <= 1.0 + tolerance;
    case SemiringKind::custom: return true;
    }
    return false;
}

Value SemiringSpec::sample(std::mt19937_64& rng) const {
    if (sampler) return sampler(rng);
    switch (kind) {
    case SemiringKind::boolean: {
        std::uniform_int_distribution<int> bit(0, 1);
        return Value(bit(rng));
    }
    case SemiringKind::natural: return random_natural(rng);
    case SemiringKind::rational:
    case SemiringKind::custom: return random_rational(rng);
    case SemiringKind::min_plus: return random_extended(rng, Value::infinity());
    case SemiringKind::max_plus: return random_extended(rng, Value::neg_infinity());
    case SemiringKind::viterbi:
    case SemiringKind::fuzzy: return random_unit(rng);
    }
    return zero;
}

Value SemiringSpec::parse(std::string_view literal) const {
    auto bad = [&](const char* why) {
        return ValidationError("bad weight literal '" + std::string(literal) + "' for semiring " +
                               name + ": " + why);
    };
    if (literal == "inf" || literal == "+inf") {
        if (kind == SemiringKind::min_plus) return Value::infinity();
        throw bad("inf is only a min-plus value");
    }
    if (literal == "-inf") {
        if (kind == SemiringKind::max_plus) return Value::neg_infinity();
        throw bad("-inf is only a max-plus value");
    }
    if (kind == SemiringKind::boolean) {
        if (literal == "true") return Value(1);
        if (literal == "false") return Value(0);
    }
    auto q = parse_rational_literal(literal);
    if (!q) throw bad("not a number");
    Value v;
    switch (kind) {
    case SemiringKind::boolean:
    case SemiringKind::natural:
    case SemiringKind::rational:
    case SemiringKind::custom: v = Value::exact(*q); break;
    default: v = Value::real(q->get_d()); break;
    }
    if (!contains(v)) throw bad("outside the carrier");
    return v;
}

std::string SemiringSpec::format(const Value& v) const {
    if (v.tag() == Value::Tag::real) return format_double(v.real_value());
    return v.debug_string();
}

mpq_class SemiringSpec::to_rational(const Value& v) const {
    if (!v.is_exact()) throw CapabilityError("value " + v.debug_string() + " is not exact");
    return v.rational();
}

std::span<const std::string_view> builtin_names() {
    static constexpr std::array<std::string_view, 7> names = {
        "boolean", "natural", "rational", "min-plus", "max-plus", "viterbi", "fuzzy"};
    return names;
}

const SemiringSpec& builtin(std::string_view name) {
    static const std::array<SemiringSpec, 7> specs = {
        make_builtin(SemiringKind::boolean),  make_builtin(SemiringKind::natural),
        make_builtin(SemiringKind::rational), make_builtin(SemiringKind::min_plus),
        make_builtin(SemiringKind::max_plus), make_builtin(SemiringKind::viterbi),
        make_builtin(SemiringKind::fuzzy)};
    for (const auto& s : specs)
        if (s.name == name) return s;
    if (name == "minplus" || name == "tropical") return specs[3];
    if (name == "maxplus") return specs[4];
    throw ConfigError("unknown semiring '" + std::string(name) +
                      "' (expected boolean, natural, rational, min-plus, max-plus, viterbi, fuzzy)");
}

Value sum_of(const SemiringSpec& k, std::span<const Value> values) {
    Value acc = k.zero;
    for (const auto& v : values) acc = k.add(acc, v);
    return acc;
}

Value product_of(const SemiringSpec& k, std::span<const Value> values) {
    Value acc = k.one;
    for (const auto& v : values) acc = k.mul(acc, v);
    return acc;
}

LawReport check_laws(const SemiringSpec& spec, std::size_t samples, std::uint64_t seed) {
    LawReport report;
    report.samples = samples;
    std::mt19937_64 rng(seed);
    auto record = [&](const char* axiom, const Value& a, const Value& b, const Value& c) {
        for (const auto& v : report.violations)
            if (v.axiom == axiom) return;
        report.violations.push_back({axiom, a, b, c});
    };
    const Value& zero = spec.zero;
    const Value& one = spec.one;
    for (std::size_t i = 0; i < samples; ++i) {
        Value a = spec.sample(rng), b = spec.sample(rng), c = spec.sample(rng);
        const Value ab = spec.add(a, b);
        const Value bc = spec.add(b, c);
        if (!spec.equal(spec.add(a, bc), spec.add(ab, c))) record("add-associative", a, b, c);
        if (!spec.equal(ab, spec.add(b, a))) record("add-commutative", a, b, c);
        const Value mab = spec.mul(a, b);
        const Value mbc = spec.mul(b, c);
        if (!spec.equal(spec.mul(a, mbc), spec.mul(mab, c))) record("mul-associative", a, b, c);
        if (!spec.equal(mab, spec.mul(b, a))) record("mul-commutative", a, b, c);
        if (!spec.equal(spec.mul(a, bc), spec.add(mab, spec.mul(a, c))))
            record("distributivity", a, b, c);
        if (!spec.equal(spec.add(a, zero), a)) record("add-identity", a, b, c);
        if (!spec.equal(spec.mul(a, one), a)) record("mul-identity", a, b, c);
        if (!spec.equal(spec.mul(a, zero), zero) || !spec.equal(spec.mul(zero, a), zero))
            record("zero-annihilates", a, b, c);
        if (!spec.contains(ab) || !spec.contains(mab)) record("closure", a, b, c);
    }
    return report;
}

}  // namespace wfoeil
