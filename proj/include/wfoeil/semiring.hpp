#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfoeil {

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr double kDefaultTolerance = 1e-9;

// A scalar of some semiring carrier: an exact rational (booleans and naturals
// included), a real number, or one of the two infinity sentinels.
class Value {
public:
    enum class Tag : std::uint8_t { exact, real, pos_inf, neg_inf };

    Value() = default;
    Value(long n) : q_(n) {}  // NOLINT: integers convert implicitly

    static Value exact(mpq_class q);
    static Value real(double d);
    static Value infinity();
    static Value neg_infinity();

    Tag tag() const noexcept { return tag_; }
    bool is_exact() const noexcept { return tag_ == Tag::exact; }
    bool is_infinite() const noexcept { return tag_ == Tag::pos_inf || tag_ == Tag::neg_inf; }
    const mpq_class& rational() const noexcept { return q_; }
    double real_value() const noexcept { return d_; }
    // Numeric view for inexact carriers; exact values are converted.
    double as_double() const;

    friend bool operator==(const Value& a, const Value& b);

    std::string debug_string() const;

private:
    mpq_class q_{0};
    double d_ = 0.0;
    Tag tag_ = Tag::exact;
};

enum class SemiringKind { boolean, natural, rational, min_plus, max_plus, viterbi, fuzzy, custom };

using BinaryOp = std::function<Value(const Value&, const Value&)>;

struct SemiringSpec {
    std::string name;
    SemiringKind kind = SemiringKind::custom;
    Value zero;
    Value one{1};
    bool is_skew_field = false;
    bool is_exact = true;
    double tolerance = kDefaultTolerance;
    // Only consulted for custom kinds; built-ins dispatch on `kind`.
    BinaryOp custom_add;
    BinaryOp custom_mul;
    std::function<Value(std::mt19937_64&)> sampler;

    Value add(const Value& a, const Value& b) const;
    Value mul(const Value& a, const Value& b) const;
    bool equal(const Value& a, const Value& b) const;
    bool is_zero(const Value& v) const { return equal(v, zero); }
    bool contains(const Value& v) const;
    Value sample(std::mt19937_64& rng) const;

    // Parses a weight literal (integer, decimal, a/b, inf, -inf, true/false).
    Value parse(std::string_view literal) const;
    std::string format(const Value& v) const;
    // Exact embedding into the rationals; throws CapabilityError otherwise.
    mpq_class to_rational(const Value& v) const;
};

std::span<const std::string_view> builtin_names();
const SemiringSpec& builtin(std::string_view name);

// Sum and product over a range of values.
Value sum_of(const SemiringSpec& k, std::span<const Value> values);
Value product_of(const SemiringSpec& k, std::span<const Value> values);

struct LawViolation {
    std::string axiom;
    Value a, b, c;
};

struct LawReport {
    std::vector<LawViolation> violations;
    std::size_t samples = 0;
    bool ok() const noexcept { return violations.empty(); }
};

LawReport check_laws(const SemiringSpec& spec, std::size_t samples,
                     std::uint64_t seed = kDefaultSeed);

}  // namespace wfoeil
