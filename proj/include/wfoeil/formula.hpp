#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfoeil/errors.hpp"
#include "wfoeil/semiring.hpp"
#include "wfoeil/system.hpp"

namespace wfoeil {

enum class NodeKind {
    truth,
    port,
    hash,           // exactly the interaction of the listed ports
    hash_weighted,  // the same, weighted by the product of the port weights
    constant,
    equal,
    negation,
    disjunction,
    conjunction,
    concat,
    shuffle,
    weighted_sum,
    weighted_product,
    weighted_concat,
    weighted_shuffle,
    quantified,
};

enum class Quantifier {
    exists,
    forall,
    exists_concat,
    forall_concat,
    exists_shuffle,
    forall_shuffle,
    sum,
    product,
    sum_concat,
    product_concat,
    sum_shuffle,
    product_shuffle,
};

bool is_weighted(Quantifier q);
bool is_existential(Quantifier q);
// The existential concatenation/shuffle quantifiers that carry the negation proviso.
bool is_restricted(Quantifier q);

enum class Layer { pil, epil, wepil, foeil, wfoeil };

// A component instance: a sorted variable or a fixed instance number.
struct Term {
    std::optional<Variable> var;
    std::uint32_t instance = 0;

    static Term variable(Variable v) { return Term{std::move(v), 0}; }
    static Term fixed(std::uint32_t j) { return Term{std::nullopt, j}; }
    auto operator<=>(const Term&) const = default;
};

struct PortRef {
    std::uint32_t type = 0;
    std::uint32_t port = 0;
    Term term;
    auto operator<=>(const PortRef&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable AST node. Build through the factory functions below, which
// precompute the free variables and the layer flags of every subtree.
struct Formula {
    NodeKind kind = NodeKind::truth;
    Quantifier quantifier = Quantifier::exists;
    Variable bound;                  // quantified
    std::vector<PortRef> ports;      // port (one), hash / hash_weighted (arguments)
    Value constant;                  // constant
    Variable lhs, rhs;               // equal
    std::vector<FormulaPtr> children;
    SourceSpan span;

    std::vector<Variable> free;      // sorted
    bool pil = false;                // built from true, ports, hash, !, &, | only
    bool epil = false;               // additionally *, ~; no equality, quantifier or weight
    bool weighted = false;           // contains a weighted construct

    bool is_literal_true() const noexcept { return kind == NodeKind::truth; }
    const Formula& child(std::size_t i) const { return *children.at(i); }
};

FormulaPtr make_true(SourceSpan span = {});
FormulaPtr make_false(SourceSpan span = {});
FormulaPtr make_port(PortRef port, SourceSpan span = {});
// Throws ValidationError if two arguments name the same component instance.
FormulaPtr make_hash(std::vector<PortRef> args, bool weighted, SourceSpan span = {});
FormulaPtr make_constant(Value k, SourceSpan span = {});
FormulaPtr make_equal(Variable lhs, Variable rhs, SourceSpan span = {});
FormulaPtr make_not(FormulaPtr operand, SourceSpan span = {});
FormulaPtr make_binary(NodeKind kind, FormulaPtr lhs, FormulaPtr rhs, SourceSpan span = {});
FormulaPtr make_quantified(Quantifier q, Variable bound, FormulaPtr body, SourceSpan span = {});

bool structurally_equal(const Formula& a, const Formula& b);

struct Diagnostic {
    std::string message;
    SourceSpan span;
};

// Sorts, negation discipline (including the proviso under existential
// concatenation/shuffle quantifiers), weighted-under-unweighted nesting,
// constants in the carrier, and port references.
std::vector<Diagnostic> validate(const Formula& f, const ParametricSystem& system);
// Constructs outside the requested layer.
std::vector<Diagnostic> layer_diagnostics(const Formula& f, Layer layer);

std::set<Variable> free_variables(const Formula& f);

// The conjunction a hash macro abbreviates, with the weighted port atoms for hash_weighted.
FormulaPtr expand_hash_macro(const Formula& macro, const ParametricSystem& system);
// Expands every macro occurrence.
FormulaPtr expand_all_macros(const FormulaPtr& f, const ParametricSystem& system);

// Renames bound variables apart from each other and from the free variables.
FormulaPtr alpha_rename(const FormulaPtr& f);

// Replaces weighted operators by their unweighted counterparts, nonzero constants by
// true, zero by false and weighted macros by unweighted ones.
FormulaPtr boolean_shadow(const FormulaPtr& f, const SemiringSpec& k);

std::string_view quantifier_keyword(Quantifier q);

}  // namespace wfoeil
