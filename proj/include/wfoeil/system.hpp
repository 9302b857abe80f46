#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfoeil/semiring.hpp"

namespace wfoeil {

inline constexpr std::uint64_t kDefaultAlphabetLimit = std::uint64_t{1} << 20;

struct Port {
    std::string name;
    std::string weight_text;  // literal as written, re-parsed on semiring override
    Value weight;
};

struct LtsTransition {
    std::string from;
    std::string port;
    std::string to;
};

struct Lts {
    std::vector<std::string> states;
    std::string initial;
    std::vector<LtsTransition> transitions;
};

struct ComponentType {
    std::string name;
    std::vector<Port> ports;
    std::optional<Lts> lts;

    std::optional<std::uint32_t> port_index(std::string_view port) const;
};

// r: one positive instance count per component type, in declaration order.
using InstanceMap = std::vector<std::uint32_t>;

struct ParametricSystem {
    std::string semiring = "natural";
    std::vector<ComponentType> types;
    std::optional<InstanceMap> instances;  // from the system file, if given

    std::optional<std::uint32_t> type_index(std::string_view type) const;
    const SemiringSpec& semiring_spec() const { return builtin(semiring); }
    // Re-interprets every port weight under another semiring.
    ParametricSystem with_semiring(std::string_view name) const;
};

// Checks name uniqueness, LTS port discipline and weight defaulting; throws ValidationError.
void validate_system(ParametricSystem& system);

struct PortInstance {
    std::uint32_t type = 0;
    std::uint32_t instance = 1;  // 1-based
    std::uint32_t port = 0;

    auto operator<=>(const PortInstance&) const = default;
};

// A nonempty set of port instances, at most one per component instance; kept sorted.
class Interaction {
public:
    Interaction() = default;
    explicit Interaction(std::vector<PortInstance> ports);

    const std::vector<PortInstance>& ports() const noexcept { return ports_; }
    bool contains(const PortInstance& p) const;
    bool empty() const noexcept { return ports_.empty(); }
    std::size_t size() const noexcept { return ports_.size(); }

    auto operator<=>(const Interaction&) const = default;

private:
    std::vector<PortInstance> ports_;
};

using Word = std::vector<Interaction>;

struct Variable {
    std::string name;
    std::uint32_t sort = 0;

    auto operator<=>(const Variable&) const = default;
};

using Assignment = std::map<Variable, std::uint32_t>;

// An instantiated system with its port instances and interaction alphabet.
class SystemView {
public:
    SystemView(ParametricSystem system, InstanceMap r);

    const ParametricSystem& system() const noexcept { return system_; }
    const InstanceMap& instances() const noexcept { return r_; }
    const SemiringSpec& semiring() const { return system_.semiring_spec(); }

    std::vector<PortInstance> port_instances() const;
    // Number of interactions, saturating at UINT64_MAX.
    std::uint64_t interaction_count() const;
    // Every valid interaction exactly once, in a fixed order; AlphabetBlowupError past `limit`.
    std::vector<Interaction> enumerate_interactions(std::uint64_t limit = kDefaultAlphabetLimit) const;
    Value weight_of(const PortInstance& port) const;

    bool is_valid(const PortInstance& port) const;
    // Throws ValidationError naming the offending port or component instance.
    void check_interaction(const Interaction& a) const;
    void check_word(const Word& w) const;

    std::string port_name(const PortInstance& port) const;
    std::string interaction_name(const Interaction& a) const;
    std::string word_name(const Word& w) const;

private:
    ParametricSystem system_;
    InstanceMap r_;
};

}  // namespace wfoeil
