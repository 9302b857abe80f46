#include "wfoeil/system.hpp"

#include <algorithm>
#include <set>

#include "wfoeil/errors.hpp"

namespace wfoeil {

std::optional<std::uint32_t> ComponentType::port_index(std::string_view port) const {
    for (std::uint32_t i = 0; i < ports.size(); ++i)
        if (ports[i].name == port) return i;
    return std::nullopt;
}

std::optional<std::uint32_t> ParametricSystem::type_index(std::string_view type) const {
    for (std::uint32_t i = 0; i < types.size(); ++i)
        if (types[i].name == type) return i;
    return std::nullopt;
}

ParametricSystem ParametricSystem::with_semiring(std::string_view name) const {
    ParametricSystem copy = *this;
    copy.semiring = builtin(name).name;
    validate_system(copy);
    return copy;
}

void validate_system(ParametricSystem& system) {
    const SemiringSpec& k = builtin(system.semiring);
    system.semiring = k.name;
    if (system.types.empty()) throw ValidationError("no component types");
    std::set<std::string> type_names;
    for (auto& type : system.types) {
        if (!type_names.insert(type.name).second)
            throw ValidationError("duplicate component type '" + type.name + "'");
        if (type.ports.empty())
            throw ValidationError("component type '" + type.name + "' has no ports");
        std::set<std::string> port_names;
        for (auto& port : type.ports) {
            if (!port_names.insert(port.name).second)
                throw ValidationError("duplicate port '" + port.name + "' in type '" + type.name + "'");
            port.weight = port.weight_text.empty() ? k.one : k.parse(port.weight_text);
        }
        if (!type.lts) continue;
        const Lts& lts = *type.lts;
        std::set<std::string> states(lts.states.begin(), lts.states.end());
        if (states.size() != lts.states.size())
            throw ValidationError("duplicate LTS state in type '" + type.name + "'");
        if (!lts.initial.empty() && !states.count(lts.initial))
            throw ValidationError("unknown initial state '" + lts.initial + "' in type '" + type.name + "'");
        std::set<std::string> used;
        for (const auto& t : lts.transitions) {
            if (!states.count(t.from) || !states.count(t.to))
                throw ValidationError("transition of type '" + type.name + "' uses an unknown state");
            if (!type.port_index(t.port))
                throw ValidationError("transition of type '" + type.name + "' uses unknown port '" +
                                      t.port + "'");
            if (!used.insert(t.port).second)
                throw ValidationError("port '" + t.port + "' of type '" + type.name +
                                      "' occurs in more than one transition");
        }
        for (auto& port : type.ports)
            if (!used.count(port.name)) port.weight = k.zero;
    }
    if (system.instances) {
        if (system.instances->size() != system.types.size())
            throw ValidationError("instances block must give a count for every component type");
        for (std::size_t i = 0; i < system.types.size(); ++i)
            if ((*system.instances)[i] == 0)
                throw ValidationError("instance count of type '" + system.types[i].name +
                                      "' must be at least 1");
    }
}

Interaction::Interaction(std::vector<PortInstance> ports) : ports_(std::move(ports)) {
    std::sort(ports_.begin(), ports_.end());
    ports_.erase(std::unique(ports_.begin(), ports_.end()), ports_.end());
}

bool Interaction::contains(const PortInstance& p) const {
    return std::binary_search(ports_.begin(), ports_.end(), p);
}

SystemView::SystemView(ParametricSystem system, InstanceMap r)
    : system_(std::move(system)), r_(std::move(r)) {
    if (r_.size() != system_.types.size())
        throw ValidationError("instance map covers " + std::to_string(r_.size()) + " of " +
                              std::to_string(system_.types.size()) + " component types");
    for (std::size_t i = 0; i < r_.size(); ++i)
        if (r_[i] == 0)
            throw ValidationError("instance count of type '" + system_.types[i].name +
                                  "' must be at least 1");
}

std::vector<PortInstance> SystemView::port_instances() const {
    std::vector<PortInstance> out;
    for (std::uint32_t t = 0; t < r_.size(); ++t)
        for (std::uint32_t j = 1; j <= r_[t]; ++j)
            for (std::uint32_t p = 0; p < system_.types[t].ports.size(); ++p)
                out.push_back({t, j, p});
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t SystemView::interaction_count() const {
    // Each component instance contributes "no port" or one of its ports.
    unsigned __int128 total = 1;
    const unsigned __int128 cap = UINT64_MAX;
    for (std::uint32_t t = 0; t < r_.size(); ++t) {
        const unsigned __int128 choices = system_.types[t].ports.size() + 1;
        for (std::uint32_t j = 0; j < r_[t]; ++j) {
            total *= choices;
            if (total > cap) return UINT64_MAX;
        }
    }
    return static_cast<std::uint64_t>(total - 1);
}

std::vector<Interaction> SystemView::enumerate_interactions(std::uint64_t limit) const {
    const std::uint64_t count = interaction_count();
    if (count > limit)
        throw AlphabetBlowupError("interaction alphabet has " +
                                  (count == UINT64_MAX ? std::string("more than 2^64")
                                                       : std::to_string(count)) +
                                  " letters, above the limit of " + std::to_string(limit) +
                                  "; pass an explicit alphabet file instead");
    struct Slot {
        std::uint32_t type, instance, choices;
    };
    std::vector<Slot> slots;
    for (std::uint32_t t = 0; t < r_.size(); ++t)
        for (std::uint32_t j = 1; j <= r_[t]; ++j)
            slots.push_back({t, j, static_cast<std::uint32_t>(system_.types[t].ports.size() + 1)});
    std::vector<Interaction> out;
    out.reserve(count);
    std::vector<std::uint32_t> digit(slots.size(), 0);
    while (true) {
        std::size_t k = 0;
        while (k < slots.size() && ++digit[k] == slots[k].choices) digit[k++] = 0;
        if (k == slots.size()) break;
        std::vector<PortInstance> ports;
        for (std::size_t s = 0; s < slots.size(); ++s)
            if (digit[s] != 0) ports.push_back({slots[s].type, slots[s].instance, digit[s] - 1});
        out.emplace_back(std::move(ports));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool SystemView::is_valid(const PortInstance& port) const {
    return port.type < r_.size() && port.port < system_.types[port.type].ports.size() &&
           port.instance >= 1 && port.instance <= r_[port.type];
}

Value SystemView::weight_of(const PortInstance& port) const {
    if (!is_valid(port)) throw ValidationError("unknown port instance " + port_name(port));
    return system_.types[port.type].ports[port.port].weight;
}

void SystemView::check_interaction(const Interaction& a) const {
    if (a.empty()) throw ValidationError("empty interaction");
    for (std::size_t i = 0; i < a.ports().size(); ++i) {
        const auto& p = a.ports()[i];
        if (!is_valid(p)) throw ValidationError("unknown port instance " + port_name(p));
        if (i > 0) {
            const auto& q = a.ports()[i - 1];
            if (q.type == p.type && q.instance == p.instance)
                throw ValidationError("interaction " + interaction_name(a) +
                                      " uses two ports of the same component instance");
        }
    }
}

void SystemView::check_word(const Word& w) const {
    for (const auto& a : w) check_interaction(a);
}

std::string SystemView::port_name(const PortInstance& port) const {
    std::string type = port.type < system_.types.size() ? system_.types[port.type].name : "?";
    std::string name = "?";
    if (port.type < system_.types.size() && port.port < system_.types[port.type].ports.size())
        name = system_.types[port.type].ports[port.port].name;
    return type + "." + name + "(" + std::to_string(port.instance) + ")";
}

std::string SystemView::interaction_name(const Interaction& a) const {
    std::string out = "{";
    for (std::size_t i = 0; i < a.ports().size(); ++i) {
        if (i) out += ", ";
        out += port_name(a.ports()[i]);
    }
    return out + "}";
}

std::string SystemView::word_name(const Word& w) const {
    if (w.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += " ";
        out += interaction_name(w[i]);
    }
    return out;
}

}  // namespace wfoeil
