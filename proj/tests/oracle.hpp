#pragma once

// Brute-force reference semantics used to derive and freeze fixture values.
// Works on explicit subwords and enumerates every splitting and interleaving
// decomposition directly; shares nothing with the library evaluator except the AST.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "wfoeil/formula.hpp"
#include "wfoeil/semantics.hpp"
#include "wfoeil/system.hpp"

namespace oracle {

using namespace wfoeil;

class Oracle {
public:
    explicit Oracle(const SystemView& view) : view_(view), k_(view.semiring()) {}

    bool sat(const Formula& f, const Word& w, Assignment sigma = {}) const {
        sigma_ = std::move(sigma);
        return holds(f, w);
    }

    Value value(const Formula& f, const Word& w, Assignment sigma = {}) const {
        sigma_ = std::move(sigma);
        return weight(f, w);
    }

private:
    std::uint32_t at(const Term& t) const {
        if (!t.var) return t.instance;
        auto it = sigma_.find(*t.var);
        if (it == sigma_.end()) throw ValidationError("oracle: unbound variable " + t.var->name);
        return it->second;
    }

    // Ports named by a macro, or empty if two of them share a component instance.
    std::vector<PortInstance> macro_ports(const Formula& f) const {
        std::vector<PortInstance> ports;
        for (const auto& p : f.ports) {
            PortInstance pi{p.type, at(p.term), p.port};
            for (const auto& q : ports)
                if (q.type == pi.type && q.instance == pi.instance && q.port != pi.port) return {};
            if (std::find(ports.begin(), ports.end(), pi) == ports.end()) ports.push_back(pi);
        }
        std::sort(ports.begin(), ports.end());
        return ports;
    }

    bool letter(const Formula& f, const Interaction& a) const {
        switch (f.kind) {
        case NodeKind::truth: return true;
        case NodeKind::port: {
            const auto& p = f.ports[0];
            PortInstance pi{p.type, at(p.term), p.port};
            return std::find(a.ports().begin(), a.ports().end(), pi) != a.ports().end();
        }
        case NodeKind::hash: {
            auto ports = macro_ports(f);
            return !ports.empty() && ports == a.ports();
        }
        case NodeKind::negation: return !letter(f.child(0), a);
        case NodeKind::disjunction: return letter(f.child(0), a) || letter(f.child(1), a);
        case NodeKind::conjunction: return letter(f.child(0), a) && letter(f.child(1), a);
        default: throw std::logic_error("oracle: not a letter predicate");
        }
    }

    static bool empty_ok(const Formula& f) {
        if (f.kind == NodeKind::truth) return true;
        if constexpr (!kCompositionalEmpty) {
            return false;
        } else {
            switch (f.kind) {
            case NodeKind::negation: return !empty_ok(f.child(0));
            case NodeKind::disjunction: return empty_ok(f.child(0)) || empty_ok(f.child(1));
            case NodeKind::conjunction:
            case NodeKind::concat:
            case NodeKind::shuffle: return empty_ok(f.child(0)) && empty_ok(f.child(1));
            default: return false;
            }
        }
    }

    static Word slice(const Word& w, std::size_t from, std::size_t to) {
        return Word(w.begin() + static_cast<long>(from), w.begin() + static_cast<long>(to));
    }

    // Splits w into the positions selected by `bits` and the rest, preserving order.
    static std::pair<Word, Word> pick(const Word& w, std::uint64_t bits) {
        Word in, out;
        for (std::size_t i = 0; i < w.size(); ++i) (bits >> i & 1 ? in : out).push_back(w[i]);
        return {in, out};
    }

    // Calls visit(parts) for every way of cutting w into `n` consecutive (possibly empty) parts.
    static void compositions(const Word& w, std::size_t n, const std::function<void(const std::vector<Word>&)>& visit) {
        std::vector<Word> parts;
        std::function<void(std::size_t, std::size_t)> go = [&](std::size_t from, std::size_t left) {
            if (left == 1) {
                parts.push_back(slice(w, from, w.size()));
                visit(parts);
                parts.pop_back();
                return;
            }
            for (std::size_t to = from; to <= w.size(); ++to) {
                parts.push_back(slice(w, from, to));
                go(to, left - 1);
                parts.pop_back();
            }
        };
        if (n == 0) {
            if (w.empty()) visit(parts);
            return;
        }
        go(0, n);
    }

    // Calls visit(parts) for every assignment of the positions of w to `n` ordered parts.
    static void distributions(const Word& w, std::size_t n, const std::function<void(const std::vector<Word>&)>& visit) {
        std::vector<std::size_t> owner(w.size(), 0);
        if (n == 0) {
            if (w.empty()) visit({});
            return;
        }
        for (;;) {
            std::vector<Word> parts(n);
            for (std::size_t i = 0; i < w.size(); ++i) parts[owner[i]].push_back(w[i]);
            visit(parts);
            std::size_t i = 0;
            while (i < w.size() && ++owner[i] == n) owner[i++] = 0;
            if (i == w.size()) return;
        }
    }

    std::vector<std::vector<std::uint32_t>> index_sets(std::uint32_t r, bool all_only) const {
        std::vector<std::vector<std::uint32_t>> out;
        for (std::uint32_t m = 1; m < (1u << r); ++m) {
            if (all_only && m != (1u << r) - 1) continue;
            std::vector<std::uint32_t> set;
            for (std::uint32_t j = 0; j < r; ++j)
                if (m >> j & 1) set.push_back(j + 1);
            out.push_back(set);
        }
        return out;
    }

    template <class F>
    auto with(const Variable& v, std::uint32_t j, F&& body) const {
        auto saved = sigma_;
        sigma_[v] = j;
        auto out = body();
        sigma_ = std::move(saved);
        return out;
    }

    bool holds(const Formula& f, const Word& w) const {
        if (f.weighted) throw std::logic_error("oracle: weighted node in Boolean position");
        if (f.epil) {
            if (f.kind == NodeKind::truth) return true;
            if (w.empty()) return empty_ok(f);
            if (f.pil) return w.size() == 1 && letter(f, w[0]);
        }
        switch (f.kind) {
        case NodeKind::equal: return sigma_.at(f.lhs) == sigma_.at(f.rhs);
        case NodeKind::negation: return !holds(f.child(0), w);
        case NodeKind::disjunction: return holds(f.child(0), w) || holds(f.child(1), w);
        case NodeKind::conjunction: return holds(f.child(0), w) && holds(f.child(1), w);
        case NodeKind::concat:
            for (std::size_t i = 0; i <= w.size(); ++i)
                if (holds(f.child(0), slice(w, 0, i)) && holds(f.child(1), slice(w, i, w.size()))) return true;
            return false;
        case NodeKind::shuffle:
            for (std::uint64_t b = 0; b < (std::uint64_t{1} << w.size()); ++b) {
                auto [in, out] = pick(w, b);
                if (holds(f.child(0), in) && holds(f.child(1), out)) return true;
            }
            return false;
        case NodeKind::quantified: return holds_quantified(f, w);
        default: throw std::logic_error("oracle: unexpected Boolean node");
        }
    }

    bool holds_quantified(const Formula& f, const Word& w) const {
        const std::uint32_t r = view_.instances()[f.bound.sort];
        const Formula& body = f.child(0);
        auto part = [&](std::uint32_t j, const Word& u) { return with(f.bound, j, [&] { return holds(body, u); }); };
        switch (f.quantifier) {
        case Quantifier::exists:
            for (std::uint32_t j = 1; j <= r; ++j)
                if (part(j, w)) return true;
            return false;
        case Quantifier::forall:
            for (std::uint32_t j = 1; j <= r; ++j)
                if (!part(j, w)) return false;
            return true;
        default: break;
        }
        const bool concat = f.quantifier == Quantifier::exists_concat || f.quantifier == Quantifier::forall_concat;
        const bool all = f.quantifier == Quantifier::forall_concat || f.quantifier == Quantifier::forall_shuffle;
        bool found = false;
        for (const auto& set : index_sets(r, all)) {
            auto visit = [&](const std::vector<Word>& parts) {
                if (found) return;
                for (std::size_t i = 0; i < set.size(); ++i)
                    if (!part(set[i], parts[i])) return;
                found = true;
            };
            if (concat) compositions(w, set.size(), visit);
            else distributions(w, set.size(), visit);
            if (found) return true;
        }
        return false;
    }

    Value weight(const Formula& f, const Word& w) const {
        if (!f.weighted) return holds(f, w) ? k_.one : k_.zero;
        switch (f.kind) {
        case NodeKind::constant: return f.constant;
        case NodeKind::hash_weighted: {
            auto ports = macro_ports(f);
            if (w.size() != 1 || ports.empty() || ports != w[0].ports()) return k_.zero;
            Value acc = k_.one;
            for (const auto& p : f.ports) acc = k_.mul(acc, view_.system().types[p.type].ports[p.port].weight);
            return acc;
        }
        case NodeKind::weighted_sum: return k_.add(weight(f.child(0), w), weight(f.child(1), w));
        case NodeKind::weighted_product: {
            Value a = weight(f.child(0), w);
            return k_.is_zero(a) ? k_.zero : k_.mul(a, weight(f.child(1), w));
        }
        case NodeKind::weighted_concat: {
            Value acc = k_.zero;
            for (std::size_t i = 0; i <= w.size(); ++i) {
                Value a = weight(f.child(0), slice(w, 0, i));
                if (k_.is_zero(a)) continue;
                acc = k_.add(acc, k_.mul(a, weight(f.child(1), slice(w, i, w.size()))));
            }
            return acc;
        }
        case NodeKind::weighted_shuffle: {
            Value acc = k_.zero;
            for (std::uint64_t b = 0; b < (std::uint64_t{1} << w.size()); ++b) {
                auto [in, out] = pick(w, b);
                Value a = weight(f.child(0), in);
                if (k_.is_zero(a)) continue;
                acc = k_.add(acc, k_.mul(a, weight(f.child(1), out)));
            }
            return acc;
        }
        case NodeKind::quantified: return weight_quantified(f, w);
        default: throw std::logic_error("oracle: unexpected weighted node");
        }
    }

    Value weight_quantified(const Formula& f, const Word& w) const {
        const std::uint32_t r = view_.instances()[f.bound.sort];
        const Formula& body = f.child(0);
        auto part = [&](std::uint32_t j, const Word& u) { return with(f.bound, j, [&] { return weight(body, u); }); };
        switch (f.quantifier) {
        case Quantifier::sum: {
            Value acc = k_.zero;
            for (std::uint32_t j = 1; j <= r; ++j) acc = k_.add(acc, part(j, w));
            return acc;
        }
        case Quantifier::product: {
            Value acc = k_.one;
            for (std::uint32_t j = 1; j <= r; ++j) acc = k_.mul(acc, part(j, w));
            return acc;
        }
        default: break;
        }
        const bool concat = f.quantifier == Quantifier::sum_concat || f.quantifier == Quantifier::product_concat;
        const bool all = f.quantifier == Quantifier::product_concat || f.quantifier == Quantifier::product_shuffle;
        Value acc = k_.zero;
        for (const auto& set : index_sets(r, all)) {
            auto visit = [&](const std::vector<Word>& parts) {
                Value prod = k_.one;
                for (std::size_t i = 0; i < set.size(); ++i) {
                    prod = k_.mul(prod, part(set[i], parts[i]));
                    if (k_.is_zero(prod)) return;
                }
                acc = k_.add(acc, prod);
            };
            if (concat) compositions(w, set.size(), visit);
            else distributions(w, set.size(), visit);
        }
        return acc;
    }

    const SystemView& view_;
    const SemiringSpec& k_;
    mutable Assignment sigma_;
};

}  // namespace oracle
