#include "wfoeil/semantics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <optional>
#include <functional>

namespace wfoeil {

bool empty_satisfies(const Formula& f) {
    if (f.is_literal_true()) return true;
    if constexpr (!kCompositionalEmpty) return false;
    switch (f.kind) {
    case NodeKind::negation: return !empty_satisfies(f.child(0));
    case NodeKind::disjunction: return empty_satisfies(f.child(0)) || empty_satisfies(f.child(1));
    case NodeKind::conjunction:
    case NodeKind::concat:
    case NodeKind::shuffle: return empty_satisfies(f.child(0)) && empty_satisfies(f.child(1));
    default: return false;
    }
}

std::map<Word, std::uint64_t> shuffle_words(const Word& w, const Word& u) {
    std::map<Word, std::uint64_t> out;
    Word cur;
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
        if (i == w.size() && j == u.size()) {
            ++out[cur];
            return;
        }
        if (i < w.size()) {
            cur.push_back(w[i]);
            go(i + 1, j);
            cur.pop_back();
        }
        if (j < u.size()) {
            cur.push_back(u[j]);
            go(i, j + 1);
            cur.pop_back();
        }
    };
    go(0, 0);
    return out;
}

namespace {

using Mask = std::uint64_t;

struct MemoKey {
    const Formula* node;
    Mask mask;
    std::vector<std::uint32_t> sigma;
    bool operator==(const MemoKey&) const = default;
};

struct MemoHash {
    std::size_t operator()(const MemoKey& k) const noexcept {
        std::size_t h = std::hash<const void*>()(k.node) ^ (std::hash<Mask>()(k.mask) * 0x9e3779b97f4a7c15ULL);
        for (auto v : k.sigma) h = h * 1000003u ^ v;
        return h;
    }
};

// Binary operations of the Boolean or the weighted reading, shared by the chain DPs.
template <class T>
struct Algebra {
    T zero;
    T one;
    std::function<T(const T&, const T&)> add;
    std::function<T(const T&, const T&)> mul;
};

// Bits of `mask` in increasing order.
std::vector<Mask> bits_of(Mask mask) {
    std::vector<Mask> out;
    while (mask) {
        Mask low = mask & (~mask + 1);
        out.push_back(low);
        mask ^= low;
    }
    return out;
}

Mask range_mask(const std::vector<Mask>& bits, std::size_t from, std::size_t to) {
    Mask m = 0;
    for (std::size_t i = from; i < to; ++i) m |= bits[i];
    return m;
}

// Sum over consecutive splittings of the subword into parts for `indices` (in order), or over
// all nonempty index subsets when `any_subset` is set.
template <class T>
T concat_chain(const Algebra<T>& alg, Mask mask, std::uint32_t count, bool any_subset,
               const std::function<T(std::uint32_t, Mask)>& part) {
    const auto bits = bits_of(mask);
    const std::size_t n = bits.size();
    // f[e][taken]
    std::vector<std::array<T, 2>> f(n + 1, {alg.zero, alg.zero});
    f[0][0] = alg.one;
    for (std::uint32_t j = 1; j <= count; ++j) {
        std::vector<std::array<T, 2>> g(n + 1, {alg.zero, alg.zero});
        for (std::size_t e = 0; e <= n; ++e) {
            if (any_subset) {
                g[e][0] = f[e][0];
                g[e][1] = f[e][1];
            }
            for (std::size_t s = 0; s <= e; ++s) {
                T left = any_subset ? alg.add(f[s][0], f[s][1]) : f[s][0];
                if (left == alg.zero) continue;
                T v = alg.mul(left, part(j, range_mask(bits, s, e)));
                auto& slot = any_subset ? g[e][1] : g[e][0];
                slot = alg.add(slot, v);
            }
        }
        f = std::move(g);
    }
    return any_subset ? f[n][1] : f[n][0];
}

// Sum over ordered partitions of the subword's positions into parts for 1..count (interleavings).
template <class T>
T shuffle_chain(const Algebra<T>& alg, Mask mask, std::uint32_t count, bool any_subset,
                const std::function<T(std::uint32_t, Mask)>& part) {
    const auto bits = bits_of(mask);
    const std::size_t n = bits.size();
    const std::size_t full = (std::size_t{1} << n) - 1;
    auto expand = [&](std::size_t local) {
        Mask m = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (local >> i & 1) m |= bits[i];
        return m;
    };
    std::vector<std::array<T, 2>> f(full + 1, {alg.zero, alg.zero});
    f[0][0] = alg.one;
    for (std::uint32_t j = 1; j <= count; ++j) {
        std::vector<std::pair<std::size_t, T>> parts;
        for (std::size_t sub = 0; sub <= full; ++sub) {
            T v = part(j, expand(sub));
            if (!(v == alg.zero)) parts.emplace_back(sub, std::move(v));
        }
        std::vector<std::array<T, 2>> g(full + 1, {alg.zero, alg.zero});
        for (std::size_t m = 0; m <= full; ++m) {
            if (any_subset) {
                g[m][0] = f[m][0];
                g[m][1] = f[m][1];
            }
            for (const auto& [sub, v] : parts) {
                if (sub & ~m) continue;
                const std::size_t rest = m & ~sub;
                T left = any_subset ? alg.add(f[rest][0], f[rest][1]) : f[rest][0];
                if (left == alg.zero) continue;
                auto& slot = any_subset ? g[m][1] : g[m][0];
                slot = alg.add(slot, alg.mul(left, v));
            }
        }
        f = std::move(g);
    }
    return any_subset ? f[full][1] : f[full][0];
}

}  // namespace

struct Evaluator::Impl {
    Impl(const SystemView& v, FormulaPtr f)
        : view(v), k(v.semiring()), root(std::move(f)),
          values{k.zero, k.one, [this](const Value& a, const Value& b) { return k.add(a, b); },
                 [this](const Value& a, const Value& b) { return k.mul(a, b); }},
          booleans{false, true, [](const bool& a, const bool& b) { return a || b; },
                   [](const bool& a, const bool& b) { return a && b; }} {}

    const SystemView& view;
    const SemiringSpec& k;
    FormulaPtr root;
    Algebra<Value> values;
    Algebra<bool> booleans;

    const Word* word = nullptr;
    std::vector<std::pair<Variable, std::uint32_t>> scope;
    std::unordered_map<MemoKey, bool, MemoHash> sat_memo;
    std::unordered_map<MemoKey, Value, MemoHash> value_memo;

    void reset(const Word& w, const Assignment& sigma) {
        if (w.size() > 64) throw ResourceError("words longer than 64 letters are not supported by the evaluator");
        word = &w;
        scope.assign(sigma.begin(), sigma.end());
        sat_memo.clear();
        value_memo.clear();
    }

    Mask full_mask() const { return word->size() == 64 ? ~Mask{0} : (Mask{1} << word->size()) - 1; }

    std::uint32_t lookup(const Variable& v) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == v) return it->second;
        throw ValidationError("unbound variable " + v.name + " of sort " +
                              view.system().types[v.sort].name);
    }

    MemoKey key(const Formula& f, Mask mask) const {
        MemoKey out{&f, mask, {}};
        out.sigma.reserve(f.free.size());
        for (const auto& v : f.free) out.sigma.push_back(lookup(v));
        return out;
    }

    std::uint32_t instance_of(const Term& t) const { return t.var ? lookup(*t.var) : t.instance; }

    // The interaction named by a macro under the current assignment, or nullopt if two
    // arguments disagree on one component instance.
    std::optional<std::vector<PortInstance>> macro_letter(const Formula& f) const {
        std::vector<PortInstance> ports;
        for (const auto& p : f.ports) ports.push_back({p.type, instance_of(p.term), p.port});
        std::sort(ports.begin(), ports.end());
        for (std::size_t i = 1; i < ports.size(); ++i)
            if (ports[i - 1].type == ports[i].type && ports[i - 1].instance == ports[i].instance &&
                ports[i - 1].port != ports[i].port)
                return std::nullopt;
        return ports;
    }

    bool letter_is(const Interaction& a, std::vector<PortInstance> ports) const {
        ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
        return a.ports() == ports;
    }

    bool pil(const Formula& f, const Interaction& a) const {
        switch (f.kind) {
        case NodeKind::truth: return true;
        case NodeKind::port: {
            const auto& p = f.ports[0];
            return a.contains({p.type, instance_of(p.term), p.port});
        }
        case NodeKind::hash: {
            auto letter = macro_letter(f);
            return letter && letter_is(a, *letter);
        }
        case NodeKind::negation: return !pil(f.child(0), a);
        case NodeKind::disjunction: return pil(f.child(0), a) || pil(f.child(1), a);
        case NodeKind::conjunction: return pil(f.child(0), a) && pil(f.child(1), a);
        default: throw std::logic_error("not a PIL node");
        }
    }

    bool sat(const Formula& f, Mask mask) {
        if (f.weighted) throw std::logic_error("weighted node in a Boolean position");
        if (f.is_literal_true()) return true;
        if (f.epil && mask == 0) return empty_satisfies(f);
        if (f.pil) return std::popcount(mask) == 1 && pil(f, (*word)[std::countr_zero(mask)]);
        MemoKey k = key(f, mask);
        if (auto it = sat_memo.find(k); it != sat_memo.end()) return it->second;
        const bool out = sat_uncached(f, mask);
        sat_memo.emplace(std::move(k), out);
        return out;
    }

    bool sat_uncached(const Formula& f, Mask mask) {
        switch (f.kind) {
        case NodeKind::equal: return lookup(f.lhs) == lookup(f.rhs);
        case NodeKind::negation: return !sat(f.child(0), mask);
        case NodeKind::disjunction: return sat(f.child(0), mask) || sat(f.child(1), mask);
        case NodeKind::conjunction: return sat(f.child(0), mask) && sat(f.child(1), mask);
        case NodeKind::concat: {
            const auto bits = bits_of(mask);
            for (std::size_t i = 0; i <= bits.size(); ++i) {
                Mask left = range_mask(bits, 0, i);
                if (sat(f.child(0), left) && sat(f.child(1), mask & ~left)) return true;
            }
            return false;
        }
        case NodeKind::shuffle:
            for (Mask sub = mask;; sub = (sub - 1) & mask) {
                if (sat(f.child(0), sub) && sat(f.child(1), mask & ~sub)) return true;
                if (sub == 0) break;
            }
            return false;
        case NodeKind::quantified: return quantify<bool>(booleans, f, mask, [this](const Formula& b, Mask m) {
            return sat(b, m);
        });
        default: throw std::logic_error("unexpected node in FOEIL evaluation");
        }
    }

    template <class T>
    T quantify(const Algebra<T>& alg, const Formula& f, Mask mask,
               const std::function<T(const Formula&, Mask)>& body_value) {
        const Formula& body = f.child(0);
        const std::uint32_t count = view.instances()[f.bound.sort];
        std::function<T(std::uint32_t, Mask)> part = [&](std::uint32_t j, Mask m) {
            scope.emplace_back(f.bound, j);
            T v = body_value(body, m);
            scope.pop_back();
            return v;
        };
        switch (f.quantifier) {
        case Quantifier::exists:
        case Quantifier::sum: {
            T acc = alg.zero;
            for (std::uint32_t j = 1; j <= count; ++j) acc = alg.add(acc, part(j, mask));
            return acc;
        }
        case Quantifier::forall:
        case Quantifier::product: {
            T acc = alg.one;
            for (std::uint32_t j = 1; j <= count; ++j) {
                acc = alg.mul(acc, part(j, mask));
                if (acc == alg.zero) break;
            }
            return acc;
        }
        case Quantifier::exists_concat:
        case Quantifier::sum_concat: return concat_chain<T>(alg, mask, count, true, part);
        case Quantifier::forall_concat:
        case Quantifier::product_concat: return concat_chain<T>(alg, mask, count, false, part);
        case Quantifier::exists_shuffle:
        case Quantifier::sum_shuffle: return shuffle_chain<T>(alg, mask, count, true, part);
        case Quantifier::forall_shuffle:
        case Quantifier::product_shuffle: return shuffle_chain<T>(alg, mask, count, false, part);
        }
        throw std::logic_error("unknown quantifier");
    }

    Value value(const Formula& f, Mask mask) {
        if (!f.weighted) return sat(f, mask) ? k.one : k.zero;
        if (f.kind == NodeKind::constant) return f.constant;
        MemoKey key_ = key(f, mask);
        if (auto it = value_memo.find(key_); it != value_memo.end()) return it->second;
        Value out = value_uncached(f, mask);
        value_memo.emplace(std::move(key_), out);
        return out;
    }

    Value value_uncached(const Formula& f, Mask mask) {
        switch (f.kind) {
        case NodeKind::hash_weighted: {
            if (std::popcount(mask) != 1) return k.zero;
            auto letter = macro_letter(f);
            if (!letter || !letter_is((*word)[std::countr_zero(mask)], *letter)) return k.zero;
            Value acc = k.one;
            for (const auto& p : f.ports) acc = k.mul(acc, view.system().types[p.type].ports[p.port].weight);
            return acc;
        }
        case NodeKind::weighted_sum: return k.add(value(f.child(0), mask), value(f.child(1), mask));
        case NodeKind::weighted_product: {
            Value a = value(f.child(0), mask);
            if (k.is_zero(a)) return k.zero;
            return k.mul(a, value(f.child(1), mask));
        }
        case NodeKind::weighted_concat: {
            const auto bits = bits_of(mask);
            Value acc = k.zero;
            for (std::size_t i = 0; i <= bits.size(); ++i) {
                Mask left = range_mask(bits, 0, i);
                Value a = value(f.child(0), left);
                if (k.is_zero(a)) continue;
                acc = k.add(acc, k.mul(a, value(f.child(1), mask & ~left)));
            }
            return acc;
        }
        case NodeKind::weighted_shuffle: {
            Value acc = k.zero;
            for (Mask sub = mask;; sub = (sub - 1) & mask) {
                Value a = value(f.child(0), sub);
                if (!k.is_zero(a)) acc = k.add(acc, k.mul(a, value(f.child(1), mask & ~sub)));
                if (sub == 0) break;
            }
            return acc;
        }
        case NodeKind::quantified:
            return quantify<Value>(values, f, mask, [this](const Formula& b, Mask m) { return value(b, m); });
        default: throw std::logic_error("unexpected weighted node");
        }
    }
};

Evaluator::Evaluator(const SystemView& view, FormulaPtr formula)
    : impl_(std::make_unique<Impl>(view, std::move(formula))) {}

Evaluator::~Evaluator() = default;

Value Evaluator::eval(const Word& w, const Assignment& sigma) {
    impl_->reset(w, sigma);
    return impl_->value(*impl_->root, impl_->full_mask());
}

bool Evaluator::satisfies(const Word& w, const Assignment& sigma) {
    impl_->reset(w, sigma);
    if (impl_->root->weighted) throw ValidationError("Boolean satisfaction needs an unweighted formula");
    return impl_->sat(*impl_->root, impl_->full_mask());
}

namespace {

void require_ground(const Formula& f) {
    if (!f.free.empty()) throw ValidationError("formula is not ground: it has free variables");
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        if (g.kind == NodeKind::quantified || g.kind == NodeKind::equal)
            throw ValidationError("formula is not ground: it uses quantifiers or equalities");
        for (const auto& c : g.children) walk(*c);
    };
    walk(f);
}

// A one-type system large enough for ground formulas that are evaluated without a system.
SystemView ground_view(const Formula& f, const Word& w) {
    std::uint32_t types = 1;
    std::uint32_t ports = 1;
    std::uint32_t instances = 1;
    auto see = [&](std::uint32_t t, std::uint32_t j, std::uint32_t p) {
        types = std::max(types, t + 1);
        ports = std::max(ports, p + 1);
        instances = std::max(instances, j);
    };
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        for (const auto& p : g.ports) see(p.type, p.term.instance, p.port);
        for (const auto& c : g.children) walk(*c);
    };
    walk(f);
    for (const auto& a : w)
        for (const auto& p : a.ports()) see(p.type, p.instance, p.port);
    ParametricSystem sys;
    sys.semiring = "boolean";
    for (std::uint32_t t = 0; t < types; ++t) {
        ComponentType type;
        type.name = "t" + std::to_string(t);
        for (std::uint32_t p = 0; p < ports; ++p) type.ports.push_back({"p" + std::to_string(p), "", Value(1)});
        sys.types.push_back(std::move(type));
    }
    return SystemView(sys, InstanceMap(types, instances));
}

struct NonOwning {
    static FormulaPtr wrap(const Formula& f) { return FormulaPtr(std::shared_ptr<const Formula>(), &f); }
};

}  // namespace

bool pil_satisfies(const Interaction& a, const Formula& f) {
    require_ground(f);
    if (!f.pil) throw ValidationError("not a PIL formula");
    SystemView view = ground_view(f, Word{a});
    Evaluator ev(view, NonOwning::wrap(f));
    return ev.satisfies(Word{a});
}

bool epil_satisfies(const Word& w, const Formula& f) {
    require_ground(f);
    if (!f.epil) throw ValidationError("not an EPIL formula");
    SystemView view = ground_view(f, w);
    Evaluator ev(view, NonOwning::wrap(f));
    return ev.satisfies(w);
}

Value wepil_eval(const SystemView& view, const Word& w, const Formula& f) {
    require_ground(f);
    Evaluator ev(view, NonOwning::wrap(f));
    return ev.eval(w);
}

bool foeil_satisfies(const SystemView& view, const Assignment& sigma, const Word& w, const Formula& f) {
    Evaluator ev(view, NonOwning::wrap(f));
    return ev.satisfies(w, sigma);
}

Value wfoeil_eval(const SystemView& view, const Assignment& sigma, const Word& w, const Formula& f) {
    Evaluator ev(view, NonOwning::wrap(f));
    return ev.eval(w, sigma);
}

}  // namespace wfoeil
