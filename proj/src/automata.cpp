#include "wfoeil/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "wfoeil/errors.hpp"
#include "wfoeil/parser.hpp"

namespace wfoeil {

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<Interaction> letters) : letters_(std::move(letters)) {
    symbol_of_.resize(letters_.size());
    for (std::size_t i = 0; i < letters_.size(); ++i) symbol_of_[i] = static_cast<std::uint32_t>(i);
    index();
}

Alphabet::Alphabet(std::vector<Interaction> letters, std::vector<std::uint32_t> symbol_of)
    : letters_(std::move(letters)), symbol_of_(std::move(symbol_of)) {
    if (symbol_of_.size() != letters_.size()) throw std::invalid_argument("alphabet: class map size mismatch");
    index();
}

void Alphabet::index() {
    std::uint32_t classes = 0;
    for (auto s : symbol_of_) classes = std::max(classes, s + 1);
    members_.assign(classes, {});
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        members_[symbol_of_[i]].push_back(static_cast<std::uint32_t>(i));
        if (!position_.emplace(letters_[i], i).second)
            throw std::invalid_argument("alphabet: duplicate letter");
    }
    for (const auto& m : members_)
        if (m.empty()) throw std::invalid_argument("alphabet: empty letter class");
}

std::optional<std::size_t> Alphabet::letter_index(const Interaction& a) const {
    auto it = position_.find(a);
    if (it == position_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint32_t> Alphabet::symbols(const Word& w) const {
    std::vector<std::uint32_t> out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto idx = letter_index(w[i]);
        if (!idx) throw ValidationError("letter " + std::to_string(i + 1) + " of the word is not in the alphabet");
        out.push_back(symbol_of_[*idx]);
    }
    return out;
}

Refinement refine(const Alphabet& a, const Alphabet& b) {
    if (!a.same_letters(b)) throw ValidationError("automata are over different interaction alphabets");
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
    std::vector<std::uint32_t> symbol_of(a.letter_count());
    Refinement out;
    for (std::size_t i = 0; i < a.letter_count(); ++i) {
        auto key = std::make_pair(a.symbol_of_letter(i), b.symbol_of_letter(i));
        auto [it, fresh] = ids.emplace(key, static_cast<std::uint32_t>(ids.size()));
        if (fresh) {
            out.to_first.push_back(key.first);
            out.to_second.push_back(key.second);
        }
        symbol_of[i] = it->second;
    }
    out.alphabet = std::make_shared<Alphabet>(a.letters(), std::move(symbol_of));
    return out;
}

// ---------------------------------------------------------------------------
// Nfa

namespace {

using Moves = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

void sort_unique(Moves& m) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
}

void sort_unique(std::vector<std::uint32_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

Nfa nfa_make(AlphabetPtr alphabet, std::uint32_t states) {
    Nfa a;
    a.alphabet = std::move(alphabet);
    a.states = states;
    a.delta.resize(states);
    a.accepting.assign(states, false);
    return a;
}

void require_same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
    if (a != b && !(*a == *b)) throw ValidationError("automata are over different letter classes");
}

void budget_check(std::size_t states, std::size_t budget) {
    if (states > budget)
        throw BudgetExceededError("automaton exceeds the state budget of " + std::to_string(budget) + " states", "");
}

// Dense successor table of a complete DFA.
std::vector<std::uint32_t> dfa_table(const Nfa& a) {
    const std::size_t n = a.alphabet->symbol_count();
    std::vector<std::uint32_t> table(static_cast<std::size_t>(a.states) * n);
    for (std::uint32_t q = 0; q < a.states; ++q)
        for (auto [s, t] : a.delta[q]) table[q * n + s] = t;
    return table;
}

}  // namespace

bool Nfa::accepts_symbols(const std::vector<std::uint32_t>& word) const {
    std::vector<std::uint32_t> current = initial;
    sort_unique(current);
    for (auto s : word) {
        std::vector<std::uint32_t> next;
        for (auto q : current) {
            auto it = std::lower_bound(delta[q].begin(), delta[q].end(), std::make_pair(s, 0u));
            for (; it != delta[q].end() && it->first == s; ++it) next.push_back(it->second);
        }
        sort_unique(next);
        current = std::move(next);
        if (current.empty()) return false;
    }
    return std::any_of(current.begin(), current.end(), [&](auto q) { return accepting[q]; });
}

bool Nfa::accepts(const Word& w) const { return accepts_symbols(alphabet->symbols(w)); }

bool Nfa::accepts_empty() const {
    return std::any_of(initial.begin(), initial.end(), [&](auto q) { return accepting[q]; });
}

bool Nfa::is_deterministic() const {
    if (initial.size() != 1) return false;
    for (const auto& moves : delta)
        for (std::size_t i = 1; i < moves.size(); ++i)
            if (moves[i].first == moves[i - 1].first) return false;
    return true;
}

bool Nfa::is_complete() const {
    if (initial.empty()) return false;
    for (const auto& moves : delta) {
        std::set<std::uint32_t> seen;
        for (auto [s, t] : moves) seen.insert(s);
        if (seen.size() != alphabet->symbol_count()) return false;
    }
    return true;
}

std::size_t Nfa::transition_count() const {
    std::size_t n = 0;
    for (const auto& moves : delta) n += moves.size();
    return n;
}

Nfa nfa_universal(AlphabetPtr alphabet) {
    Nfa a = nfa_make(std::move(alphabet), 1);
    a.initial = {0};
    a.accepting[0] = true;
    for (std::uint32_t s = 0; s < a.alphabet->symbol_count(); ++s) a.delta[0].push_back({s, 0});
    return a;
}

Nfa nfa_empty_language(AlphabetPtr alphabet) {
    Nfa a = nfa_make(std::move(alphabet), 1);
    a.initial = {0};
    for (std::uint32_t s = 0; s < a.alphabet->symbol_count(); ++s) a.delta[0].push_back({s, 0});
    return a;
}

Nfa nfa_letters(AlphabetPtr alphabet, const std::vector<bool>& selected) {
    Nfa a = nfa_make(std::move(alphabet), 2);
    a.initial = {0};
    a.accepting[1] = true;
    for (std::uint32_t s = 0; s < a.alphabet->symbol_count(); ++s)
        if (selected.at(s)) a.delta[0].push_back({s, 1});
    return a;
}

Nfa nfa_union(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a.alphabet, b.alphabet);
    Nfa c = nfa_make(a.alphabet, a.states + b.states);
    c.initial = a.initial;
    for (auto q : b.initial) c.initial.push_back(q + a.states);
    for (std::uint32_t q = 0; q < a.states; ++q) {
        c.delta[q] = a.delta[q];
        c.accepting[q] = a.accepting[q];
    }
    for (std::uint32_t q = 0; q < b.states; ++q) {
        for (auto [s, t] : b.delta[q]) c.delta[q + a.states].push_back({s, t + a.states});
        c.accepting[q + a.states] = b.accepting[q];
    }
    return c;
}

namespace {

// Product over the pairs reachable from the initial pairs.
template <class Step>
Nfa product(const Nfa& a, const Nfa& b, Step step, bool both_accept) {
    require_same_alphabet(a.alphabet, b.alphabet);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
    std::deque<std::pair<std::uint32_t, std::uint32_t>> queue;
    auto id = [&](std::uint32_t p, std::uint32_t q) {
        auto [it, fresh] = ids.emplace(std::make_pair(p, q), static_cast<std::uint32_t>(ids.size()));
        if (fresh) queue.push_back({p, q});
        return it->second;
    };
    Nfa c;
    c.alphabet = a.alphabet;
    for (auto p : a.initial)
        for (auto q : b.initial) c.initial.push_back(id(p, q));
    while (!queue.empty()) {
        auto [p, q] = queue.front();
        queue.pop_front();
        Moves moves;
        step(p, q, [&](std::uint32_t s, std::uint32_t p2, std::uint32_t q2) { moves.push_back({s, id(p2, q2)}); });
        sort_unique(moves);
        c.delta.push_back(std::move(moves));
        c.accepting.push_back(both_accept && a.accepting[p] && b.accepting[q]);
    }
    c.states = static_cast<std::uint32_t>(ids.size());
    sort_unique(c.initial);
    return c;
}

}  // namespace

Nfa nfa_intersect(const Nfa& a, const Nfa& b) {
    return product(
        a, b,
        [&](std::uint32_t p, std::uint32_t q, auto emit) {
            const auto& da = a.delta[p];
            const auto& db = b.delta[q];
            std::size_t i = 0, j = 0;
            while (i < da.size() && j < db.size()) {
                if (da[i].first < db[j].first) { ++i; continue; }
                if (db[j].first < da[i].first) { ++j; continue; }
                const auto s = da[i].first;
                std::size_t j_end = j;
                while (j_end < db.size() && db[j_end].first == s) ++j_end;
                for (; i < da.size() && da[i].first == s; ++i)
                    for (std::size_t k = j; k < j_end; ++k) emit(s, da[i].second, db[k].second);
                j = j_end;
            }
        },
        true);
}

Nfa nfa_shuffle(const Nfa& a, const Nfa& b) {
    return product(
        a, b,
        [&](std::uint32_t p, std::uint32_t q, auto emit) {
            for (auto [s, t] : a.delta[p]) emit(s, t, q);
            for (auto [s, t] : b.delta[q]) emit(s, p, t);
        },
        true);
}

Nfa nfa_concat(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a.alphabet, b.alphabet);
    Nfa c = nfa_make(a.alphabet, a.states + b.states);
    const bool a_empty = a.accepts_empty();
    const bool b_empty = b.accepts_empty();
    c.initial = a.initial;
    if (a_empty)
        for (auto q : b.initial) c.initial.push_back(q + a.states);
    for (std::uint32_t p = 0; p < a.states; ++p) {
        for (auto [s, t] : a.delta[p]) {
            c.delta[p].push_back({s, t});
            if (a.accepting[t])
                for (auto q : b.initial) c.delta[p].push_back({s, q + a.states});
        }
        c.accepting[p] = a.accepting[p] && b_empty;
    }
    for (std::uint32_t q = 0; q < b.states; ++q) {
        for (auto [s, t] : b.delta[q]) c.delta[q + a.states].push_back({s, t + a.states});
        c.accepting[q + a.states] = b.accepting[q];
    }
    for (auto& moves : c.delta) sort_unique(moves);
    sort_unique(c.initial);
    return c;
}

Nfa nfa_with_empty(const Nfa& a, bool accept_empty) {
    if (a.accepts_empty() == accept_empty) return a;
    Nfa c = a;
    const std::uint32_t fresh = c.states++;
    Moves moves;
    for (auto q : a.initial) moves.insert(moves.end(), a.delta[q].begin(), a.delta[q].end());
    sort_unique(moves);
    c.delta.push_back(std::move(moves));
    c.accepting.push_back(accept_empty);
    c.initial = {fresh};
    return c;
}

Nfa nfa_determinize_complete(const Nfa& a, std::size_t budget) {
    const std::uint32_t symbols = static_cast<std::uint32_t>(a.alphabet->symbol_count());
    std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
    std::deque<std::vector<std::uint32_t>> queue;
    auto id = [&](std::vector<std::uint32_t> set) {
        auto [it, fresh] = ids.emplace(set, static_cast<std::uint32_t>(ids.size()));
        if (fresh) {
            budget_check(ids.size(), budget);
            queue.push_back(std::move(set));
        }
        return it->second;
    };
    Nfa d;
    d.alphabet = a.alphabet;
    std::vector<std::uint32_t> start = a.initial;
    sort_unique(start);
    d.initial = {id(start)};
    std::vector<std::vector<std::uint32_t>> buckets(symbols);
    while (!queue.empty()) {
        auto set = std::move(queue.front());
        queue.pop_front();
        for (auto& b : buckets) b.clear();
        bool accept = false;
        for (auto q : set) {
            accept = accept || a.accepting[q];
            for (auto [s, t] : a.delta[q]) buckets[s].push_back(t);
        }
        Moves moves;
        moves.reserve(symbols);
        for (std::uint32_t s = 0; s < symbols; ++s) {
            sort_unique(buckets[s]);
            moves.push_back({s, id(buckets[s])});
        }
        d.delta.push_back(std::move(moves));
        d.accepting.push_back(accept);
    }
    d.states = static_cast<std::uint32_t>(ids.size());
    return d;
}

Nfa nfa_complement(const Nfa& a, std::size_t budget) {
    Nfa d = a.is_deterministic() && a.is_complete() ? a : nfa_determinize_complete(a, budget);
    for (std::uint32_t q = 0; q < d.states; ++q) d.accepting[q] = !d.accepting[q];
    return d;
}

Nfa nfa_minimize(const Nfa& dfa) {
    if (!dfa.is_deterministic() || !dfa.is_complete())
        throw std::invalid_argument("minimize: automaton is not a complete DFA");
    const std::size_t n = dfa.alphabet->symbol_count();
    const auto table = dfa_table(dfa);

    // Reachable part first.
    std::vector<std::int64_t> order(dfa.states, -1);
    std::vector<std::uint32_t> reach;
    order[dfa.initial[0]] = 0;
    reach.push_back(dfa.initial[0]);
    for (std::size_t i = 0; i < reach.size(); ++i)
        for (std::size_t s = 0; s < n; ++s) {
            auto t = table[reach[i] * n + s];
            if (order[t] < 0) {
                order[t] = static_cast<std::int64_t>(reach.size());
                reach.push_back(t);
            }
        }

    // Moore refinement on signatures.
    std::vector<std::uint32_t> block(dfa.states, 0);
    for (auto q : reach) block[q] = dfa.accepting[q] ? 1 : 0;
    std::size_t blocks = 0;
    for (;;) {
        std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
        std::vector<std::uint32_t> next(dfa.states, 0);
        std::vector<std::uint32_t> sig(n + 1);
        for (auto q : reach) {
            sig[0] = block[q];
            for (std::size_t s = 0; s < n; ++s) sig[s + 1] = block[table[q * n + s]];
            next[q] = ids.emplace(sig, static_cast<std::uint32_t>(ids.size())).first->second;
        }
        block = std::move(next);
        if (ids.size() == blocks) break;
        blocks = ids.size();
    }

    // Renumber breadth-first from the initial block.
    std::vector<std::int64_t> number(blocks, -1);
    std::vector<std::uint32_t> witness;
    number[block[dfa.initial[0]]] = 0;
    witness.push_back(dfa.initial[0]);
    for (std::size_t i = 0; i < witness.size(); ++i)
        for (std::size_t s = 0; s < n; ++s) {
            auto b = block[table[witness[i] * n + s]];
            if (number[b] < 0) {
                number[b] = static_cast<std::int64_t>(witness.size());
                witness.push_back(table[witness[i] * n + s]);
            }
        }
    Nfa m = nfa_make(dfa.alphabet, static_cast<std::uint32_t>(witness.size()));
    m.initial = {0};
    for (std::uint32_t i = 0; i < m.states; ++i) {
        auto q = witness[i];
        m.accepting[i] = dfa.accepting[q];
        for (std::uint32_t s = 0; s < n; ++s)
            m.delta[i].push_back({s, static_cast<std::uint32_t>(number[block[table[q * n + s]]])});
    }
    return m;
}

// ---------------------------------------------------------------------------
// Wfa

std::size_t Wfa::transition_count() const {
    std::size_t n = 0;
    for (const auto& edges : out) n += edges.size();
    return n;
}

std::size_t Wfa::letter_transition_count() const {
    std::size_t n = 0;
    for (const auto& edges : out)
        for (const auto& e : edges) n += alphabet->members(e.symbol).size();
    return n;
}

Wfa wfa_make(AlphabetPtr alphabet, const SemiringSpec& k, std::uint32_t states) {
    Wfa a;
    a.alphabet = std::move(alphabet);
    a.semiring = &k;
    a.states = states;
    a.in.assign(states, k.zero);
    a.ter.assign(states, k.zero);
    a.out.resize(states);
    return a;
}

void wfa_add_edge(Wfa& a, std::uint32_t from, std::uint32_t symbol, std::uint32_t to, const Value& w) {
    if (a.k().is_zero(w)) return;
    a.out.at(from).push_back({symbol, to, w});
}

void wfa_normalize(Wfa& a) {
    const auto& k = a.k();
    for (auto& edges : a.out) {
        std::sort(edges.begin(), edges.end(), [](const WfaEdge& x, const WfaEdge& y) {
            return std::tie(x.symbol, x.target) < std::tie(y.symbol, y.target);
        });
        std::vector<WfaEdge> merged;
        for (auto& e : edges) {
            if (!merged.empty() && merged.back().symbol == e.symbol && merged.back().target == e.target)
                merged.back().weight = k.add(merged.back().weight, e.weight);
            else
                merged.push_back(std::move(e));
        }
        std::erase_if(merged, [&](const WfaEdge& e) { return k.is_zero(e.weight); });
        edges = std::move(merged);
    }
}

namespace {

void require_compatible(const Wfa& a, const Wfa& b) {
    require_same_alphabet(a.alphabet, b.alphabet);
    if (a.semiring->name != b.semiring->name) throw ValidationError("automata are over different semirings");
}

}  // namespace

Value wfa_behavior_symbols(const Wfa& a, const std::vector<std::uint32_t>& word) {
    const auto& k = a.k();
    std::vector<Value> current = a.in;
    for (auto s : word) {
        std::vector<Value> next(a.states, k.zero);
        for (std::uint32_t q = 0; q < a.states; ++q) {
            if (k.is_zero(current[q])) continue;
            const auto& edges = a.out[q];
            auto it = std::lower_bound(edges.begin(), edges.end(), s,
                                       [](const WfaEdge& e, std::uint32_t sym) { return e.symbol < sym; });
            for (; it != edges.end() && it->symbol == s; ++it)
                next[it->target] = k.add(next[it->target], k.mul(current[q], it->weight));
        }
        current = std::move(next);
    }
    Value acc = k.zero;
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (!k.is_zero(current[q])) acc = k.add(acc, k.mul(current[q], a.ter[q]));
    return acc;
}

Value wfa_behavior(const Wfa& a, const Word& w) { return wfa_behavior_symbols(a, a.alphabet->symbols(w)); }

Wfa wfa_constant(AlphabetPtr alphabet, const SemiringSpec& k, const Value& value) {
    Wfa a = wfa_make(std::move(alphabet), k, 1);
    a.in[0] = value;
    a.ter[0] = k.one;
    for (std::uint32_t s = 0; s < a.alphabet->symbol_count(); ++s) wfa_add_edge(a, 0, s, 0, k.one);
    return a;
}

Wfa characteristic_wfa(const Nfa& dfa, const SemiringSpec& k) {
    if (!dfa.is_deterministic()) throw ValidationError("characteristic series requires a deterministic automaton");
    Wfa a = wfa_make(dfa.alphabet, k, dfa.states);
    a.in[dfa.initial[0]] = k.one;
    for (std::uint32_t q = 0; q < dfa.states; ++q) {
        if (dfa.accepting[q]) a.ter[q] = k.one;
        for (auto [s, t] : dfa.delta[q]) wfa_add_edge(a, q, s, t, k.one);
    }
    return a;
}

Wfa wfa_sum(const Wfa& a, const Wfa& b) {
    require_compatible(a, b);
    Wfa c = wfa_make(a.alphabet, a.k(), a.states + b.states);
    for (std::uint32_t q = 0; q < a.states; ++q) {
        c.in[q] = a.in[q];
        c.ter[q] = a.ter[q];
        c.out[q] = a.out[q];
    }
    for (std::uint32_t q = 0; q < b.states; ++q) {
        const auto d = q + a.states;
        c.in[d] = b.in[q];
        c.ter[d] = b.ter[q];
        for (const auto& e : b.out[q]) c.out[d].push_back({e.symbol, e.target + a.states, e.weight});
    }
    return c;
}

Wfa wfa_cauchy(const Wfa& a, const Wfa& b) {
    require_compatible(a, b);
    const auto& k = a.k();
    Wfa c = wfa_make(a.alphabet, k, a.states + b.states);
    Value a_empty = k.zero;
    for (std::uint32_t q = 0; q < a.states; ++q) a_empty = k.add(a_empty, k.mul(a.in[q], a.ter[q]));
    for (std::uint32_t q = 0; q < a.states; ++q) {
        c.in[q] = a.in[q];
        for (const auto& e : a.out[q]) {
            c.out[q].push_back(e);
            // Last letter of the first factor, handing over to the initial states of the second.
            if (k.is_zero(a.ter[e.target])) continue;
            const Value handover = k.mul(e.weight, a.ter[e.target]);
            for (std::uint32_t p = 0; p < b.states; ++p)
                if (!k.is_zero(b.in[p])) wfa_add_edge(c, q, e.symbol, p + a.states, k.mul(handover, b.in[p]));
        }
    }
    for (std::uint32_t q = 0; q < b.states; ++q) {
        const auto d = q + a.states;
        c.in[d] = k.mul(a_empty, b.in[q]);
        c.ter[d] = b.ter[q];
        for (const auto& e : b.out[q]) c.out[d].push_back({e.symbol, e.target + a.states, e.weight});
    }
    wfa_normalize(c);
    return c;
}

namespace {

enum class ProductMode { hadamard, shuffle };

void product_edges(const Wfa& a, const Wfa& b, std::uint32_t p, std::uint32_t q, ProductMode mode,
                   const std::function<void(std::uint32_t, std::uint32_t, std::uint32_t, const Value&)>& emit) {
    const auto& k = a.k();
    if (mode == ProductMode::shuffle) {
        for (const auto& e : a.out[p]) emit(e.symbol, e.target, q, e.weight);
        for (const auto& e : b.out[q]) emit(e.symbol, p, e.target, e.weight);
        return;
    }
    const auto& da = a.out[p];
    const auto& db = b.out[q];
    std::size_t i = 0, j = 0;
    while (i < da.size() && j < db.size()) {
        if (da[i].symbol < db[j].symbol) { ++i; continue; }
        if (db[j].symbol < da[i].symbol) { ++j; continue; }
        const auto s = da[i].symbol;
        std::size_t j_end = j;
        while (j_end < db.size() && db[j_end].symbol == s) ++j_end;
        for (; i < da.size() && da[i].symbol == s; ++i)
            for (std::size_t m = j; m < j_end; ++m) emit(s, da[i].target, db[m].target, k.mul(da[i].weight, db[m].weight));
        j = j_end;
    }
}

Wfa full_product(const Wfa& a, const Wfa& b, ProductMode mode) {
    require_compatible(a, b);
    const auto& k = a.k();
    Wfa c = wfa_make(a.alphabet, k, a.states * b.states);
    auto id = [&](std::uint32_t p, std::uint32_t q) { return p * b.states + q; };
    for (std::uint32_t p = 0; p < a.states; ++p)
        for (std::uint32_t q = 0; q < b.states; ++q) {
            const auto d = id(p, q);
            c.in[d] = k.mul(a.in[p], b.in[q]);
            c.ter[d] = k.mul(a.ter[p], b.ter[q]);
            product_edges(a, b, p, q, mode, [&](std::uint32_t s, std::uint32_t p2, std::uint32_t q2, const Value& w) {
                wfa_add_edge(c, d, s, id(p2, q2), w);
            });
        }
    wfa_normalize(c);
    return c;
}

Wfa accessible_product(const Wfa& a, const Wfa& b, ProductMode mode, std::size_t budget) {
    require_compatible(a, b);
    const auto& k = a.k();
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
    std::deque<std::pair<std::uint32_t, std::uint32_t>> queue;
    auto id = [&](std::uint32_t p, std::uint32_t q) {
        auto [it, fresh] = ids.emplace(std::make_pair(p, q), static_cast<std::uint32_t>(ids.size()));
        if (fresh) {
            budget_check(ids.size(), budget);
            queue.push_back({p, q});
        }
        return it->second;
    };
    Wfa c = wfa_make(a.alphabet, k, 0);
    std::vector<std::pair<std::uint32_t, Value>> initial;
    for (std::uint32_t p = 0; p < a.states; ++p) {
        if (k.is_zero(a.in[p])) continue;
        for (std::uint32_t q = 0; q < b.states; ++q) {
            Value w = k.mul(a.in[p], b.in[q]);
            if (!k.is_zero(w)) initial.push_back({id(p, q), w});
        }
    }
    while (!queue.empty()) {
        auto [p, q] = queue.front();
        queue.pop_front();
        std::vector<WfaEdge> edges;
        product_edges(a, b, p, q, mode, [&](std::uint32_t s, std::uint32_t p2, std::uint32_t q2, const Value& w) {
            if (!k.is_zero(w)) edges.push_back({s, id(p2, q2), w});
        });
        c.out.push_back(std::move(edges));
        c.ter.push_back(k.mul(a.ter[p], b.ter[q]));
    }
    c.states = static_cast<std::uint32_t>(ids.size());
    c.in.assign(c.states, k.zero);
    for (auto& [q, w] : initial) c.in[q] = w;
    wfa_normalize(c);
    return c;
}

}  // namespace

Wfa wfa_hadamard(const Wfa& a, const Wfa& b) { return full_product(a, b, ProductMode::hadamard); }
Wfa wfa_shuffle(const Wfa& a, const Wfa& b) { return full_product(a, b, ProductMode::shuffle); }

Wfa wfa_hadamard_accessible(const Wfa& a, const Wfa& b, std::size_t budget) {
    return accessible_product(a, b, ProductMode::hadamard, budget);
}

Wfa wfa_shuffle_accessible(const Wfa& a, const Wfa& b, std::size_t budget) {
    return accessible_product(a, b, ProductMode::shuffle, budget);
}

Wfa wfa_trim(const Wfa& a) {
    const auto& k = a.k();
    std::vector<bool> forward(a.states, false), backward(a.states, false);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (!k.is_zero(a.in[q])) {
            forward[q] = true;
            stack.push_back(q);
        }
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (const auto& e : a.out[q])
            if (!forward[e.target]) {
                forward[e.target] = true;
                stack.push_back(e.target);
            }
    }
    std::vector<std::vector<std::uint32_t>> reverse(a.states);
    for (std::uint32_t q = 0; q < a.states; ++q)
        for (const auto& e : a.out[q]) reverse[e.target].push_back(q);
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (!k.is_zero(a.ter[q])) {
            backward[q] = true;
            stack.push_back(q);
        }
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (auto p : reverse[q])
            if (!backward[p]) {
                backward[p] = true;
                stack.push_back(p);
            }
    }
    std::vector<std::int64_t> number(a.states, -1);
    std::uint32_t kept = 0;
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (forward[q] && backward[q]) number[q] = kept++;
    Wfa c = wfa_make(a.alphabet, k, kept);
    for (std::uint32_t q = 0; q < a.states; ++q) {
        if (number[q] < 0) continue;
        const auto d = static_cast<std::uint32_t>(number[q]);
        c.in[d] = a.in[q];
        c.ter[d] = a.ter[q];
        for (const auto& e : a.out[q])
            if (number[e.target] >= 0) c.out[d].push_back({e.symbol, static_cast<std::uint32_t>(number[e.target]), e.weight});
    }
    return c;
}

Wfa wfa_relabel(const Wfa& a, AlphabetPtr refined, const std::vector<std::uint32_t>& to_original) {
    std::vector<std::vector<std::uint32_t>> split(a.alphabet->symbol_count());
    for (std::uint32_t s = 0; s < to_original.size(); ++s) split.at(to_original[s]).push_back(s);
    Wfa c = wfa_make(std::move(refined), a.k(), a.states);
    c.in = a.in;
    c.ter = a.ter;
    for (std::uint32_t q = 0; q < a.states; ++q)
        for (const auto& e : a.out[q])
            for (auto s : split[e.symbol]) c.out[q].push_back({s, e.target, e.weight});
    wfa_normalize(c);
    return c;
}

// ---------------------------------------------------------------------------
// Text format

std::string write_wfa(const Wfa& a, const SystemView& view) {
    const auto& k = a.k();
    const auto& alpha = *a.alphabet;
    std::ostringstream os;
    os << "wfa 1\n";
    os << "semiring " << k.name << "\n";
    os << "states " << a.states << "\n";
    os << "letters " << alpha.letter_count() << "\n";
    for (const auto& letter : alpha.letters()) os << "letter " << view.interaction_name(letter) << "\n";
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (!k.is_zero(a.in[q])) os << "in " << q << " " << k.format(a.in[q]) << "\n";
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (!k.is_zero(a.ter[q])) os << "ter " << q << " " << k.format(a.ter[q]) << "\n";
    struct Line {
        std::uint32_t letter, target;
        const Value* weight;
    };
    for (std::uint32_t q = 0; q < a.states; ++q) {
        std::vector<Line> lines;
        for (const auto& e : a.out[q])
            for (auto i : alpha.members(e.symbol)) lines.push_back({i, e.target, &e.weight});
        std::sort(lines.begin(), lines.end(),
                  [](const Line& x, const Line& y) { return std::tie(x.letter, x.target) < std::tie(y.letter, y.target); });
        for (const auto& l : lines)
            os << q << " --" << view.interaction_name(alpha.letters()[l.letter]) << "[" << k.format(*l.weight) << "]--> "
               << l.target << "\n";
    }
    return os.str();
}

namespace {

[[noreturn]] void bad_wfa(std::size_t line, const std::string& what) {
    throw ParseError(what, SourceSpan{0, 0, line, 1});
}

std::uint32_t parse_state(std::string_view text, std::uint32_t states, std::size_t line) {
    std::uint64_t q = 0;
    if (text.empty()) bad_wfa(line, "expected a state number");
    for (char c : text) {
        if (c < '0' || c > '9') bad_wfa(line, "expected a state number, got '" + std::string(text) + "'");
        q = q * 10 + static_cast<std::uint64_t>(c - '0');
        if (q > states) break;
    }
    if (q >= states) bad_wfa(line, "state " + std::string(text) + " out of range");
    return static_cast<std::uint32_t>(q);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Wfa read_wfa(std::string_view text, const SystemView& view) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos <= text.size();) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    std::size_t i = 0;
    auto next = [&](std::string_view& out) {
        while (i < lines.size()) {
            auto l = trim(lines[i++]);
            if (!l.empty() && l.front() != '#') {
                out = l;
                return true;
            }
        }
        return false;
    };
    auto header = [&](std::string_view key) {
        std::string_view l;
        if (!next(l) || !l.starts_with(key) || l.size() <= key.size() || l[key.size()] != ' ')
            bad_wfa(i, "expected '" + std::string(key) + "'");
        return trim(l.substr(key.size() + 1));
    };
    if (header("wfa") != "1") bad_wfa(i, "unsupported automaton format version");
    const SemiringSpec& k = builtin(header("semiring"));
    if (k.name != view.semiring().name)
        bad_wfa(i, "automaton semiring " + k.name + " differs from the system semiring " + view.semiring().name);
    auto count = [&](std::string_view key) {
        auto v = header(key);
        std::uint64_t n = 0;
        for (char c : v) {
            if (c < '0' || c > '9') bad_wfa(i, "expected a count after '" + std::string(key) + "'");
            n = n * 10 + static_cast<std::uint64_t>(c - '0');
            if (n > (std::uint64_t{1} << 32)) bad_wfa(i, "count too large");
        }
        return static_cast<std::uint32_t>(n);
    };
    const std::uint32_t states = count("states");
    const std::uint32_t letter_total = count("letters");
    std::vector<Interaction> letters;
    for (std::uint32_t j = 0; j < letter_total; ++j) {
        auto l = header("letter");
        try {
            letters.push_back(parse_interaction(l, view));
        } catch (const Error& e) {
            bad_wfa(i, e.what());
        }
    }
    std::map<Interaction, std::uint32_t> letter_id;
    for (std::uint32_t j = 0; j < letters.size(); ++j)
        if (!letter_id.emplace(letters[j], j).second) bad_wfa(i, "duplicate letter");
    auto alphabet = std::make_shared<Alphabet>(letters);
    Wfa a = wfa_make(alphabet, k, states);
    auto weight = [&](std::string_view lit) {
        try {
            return k.parse(trim(lit));
        } catch (const Error& e) {
            bad_wfa(i, e.what());
        }
    };
    std::string_view l;
    while (next(l)) {
        if (l.starts_with("in ") || l.starts_with("ter ")) {
            const bool initial = l.starts_with("in ");
            auto rest = trim(l.substr(initial ? 3 : 4));
            auto sp = rest.find(' ');
            if (sp == std::string_view::npos) bad_wfa(i, "expected a state and a weight");
            auto q = parse_state(rest.substr(0, sp), states, i);
            (initial ? a.in : a.ter)[q] = weight(rest.substr(sp + 1));
            continue;
        }
        auto dash = l.find(" --");
        auto open = l.rfind("[");
        auto close = l.rfind("]-->");
        if (dash == std::string_view::npos || open == std::string_view::npos || close == std::string_view::npos ||
            open < dash || close < open)
            bad_wfa(i, "expected 'q --letter[weight]--> q'");
        auto from = parse_state(trim(l.substr(0, dash)), states, i);
        Interaction letter;
        try {
            letter = parse_interaction(trim(l.substr(dash + 3, open - dash - 3)), view);
        } catch (const Error& e) {
            bad_wfa(i, e.what());
        }
        auto it = letter_id.find(letter);
        if (it == letter_id.end()) bad_wfa(i, "transition letter is not declared");
        auto w = weight(l.substr(open + 1, close - open - 1));
        auto to = parse_state(trim(l.substr(close + 4)), states, i);
        wfa_add_edge(a, from, it->second, to, w);
    }
    wfa_normalize(a);
    return a;
}

}  // namespace wfoeil
