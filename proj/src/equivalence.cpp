#include "wfoeil/equivalence.hpp"

#include <gmpxx.h>

#include <deque>
#include <functional>
#include <map>

namespace wfoeil {

namespace {

using SparseVector = std::vector<std::pair<std::uint32_t, mpq_class>>;

bool embeds_in_rationals(const SemiringSpec& k) {
    return k.kind == SemiringKind::natural || k.kind == SemiringKind::rational;
}

// Both automata over the coarsest common refinement of their letter classes.
std::pair<Wfa, Wfa> align(const Wfa& a, const Wfa& b) {
    if (a.semiring->name != b.semiring->name) throw ValidationError("automata are over different semirings");
    if (a.alphabet == b.alphabet || *a.alphabet == *b.alphabet) return {a, b};
    auto r = refine(*a.alphabet, *b.alphabet);
    return {wfa_relabel(a, r.alphabet, r.to_first), wfa_relabel(b, r.alphabet, r.to_second)};
}

Word spell(const Alphabet& alphabet, const std::vector<std::uint32_t>& symbols) {
    Word w;
    for (auto s : symbols) w.push_back(alphabet.representative(s));
    return w;
}

// Row-echelon basis with normalized pivots; every row starts at its pivot.
class EchelonBasis {
public:
    // Adds v if it is independent of the rows so far.
    bool insert(SparseVector v) {
        while (!v.empty()) {
            auto it = rows_.find(v.front().first);
            if (it == rows_.end()) {
                const mpq_class lead = v.front().second;
                for (auto& [i, x] : v) x /= lead;
                rows_.emplace(v.front().first, std::move(v));
                return true;
            }
            v = subtract(v, v.front().second, it->second);
        }
        return false;
    }

private:
    static SparseVector subtract(const SparseVector& v, const mpq_class& factor, const SparseVector& row) {
        SparseVector out;
        out.reserve(v.size() + row.size());
        std::size_t i = 0, j = 0;
        while (i < v.size() || j < row.size()) {
            if (j == row.size() || (i < v.size() && v[i].first < row[j].first)) {
                out.push_back(v[i++]);
            } else if (i == v.size() || row[j].first < v[i].first) {
                out.emplace_back(row[j].first, -factor * row[j].second);
                ++j;
            } else {
                mpq_class x = v[i].second - factor * row[j].second;
                if (x != 0) out.emplace_back(v[i].first, std::move(x));
                ++i;
                ++j;
            }
        }
        return out;
    }

    std::map<std::uint32_t, SparseVector> rows_;
};

}  // namespace

EquivVerdict decide_equiv(const Wfa& a_in, const Wfa& b_in) {
    const auto& k = a_in.k();
    if (!embeds_in_rationals(k) || !embeds_in_rationals(b_in.k()))
        throw CapabilityError("exact equivalence needs a semiring embedded in the rationals; " + k.name +
                              " is not (use a bounded check instead)");
    auto [a, b] = align(a_in, b_in);
    const std::uint32_t offset = a.states;
    const std::uint32_t n = a.states + b.states;
    const std::uint32_t symbols = static_cast<std::uint32_t>(a.alphabet->symbol_count());

    std::vector<mpq_class> ter(n);
    for (std::uint32_t q = 0; q < a.states; ++q) ter[q] = k.to_rational(a.ter[q]);
    for (std::uint32_t q = 0; q < b.states; ++q) ter[q + offset] = -k.to_rational(b.ter[q]);
    // Transitions of the block-diagonal union.
    std::vector<const std::vector<WfaEdge>*> out(n);
    for (std::uint32_t q = 0; q < n; ++q) out[q] = q < offset ? &a.out[q] : &b.out[q - offset];

    auto dot_ter = [&](const SparseVector& v) {
        mpq_class acc = 0;
        for (const auto& [q, x] : v) acc += x * ter[q];
        return acc;
    };

    SparseVector start;
    for (std::uint32_t q = 0; q < a.states; ++q)
        if (!k.is_zero(a.in[q])) start.emplace_back(q, k.to_rational(a.in[q]));
    for (std::uint32_t q = 0; q < b.states; ++q)
        if (!k.is_zero(b.in[q])) start.emplace_back(q + offset, k.to_rational(b.in[q]));

    EquivVerdict verdict;
    EchelonBasis basis;
    std::deque<std::pair<SparseVector, std::vector<std::uint32_t>>> queue;
    auto consider = [&](SparseVector v, std::vector<std::uint32_t> word) {
        if (!basis.insert(v)) return false;
        ++verdict.basis_size;
        if (dot_ter(v) != 0) {
            verdict.equivalent = false;
            Word w = spell(*a.alphabet, word);
            verdict.witness = w;
            verdict.values = std::make_pair(wfa_behavior_symbols(a, word), wfa_behavior_symbols(b, word));
            return true;
        }
        queue.emplace_back(std::move(v), std::move(word));
        return false;
    };
    if (consider(start, {})) return verdict;
    while (!queue.empty()) {
        auto [v, word] = std::move(queue.front());
        queue.pop_front();
        std::vector<std::map<std::uint32_t, mpq_class>> next(symbols);
        for (const auto& [q, x] : v)
            for (const auto& e : *out[q]) {
                const auto target = q < offset ? e.target : e.target + offset;
                next[e.symbol][target] += x * k.to_rational(e.weight);
            }
        for (std::uint32_t s = 0; s < symbols; ++s) {
            SparseVector u;
            for (auto& [q, x] : next[s])
                if (x != 0) u.emplace_back(q, std::move(x));
            if (u.empty()) continue;
            auto extended = word;
            extended.push_back(s);
            if (consider(std::move(u), std::move(extended))) return verdict;
        }
    }
    return verdict;
}

EquivVerdict bounded_equiv(const Wfa& a_in, const Wfa& b_in, std::size_t max_length, std::uint64_t word_limit) {
    auto [a, b] = align(a_in, b_in);
    const auto& k = a.k();
    const std::uint64_t symbols = a.alphabet->symbol_count();
    std::uint64_t total = 0, layer = 1;
    for (std::size_t len = 0; len <= max_length; ++len) {
        total += layer;
        if (total > word_limit)
            throw ResourceError("bounded check would compare more than " + std::to_string(word_limit) + " words");
        if (len < max_length) {
            if (symbols != 0 && layer > word_limit / symbols + 1) layer = word_limit + 1;
            else layer *= symbols;
        }
    }
    EquivVerdict verdict;
    auto step = [&](const Wfa& m, const std::vector<Value>& v, std::uint32_t s) {
        std::vector<Value> out(m.states, k.zero);
        for (std::uint32_t q = 0; q < m.states; ++q) {
            if (k.is_zero(v[q])) continue;
            for (const auto& e : m.out[q])
                if (e.symbol == s) out[e.target] = k.add(out[e.target], k.mul(v[q], e.weight));
        }
        return out;
    };
    auto weight = [&](const Wfa& m, const std::vector<Value>& v) {
        Value acc = k.zero;
        for (std::uint32_t q = 0; q < m.states; ++q)
            if (!k.is_zero(v[q])) acc = k.add(acc, k.mul(v[q], m.ter[q]));
        return acc;
    };
    // Words of each length in lexicographic order, so the first mismatch is length-lex least.
    std::vector<std::uint32_t> word;
    std::function<bool(std::size_t, const std::vector<Value>&, const std::vector<Value>&)> visit =
        [&](std::size_t left, const std::vector<Value>& va, const std::vector<Value>& vb) {
            if (left == 0) {
                ++verdict.basis_size;
                Value x = weight(a, va), y = weight(b, vb);
                if (k.equal(x, y)) return false;
                verdict.equivalent = false;
                verdict.witness = spell(*a.alphabet, word);
                verdict.values = std::make_pair(x, y);
                return true;
            }
            for (std::uint32_t s = 0; s < symbols; ++s) {
                word.push_back(s);
                const bool found = visit(left - 1, step(a, va, s), step(b, vb, s));
                word.pop_back();
                if (found) return true;
            }
            return false;
        };
    for (std::size_t len = 0; len <= max_length; ++len)
        if (visit(len, a.in, b.in)) return verdict;
    return verdict;
}

EquivVerdict sentence_equiv(const FormulaPtr& f, const FormulaPtr& g, const SystemView& view,
                            const TranslateOptions& options, std::optional<std::size_t> bound) {
    if (!bound && !embeds_in_rationals(view.semiring()))
        throw CapabilityError("exact equivalence needs a semiring embedded in the rationals; " +
                              view.semiring().name + " is not (use a bounded check instead)");
    Wfa a = translate_wfoeil(f, view, {}, options);
    Wfa b = translate_wfoeil(g, view, {}, options);
    return bound ? bounded_equiv(a, b, *bound) : decide_equiv(a, b);
}

}  // namespace wfoeil
