#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "wfoeil/automata.hpp"
#include "wfoeil/errors.hpp"

using namespace wfoeil;
using support::SymbolWord;

namespace {

struct Letters {
    SystemView view = support::letter_view(3);
    AlphabetPtr alphabet = support::plain_alphabet(view);
    const SemiringSpec& q = builtin("rational");

    Nfa single(std::uint32_t symbol) const {
        std::vector<bool> selected(alphabet->symbol_count(), false);
        selected[symbol] = true;
        return nfa_letters(alphabet, selected);
    }
    Nfa dfa(const Nfa& a) const { return nfa_minimize(nfa_determinize_complete(a)); }
};

bool same_language(const Nfa& a, const Nfa& b, std::size_t max_len) {
    for (const auto& w : support::symbol_words(static_cast<std::uint32_t>(a.alphabet->symbol_count()), max_len))
        if (a.accepts_symbols(w) != b.accepts_symbols(w)) return false;
    return true;
}

}  // namespace

TEST_CASE_FIXTURE(Letters, "minimal DFA for the second-to-last letter") {
    // Words over {a, b} whose second-to-last letter is a.
    const auto two = support::letter_view(2);
    const auto ab = support::plain_alphabet(two);
    Nfa n;
    n.alphabet = ab;
    n.states = 3;
    n.initial = {0};
    n.delta = {{{0, 0}, {0, 1}, {1, 0}}, {{0, 2}, {1, 2}}, {}};
    n.accepting = {false, false, true};
    const auto d = nfa_determinize_complete(n);
    CHECK(d.is_deterministic());
    CHECK(d.is_complete());
    const auto m = nfa_minimize(d);
    CHECK(m.states == 4);
    CHECK(m.is_deterministic());
    CHECK(m.is_complete());
    CHECK(same_language(m, n, 7));
    CHECK(m.accepts_symbols({1, 0, 1}));
    CHECK_FALSE(m.accepts_symbols({0, 1, 1}));
}

TEST_CASE_FIXTURE(Letters, "determinization and minimization preserve the language") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto n = support::random_nfa(alphabet, 2 + static_cast<std::uint32_t>(rng() % 4), rng);
        const auto d = nfa_determinize_complete(n);
        const auto m = nfa_minimize(d);
        CHECK(d.is_deterministic());
        CHECK(m.is_complete());
        CHECK(m.states <= d.states);
        CHECK(same_language(n, d, 5));
        CHECK(same_language(n, m, 5));
        // Minimization is canonical.
        CHECK(nfa_minimize(nfa_determinize_complete(m)).delta == m.delta);
    }
}

TEST_CASE_FIXTURE(Letters, "boolean closures") {
    std::mt19937_64 rng(9);
    const auto universal = nfa_universal(alphabet);
    for (int i = 0; i < 30; ++i) {
        const auto a = support::random_nfa(alphabet, 3, rng);
        const auto b = support::random_nfa(alphabet, 3, rng);
        const auto ca = nfa_complement(a);
        CHECK(same_language(nfa_complement(ca), a, 5));
        CHECK(same_language(nfa_intersect(a, universal), a, 5));
        CHECK(same_language(nfa_union(a, ca), universal, 4));
        CHECK(same_language(nfa_intersect(a, ca), nfa_empty_language(alphabet), 4));
        for (const auto& w : support::symbol_words(3, 4)) {
            CHECK(nfa_union(a, b).accepts_symbols(w) == (a.accepts_symbols(w) || b.accepts_symbols(w)));
            CHECK(nfa_intersect(a, b).accepts_symbols(w) == (a.accepts_symbols(w) && b.accepts_symbols(w)));
        }
        CHECK(nfa_with_empty(a, true).accepts_empty());
        CHECK_FALSE(nfa_with_empty(a, false).accepts_empty());
        CHECK(same_language(nfa_with_empty(nfa_with_empty(a, true), a.accepts_empty()), a, 4));
    }
}

TEST_CASE_FIXTURE(Letters, "concatenation and shuffle") {
    const auto sh = nfa_shuffle(single(0), single(1));
    for (const auto& w : support::symbol_words(3, 3))
        CHECK(sh.accepts_symbols(w) == (w == SymbolWord{0, 1} || w == SymbolWord{1, 0}));
    const auto cat = nfa_concat(single(0), single(1));
    for (const auto& w : support::symbol_words(3, 3)) CHECK(cat.accepts_symbols(w) == (w == SymbolWord{0, 1}));

    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const auto a = support::random_nfa(alphabet, 3, rng);
        const auto b = support::random_nfa(alphabet, 3, rng);
        const auto ab = nfa_concat(a, b);
        const auto shuffled = nfa_shuffle(a, b);
        for (const auto& w : support::symbol_words(3, 4)) {
            bool split = false;
            for (std::size_t k = 0; k <= w.size() && !split; ++k)
                split = a.accepts_symbols(SymbolWord(w.begin(), w.begin() + static_cast<long>(k))) &&
                        b.accepts_symbols(SymbolWord(w.begin() + static_cast<long>(k), w.end()));
            CHECK(ab.accepts_symbols(w) == split);
            bool mix = false;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << w.size()) && !mix; ++mask) {
                SymbolWord u, v;
                for (std::size_t j = 0; j < w.size(); ++j) (mask >> j & 1 ? u : v).push_back(w[j]);
                mix = a.accepts_symbols(u) && b.accepts_symbols(v);
            }
            CHECK(shuffled.accepts_symbols(w) == mix);
        }
    }
}

TEST_CASE_FIXTURE(Letters, "state budget") {
    std::mt19937_64 rng(17);
    const auto a = support::random_nfa(alphabet, 8, rng, 0.4);
    CHECK_THROWS_AS(nfa_determinize_complete(a, 2), BudgetExceededError);
}

TEST_CASE_FIXTURE(Letters, "characteristic series") {
    const auto ca = characteristic_wfa(dfa(single(0)), q);
    const auto cb = characteristic_wfa(dfa(single(1)), q);
    const auto cat = wfa_cauchy(ca, cb);
    for (const auto& w : support::symbol_words(3, 3))
        CHECK(wfa_behavior_symbols(cat, w) == Value(w == SymbolWord{0, 1} ? 1 : 0));
    const auto sh = wfa_shuffle(ca, ca);
    CHECK(wfa_behavior_symbols(sh, {0, 0}) == Value(2));
    CHECK(wfa_behavior_symbols(sh, {0}) == Value(0));

    const auto& mp = builtin("min-plus");
    const auto tropical = characteristic_wfa(dfa(single(2)), mp);
    CHECK(wfa_behavior_symbols(tropical, {2}) == Value::real(0));
    CHECK(wfa_behavior_symbols(tropical, {1}) == Value::infinity());
    CHECK(wfa_behavior_symbols(tropical, {}) == Value::infinity());

    CHECK_THROWS_AS(characteristic_wfa(nfa_union(single(0), single(0)), q), ValidationError);
}

TEST_CASE_FIXTURE(Letters, "constants") {
    const auto c = wfa_constant(alphabet, q, support::rat(3, 2));
    CHECK(c.states == 1);
    for (const auto& w : support::symbol_words(3, 3)) CHECK(wfa_behavior_symbols(c, w) == support::rat(3, 2));
}

TEST_CASE_FIXTURE(Letters, "closure sizes and series laws over the rationals") {
    std::mt19937_64 rng(21);
    const auto words = support::symbol_words(3, 4);
    for (int i = 0; i < 40; ++i) {
        const auto a = support::random_wfa(alphabet, q, 3, rng);
        const auto b = support::random_wfa(alphabet, q, 1 + static_cast<std::uint32_t>(rng() % 3), rng);
        const auto sum = wfa_sum(a, b);
        const auto had = wfa_hadamard(a, b);
        const auto cau = wfa_cauchy(a, b);
        const auto shu = wfa_shuffle(a, b);
        CHECK(sum.states == a.states + b.states);
        CHECK(had.states == a.states * b.states);
        CHECK(cau.states == a.states + b.states);
        CHECK(shu.states == a.states * b.states);
        const auto hadx = wfa_hadamard_accessible(a, b);
        const auto shux = wfa_shuffle_accessible(a, b);
        const auto trimmed = wfa_trim(shu);
        CHECK(hadx.states <= had.states);
        CHECK(trimmed.states <= shu.states);
        for (const auto& w : words) {
            const Value fa = wfa_behavior_symbols(a, w), fb = wfa_behavior_symbols(b, w);
            CHECK(wfa_behavior_symbols(sum, w) == q.add(fa, fb));
            CHECK(wfa_behavior_symbols(had, w) == q.mul(fa, fb));
            CHECK(wfa_behavior_symbols(hadx, w) == q.mul(fa, fb));
            const Value c = support::cauchy_value(q, support::behavior(a), support::behavior(b), w);
            const Value s = support::shuffle_value(q, support::behavior(a), support::behavior(b), w);
            CHECK(wfa_behavior_symbols(cau, w) == c);
            CHECK(wfa_behavior_symbols(shu, w) == s);
            CHECK(wfa_behavior_symbols(shux, w) == s);
            CHECK(wfa_behavior_symbols(trimmed, w) == s);
        }
    }
}

TEST_CASE("series laws over other semirings") {
    std::mt19937_64 rng(23);
    for (auto name : {"natural", "min-plus", "max-plus", "viterbi", "fuzzy", "boolean"}) {
        CAPTURE(name);
        const auto view = support::letter_view(2, name);
        const auto alphabet = support::plain_alphabet(view);
        const auto& k = builtin(name);
        for (int i = 0; i < 10; ++i) {
            const auto a = support::random_wfa(alphabet, k, 2, rng);
            const auto b = support::random_wfa(alphabet, k, 2, rng);
            const auto cau = wfa_cauchy(a, b);
            const auto shu = wfa_shuffle(a, b);
            for (const auto& w : support::symbol_words(2, 4)) {
                CHECK(k.equal(wfa_behavior_symbols(cau, w),
                              support::cauchy_value(k, support::behavior(a), support::behavior(b), w)));
                CHECK(k.equal(wfa_behavior_symbols(shu, w),
                              support::shuffle_value(k, support::behavior(a), support::behavior(b), w)));
            }
        }
    }
}

TEST_CASE_FIXTURE(Letters, "letter classes") {
    // Letters 0 and 2 share a class.
    const auto classes = std::make_shared<Alphabet>(alphabet->letters(), std::vector<std::uint32_t>{0, 1, 0});
    CHECK(classes->symbol_count() == 2);
    CHECK(classes->symbols({alphabet->letters()[2], alphabet->letters()[1]}) == SymbolWord{0, 1});
    const auto r = refine(*alphabet, *classes);
    CHECK(r.alphabet->symbol_count() == 3);
    Wfa a = wfa_make(classes, q, 1);
    a.in[0] = Value(1);
    a.ter[0] = Value(1);
    wfa_add_edge(a, 0, 0, 0, Value(2));
    wfa_normalize(a);
    CHECK(a.transition_count() == 1);
    CHECK(a.letter_transition_count() == 2);
    const auto relabeled = wfa_relabel(a, r.alphabet, r.to_second);
    for (const auto& w : support::words_over(alphabet->letters(), 3))
        CHECK(wfa_behavior(relabeled, w) == wfa_behavior(a, w));
    const auto outside = Interaction({{0, 1, 0}, {0, 1, 1}});
    CHECK_THROWS_AS(alphabet->symbols({outside}), ValidationError);
}

TEST_CASE_FIXTURE(Letters, "text round trip") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 10; ++i) {
        const auto a = support::random_wfa(alphabet, q, 3, rng);
        const std::string text = write_wfa(a, view);
        CHECK(text.starts_with("wfa 1\n"));
        const auto back = read_wfa(text, view);
        CHECK(write_wfa(back, view) == text);
        for (const auto& w : support::symbol_words(3, 3))
            CHECK(wfa_behavior_symbols(back, w) == wfa_behavior_symbols(a, w));
    }
    CHECK_THROWS_AS(read_wfa("wfa 1\nsemiring natural\nstates 1\nletters 0\n", view), ParseError);
    CHECK_THROWS_AS(read_wfa("wfa 1\nsemiring rational\nstates 1\nletters 1\nletter {t.z(1)}\n", view), ParseError);
}
