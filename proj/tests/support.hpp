#pragma once

// Helpers shared by the test binaries: small systems, word enumeration, random automata
// and brute-force series operations over symbol words.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wfoeil/automata.hpp"
#include "wfoeil/parser.hpp"
#include "wfoeil/system.hpp"

namespace support {

using namespace wfoeil;
using SymbolWord = std::vector<std::uint32_t>;

inline Value rat(long num, long den = 1) { return Value::exact(mpq_class(num, den)); }

// One component instance with `ports` ports named a, b, c, ...: exactly `ports` one-port letters.
inline SystemView letter_view(std::uint32_t ports, std::string_view semiring = "rational") {
    std::string text = "wcb 1\nsemiring " + std::string(semiring) + "\ntype t {";
    for (std::uint32_t i = 0; i < ports; ++i) text += std::string(" port ") + static_cast<char>('a' + i);
    text += " }\ninstances { t = 1 }\n";
    ParametricSystem sys = parse_system(text);
    return SystemView(sys, *sys.instances);
}

inline AlphabetPtr plain_alphabet(const SystemView& view) {
    return std::make_shared<Alphabet>(view.enumerate_interactions());
}

inline std::vector<SymbolWord> symbol_words(std::uint32_t symbols, std::size_t max_len) {
    std::vector<SymbolWord> out{{}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].size() == max_len) continue;
        for (std::uint32_t s = 0; s < symbols; ++s) {
            auto w = out[i];
            w.push_back(s);
            out.push_back(std::move(w));
        }
    }
    return out;
}

inline std::vector<Word> words_over(const std::vector<Interaction>& letters, std::size_t max_len) {
    std::vector<Word> out;
    for (const auto& sw : symbol_words(static_cast<std::uint32_t>(letters.size()), max_len)) {
        Word w;
        for (auto s : sw) w.push_back(letters[s]);
        out.push_back(std::move(w));
    }
    return out;
}

// Rational weights from a small palette, negative values included.
inline Value random_rational(std::mt19937_64& rng) {
    static const long num[] = {1, 2, 3, -1, -2, 1, 3};
    static const long den[] = {1, 1, 2, 1, 3, 4, 1};
    const auto i = rng() % 7;
    return rat(num[i], den[i]);
}

inline Wfa random_wfa(const AlphabetPtr& alphabet, const SemiringSpec& k, std::uint32_t states,
                      std::mt19937_64& rng, double density = 0.45) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto draw = [&] { return k.kind == SemiringKind::rational ? random_rational(rng) : k.sample(rng); };
    Wfa a = wfa_make(alphabet, k, states);
    for (std::uint32_t q = 0; q < states; ++q) {
        if (coin(rng) < 0.5 || q == 0) a.in[q] = draw();
        if (coin(rng) < 0.5) a.ter[q] = draw();
        for (std::uint32_t s = 0; s < alphabet->symbol_count(); ++s)
            for (std::uint32_t t = 0; t < states; ++t)
                if (coin(rng) < density) wfa_add_edge(a, q, s, t, draw());
    }
    wfa_normalize(a);
    return a;
}

inline Nfa random_nfa(const AlphabetPtr& alphabet, std::uint32_t states, std::mt19937_64& rng, double density = 0.3) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Nfa a;
    a.alphabet = alphabet;
    a.states = states;
    a.delta.resize(states);
    a.accepting.assign(states, false);
    for (std::uint32_t q = 0; q < states; ++q) {
        if (q == 0 || coin(rng) < 0.2) a.initial.push_back(q);
        a.accepting[q] = coin(rng) < 0.4;
        for (std::uint32_t s = 0; s < alphabet->symbol_count(); ++s)
            for (std::uint32_t t = 0; t < states; ++t)
                if (coin(rng) < density) a.delta[q].push_back({s, t});
    }
    return a;
}

// Brute-force series operations from operand behaviors.
using Series = std::function<Value(const SymbolWord&)>;

inline Value cauchy_value(const SemiringSpec& k, const Series& f, const Series& g, const SymbolWord& w) {
    Value acc = k.zero;
    for (std::size_t i = 0; i <= w.size(); ++i) {
        SymbolWord u(w.begin(), w.begin() + static_cast<long>(i)), v(w.begin() + static_cast<long>(i), w.end());
        acc = k.add(acc, k.mul(f(u), g(v)));
    }
    return acc;
}

inline Value shuffle_value(const SemiringSpec& k, const Series& f, const Series& g, const SymbolWord& w) {
    Value acc = k.zero;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << w.size()); ++mask) {
        SymbolWord u, v;
        for (std::size_t i = 0; i < w.size(); ++i) (mask >> i & 1 ? u : v).push_back(w[i]);
        acc = k.add(acc, k.mul(f(u), g(v)));
    }
    return acc;
}

inline Series behavior(const Wfa& a) {
    return [&a](const SymbolWord& w) { return wfa_behavior_symbols(a, w); };
}

}  // namespace support
