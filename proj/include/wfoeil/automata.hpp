#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfoeil/semiring.hpp"
#include "wfoeil/system.hpp"

namespace wfoeil {

inline constexpr std::size_t kDefaultStateBudget = 200000;

// Explicit interaction alphabet whose letters are grouped into classes. Automata read
// class symbols; letters of one class are interchangeable for every automaton over it.
class Alphabet {
public:
    Alphabet() = default;
    // One class per letter.
    explicit Alphabet(std::vector<Interaction> letters);
    // `symbol_of[i]` is the class of letters[i]; classes are numbered densely from 0.
    Alphabet(std::vector<Interaction> letters, std::vector<std::uint32_t> symbol_of);

    std::size_t letter_count() const noexcept { return letters_.size(); }
    std::size_t symbol_count() const noexcept { return members_.size(); }
    const std::vector<Interaction>& letters() const noexcept { return letters_; }
    std::uint32_t symbol_of_letter(std::size_t i) const { return symbol_of_.at(i); }
    const std::vector<std::uint32_t>& members(std::uint32_t symbol) const { return members_.at(symbol); }
    const Interaction& representative(std::uint32_t symbol) const { return letters_[members_.at(symbol).front()]; }

    std::optional<std::size_t> letter_index(const Interaction& a) const;
    // Throws ValidationError naming the first letter outside the alphabet.
    std::vector<std::uint32_t> symbols(const Word& w) const;

    bool same_letters(const Alphabet& other) const { return letters_ == other.letters_; }
    bool operator==(const Alphabet& other) const {
        return letters_ == other.letters_ && symbol_of_ == other.symbol_of_;
    }

private:
    void index();

    std::vector<Interaction> letters_;
    std::vector<std::uint32_t> symbol_of_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::map<Interaction, std::size_t> position_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

// Coarsest common refinement of two partitions of the same letters, with the maps from the
// refined symbols back to each input's symbols.
struct Refinement {
    AlphabetPtr alphabet;
    std::vector<std::uint32_t> to_first;
    std::vector<std::uint32_t> to_second;
};
Refinement refine(const Alphabet& a, const Alphabet& b);

// ---------------------------------------------------------------------------
// Finite automata

struct Nfa {
    AlphabetPtr alphabet;
    std::uint32_t states = 0;
    std::vector<std::uint32_t> initial;
    // delta[q]: (symbol, target) pairs sorted.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> delta;
    std::vector<bool> accepting;

    bool accepts_symbols(const std::vector<std::uint32_t>& word) const;
    bool accepts(const Word& w) const;
    bool accepts_empty() const;
    bool is_deterministic() const;
    bool is_complete() const;
    std::size_t transition_count() const;
};

Nfa nfa_universal(AlphabetPtr alphabet);
Nfa nfa_empty_language(AlphabetPtr alphabet);
// Exactly the one-letter words whose symbol is selected.
Nfa nfa_letters(AlphabetPtr alphabet, const std::vector<bool>& selected);

Nfa nfa_union(const Nfa& a, const Nfa& b);
Nfa nfa_intersect(const Nfa& a, const Nfa& b);
Nfa nfa_concat(const Nfa& a, const Nfa& b);
Nfa nfa_shuffle(const Nfa& a, const Nfa& b);
// Complement with respect to all words, the empty word included.
Nfa nfa_complement(const Nfa& a, std::size_t budget = kDefaultStateBudget);
// Same language, with or without the empty word.
Nfa nfa_with_empty(const Nfa& a, bool accept_empty);
// Subset construction, completed with a sink; numbered breadth-first from the initial state.
Nfa nfa_determinize_complete(const Nfa& a, std::size_t budget = kDefaultStateBudget);
// Minimal complete DFA of a complete DFA, numbered breadth-first.
Nfa nfa_minimize(const Nfa& dfa);

// ---------------------------------------------------------------------------
// Weighted automata

struct WfaEdge {
    std::uint32_t symbol;
    std::uint32_t target;
    Value weight;
    bool operator==(const WfaEdge&) const = default;
};

struct Wfa {
    AlphabetPtr alphabet;
    const SemiringSpec* semiring = nullptr;
    std::uint32_t states = 0;
    std::vector<Value> in;
    std::vector<Value> ter;
    // out[q]: edges sorted by (symbol, target), weights nonzero.
    std::vector<std::vector<WfaEdge>> out;

    const SemiringSpec& k() const { return *semiring; }
    std::size_t transition_count() const;
    // Concrete transitions once classes are expanded to letters.
    std::size_t letter_transition_count() const;
};

Wfa wfa_make(AlphabetPtr alphabet, const SemiringSpec& k, std::uint32_t states);
void wfa_add_edge(Wfa& a, std::uint32_t from, std::uint32_t symbol, std::uint32_t to, const Value& w);
// Sorts edges and merges parallel ones; drops zeros.
void wfa_normalize(Wfa& a);

Value wfa_behavior_symbols(const Wfa& a, const std::vector<std::uint32_t>& word);
Value wfa_behavior(const Wfa& a, const Word& w);

Wfa wfa_constant(AlphabetPtr alphabet, const SemiringSpec& k, const Value& value);
// Requires a deterministic complete automaton.
Wfa characteristic_wfa(const Nfa& dfa, const SemiringSpec& k);

Wfa wfa_sum(const Wfa& a, const Wfa& b);
Wfa wfa_hadamard(const Wfa& a, const Wfa& b);
Wfa wfa_cauchy(const Wfa& a, const Wfa& b);
Wfa wfa_shuffle(const Wfa& a, const Wfa& b);
// Products restricted to pairs reachable from the initial pairs; same behavior.
Wfa wfa_hadamard_accessible(const Wfa& a, const Wfa& b, std::size_t budget = kDefaultStateBudget);
Wfa wfa_shuffle_accessible(const Wfa& a, const Wfa& b, std::size_t budget = kDefaultStateBudget);
// Drops states on no path from a nonzero initial weight to a nonzero terminal weight.
Wfa wfa_trim(const Wfa& a);
// Re-expresses the automaton over a refinement of its alphabet.
Wfa wfa_relabel(const Wfa& a, AlphabetPtr refined, const std::vector<std::uint32_t>& to_original);

// Text format: `wfa 1`, the semiring, the letters, `in`/`ter` lines and one
// `q --{letter}[weight]--> q'` line per concrete transition.
std::string write_wfa(const Wfa& a, const SystemView& view);
Wfa read_wfa(std::string_view text, const SystemView& view);

}  // namespace wfoeil
