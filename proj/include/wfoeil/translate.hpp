#pragma once

#include <optional>
#include <vector>

#include "wfoeil/automata.hpp"
#include "wfoeil/formula.hpp"
#include "wfoeil/system.hpp"

namespace wfoeil {

struct TranslateOptions {
    std::size_t budget = kDefaultStateBudget;
    unsigned jobs = 1;
    // Restricts words to these letters; the whole interaction set otherwise.
    std::optional<std::vector<Interaction>> alphabet;
};

// Letters grouped by their values on every grounded letter predicate (port blocks and
// macros) the formula can reach under sigma.
AlphabetPtr letter_classes(const FormulaPtr& f, const SystemView& view, const Assignment& sigma,
                           const TranslateOptions& options = {});

// Minimal complete DFA of the words satisfying an unweighted formula under sigma.
Nfa translate_foeil(const FormulaPtr& f, const SystemView& view, const Assignment& sigma = {},
                    const TranslateOptions& options = {});
// Trim weighted automaton with the formula's series under sigma.
Wfa translate_wfoeil(const FormulaPtr& f, const SystemView& view, const Assignment& sigma = {},
                     const TranslateOptions& options = {});

}  // namespace wfoeil
