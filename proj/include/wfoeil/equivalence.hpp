#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "wfoeil/automata.hpp"
#include "wfoeil/formula.hpp"
#include "wfoeil/translate.hpp"

namespace wfoeil {

inline constexpr std::uint64_t kBoundedWordLimit = 5'000'000;

struct EquivVerdict {
    bool equivalent = true;
    // A shortest distinguishing word.
    std::optional<Word> witness;
    // The two behaviors on the witness.
    std::optional<std::pair<Value, Value>> values;
    // Forward basis size, or the number of words compared by the bounded check.
    std::size_t basis_size = 0;
};

// Exact decision for semirings embedding into the rationals; CapabilityError otherwise.
EquivVerdict decide_equiv(const Wfa& a, const Wfa& b);
// Compares every word up to `max_length` letters (one letter per class); any semiring.
// ResourceError when more than `word_limit` words would be compared.
EquivVerdict bounded_equiv(const Wfa& a, const Wfa& b, std::size_t max_length,
                           std::uint64_t word_limit = kBoundedWordLimit);

// Translates both sentences and compares them, exactly or up to `bound` letters.
EquivVerdict sentence_equiv(const FormulaPtr& f, const FormulaPtr& g, const SystemView& view,
                            const TranslateOptions& options = {}, std::optional<std::size_t> bound = std::nullopt);

}  // namespace wfoeil
