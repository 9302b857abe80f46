#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "wfoeil/formula.hpp"
#include "wfoeil/semiring.hpp"
#include "wfoeil/system.hpp"

namespace wfoeil {

#ifdef WFOEIL_COMPOSITIONAL_EMPTY
inline constexpr bool kCompositionalEmpty = true;
#else
inline constexpr bool kCompositionalEmpty = false;
#endif

// Whether the empty word satisfies an EPIL subtree under the active empty-word policy.
bool empty_satisfies(const Formula& f);

// All interleavings of w and u, each with the number of decompositions producing it.
std::map<Word, std::uint64_t> shuffle_words(const Word& w, const Word& u);

// Ground formulas only.
bool pil_satisfies(const Interaction& a, const Formula& f);
bool epil_satisfies(const Word& w, const Formula& f);
Value wepil_eval(const SystemView& view, const Word& w, const Formula& f);

// free(f) must be covered by sigma; throws ValidationError otherwise.
bool foeil_satisfies(const SystemView& view, const Assignment& sigma, const Word& w, const Formula& f);
Value wfoeil_eval(const SystemView& view, const Assignment& sigma, const Word& w, const Formula& f);

// Memoised evaluation of one formula on many words. Words are limited to 64 letters.
class Evaluator {
public:
    Evaluator(const SystemView& view, FormulaPtr formula);
    ~Evaluator();
    Evaluator(const Evaluator&) = delete;
    Evaluator& operator=(const Evaluator&) = delete;

    Value eval(const Word& w, const Assignment& sigma = {});
    bool satisfies(const Word& w, const Assignment& sigma = {});

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace wfoeil
