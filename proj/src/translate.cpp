#include "wfoeil/translate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include "wfoeil/parser.hpp"
#include "wfoeil/semantics.hpp"

namespace wfoeil {

namespace {

using Values = std::vector<std::uint32_t>;

std::uint32_t lookup(const Assignment& sigma, const Variable& v) {
    auto it = sigma.find(v);
    if (it == sigma.end()) throw ValidationError("free variable " + v.name + " has no value");
    return it->second;
}

Values restrict(const Formula& f, const Assignment& sigma) {
    Values out;
    out.reserve(f.free.size());
    for (const auto& v : f.free) out.push_back(lookup(sigma, v));
    return out;
}

std::uint32_t instance_of(const Term& t, const Assignment& sigma) { return t.var ? lookup(sigma, *t.var) : t.instance; }

// Ports named by a macro, or nullopt when two of them disagree on one component instance.
std::optional<std::vector<PortInstance>> macro_ports(const Formula& f, const Assignment& sigma) {
    std::vector<PortInstance> ports;
    for (const auto& p : f.ports) ports.push_back({p.type, instance_of(p.term, sigma), p.port});
    std::sort(ports.begin(), ports.end());
    ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
    for (std::size_t i = 1; i < ports.size(); ++i)
        if (ports[i - 1].type == ports[i].type && ports[i - 1].instance == ports[i].instance) return std::nullopt;
    return ports;
}

bool letter_holds(const Formula& f, const Assignment& sigma, const Interaction& a) {
    switch (f.kind) {
    case NodeKind::truth: return true;
    case NodeKind::port: {
        const auto& p = f.ports[0];
        return a.contains({p.type, instance_of(p.term, sigma), p.port});
    }
    case NodeKind::hash:
    case NodeKind::hash_weighted: {
        auto ports = macro_ports(f, sigma);
        return ports && a.ports() == *ports;
    }
    case NodeKind::negation: return !letter_holds(f.child(0), sigma, a);
    case NodeKind::disjunction: return letter_holds(f.child(0), sigma, a) || letter_holds(f.child(1), sigma, a);
    case NodeKind::conjunction: return letter_holds(f.child(0), sigma, a) && letter_holds(f.child(1), sigma, a);
    default: throw std::logic_error("not a letter predicate");
    }
}

bool is_letter_predicate(const Formula& f) {
    return (f.pil && !f.is_literal_true()) || f.kind == NodeKind::hash_weighted;
}

struct Predicate {
    const Formula* node;
    Assignment sigma;
};

void collect(const Formula& f, Assignment& sigma, const SystemView& view,
             std::set<std::pair<const Formula*, Values>>& seen, std::vector<Predicate>& out) {
    if (!seen.emplace(&f, restrict(f, sigma)).second) return;
    if (is_letter_predicate(f)) {
        Assignment ground;
        for (const auto& v : f.free) ground[v] = sigma.at(v);
        out.push_back({&f, std::move(ground)});
        return;
    }
    if (f.kind == NodeKind::quantified) {
        const auto saved = sigma.find(f.bound) != sigma.end() ? std::optional(sigma[f.bound]) : std::nullopt;
        for (std::uint32_t j = 1; j <= view.instances()[f.bound.sort]; ++j) {
            sigma[f.bound] = j;
            collect(f.child(0), sigma, view, seen, out);
        }
        if (saved) sigma[f.bound] = *saved;
        else sigma.erase(f.bound);
        return;
    }
    for (const auto& c : f.children) collect(*c, sigma, view, seen, out);
}

std::vector<Interaction> letters_for(const SystemView& view, const TranslateOptions& options) {
    if (!options.alphabet) return view.enumerate_interactions();
    std::vector<Interaction> letters = *options.alphabet;
    for (const auto& a : letters) view.check_interaction(a);
    std::sort(letters.begin(), letters.end());
    letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
    return letters;
}

void check_free(const Formula& f, const Assignment& sigma, const SystemView& view) {
    for (const auto& v : f.free) {
        auto it = sigma.find(v);
        if (it == sigma.end()) throw ValidationError("free variable " + v.name + " has no value");
        if (it->second < 1 || it->second > view.instances()[v.sort])
            throw ValidationError("value of " + v.name + " is outside the instances of its type");
    }
}

class Translator {
public:
    Translator(const FormulaPtr& f, const SystemView& view, const Assignment& sigma, const TranslateOptions& options)
        : view_(view), k_(view.semiring()), options_(options), root_(f), sigma_(sigma) {
        check_free(*root_, sigma_, view_);
        alphabet_ = build_classes();
    }

    const AlphabetPtr& alphabet() const { return alphabet_; }

    Nfa foeil() {
        if (root_->weighted) throw ValidationError("formula is weighted; compile it as a weighted automaton");
        return *dfa(*root_);
    }

    Wfa wfoeil() { return *wfa(*root_); }

private:
    AlphabetPtr build_classes() {
        std::vector<Interaction> letters = letters_for(view_, options_);
        std::set<std::pair<const Formula*, Values>> seen;
        Assignment scope = sigma_;
        collect(*root_, scope, view_, seen, predicates_);
        std::vector<std::vector<bool>> signature(letters.size(), std::vector<bool>(predicates_.size()));
        auto work = [&](std::size_t from, std::size_t to) {
            for (std::size_t i = from; i < to; ++i)
                for (std::size_t p = 0; p < predicates_.size(); ++p)
                    signature[i][p] = letter_holds(*predicates_[p].node, predicates_[p].sigma, letters[i]);
        };
        const std::size_t jobs = std::clamp<std::size_t>(options_.jobs, 1, 64);
        if (jobs == 1 || letters.size() < 1024) {
            work(0, letters.size());
        } else {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (letters.size() + jobs - 1) / jobs;
            for (std::size_t from = 0; from < letters.size(); from += chunk)
                pool.emplace_back(work, from, std::min(letters.size(), from + chunk));
        }
        std::map<std::vector<bool>, std::uint32_t> ids;
        std::vector<std::uint32_t> symbol_of(letters.size());
        for (std::size_t i = 0; i < letters.size(); ++i)
            symbol_of[i] = ids.emplace(signature[i], static_cast<std::uint32_t>(ids.size())).first->second;
        return std::make_shared<Alphabet>(std::move(letters), std::move(symbol_of));
    }

    std::vector<bool> selected(const Formula& f) const {
        std::vector<bool> out(alphabet_->symbol_count());
        for (std::uint32_t s = 0; s < out.size(); ++s) out[s] = letter_holds(f, sigma_, alphabet_->representative(s));
        return out;
    }

    std::string describe(const Formula& f) const {
        try {
            return print_formula(f, view_.system());
        } catch (const std::exception&) {
            return "<subformula>";
        }
    }

    template <class A>
    void check_budget(const Formula& f, const A& a) const {
        if (a.states > options_.budget)
            throw BudgetExceededError("automaton for a subformula exceeds the state budget of " +
                                          std::to_string(options_.budget) + " states",
                                      describe(f));
    }

    template <class Body>
    auto with(const Variable& v, std::uint32_t j, Body&& body) {
        auto saved = sigma_.find(v) != sigma_.end() ? std::optional(sigma_[v]) : std::nullopt;
        sigma_[v] = j;
        auto out = body();
        if (saved) sigma_[v] = *saved;
        else sigma_.erase(v);
        return out;
    }

    // --- Boolean -----------------------------------------------------------

    Nfa minimal(Nfa a) const {
        if (!(a.is_deterministic() && a.is_complete())) a = nfa_determinize_complete(a, options_.budget);
        return nfa_minimize(a);
    }

    std::shared_ptr<const Nfa> dfa(const Formula& f) {
        auto key = std::make_pair(&f, restrict(f, sigma_));
        if (auto it = dfa_memo_.find(key); it != dfa_memo_.end()) return it->second;
        Nfa out;
        try {
            out = dfa_uncached(f);
            if (f.epil && !f.is_literal_true()) out = nfa_with_empty(out, empty_satisfies(f));
            out = minimal(std::move(out));
        } catch (const BudgetExceededError& e) {
            if (!e.subformula().empty()) throw;
            throw BudgetExceededError(e.what(), describe(f));
        }
        check_budget(f, out);
        auto ptr = std::make_shared<const Nfa>(std::move(out));
        dfa_memo_.emplace(std::move(key), ptr);
        return ptr;
    }

    Nfa dfa_uncached(const Formula& f) {
        if (f.is_literal_true()) return nfa_universal(alphabet_);
        if (f.pil) return nfa_letters(alphabet_, selected(f));
        switch (f.kind) {
        case NodeKind::equal:
            return lookup(sigma_, f.lhs) == lookup(sigma_, f.rhs) ? nfa_universal(alphabet_)
                                                                    : nfa_empty_language(alphabet_);
        case NodeKind::negation: return nfa_complement(*dfa(f.child(0)), options_.budget);
        case NodeKind::disjunction: return nfa_union(*dfa(f.child(0)), *dfa(f.child(1)));
        case NodeKind::conjunction: return nfa_intersect(*dfa(f.child(0)), *dfa(f.child(1)));
        case NodeKind::concat: return nfa_concat(*dfa(f.child(0)), *dfa(f.child(1)));
        case NodeKind::shuffle: return nfa_shuffle(*dfa(f.child(0)), *dfa(f.child(1)));
        case NodeKind::quantified: return dfa_quantified(f);
        default: throw std::logic_error("unexpected node in an unweighted position");
        }
    }

    Nfa dfa_quantified(const Formula& f) {
        const std::uint32_t r = view_.instances()[f.bound.sort];
        std::vector<std::shared_ptr<const Nfa>> parts;
        for (std::uint32_t j = 1; j <= r; ++j) parts.push_back(with(f.bound, j, [&] { return dfa(f.child(0)); }));
        auto fold = [&](auto op) {
            Nfa acc = *parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) acc = minimal(op(acc, *parts[i]));
            return acc;
        };
        // Union over nonempty index subsets of the ordered chain, built from the last index down.
        auto subsets = [&](auto op) {
            Nfa acc = *parts.back();
            for (std::size_t i = parts.size() - 1; i-- > 0;)
                acc = minimal(nfa_union(op(*parts[i], nfa_with_empty(acc, true)), acc));
            return acc;
        };
        switch (f.quantifier) {
        case Quantifier::exists: return fold(nfa_union);
        case Quantifier::forall: return fold(nfa_intersect);
        case Quantifier::forall_concat: return fold(nfa_concat);
        case Quantifier::forall_shuffle: return fold(nfa_shuffle);
        case Quantifier::exists_concat: return subsets(nfa_concat);
        case Quantifier::exists_shuffle: return subsets(nfa_shuffle);
        default: throw std::logic_error("weighted quantifier in an unweighted position");
        }
    }

    // --- Weighted ----------------------------------------------------------

    Wfa empty_word_series() const {
        Wfa a = wfa_make(alphabet_, k_, 1);
        a.in[0] = k_.one;
        a.ter[0] = k_.one;
        return a;
    }

    std::shared_ptr<const Wfa> wfa(const Formula& f) {
        auto key = std::make_pair(&f, restrict(f, sigma_));
        if (auto it = wfa_memo_.find(key); it != wfa_memo_.end()) return it->second;
        Wfa out;
        try {
            out = wfa_trim(wfa_uncached(f));
        } catch (const BudgetExceededError& e) {
            if (!e.subformula().empty()) throw;
            throw BudgetExceededError(e.what(), describe(f));
        }
        check_budget(f, out);
        auto ptr = std::make_shared<const Wfa>(std::move(out));
        wfa_memo_.emplace(std::move(key), ptr);
        return ptr;
    }

    Wfa wfa_uncached(const Formula& f) {
        if (!f.weighted) return characteristic_wfa(*dfa(f), k_);
        const auto budget = options_.budget;
        switch (f.kind) {
        case NodeKind::constant: return wfa_constant(alphabet_, k_, f.constant);
        case NodeKind::hash_weighted: {
            Wfa a = wfa_make(alphabet_, k_, 2);
            a.in[0] = k_.one;
            a.ter[1] = k_.one;
            Value w = k_.one;
            for (const auto& p : f.ports) w = k_.mul(w, view_.system().types[p.type].ports[p.port].weight);
            auto sel = selected(f);
            for (std::uint32_t s = 0; s < sel.size(); ++s)
                if (sel[s]) wfa_add_edge(a, 0, s, 1, w);
            return a;
        }
        case NodeKind::weighted_sum: return wfa_sum(*wfa(f.child(0)), *wfa(f.child(1)));
        case NodeKind::weighted_product: return wfa_hadamard_accessible(*wfa(f.child(0)), *wfa(f.child(1)), budget);
        case NodeKind::weighted_concat: return wfa_cauchy(*wfa(f.child(0)), *wfa(f.child(1)));
        case NodeKind::weighted_shuffle: return wfa_shuffle_accessible(*wfa(f.child(0)), *wfa(f.child(1)), budget);
        case NodeKind::quantified: return wfa_quantified(f);
        default: throw std::logic_error("unexpected weighted node");
        }
    }

    Wfa wfa_quantified(const Formula& f) {
        const std::uint32_t r = view_.instances()[f.bound.sort];
        const auto budget = options_.budget;
        std::vector<std::shared_ptr<const Wfa>> parts;
        for (std::uint32_t j = 1; j <= r; ++j) parts.push_back(with(f.bound, j, [&] { return wfa(f.child(0)); }));
        auto checked = [&](Wfa a) {
            a = wfa_trim(a);
            check_budget(f, a);
            return a;
        };
        auto fold = [&](auto op) {
            Wfa acc = *parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) acc = checked(op(acc, *parts[i]));
            return acc;
        };
        // Sum over nonempty index subsets of the ordered product chain, built from the last index down.
        auto subsets = [&](auto op) {
            Wfa acc = *parts.back();
            for (std::size_t i = parts.size() - 1; i-- > 0;)
                acc = checked(wfa_sum(op(*parts[i], wfa_sum(empty_word_series(), acc)), acc));
            return acc;
        };
        auto hadamard = [&](const Wfa& a, const Wfa& b) { return wfa_hadamard_accessible(a, b, budget); };
        auto shuffle = [&](const Wfa& a, const Wfa& b) { return wfa_shuffle_accessible(a, b, budget); };
        switch (f.quantifier) {
        case Quantifier::sum: return fold(wfa_sum);
        case Quantifier::product: return fold(hadamard);
        case Quantifier::product_concat: return fold(wfa_cauchy);
        case Quantifier::product_shuffle: return fold(shuffle);
        case Quantifier::sum_concat: return subsets(wfa_cauchy);
        case Quantifier::sum_shuffle: return subsets(shuffle);
        default: return characteristic_wfa(*dfa(f), k_);
        }
    }

    const SystemView& view_;
    const SemiringSpec& k_;
    TranslateOptions options_;
    FormulaPtr root_;
    Assignment sigma_;
    AlphabetPtr alphabet_;
    std::vector<Predicate> predicates_;
    std::map<std::pair<const Formula*, Values>, std::shared_ptr<const Nfa>> dfa_memo_;
    std::map<std::pair<const Formula*, Values>, std::shared_ptr<const Wfa>> wfa_memo_;
};

}  // namespace

AlphabetPtr letter_classes(const FormulaPtr& f, const SystemView& view, const Assignment& sigma,
                           const TranslateOptions& options) {
    return Translator(f, view, sigma, options).alphabet();
}

Nfa translate_foeil(const FormulaPtr& f, const SystemView& view, const Assignment& sigma,
                    const TranslateOptions& options) {
    return Translator(f, view, sigma, options).foeil();
}

Wfa translate_wfoeil(const FormulaPtr& f, const SystemView& view, const Assignment& sigma,
                     const TranslateOptions& options) {
    return Translator(f, view, sigma, options).wfoeil();
}

}  // namespace wfoeil
