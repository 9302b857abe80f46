#include "wfoeil/formula.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace wfoeil {

bool is_weighted(Quantifier q) {
    switch (q) {
    case Quantifier::sum:
    case Quantifier::product:
    case Quantifier::sum_concat:
    case Quantifier::product_concat:
    case Quantifier::sum_shuffle:
    case Quantifier::product_shuffle: return true;
    default: return false;
    }
}

bool is_existential(Quantifier q) {
    switch (q) {
    case Quantifier::exists:
    case Quantifier::exists_concat:
    case Quantifier::exists_shuffle:
    case Quantifier::sum:
    case Quantifier::sum_concat:
    case Quantifier::sum_shuffle: return true;
    default: return false;
    }
}

bool is_restricted(Quantifier q) {
    return q == Quantifier::exists_concat || q == Quantifier::exists_shuffle ||
           q == Quantifier::sum_concat || q == Quantifier::sum_shuffle;
}

std::string_view quantifier_keyword(Quantifier q) {
    switch (q) {
    case Quantifier::exists: return "E";
    case Quantifier::forall: return "A";
    case Quantifier::exists_concat: return "Ec";
    case Quantifier::forall_concat: return "Ac";
    case Quantifier::exists_shuffle: return "Es";
    case Quantifier::forall_shuffle: return "As";
    case Quantifier::sum: return "Sum";
    case Quantifier::product: return "Prod";
    case Quantifier::sum_concat: return "SumC";
    case Quantifier::product_concat: return "ProdC";
    case Quantifier::sum_shuffle: return "SumS";
    case Quantifier::product_shuffle: return "ProdS";
    }
    return "?";
}

namespace {

std::vector<Variable> merge(const std::vector<Variable>& a, const std::vector<Variable>& b) {
    std::vector<Variable> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Variable> port_vars(const std::vector<PortRef>& ports) {
    std::vector<Variable> out;
    for (const auto& p : ports)
        if (p.term.var) out.push_back(*p.term.var);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_binary(NodeKind k) {
    switch (k) {
    case NodeKind::disjunction:
    case NodeKind::conjunction:
    case NodeKind::concat:
    case NodeKind::shuffle:
    case NodeKind::weighted_sum:
    case NodeKind::weighted_product:
    case NodeKind::weighted_concat:
    case NodeKind::weighted_shuffle: return true;
    default: return false;
    }
}

bool is_weighted_binary(NodeKind k) {
    return k == NodeKind::weighted_sum || k == NodeKind::weighted_product ||
           k == NodeKind::weighted_concat || k == NodeKind::weighted_shuffle;
}

}  // namespace

FormulaPtr make_true(SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::truth;
    f->span = span;
    f->pil = f->epil = true;
    return f;
}

FormulaPtr make_false(SourceSpan span) { return make_not(make_true(span), span); }

FormulaPtr make_port(PortRef port, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::port;
    f->ports = {std::move(port)};
    f->span = span;
    f->free = port_vars(f->ports);
    f->pil = f->epil = true;
    return f;
}

FormulaPtr make_hash(std::vector<PortRef> args, bool weighted, SourceSpan span) {
    if (args.empty()) throw ValidationError("macro needs at least one port");
    for (std::size_t i = 0; i < args.size(); ++i)
        for (std::size_t j = i + 1; j < args.size(); ++j)
            if (args[i].type == args[j].type && args[i].term == args[j].term)
                throw ValidationError(
                    "macro names the same component instance twice; its arguments must come from "
                    "distinct component instances");
    auto f = std::make_shared<Formula>();
    f->kind = weighted ? NodeKind::hash_weighted : NodeKind::hash;
    f->ports = std::move(args);
    f->span = span;
    f->free = port_vars(f->ports);
    f->pil = f->epil = !weighted;
    f->weighted = weighted;
    return f;
}

FormulaPtr make_constant(Value k, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::constant;
    f->constant = std::move(k);
    f->span = span;
    f->weighted = true;
    return f;
}

FormulaPtr make_equal(Variable lhs, Variable rhs, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::equal;
    f->span = span;
    f->free = merge({lhs}, {rhs});
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
}

FormulaPtr make_not(FormulaPtr operand, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::negation;
    f->span = span;
    f->free = operand->free;
    f->pil = operand->pil;
    f->epil = operand->epil;
    f->weighted = operand->weighted;
    f->children = {std::move(operand)};
    return f;
}

FormulaPtr make_binary(NodeKind kind, FormulaPtr lhs, FormulaPtr rhs, SourceSpan span) {
    if (!is_binary(kind)) throw std::logic_error("make_binary: not a binary node kind");
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->span = span;
    f->free = merge(lhs->free, rhs->free);
    const bool both_pil = lhs->pil && rhs->pil;
    const bool both_epil = lhs->epil && rhs->epil;
    f->weighted = is_weighted_binary(kind) || lhs->weighted || rhs->weighted;
    f->pil = !f->weighted && both_pil && (kind == NodeKind::disjunction || kind == NodeKind::conjunction);
    f->epil = !f->weighted && both_epil;
    f->children = {std::move(lhs), std::move(rhs)};
    return f;
}

FormulaPtr make_quantified(Quantifier q, Variable bound, FormulaPtr body, SourceSpan span) {
    auto f = std::make_shared<Formula>();
    f->kind = NodeKind::quantified;
    f->quantifier = q;
    f->span = span;
    f->free = body->free;
    f->free.erase(std::remove(f->free.begin(), f->free.end(), bound), f->free.end());
    f->weighted = is_weighted(q) || body->weighted;
    f->bound = std::move(bound);
    f->children = {std::move(body)};
    return f;
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    switch (a.kind) {
    case NodeKind::port:
    case NodeKind::hash:
    case NodeKind::hash_weighted:
        if (a.ports != b.ports) return false;
        break;
    case NodeKind::constant:
        if (!(a.constant == b.constant)) return false;
        break;
    case NodeKind::equal:
        if (a.lhs != b.lhs || a.rhs != b.rhs) return false;
        break;
    case NodeKind::quantified:
        if (a.quantifier != b.quantifier || a.bound != b.bound) return false;
        break;
    default: break;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

std::set<Variable> free_variables(const Formula& f) { return {f.free.begin(), f.free.end()}; }

namespace {

// zeta ::= PIL | zeta * zeta
bool is_zeta(const Formula& f) {
    if (f.pil) return true;
    return f.kind == NodeKind::concat && is_zeta(f.child(0)) && is_zeta(f.child(1));
}

std::string var_text(const Variable& v, const ParametricSystem& s) {
    std::string sort = v.sort < s.types.size() ? s.types[v.sort].name : "?";
    return v.name + ":" + sort;
}

class Validator {
public:
    Validator(const ParametricSystem& s, std::vector<Diagnostic>& out) : sys_(s), out_(out) {}

    void run(const Formula& f) {
        switch (f.kind) {
        case NodeKind::truth: break;
        case NodeKind::port:
        case NodeKind::hash:
        case NodeKind::hash_weighted:
            for (const auto& p : f.ports) check_port(p, f.span);
            break;
        case NodeKind::constant: {
            const SemiringSpec& k = builtin(sys_.semiring);
            if (!k.contains(f.constant))
                emit("constant " + f.constant.debug_string() + " is not in the carrier of " + k.name,
                     f.span);
            break;
        }
        case NodeKind::equal:
            check_sort(f.lhs, f.span);
            check_sort(f.rhs, f.span);
            if (f.lhs.sort != f.rhs.sort)
                emit("equality between variables of different sorts: " + var_text(f.lhs, sys_) +
                         " and " + var_text(f.rhs, sys_),
                     f.span);
            break;
        case NodeKind::negation: {
            const Formula& op = f.child(0);
            if (op.weighted) {
                emit("negation of a weighted formula", f.span);
            } else if (op.kind != NodeKind::equal && !is_zeta(op)) {
                emit("negation is allowed only on PIL formulas, concatenations of them, and "
                     "variable equalities",
                     f.span);
            } else if (op.kind != NodeKind::equal && !op.pil) {
                for (const auto& v : op.free)
                    if (restricted_.count(v)) {
                        emit("negation of a non-PIL formula under an existential concatenation or "
                             "shuffle quantifier binding " + var_text(v, sys_),
                             f.span);
                        break;
                    }
            }
            run(op);
            break;
        }
        case NodeKind::disjunction:
        case NodeKind::conjunction:
        case NodeKind::concat:
        case NodeKind::shuffle:
            for (const auto& c : f.children)
                if (c->weighted) {
                    emit("weighted subformula under an unweighted operator", c->span);
                    break;
                }
            for (const auto& c : f.children) run(*c);
            break;
        case NodeKind::weighted_sum:
        case NodeKind::weighted_product:
        case NodeKind::weighted_concat:
        case NodeKind::weighted_shuffle:
            for (const auto& c : f.children) run(*c);
            break;
        case NodeKind::quantified: {
            check_sort(f.bound, f.span);
            if (!is_weighted(f.quantifier) && f.child(0).weighted)
                emit("weighted subformula under an unweighted quantifier", f.span);
            const bool restricted = is_restricted(f.quantifier);
            const bool fresh = restricted && restricted_.insert(f.bound).second;
            // An inner binder of the same variable shadows the restricted one.
            const bool shadowed = !restricted && restricted_.erase(f.bound) > 0;
            run(f.child(0));
            if (fresh) restricted_.erase(f.bound);
            if (shadowed) restricted_.insert(f.bound);
            break;
        }
        }
    }

private:
    void emit(std::string msg, SourceSpan span) { out_.push_back({std::move(msg), span}); }

    void check_sort(const Variable& v, SourceSpan span) {
        if (v.sort >= sys_.types.size()) emit("variable " + v.name + " has an unknown sort", span);
    }

    void check_port(const PortRef& p, SourceSpan span) {
        if (p.type >= sys_.types.size()) {
            emit("port refers to an unknown component type", span);
            return;
        }
        const auto& type = sys_.types[p.type];
        if (p.port >= type.ports.size()) {
            emit("unknown port of type '" + type.name + "'", span);
            return;
        }
        if (p.term.var) {
            if (p.term.var->sort != p.type)
                emit("sort mismatch: port " + type.name + "." + type.ports[p.port].name +
                         " belongs to type '" + type.name + "' but is applied to " +
                         var_text(*p.term.var, sys_),
                     span);
        } else if (p.term.instance == 0) {
            emit("instance numbers start at 1", span);
        }
    }

    const ParametricSystem& sys_;
    std::vector<Diagnostic>& out_;
    std::set<Variable> restricted_;
};

}  // namespace

std::vector<Diagnostic> validate(const Formula& f, const ParametricSystem& system) {
    std::vector<Diagnostic> out;
    Validator(system, out).run(f);
    return out;
}

std::vector<Diagnostic> layer_diagnostics(const Formula& f, Layer layer) {
    std::vector<Diagnostic> out;
    const bool ground = layer == Layer::pil || layer == Layer::epil || layer == Layer::wepil;
    const bool weighted_ok = layer == Layer::wepil || layer == Layer::wfoeil;
    const char* layer_name = layer == Layer::pil     ? "PIL"
                             : layer == Layer::epil  ? "EPIL"
                             : layer == Layer::wepil ? "wEPIL"
                             : layer == Layer::foeil ? "FOEIL"
                                                     : "wFOEIL";
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        auto bad = [&](const std::string& what) {
            out.push_back({what + " is not allowed in " + layer_name, g.span});
        };
        switch (g.kind) {
        case NodeKind::port:
        case NodeKind::hash:
        case NodeKind::hash_weighted:
            if (ground)
                for (const auto& p : g.ports)
                    if (p.term.var) {
                        bad("variable " + p.term.var->name);
                        break;
                    }
            if (g.kind == NodeKind::hash_weighted && !weighted_ok) bad("hashw");
            break;
        case NodeKind::constant:
            if (!weighted_ok) bad("weight constant");
            break;
        case NodeKind::equal:
            if (ground) bad("variable equality");
            break;
        case NodeKind::concat:
        case NodeKind::shuffle:
            if (layer == Layer::pil) bad(g.kind == NodeKind::concat ? "concatenation" : "shuffle");
            break;
        case NodeKind::weighted_sum:
        case NodeKind::weighted_product:
        case NodeKind::weighted_concat:
        case NodeKind::weighted_shuffle:
            if (!weighted_ok) bad("weighted operator");
            break;
        case NodeKind::quantified:
            if (ground) bad("quantifier");
            else if (is_weighted(g.quantifier) && !weighted_ok) bad("weighted quantifier");
            break;
        default: break;
        }
        for (const auto& c : g.children) walk(*c);
    };
    walk(f);
    return out;
}

namespace {

FormulaPtr conjunction_of(std::vector<FormulaPtr> parts, NodeKind op) {
    if (parts.empty()) return make_true();
    FormulaPtr acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = make_binary(op, acc, parts[i]);
    return acc;
}

Variable fresh_variable(std::uint32_t sort, const std::set<std::string>& taken) {
    for (int i = 0;; ++i) {
        std::string name = "y" + std::to_string(i);
        if (!taken.count(name)) return {name, sort};
    }
}

}  // namespace

FormulaPtr expand_hash_macro(const Formula& macro, const ParametricSystem& system) {
    if (macro.kind != NodeKind::hash && macro.kind != NodeKind::hash_weighted)
        throw std::logic_error("expand_hash_macro: not a macro node");
    const bool weighted = macro.kind == NodeKind::hash_weighted;
    const auto& args = macro.ports;
    const bool all_vars = std::all_of(args.begin(), args.end(), [](auto& p) { return p.term.var.has_value(); });
    const bool all_fixed = std::none_of(args.begin(), args.end(), [](auto& p) { return p.term.var.has_value(); });
    if (!all_vars && !all_fixed)
        throw ValidationError("cannot expand a macro that mixes variables and fixed instances");

    std::vector<FormulaPtr> atoms;
    for (const auto& p : args) {
        FormulaPtr atom = make_port(p);
        if (weighted) atom = make_binary(NodeKind::weighted_product,
                                         make_constant(system.types[p.type].ports[p.port].weight), atom);
        atoms.push_back(atom);
    }
    std::vector<FormulaPtr> rest;
    // Other ports of every participating instance are disabled.
    for (const auto& p : args)
        for (std::uint32_t q = 0; q < system.types[p.type].ports.size(); ++q)
            if (q != p.port) rest.push_back(make_not(make_port({p.type, q, p.term})));

    std::set<std::uint32_t> participating;
    for (const auto& p : args) participating.insert(p.type);
    if (all_fixed) {
        if (!system.instances)
            throw ValidationError("expanding a ground macro needs the instance counts");
        for (std::uint32_t t = 0; t < system.types.size(); ++t)
            for (std::uint32_t j = 1; j <= (*system.instances)[t]; ++j) {
                const bool named = std::any_of(args.begin(), args.end(), [&](auto& p) {
                    return p.type == t && p.term.instance == j;
                });
                if (named) continue;
                for (std::uint32_t q = 0; q < system.types[t].ports.size(); ++q)
                    rest.push_back(make_not(make_port({t, q, Term::fixed(j)})));
            }
    } else {
        std::set<std::string> taken;
        for (const auto& p : args) taken.insert(p.term.var->name);
        for (std::uint32_t t = 0; t < system.types.size(); ++t) {
            const Variable y = fresh_variable(t, taken);
            std::vector<FormulaPtr> silent;
            for (std::uint32_t q = 0; q < system.types[t].ports.size(); ++q)
                silent.push_back(make_not(make_port({t, q, Term::variable(y)})));
            FormulaPtr body = conjunction_of(silent, NodeKind::conjunction);
            if (participating.count(t)) {
                // (y != x1 & ... ) -> silent(y)
                for (auto it = args.rbegin(); it != args.rend(); ++it)
                    if (it->type == t)
                        body = make_binary(NodeKind::disjunction, make_equal(y, *it->term.var), body);
            }
            rest.push_back(make_quantified(Quantifier::forall, y, body));
        }
    }
    if (weighted) {
        FormulaPtr head = conjunction_of(atoms, NodeKind::weighted_product);
        if (rest.empty()) return head;
        return make_binary(NodeKind::weighted_product, head, conjunction_of(rest, NodeKind::conjunction));
    }
    atoms.insert(atoms.end(), rest.begin(), rest.end());
    return conjunction_of(atoms, NodeKind::conjunction);
}

namespace {

FormulaPtr rebuild(const Formula& f, std::vector<FormulaPtr> kids) {
    switch (f.kind) {
    case NodeKind::negation: return make_not(kids[0], f.span);
    case NodeKind::quantified: return make_quantified(f.quantifier, f.bound, kids[0], f.span);
    default: return make_binary(f.kind, kids[0], kids[1], f.span);
    }
}

}  // namespace

FormulaPtr expand_all_macros(const FormulaPtr& f, const ParametricSystem& system) {
    if (f->kind == NodeKind::hash || f->kind == NodeKind::hash_weighted)
        return expand_hash_macro(*f, system);
    if (f->children.empty()) return f;
    std::vector<FormulaPtr> kids;
    for (const auto& c : f->children) kids.push_back(expand_all_macros(c, system));
    return rebuild(*f, std::move(kids));
}

namespace {

void collect_names(const Formula& f, std::set<std::string>& names) {
    for (const auto& v : f.free) names.insert(v.name);
    if (f.kind == NodeKind::quantified) names.insert(f.bound.name);
    for (const auto& c : f.children) collect_names(*c, names);
}

class Renamer {
public:
    explicit Renamer(std::set<std::string> taken) : taken_(std::move(taken)) {}

    FormulaPtr run(const FormulaPtr& f) {
        switch (f->kind) {
        case NodeKind::truth:
        case NodeKind::constant: return f;
        case NodeKind::port:
        case NodeKind::hash:
        case NodeKind::hash_weighted: {
            auto ports = f->ports;
            for (auto& p : ports)
                if (p.term.var) p.term.var = lookup(*p.term.var);
            if (f->kind == NodeKind::port) return make_port(ports[0], f->span);
            return make_hash(ports, f->kind == NodeKind::hash_weighted, f->span);
        }
        case NodeKind::equal: return make_equal(lookup(f->lhs), lookup(f->rhs), f->span);
        case NodeKind::quantified: {
            Variable fresh = f->bound;
            if (used_.count(fresh.name) || free_names_.count(fresh.name)) {
                for (int i = 1;; ++i) {
                    std::string candidate = f->bound.name + "_" + std::to_string(i);
                    if (!taken_.count(candidate) && !used_.count(candidate)) {
                        fresh.name = candidate;
                        break;
                    }
                }
            }
            used_.insert(fresh.name);
            scope_.push_back({f->bound, fresh});
            FormulaPtr body = run(f->children[0]);
            scope_.pop_back();
            return make_quantified(f->quantifier, fresh, body, f->span);
        }
        default: {
            std::vector<FormulaPtr> kids;
            for (const auto& c : f->children) kids.push_back(run(c));
            return rebuild(*f, std::move(kids));
        }
        }
    }

    void set_free(const std::vector<Variable>& free) {
        for (const auto& v : free) free_names_.insert(v.name);
    }

private:
    Variable lookup(const Variable& v) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->first == v) return it->second;
        return v;
    }

    std::set<std::string> taken_;
    std::set<std::string> used_;
    std::set<std::string> free_names_;
    std::vector<std::pair<Variable, Variable>> scope_;
};

}  // namespace

FormulaPtr alpha_rename(const FormulaPtr& f) {
    std::set<std::string> names;
    collect_names(*f, names);
    Renamer r(names);
    r.set_free(f->free);
    return r.run(f);
}

FormulaPtr boolean_shadow(const FormulaPtr& f, const SemiringSpec& k) {
    switch (f->kind) {
    case NodeKind::constant: return k.is_zero(f->constant) ? make_false(f->span) : make_true(f->span);
    case NodeKind::hash_weighted: return make_hash(f->ports, false, f->span);
    case NodeKind::truth:
    case NodeKind::port:
    case NodeKind::hash:
    case NodeKind::equal: return f;
    case NodeKind::negation: return make_not(boolean_shadow(f->children[0], k), f->span);
    case NodeKind::quantified: {
        Quantifier q = f->quantifier;
        switch (q) {
        case Quantifier::sum: q = Quantifier::exists; break;
        case Quantifier::product: q = Quantifier::forall; break;
        case Quantifier::sum_concat: q = Quantifier::exists_concat; break;
        case Quantifier::product_concat: q = Quantifier::forall_concat; break;
        case Quantifier::sum_shuffle: q = Quantifier::exists_shuffle; break;
        case Quantifier::product_shuffle: q = Quantifier::forall_shuffle; break;
        default: break;
        }
        return make_quantified(q, f->bound, boolean_shadow(f->children[0], k), f->span);
    }
    default: {
        NodeKind op = f->kind;
        switch (op) {
        case NodeKind::weighted_sum: op = NodeKind::disjunction; break;
        case NodeKind::weighted_product: op = NodeKind::conjunction; break;
        case NodeKind::weighted_concat: op = NodeKind::concat; break;
        case NodeKind::weighted_shuffle: op = NodeKind::shuffle; break;
        default: break;
        }
        return make_binary(op, boolean_shadow(f->children[0], k), boolean_shadow(f->children[1], k),
                           f->span);
    }
    }
}

}  // namespace wfoeil
