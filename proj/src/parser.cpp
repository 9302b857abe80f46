#include "wfoeil/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>

namespace wfoeil {

namespace {

enum class Tok {
    ident,
    number,
    lparen,
    rparen,
    lbrace,
    rbrace,
    comma,
    dot,
    colon,
    eq,
    neq,
    amp,
    bar,
    bang,
    star,
    tilde,
    arrow,
    oplus,
    otimes,
    odot,
    oshuffle,
    end,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;
    SourceSpan span;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::end) return "end of input";
    return "'" + t.text + "'";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.span = here();
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t n = pos_;
                // Hyphenated words such as min-plus stay one identifier.
                while (n < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[n])) || src_[n] == '_' ||
                        (src_[n] == '-' && n + 1 < src_.size() && std::isalpha(static_cast<unsigned char>(src_[n + 1])))))
                    ++n;
                t.kind = Tok::ident;
                advance_to(n, t);
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && pos_ + 1 < src_.size() &&
                        (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
                         src_.substr(pos_ + 1, 3) == "inf"))) {
                t.kind = Tok::number;
                advance_to(number_end(), t);
            } else if (starts("(+)")) {
                t.kind = Tok::oplus;
                advance_to(pos_ + 3, t);
            } else if (starts("(x)")) {
                t.kind = Tok::otimes;
                advance_to(pos_ + 3, t);
            } else if (starts("(.)")) {
                t.kind = Tok::odot;
                advance_to(pos_ + 3, t);
            } else if (starts("(~)")) {
                t.kind = Tok::oshuffle;
                advance_to(pos_ + 3, t);
            } else if (starts("!=")) {
                t.kind = Tok::neq;
                advance_to(pos_ + 2, t);
            } else if (starts("->")) {
                t.kind = Tok::arrow;
                advance_to(pos_ + 2, t);
            } else {
                static const std::map<char, Tok> single = {
                    {'(', Tok::lparen}, {')', Tok::rparen}, {'{', Tok::lbrace}, {'}', Tok::rbrace},
                    {',', Tok::comma},  {'.', Tok::dot},    {':', Tok::colon},  {'=', Tok::eq},
                    {'&', Tok::amp},    {'|', Tok::bar},    {'!', Tok::bang},   {'*', Tok::star},
                    {'~', Tok::tilde},
                };
                auto it = single.find(c);
                if (it == single.end()) {
                    t.span.end = t.span.start + 1;
                    throw ParseError(std::string("unexpected character '") + c + "'", t.span);
                }
                t.kind = it->second;
                advance_to(pos_ + 1, t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    SourceSpan here() const { return {pos_, pos_, line_, col_}; }

    bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    std::size_t number_end() const {
        std::size_t n = pos_;
        if (src_[n] == '-') ++n;
        if (src_.substr(n, 3) == "inf") return n + 3;
        auto digits = [&](std::size_t k) {
            while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
            return k;
        };
        n = digits(n);
        if (n + 1 < src_.size() && src_[n] == '.' && std::isdigit(static_cast<unsigned char>(src_[n + 1])))
            n = digits(n + 1);
        if (n + 1 < src_.size() && src_[n] == '/' && std::isdigit(static_cast<unsigned char>(src_[n + 1])))
            n = digits(n + 1);
        return n;
    }

    void advance_to(std::size_t n, Token& t) {
        t.text = std::string(src_.substr(pos_, n - pos_));
        while (pos_ < n) step();
        t.span.end = pos_;
    }

    void step() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                step();
            } else if (src_[pos_] == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') step();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

SourceSpan join(SourceSpan a, SourceSpan b) {
    a.end = std::max(a.end, b.end);
    return a;
}

class TokenStream {
public:
    explicit TokenStream(std::string_view text) : toks_(Lexer(text).run()) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
    bool at_word(std::string_view w, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::ident && peek(ahead).text == w;
    }
    Token next() {
        Token t = peek();
        if (pos_ + 1 < toks_.size()) ++pos_;
        last_ = t.span;
        return t;
    }
    bool accept(Tok k) {
        if (!at(k)) return false;
        next();
        return true;
    }
    Token expect(Tok k, std::string_view what) {
        if (!at(k)) fail("expected " + std::string(what) + ", found " + describe(peek()));
        return next();
    }
    Token expect_word(std::string_view w) {
        if (!at_word(w)) fail("expected '" + std::string(w) + "', found " + describe(peek()));
        return next();
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().span); }
    SourceSpan last() const { return last_; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SourceSpan last_;
};

std::uint32_t parse_count(const Token& t) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
        throw ParseError("expected a nonnegative integer, found " + describe(t), t.span);
    return v;
}

// ----------------------------------------------------------------------------
// Systems

ParametricSystem parse_system_tokens(TokenStream& ts) {
    ParametricSystem sys;
    if (ts.at_word("wcb")) {
        ts.next();
        Token v = ts.expect(Tok::number, "format version");
        if (v.text != "1") throw ParseError("unsupported system format version " + v.text, v.span);
    }
    std::optional<std::map<std::string, std::pair<std::uint32_t, SourceSpan>>> counts;
    while (!ts.at(Tok::end)) {
        if (ts.at_word("semiring")) {
            ts.next();
            Token name = ts.expect(Tok::ident, "semiring name");
            try {
                sys.semiring = builtin(name.text).name;
            } catch (const ConfigError& e) {
                throw ParseError(e.what(), name.span);
            }
        } else if (ts.at_word("type")) {
            ts.next();
            ComponentType type;
            type.name = ts.expect(Tok::ident, "component type name").text;
            ts.expect(Tok::lbrace, "'{'");
            while (!ts.accept(Tok::rbrace)) {
                if (ts.at_word("port")) {
                    ts.next();
                    Port port;
                    port.name = ts.expect(Tok::ident, "port name").text;
                    if (ts.at_word("weight")) {
                        ts.next();
                        if (ts.at(Tok::number) || ts.at_word("inf") || ts.at_word("true") || ts.at_word("false"))
                            port.weight_text = ts.next().text;
                        else
                            ts.fail("expected a weight literal, found " + describe(ts.peek()));
                    }
                    type.ports.push_back(std::move(port));
                } else if (ts.at_word("lts")) {
                    ts.next();
                    Lts lts;
                    ts.expect(Tok::lbrace, "'{'");
                    while (!ts.accept(Tok::rbrace)) {
                        if (ts.at_word("states")) {
                            ts.next();
                            while (ts.at(Tok::ident) && !ts.at_word("initial") && !ts.at_word("transition"))
                                lts.states.push_back(ts.next().text);
                        } else if (ts.at_word("initial")) {
                            ts.next();
                            lts.initial = ts.expect(Tok::ident, "state name").text;
                        } else if (ts.at_word("transition")) {
                            ts.next();
                            LtsTransition tr;
                            tr.from = ts.expect(Tok::ident, "state name").text;
                            tr.port = ts.expect(Tok::ident, "port name").text;
                            tr.to = ts.expect(Tok::ident, "state name").text;
                            lts.transitions.push_back(std::move(tr));
                        } else {
                            ts.fail("expected 'states', 'initial' or 'transition', found " + describe(ts.peek()));
                        }
                    }
                    type.lts = std::move(lts);
                } else {
                    ts.fail("expected 'port' or 'lts', found " + describe(ts.peek()));
                }
            }
            sys.types.push_back(std::move(type));
        } else if (ts.at_word("instances")) {
            ts.next();
            counts.emplace();
            ts.expect(Tok::lbrace, "'{'");
            while (!ts.accept(Tok::rbrace)) {
                Token name = ts.expect(Tok::ident, "component type name");
                ts.expect(Tok::eq, "'='");
                Token n = ts.expect(Tok::number, "instance count");
                if (!counts->emplace(name.text, std::pair{parse_count(n), name.span}).second)
                    throw ParseError("duplicate instance count for '" + name.text + "'", name.span);
                ts.accept(Tok::comma);
            }
        } else {
            ts.fail("expected 'semiring', 'type' or 'instances', found " + describe(ts.peek()));
        }
    }
    if (counts) {
        InstanceMap r(sys.types.size(), 0);
        for (const auto& [name, entry] : *counts) {
            auto idx = sys.type_index(name);
            if (!idx) throw ParseError("instances block names unknown type '" + name + "'", entry.second);
            r[*idx] = entry.first;
        }
        sys.instances = std::move(r);
    }
    validate_system(sys);
    return sys;
}

// ----------------------------------------------------------------------------
// Formulas

const std::map<std::string, Quantifier>& quantifier_words() {
    static const std::map<std::string, Quantifier> words = {
        {"E", Quantifier::exists},          {"A", Quantifier::forall},
        {"Ec", Quantifier::exists_concat},  {"Ac", Quantifier::forall_concat},
        {"Es", Quantifier::exists_shuffle}, {"As", Quantifier::forall_shuffle},
        {"Sum", Quantifier::sum},           {"Prod", Quantifier::product},
        {"SumC", Quantifier::sum_concat},   {"ProdC", Quantifier::product_concat},
        {"SumS", Quantifier::sum_shuffle},  {"ProdS", Quantifier::product_shuffle},
    };
    return words;
}

bool is_reserved(std::string_view w) {
    return quantifier_words().count(std::string(w)) || w == "true" || w == "false" || w == "hash" ||
           w == "hashw" || w == "inf";
}

class FormulaParser {
public:
    FormulaParser(std::string_view text, const ParametricSystem& sys) : ts_(text), sys_(sys) {
        for (std::uint32_t t = 0; t < sys.types.size(); ++t)
            for (std::uint32_t p = 0; p < sys.types[t].ports.size(); ++p) {
                auto [it, fresh] = port_owner_.emplace(sys.types[t].ports[p].name, std::pair{t, p});
                if (!fresh) ambiguous_.insert(it->first);
            }
    }

    FormulaPtr run() {
        if (ts_.at(Tok::end)) ts_.fail("empty formula");
        FormulaPtr f = expr();
        if (!ts_.at(Tok::end)) ts_.fail("unexpected " + describe(ts_.peek()) + " after formula");
        return f;
    }

private:
    bool at_quantifier() const {
        return ts_.at(Tok::ident) && quantifier_words().count(ts_.peek().text) && ts_.at(Tok::ident, 1) &&
               ts_.at(Tok::colon, 2);
    }

    FormulaPtr expr() {
        if (at_quantifier()) return quantified();
        FormulaPtr lhs = disjunction();
        if (ts_.accept(Tok::arrow)) {
            FormulaPtr rhs = expr();
            return make_binary(NodeKind::disjunction, make_not(lhs, lhs->span), rhs, join(lhs->span, rhs->span));
        }
        return lhs;
    }

    using Level = FormulaPtr (FormulaParser::*)();

    FormulaPtr operand(Level level) {
        if (at_quantifier()) return quantified();
        return (this->*level)();
    }

    FormulaPtr binary_level(Level next, Tok plain, NodeKind plain_kind, Tok weighted, NodeKind weighted_kind) {
        FormulaPtr lhs = operand(next);
        for (;;) {
            NodeKind kind;
            if (ts_.at(plain)) kind = plain_kind;
            else if (ts_.at(weighted)) kind = weighted_kind;
            else return lhs;
            ts_.next();
            FormulaPtr rhs = operand(next);
            lhs = make_binary(kind, lhs, rhs, join(lhs->span, rhs->span));
        }
    }

    FormulaPtr disjunction() {
        return binary_level(&FormulaParser::conjunction, Tok::bar, NodeKind::disjunction, Tok::oplus,
                            NodeKind::weighted_sum);
    }
    FormulaPtr conjunction() {
        return binary_level(&FormulaParser::concatenation, Tok::amp, NodeKind::conjunction, Tok::otimes,
                            NodeKind::weighted_product);
    }
    FormulaPtr concatenation() {
        return binary_level(&FormulaParser::shuffle, Tok::star, NodeKind::concat, Tok::odot,
                            NodeKind::weighted_concat);
    }
    FormulaPtr shuffle() {
        return binary_level(&FormulaParser::unary, Tok::tilde, NodeKind::shuffle, Tok::oshuffle,
                            NodeKind::weighted_shuffle);
    }

    FormulaPtr unary() {
        if (ts_.at(Tok::bang)) {
            SourceSpan start = ts_.next().span;
            FormulaPtr op = operand(&FormulaParser::unary);
            return make_not(op, join(start, op->span));
        }
        return primary();
    }

    FormulaPtr primary() {
        const Token& t = ts_.peek();
        if (t.kind == Tok::lparen) {
            SourceSpan start = ts_.next().span;
            FormulaPtr inner = expr();
            ts_.expect(Tok::rparen, "')'");
            return with_span(inner, join(start, ts_.last()));
        }
        if (t.kind == Tok::number || (t.kind == Tok::ident && t.text == "inf")) {
            Token lit = ts_.next();
            try {
                return make_constant(sys_.semiring_spec().parse(lit.text), lit.span);
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), lit.span);
            }
        }
        if (t.kind != Tok::ident) ts_.fail("expected a formula, found " + describe(t));
        if (t.text == "true") return make_true(ts_.next().span);
        if (t.text == "false") return make_false(ts_.next().span);
        if (t.text == "hash" || t.text == "hashw") return macro();
        if (quantifier_words().count(t.text)) ts_.fail("quantifier '" + t.text + "' needs a variable 'name:type'");
        if (ts_.at(Tok::dot, 1) && ts_.at(Tok::ident, 2) && (ts_.at(Tok::lparen, 3) || ts_.at(Tok::otimes, 3))) {
            SourceSpan start = t.span;
            PortRef ref = port_ref();
            return make_port(std::move(ref), join(start, ts_.last()));
        }
        if ((ts_.at(Tok::lparen, 1) || ts_.at(Tok::otimes, 1)) && port_owner_.count(t.text)) {
            SourceSpan start = t.span;
            PortRef ref = port_ref();
            return make_port(std::move(ref), join(start, ts_.last()));
        }
        return equality();
    }

    FormulaPtr with_span(const FormulaPtr& f, SourceSpan span) {
        auto copy = std::make_shared<Formula>(*f);
        copy->span = span;
        return copy;
    }

    FormulaPtr macro() {
        Token head = ts_.next();
        ts_.expect(Tok::lparen, "'('");
        std::vector<PortRef> args;
        std::vector<SourceSpan> spans;
        for (;;) {
            SourceSpan start = ts_.peek().span;
            args.push_back(port_ref());
            spans.push_back(join(start, ts_.last()));
            if (ts_.accept(Tok::comma) || ts_.accept(Tok::amp) || ts_.accept(Tok::otimes)) continue;
            break;
        }
        ts_.expect(Tok::rparen, "')' closing the macro");
        SourceSpan span = join(head.span, ts_.last());
        try {
            return make_hash(std::move(args), head.text == "hashw", span);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), span);
        }
    }

    PortRef port_ref() {
        Token first = ts_.expect(Tok::ident, "port name");
        std::uint32_t type = 0;
        std::uint32_t port = 0;
        if (ts_.accept(Tok::dot)) {
            auto ti = sys_.type_index(first.text);
            if (!ti) throw ParseError("unknown component type '" + first.text + "'", first.span);
            Token pname = ts_.expect(Tok::ident, "port name");
            auto pi = sys_.types[*ti].port_index(pname.text);
            if (!pi)
                throw ParseError("type '" + first.text + "' has no port '" + pname.text + "'", pname.span);
            type = *ti;
            port = *pi;
        } else {
            auto it = port_owner_.find(first.text);
            if (it == port_owner_.end()) throw ParseError("unknown port '" + first.text + "'", first.span);
            if (ambiguous_.count(first.text))
                throw ParseError("port name '" + first.text + "' is used by several types; write type.port",
                                 first.span);
            type = it->second.first;
            port = it->second.second;
        }
        return {type, port, term(type)};
    }

    // `(x)` lexes as the weighted-conjunction token; in term position it is the variable x.
    Term term(std::uint32_t type) {
        if (ts_.at(Tok::otimes)) {
            ts_.next();
            return Term::variable(resolve_for_port("x", type));
        }
        ts_.expect(Tok::lparen, "'(' before the component instance");
        Term out;
        if (ts_.at(Tok::number)) {
            Token n = ts_.next();
            std::uint32_t j = parse_count(n);
            if (j == 0) throw ParseError("instance numbers start at 1", n.span);
            out = Term::fixed(j);
        } else {
            Token v = ts_.expect(Tok::ident, "variable or instance number");
            if (ts_.accept(Tok::colon)) out = Term::variable({v.text, sort_of(ts_.expect(Tok::ident, "type name"))});
            else out = Term::variable(resolve_for_port(v.text, type));
        }
        ts_.expect(Tok::rparen, "')' after the component instance");
        return out;
    }

    std::uint32_t sort_of(const Token& t) {
        auto idx = sys_.type_index(t.text);
        if (!idx) throw ParseError("unknown component type '" + t.text + "'", t.span);
        return *idx;
    }

    Variable resolve_for_port(const std::string& name, std::uint32_t type) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name && it->sort == type) return *it;
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name) return *it;
        return {name, type};
    }

    Variable variable() {
        Token v = ts_.expect(Tok::ident, "variable");
        if (is_reserved(v.text)) throw ParseError("'" + v.text + "' is a reserved word", v.span);
        if (ts_.accept(Tok::colon)) return {v.text, sort_of(ts_.expect(Tok::ident, "type name"))};
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == v.text) return *it;
        throw ParseError("cannot infer the sort of free variable '" + v.text + "'; write " + v.text + ":type",
                         v.span);
    }

    FormulaPtr equality() {
        SourceSpan start = ts_.peek().span;
        if (ts_.at(Tok::ident) && !ts_.at(Tok::eq, 1) && !ts_.at(Tok::neq, 1) && !ts_.at(Tok::colon, 1)) {
            const std::string& w = ts_.peek().text;
            if (sys_.type_index(w) && ts_.at(Tok::dot, 1))
                ts_.fail("malformed port reference");
            ts_.fail("unknown port or variable '" + w + "'");
        }
        Variable lhs = variable();
        bool negated = false;
        if (ts_.accept(Tok::neq)) negated = true;
        else ts_.expect(Tok::eq, "'=' or '!='");
        Variable rhs = variable();
        SourceSpan span = join(start, ts_.last());
        FormulaPtr eq = make_equal(std::move(lhs), std::move(rhs), span);
        return negated ? make_not(eq, span) : eq;
    }

    FormulaPtr quantified() {
        struct Prefix {
            Quantifier q;
            Variable var;
            SourceSpan span;
        };
        std::vector<Prefix> prefix;
        const std::size_t depth = scope_.size();
        while (at_quantifier()) {
            Token kw = ts_.next();
            Token name = ts_.next();
            if (is_reserved(name.text)) throw ParseError("'" + name.text + "' is a reserved word", name.span);
            ts_.expect(Tok::colon, "':'");
            Variable v{name.text, sort_of(ts_.expect(Tok::ident, "type name"))};
            prefix.push_back({quantifier_words().at(kw.text), v, kw.span});
            scope_.push_back(v);
        }
        FormulaPtr constraint;
        if (ts_.at(Tok::lparen)) {
            ts_.next();
            constraint = expr();
            ts_.expect(Tok::rparen, "')' closing the constraint");
            check_constraint(*constraint);
        }
        ts_.expect(Tok::dot, "'.' before the quantifier body");
        FormulaPtr body = expr();
        scope_.resize(depth);
        if (constraint) {
            const Quantifier inner = prefix.back().q;
            SourceSpan span = join(constraint->span, body->span);
            if (is_existential(inner)) {
                body = make_binary(body->weighted ? NodeKind::weighted_product : NodeKind::conjunction, constraint,
                                   body, span);
            } else {
                body = make_binary(body->weighted ? NodeKind::weighted_sum : NodeKind::disjunction,
                                   negate(constraint), body, span);
            }
        }
        for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
            body = make_quantified(it->q, it->var, body, join(it->span, body->span));
        return body;
    }

    void check_constraint(const Formula& f) {
        switch (f.kind) {
        case NodeKind::equal:
        case NodeKind::truth: return;
        case NodeKind::negation:
        case NodeKind::conjunction:
        case NodeKind::disjunction:
            for (const auto& c : f.children) check_constraint(*c);
            return;
        default:
            throw ParseError("a quantifier constraint may only combine variable equalities with !, & and |",
                             f.span);
        }
    }

    // Pushes the negation down to the equalities.
    FormulaPtr negate(const FormulaPtr& f) {
        switch (f->kind) {
        case NodeKind::negation: return f->children[0];
        case NodeKind::conjunction:
            return make_binary(NodeKind::disjunction, negate(f->children[0]), negate(f->children[1]), f->span);
        case NodeKind::disjunction:
            return make_binary(NodeKind::conjunction, negate(f->children[0]), negate(f->children[1]), f->span);
        default: return make_not(f, f->span);
        }
    }

    TokenStream ts_;
    const ParametricSystem& sys_;
    std::map<std::string, std::pair<std::uint32_t, std::uint32_t>> port_owner_;
    std::set<std::string> ambiguous_;
    std::vector<Variable> scope_;
};

// ----------------------------------------------------------------------------
// Printing

enum Prec { kTop = 0, kOr = 1, kAnd = 2, kConcat = 3, kShuffle = 4, kUnary = 5 };

class Printer {
public:
    explicit Printer(const ParametricSystem& sys) : sys_(sys) {}

    std::string run(const Formula& f, int ctx) {
        switch (f.kind) {
        case NodeKind::truth: return "true";
        case NodeKind::port: return port(f.ports[0]);
        case NodeKind::hash:
        case NodeKind::hash_weighted: {
            std::string out = f.kind == NodeKind::hash ? "hash(" : "hashw(";
            for (std::size_t i = 0; i < f.ports.size(); ++i) out += (i ? ", " : "") + port(f.ports[i]);
            return out + ")";
        }
        case NodeKind::constant: return sys_.semiring_spec().format(f.constant);
        case NodeKind::equal: return var(f.lhs) + " = " + var(f.rhs);
        case NodeKind::negation: {
            const Formula& op = f.child(0);
            if (op.kind == NodeKind::equal) {
                std::string s = var(op.lhs) + " != " + var(op.rhs);
                return ctx > kTop ? "(" + s + ")" : s;
            }
            return "!" + run(op, kUnary);
        }
        case NodeKind::quantified: {
            std::string out = std::string(quantifier_keyword(f.quantifier)) + " " + f.bound.name + ":" +
                              sys_.types[f.bound.sort].name + " . ";
            scope_.push_back(f.bound);
            out += run(f.child(0), kTop);
            scope_.pop_back();
            return ctx > kTop ? "(" + out + ")" : out;
        }
        default: {
            auto [prec, op] = binary_op(f.kind);
            std::string s = run(f.child(0), prec) + " " + op + " " + run(f.child(1), prec + 1);
            return ctx > prec ? "(" + s + ")" : s;
        }
        }
    }

private:
    static std::pair<int, const char*> binary_op(NodeKind k) {
        switch (k) {
        case NodeKind::disjunction: return {kOr, "|"};
        case NodeKind::weighted_sum: return {kOr, "(+)"};
        case NodeKind::conjunction: return {kAnd, "&"};
        case NodeKind::weighted_product: return {kAnd, "(x)"};
        case NodeKind::concat: return {kConcat, "*"};
        case NodeKind::weighted_concat: return {kConcat, "(.)"};
        case NodeKind::shuffle: return {kShuffle, "~"};
        case NodeKind::weighted_shuffle: return {kShuffle, "(~)"};
        default: return {kUnary, "?"};
        }
    }

    std::string var(const Variable& v) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == v.name) {
                if (*it == v) return v.name;
                break;
            }
        return v.name + ":" + sys_.types[v.sort].name;
    }

    std::string port(const PortRef& p) const {
        const auto& type = sys_.types[p.type];
        std::string out = type.name + "." + type.ports[p.port].name + "(";
        if (!p.term.var) return out + std::to_string(p.term.instance) + ")";
        const Variable& v = *p.term.var;
        bool plain = false;
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == v.name && it->sort == p.type) {
                plain = *it == v;
                break;
            }
        if (!plain) {
            bool shadowed = false;
            for (const auto& b : scope_)
                if (b.name == v.name) shadowed = true;
            plain = !shadowed && v.sort == p.type;
        }
        return out + (plain ? v.name : v.name + ":" + sys_.types[v.sort].name) + ")";
    }

    const ParametricSystem& sys_;
    std::vector<Variable> scope_;
};

// ----------------------------------------------------------------------------
// Words

class WordParser {
public:
    WordParser(std::string_view text, const SystemView& view) : ts_(text), view_(view) {}

    bool done() const { return ts_.at(Tok::end); }

    Interaction interaction() {
        SourceSpan start = ts_.expect(Tok::lbrace, "'{'").span;
        std::vector<PortInstance> ports;
        if (!ts_.at(Tok::rbrace)) {
            for (;;) {
                ports.push_back(port_instance());
                if (!ts_.accept(Tok::comma)) break;
            }
        }
        ts_.expect(Tok::rbrace, "'}'");
        Interaction a(std::move(ports));
        try {
            view_.check_interaction(a);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), join(start, ts_.last()));
        }
        return a;
    }

    Word word() {
        Word w;
        if (ts_.at_word("eps")) {
            ts_.next();
            return w;
        }
        while (ts_.at(Tok::lbrace)) w.push_back(interaction());
        return w;
    }

    void expect_end() {
        if (!done()) ts_.fail("unexpected " + describe(ts_.peek()));
    }

private:
    PortInstance port_instance() {
        const ParametricSystem& sys = view_.system();
        Token first = ts_.expect(Tok::ident, "port name");
        std::optional<std::uint32_t> type;
        std::optional<std::uint32_t> port;
        if (ts_.accept(Tok::dot)) {
            type = sys.type_index(first.text);
            if (!type) throw ParseError("unknown component type '" + first.text + "'", first.span);
            Token pname = ts_.expect(Tok::ident, "port name");
            port = sys.types[*type].port_index(pname.text);
            if (!port) throw ParseError("type '" + first.text + "' has no port '" + pname.text + "'", pname.span);
        } else {
            for (std::uint32_t t = 0; t < sys.types.size(); ++t)
                if (auto p = sys.types[t].port_index(first.text)) {
                    if (type) throw ParseError("ambiguous port '" + first.text + "'; write type.port", first.span);
                    type = t;
                    port = p;
                }
            if (!type) throw ParseError("unknown port '" + first.text + "'", first.span);
        }
        ts_.expect(Tok::lparen, "'('");
        Token n = ts_.expect(Tok::number, "instance number");
        ts_.expect(Tok::rparen, "')'");
        PortInstance pi{*type, parse_count(n), *port};
        if (!view_.is_valid(pi)) throw ParseError("unknown port instance " + view_.port_name(pi), n.span);
        return pi;
    }

    TokenStream ts_;
    const SystemView& view_;
};

}  // namespace

ParametricSystem parse_system(std::string_view text) {
    TokenStream ts(text);
    return parse_system_tokens(ts);
}

std::string print_system(const ParametricSystem& system) {
    std::string out = "wcb 1\nsemiring " + system.semiring + "\n";
    for (const auto& type : system.types) {
        out += "type " + type.name + " {\n";
        for (const auto& p : type.ports) {
            out += "  port " + p.name;
            out += " weight " + (p.weight_text.empty() ? system.semiring_spec().format(p.weight) : p.weight_text);
            out += "\n";
        }
        if (type.lts) {
            out += "  lts {\n    states";
            for (const auto& s : type.lts->states) out += " " + s;
            out += "\n";
            if (!type.lts->initial.empty()) out += "    initial " + type.lts->initial + "\n";
            for (const auto& t : type.lts->transitions)
                out += "    transition " + t.from + " " + t.port + " " + t.to + "\n";
            out += "  }\n";
        }
        out += "}\n";
    }
    if (system.instances) {
        out += "instances {";
        for (std::size_t i = 0; i < system.types.size(); ++i)
            out += " " + system.types[i].name + " = " + std::to_string((*system.instances)[i]);
        out += " }\n";
    }
    return out;
}

FormulaPtr parse_formula_unchecked(std::string_view text, const ParametricSystem& system) {
    return FormulaParser(text, system).run();
}

FormulaPtr parse_formula(std::string_view text, const ParametricSystem& system, Layer layer) {
    FormulaPtr f = parse_formula_unchecked(text, system);
    auto diags = layer_diagnostics(*f, layer);
    if (diags.empty()) diags = validate(*f, system);
    if (!diags.empty()) throw ParseError(diags.front().message, diags.front().span);
    return f;
}

std::string print_formula(const Formula& f, const ParametricSystem& system) {
    return Printer(system).run(f, kTop);
}

Interaction parse_interaction(std::string_view text, const SystemView& view) {
    WordParser p(text, view);
    Interaction a = p.interaction();
    p.expect_end();
    return a;
}

Word parse_word(std::string_view text, const SystemView& view) {
    WordParser p(text, view);
    Word w = p.word();
    p.expect_end();
    return w;
}

std::vector<Word> parse_words(std::string_view text, const SystemView& view) {
    std::vector<Word> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(parse_word(line, view));
        pos = nl + 1;
    }
    return out;
}

std::vector<Interaction> parse_alphabet(std::string_view text, const SystemView& view) {
    WordParser p(text, view);
    std::vector<Interaction> out;
    while (!p.done()) out.push_back(p.interaction());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

InstanceMap parse_instance_map(std::string_view text, const ParametricSystem& system) {
    InstanceMap r(system.types.size(), 0);
    TokenStream ts(text);
    while (!ts.at(Tok::end)) {
        Token name = ts.expect(Tok::ident, "component type name");
        auto idx = system.type_index(name.text);
        if (!idx) throw ParseError("unknown component type '" + name.text + "'", name.span);
        ts.expect(Tok::eq, "'='");
        r[*idx] = parse_count(ts.expect(Tok::number, "instance count"));
        if (!ts.accept(Tok::comma) && !ts.at(Tok::end)) ts.fail("expected ','");
    }
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] == 0)
            throw ConfigError("instance map must give a positive count for type '" + system.types[i].name + "'");
    return r;
}

}  // namespace wfoeil

namespace wfoeil {

std::string strip_header(std::string_view text, std::string_view keyword) {
    std::string out(text);
    std::size_t pos = 0, line = 1;
    while (pos < out.size()) {
        std::size_t end = out.find('\n', pos);
        if (end == std::string::npos) end = out.size();
        std::string_view l(out.data() + pos, end - pos);
        auto first = l.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || l[first] == '#') {
            pos = end + 1;
            ++line;
            continue;
        }
        l.remove_prefix(first);
        if (!l.starts_with(keyword) || (l.size() > keyword.size() && l[keyword.size()] != ' ' && l[keyword.size()] != '\t'))
            return out;
        auto version = l.substr(keyword.size());
        while (!version.empty() && (version.front() == ' ' || version.front() == '\t')) version.remove_prefix(1);
        while (!version.empty() && (version.back() == ' ' || version.back() == '\t' || version.back() == '\r'))
            version.remove_suffix(1);
        if (version != "1")
            throw ParseError("unsupported " + std::string(keyword) + " format version '" + std::string(version) + "'",
                             SourceSpan{pos, end, line, first + 1});
        std::fill(out.begin() + static_cast<long>(pos), out.begin() + static_cast<long>(end), ' ');
        return out;
    }
    return out;
}

}  // namespace wfoeil
