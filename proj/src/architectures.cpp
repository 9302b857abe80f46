#include "wfoeil/architectures.hpp"

#include <set>

#include "wfoeil/parser.hpp"

namespace wfoeil {

namespace {

struct Entry {
    ArchitectureId id;
    std::string_view name;
    std::string_view system;
    std::string_view sentence;
    std::vector<std::pair<std::string_view, std::string_view>> words;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        {ArchitectureId::master_slave, "master_slave",
         R"(wcb 1
semiring natural
type master { port p_m }
type slave { port p_s }
instances { master = 2 slave = 2 }
)",
         R"(ProdC x:slave . Sum y:master . hashw(master.p_m(y), slave.p_s(x)))",
         {
             {"w1", "{p_m(1), p_s(1)} {p_m(2), p_s(2)}"},
             {"w2", "{p_m(1), p_s(1)} {p_m(1), p_s(2)}"},
             {"w3", "{p_m(2), p_s(1)} {p_m(1), p_s(2)}"},
             {"w4", "{p_m(2), p_s(1)} {p_m(2), p_s(2)}"},
         }},
        {ArchitectureId::star, "star",
         R"(wcb 1
semiring natural
type node { port p }
instances { node = 5 }
)",
         R"(Sum x:node ProdC y:node (x != y) . hashw(p(x), p(y)))",
         {
             {"w", "{p(1), p(2)} {p(1), p(3)} {p(1), p(4)} {p(1), p(5)}"},
         }},
        {ArchitectureId::repository, "repository",
         R"(wcb 1
semiring natural
type repository { port p_r }
type accessor { port p_d }
instances { repository = 1 accessor = 4 }
)",
         R"(Sum x:repository ProdC x:accessor . hashw(p_r(x), p_d(x)))",
         {
             {"w", "{p_r(1), p_d(1)} {p_r(1), p_d(2)} {p_r(1), p_d(3)} {p_r(1), p_d(4)}"},
         }},
        {ArchitectureId::pipes_filters, "pipes_filters",
         R"(wcb 1
semiring natural
type pipe { port p_e port p_o }
type filter { port f_e port f_o }
instances { pipe = 4 filter = 3 }
)",
         R"((ProdC x:filter Sum x:pipe Sum y:pipe (x != y) .
    hashw(p_o(x), f_e(x)) (.) hashw(p_e(y), f_o(x)))
(x)
(A z:pipe A y:filter .
    (A z:filter (y != z) .
        (true * (p_o(z) & f_e(y)) * true) & !(true * (p_o(z) & f_e(z)) * true))
    | !(true * (p_o(z) & f_e(y)) * true)))",
         {
             {"w1", "{f_e(1), p_o(2)} {f_o(1), p_e(1)} {f_e(2), p_o(3)} {f_o(2), p_e(2)} {f_e(3), p_o(4)} "
                    "{f_o(3), p_e(2)}"},
             {"w2", "{f_e(1), p_o(3)} {f_o(1), p_e(4)} {f_e(2), p_o(4)} {f_o(2), p_e(1)} {f_e(3), p_o(2)} "
                    "{f_o(3), p_e(4)}"},
         }},
        {ArchitectureId::blackboard, "blackboard",
         R"(wcb 1
semiring natural
type blackboard { port p_d port p_a }
type controller { port p_r port p_l port p_e }
type source { port p_n port p_t port p_w }
instances { blackboard = 1 controller = 1 source = 3 }
)",
         R"(Sum x:blackboard Sum x:controller .
    hashw(p_d(x), p_r(x))
    (.) (ProdS x:source . hashw(p_d(x), p_n(x)))
    (.) (SumS y:source . hashw(p_l(x), p_t(y)) (.) hashw(p_e(x), p_w(y), p_a(x))))",
         {
             {"w1", "{p_d(1), p_r(1)} {p_d(1), p_n(1)} {p_d(1), p_n(2)} {p_d(1), p_n(3)} {p_l(1), p_t(2)} "
                    "{p_l(1), p_t(3)} {p_e(1), p_w(2), p_a(1)} {p_e(1), p_w(3), p_a(1)}"},
             {"w2", "{p_d(1), p_r(1)} {p_d(1), p_n(3)} {p_d(1), p_n(1)} {p_d(1), p_n(2)} {p_l(1), p_t(3)} "
                    "{p_e(1), p_w(3), p_a(1)}"},
         }},
        {ArchitectureId::request_response, "request_response",
         R"(wcb 1
semiring natural
type registry { port p_e port p_u port p_t }
type service { port p_r port p_g port p_s }
type client { port p_l port p_o port p_n port p_q port p_c }
type coordinator { port p_m port p_a port p_d }
instances { registry = 1 service = 2 client = 2 coordinator = 2 }
)",
         R"((Sum x:registry .
    (ProdS x:service . hashw(p_e(x), p_r(x)))
    (.) (ProdS x:client . hashw(p_l(x), p_u(x)) (.) hashw(p_o(x), p_t(x))))
(.)
(SumS y:service Sum x:coordinator SumC y:client .
    (hashw(p_n(y), p_m(x)) (.) hashw(p_q(y), p_a(x), p_g(y)) (.) hashw(p_c(y), p_d(x), p_s(y)))
    (x) (A y:coordinator A z:client A z:service .
        !(true * hash(p_q(z), p_a(y), p_g(z)) * true)
        | (A t:client A t:service (z != t) .
            (true * hash(p_q(z), p_a(y), p_g(z)) * true)
            & !(true * hash(p_q(t), p_a(y), p_g(t)) * true)))))",
         {
             {"w1", "{p_e(1), p_r(1)} {p_e(1), p_r(2)} {p_l(1), p_u(1)} {p_l(2), p_u(1)} {p_o(1), p_u(1)} "
                    "{p_o(2), p_u(1)} {p_n(1), p_m(2)} {p_q(1), p_a(2), p_g(2)} {p_c(1), p_d(2), p_s(2)} "
                    "{p_n(2), p_m(2)} {p_q(2), p_a(2), p_g(2)} {p_c(2), p_d(2), p_s(2)}"},
             {"w2", "{p_e(1), p_r(2)} {p_e(1), p_r(1)} {p_l(1), p_u(1)} {p_l(2), p_u(1)} {p_o(2), p_u(1)} "
                    "{p_o(1), p_u(1)} {p_n(2), p_m(2)} {p_q(2), p_a(2), p_g(2)} {p_c(2), p_d(2), p_s(2)}"},
         }},
        {ArchitectureId::publish_subscribe, "publish_subscribe",
         R"(wcb 1
semiring natural
type publisher { port p_a port p_t }
type topic { port p_n port p_r port p_c port p_s port p_f }
type subscriber { port p_e port p_g port p_d }
instances { publisher = 2 topic = 2 subscriber = 3 }
)",
         R"(SumS x:topic .
    (SumS x:publisher . hashw(p_a(x), p_n(x)) (.) hashw(p_t(x), p_r(x)))
    (.) (SumS x:subscriber . hashw(p_e(x), p_c(x)) (.) hashw(p_g(x), p_s(x)) (.) hashw(p_d(x), p_f(x))))",
         {
             {"w1", "{p_a(1), p_n(1)} {p_t(1), p_r(1)} {p_c(1), p_e(1)} {p_s(1), p_g(1)} {p_c(1), p_e(3)} "
                    "{p_f(1), p_d(1)} {p_s(1), p_g(3)} {p_f(1), p_d(3)}"},
             {"w2", "{p_a(1), p_n(1)} {p_t(1), p_r(1)} {p_c(1), p_e(3)} {p_c(1), p_e(1)} {p_s(1), p_g(1)} "
                    "{p_c(1), p_e(2)} {p_s(1), p_g(2)} {p_s(1), p_g(3)} {p_f(1), p_d(3)} {p_f(1), p_d(1)} "
                    "{p_f(1), p_d(2)}"},
         }},
    };
    return table;
}

const Entry& entry(ArchitectureId id) {
    for (const auto& e : entries())
        if (e.id == id) return e;
    throw std::logic_error("unknown architecture");
}

}  // namespace

const std::vector<ArchitectureId>& all_architectures() {
    static const std::vector<ArchitectureId> ids = [] {
        std::vector<ArchitectureId> out;
        for (const auto& e : entries()) out.push_back(e.id);
        return out;
    }();
    return ids;
}

std::string_view architecture_name(ArchitectureId id) { return entry(id).name; }

std::optional<ArchitectureId> find_architecture(std::string_view name) {
    std::string key(name);
    for (auto& c : key)
        if (c == '-') c = '_';
    for (const auto& e : entries())
        if (e.name == key) return e.id;
    return std::nullopt;
}

Architecture generate(ArchitectureId id, const std::map<std::string, std::string>& weights,
                      std::string_view semiring) {
    const Entry& e = entry(id);
    ParametricSystem sys = parse_system(e.system);
    sys.semiring = builtin(semiring).name;
    std::set<std::string> used;
    for (auto& type : sys.types)
        for (auto& port : type.ports) {
            std::vector<std::string> names = {port.name, type.name + "." + port.name};
            if (port.name.starts_with("p_")) names.push_back("k_" + port.name.substr(2));
            for (const auto& n : names)
                if (auto it = weights.find(n); it != weights.end()) {
                    port.weight_text = it->second;
                    used.insert(n);
                }
        }
    for (const auto& [name, value] : weights)
        if (!used.count(name))
            throw ConfigError("unknown weight name '" + name + "' for architecture " + std::string(e.name));
    validate_system(sys);
    FormulaPtr sentence = parse_formula(e.sentence, sys);
    return {id, std::move(sys), std::string(e.sentence), std::move(sentence)};
}

std::vector<CatalogWord> catalog_words(ArchitectureId id, const InstanceMap& r) {
    const Entry& e = entry(id);
    ParametricSystem sys = parse_system(e.system);
    if (r != *sys.instances)
        throw ConfigError("catalog words of " + std::string(e.name) + " exist only for the reference instantiation");
    SystemView view(sys, r);
    std::vector<CatalogWord> out;
    for (const auto& [label, text] : e.words) out.push_back({std::string(label), parse_word(text, view)});
    return out;
}

}  // namespace wfoeil
