#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wfoeil/architectures.hpp"
#include "wfoeil/automata.hpp"
#include "wfoeil/equivalence.hpp"
#include "wfoeil/parser.hpp"
#include "wfoeil/semantics.hpp"
#include "wfoeil/translate.hpp"

namespace wfoeil::cli {

namespace {

using nlohmann::json;

struct Config {
    std::string command;
    bool machine = false;
    std::string system_path;
    std::string formula_path;
    std::string second_formula_path;
    std::string semiring;
    std::string instances;
    std::vector<std::string> words;
    std::string words_path;
    std::string alphabet_path;
    std::size_t budget = kDefaultStateBudget;
    std::optional<std::size_t> bound;
    unsigned jobs = 1;
    std::uint64_t seed = kDefaultSeed;
    std::size_t samples = 1000;
    std::string output;
    std::string directory = ".";
    std::vector<std::string> weights;
    std::string example;
    bool list = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw ConfigError("cannot write " + path);
}

// Runs `body`, prefixing parse diagnostics with the file they come from.
template <class F>
auto located(const std::string& path, F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        throw Error(ExitCode::invalid, path + ":" + e.what());
    }
}

ParametricSystem load_system(const Config& cfg) {
    auto text = read_file(cfg.system_path);
    ParametricSystem sys = located(cfg.system_path, [&] { return parse_system(text); });
    if (!cfg.semiring.empty()) sys = sys.with_semiring(builtin(cfg.semiring).name);
    return sys;
}

InstanceMap load_instances(const Config& cfg, const ParametricSystem& sys) {
    if (!cfg.instances.empty()) return parse_instance_map(cfg.instances, sys);
    if (sys.instances) return *sys.instances;
    throw ConfigError("no instantiation: add an instances block to " + cfg.system_path + " or pass --instances");
}

FormulaPtr load_formula(const std::string& path, const ParametricSystem& sys) {
    auto text = read_file(path);
    return located(path, [&] { return parse_formula(strip_header(text, "wfl"), sys); });
}

std::vector<Word> load_words(const Config& cfg, const SystemView& view) {
    std::vector<Word> out;
    for (const auto& w : cfg.words) out.push_back(located("--word", [&] { return parse_word(w, view); }));
    if (!cfg.words_path.empty()) {
        auto text = read_file(cfg.words_path);
        auto words = located(cfg.words_path, [&] { return parse_words(strip_header(text, "words"), view); });
        out.insert(out.end(), words.begin(), words.end());
    }
    return out;
}

TranslateOptions translate_options(const Config& cfg, const SystemView& view) {
    TranslateOptions opt;
    opt.budget = cfg.budget;
    opt.jobs = cfg.jobs;
    if (!cfg.alphabet_path.empty()) {
        auto text = read_file(cfg.alphabet_path);
        opt.alphabet = located(cfg.alphabet_path, [&] { return parse_alphabet(strip_header(text, "alphabet"), view); });
    }
    return opt;
}

std::string describe_free(const Formula& f, const ParametricSystem& sys) {
    std::string out;
    for (const auto& v : f.free) {
        if (!out.empty()) out += ", ";
        out += v.name + ":" + sys.types[v.sort].name;
    }
    return out;
}

void require_sentence(const Formula& f, const ParametricSystem& sys) {
    if (!f.free.empty()) throw ValidationError("formula is not a sentence; free variables: " + describe_free(f, sys));
}

std::string_view layer_name(const Formula& f) {
    if (f.pil) return "pil";
    if (f.epil) return "epil";
    if (f.weighted) {
        bool first_order = false;
        std::vector<const Formula*> stack{&f};
        while (!stack.empty()) {
            auto g = stack.back();
            stack.pop_back();
            if (g->kind == NodeKind::quantified || g->kind == NodeKind::equal || !g->free.empty()) first_order = true;
            for (const auto& c : g->children) stack.push_back(c.get());
        }
        return first_order ? "wfoeil" : "wepil";
    }
    return "foeil";
}

int cmd_check(const Config& cfg, std::ostream& out) {
    auto sys = load_system(cfg);
    auto r = load_instances(cfg, sys);
    SystemView view(sys, r);
    auto f = load_formula(cfg.formula_path, sys);
    if (cfg.machine) {
        json j{{"command", "check"}, {"ok", true}, {"layer", layer_name(*f)}, {"semiring", sys.semiring},
               {"types", sys.types.size()}, {"interactions", view.interaction_count()}};
        json free = json::array();
        for (const auto& v : f->free) free.push_back(v.name + ":" + sys.types[v.sort].name);
        j["free"] = free;
        out << j.dump() << "\n";
    } else {
        out << "ok: " << layer_name(*f) << (f->free.empty() ? " sentence" : " formula") << " over " << sys.types.size()
            << " component types, " << view.interaction_count() << " interactions, semiring " << sys.semiring << "\n";
        if (!f->free.empty()) out << "free variables: " << describe_free(*f, sys) << "\n";
    }
    return 0;
}

int cmd_eval(const Config& cfg, std::ostream& out) {
    auto sys = load_system(cfg);
    SystemView view(sys, load_instances(cfg, sys));
    auto f = load_formula(cfg.formula_path, sys);
    require_sentence(*f, sys);
    auto words = load_words(cfg, view);
    if (words.empty()) throw ConfigError("no words given; use --word or --words");
    const auto& k = view.semiring();
    Evaluator ev(view, f);
    for (const auto& w : words) {
        Value v = ev.eval(w);
        if (cfg.machine)
            out << json{{"command", "eval"}, {"word", w.empty() ? "eps" : view.word_name(w)}, {"value", k.format(v)}}.dump()
                << "\n";
        else
            out << k.format(v) << "\t" << (w.empty() ? "eps" : view.word_name(w)) << "\n";
    }
    return 0;
}

int cmd_compile(const Config& cfg, std::ostream& out, std::ostream& err) {
    auto sys = load_system(cfg);
    SystemView view(sys, load_instances(cfg, sys));
    auto f = load_formula(cfg.formula_path, sys);
    require_sentence(*f, sys);
    const auto start = std::chrono::steady_clock::now();
    Wfa a = translate_wfoeil(f, view, {}, translate_options(cfg, view));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = write_wfa(a, view);
    std::ostream& stats = cfg.output.empty() ? err : out;
    if (cfg.output.empty()) out << text;
    else write_file(cfg.output, text);
    if (cfg.machine) {
        stats << json{{"command", "compile"},
                      {"states", a.states},
                      {"transitions", a.letter_transition_count()},
                      {"letters", a.alphabet->letter_count()},
                      {"classes", a.alphabet->symbol_count()},
                      {"seconds", seconds}}
                     .dump()
              << "\n";
    } else {
        stats << "states=" << a.states << " transitions=" << a.letter_transition_count()
              << " letters=" << a.alphabet->letter_count() << " classes=" << a.alphabet->symbol_count()
              << " seconds=" << seconds << "\n";
    }
    return 0;
}

int cmd_equiv(const Config& cfg, std::ostream& out) {
    auto sys = load_system(cfg);
    SystemView view(sys, load_instances(cfg, sys));
    auto f = load_formula(cfg.formula_path, sys);
    auto g = load_formula(cfg.second_formula_path, sys);
    require_sentence(*f, sys);
    require_sentence(*g, sys);
    EquivVerdict verdict;
    try {
        verdict = sentence_equiv(f, g, view, translate_options(cfg, view), cfg.bound);
    } catch (const CapabilityError& e) {
        throw CapabilityError(std::string(e.what()) + "; pass --bounded N for a bounded check");
    }
    const auto& k = view.semiring();
    if (cfg.machine) {
        json j{{"command", "equiv"},
               {"mode", cfg.bound ? "bounded" : "exact"},
               {"equivalent", verdict.equivalent},
               {"basis_size", verdict.basis_size}};
        if (cfg.bound) j["bound"] = *cfg.bound;
        if (verdict.witness) {
            j["witness"] = verdict.witness->empty() ? "eps" : view.word_name(*verdict.witness);
            j["values"] = {k.format(verdict.values->first), k.format(verdict.values->second)};
        }
        out << j.dump() << "\n";
    } else {
        if (verdict.equivalent)
            out << (cfg.bound ? "no difference up to length " + std::to_string(*cfg.bound) : std::string("equivalent"))
                << "\n";
        else
            out << "not equivalent\n";
        if (verdict.witness) {
            out << "witness: " << (verdict.witness->empty() ? "eps" : view.word_name(*verdict.witness)) << "\n";
            out << "values: " << k.format(verdict.values->first) << " vs " << k.format(verdict.values->second) << "\n";
        }
        out << (cfg.bound ? "words compared: " : "basis size: ") << verdict.basis_size << "\n";
    }
    return 0;
}

int cmd_example(const Config& cfg, std::ostream& out) {
    if (cfg.list || cfg.example.empty()) {
        for (auto id : all_architectures()) out << architecture_name(id) << "\n";
        return 0;
    }
    auto id = find_architecture(cfg.example);
    if (!id) throw ConfigError("unknown architecture '" + cfg.example + "'; try `example --list`");
    std::map<std::string, std::string> weights;
    for (const auto& w : cfg.weights) {
        auto eq = w.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("weight '" + w + "' is not name=value");
        weights[w.substr(0, eq)] = w.substr(eq + 1);
    }
    auto arch = generate(*id, weights, cfg.semiring.empty() ? "natural" : cfg.semiring);
    const std::string name(architecture_name(*id));
    const std::filesystem::path dir(cfg.directory);
    std::filesystem::create_directories(dir);
    const auto system_path = (dir / (name + ".wcb")).string();
    const auto formula_path = (dir / (name + ".wfl")).string();
    const auto words_path = (dir / (name + ".words")).string();
    write_file(system_path, print_system(arch.system));
    write_file(formula_path, "wfl 1\n" + arch.sentence_text + "\n");
    SystemView view(arch.system, *arch.system.instances);
    std::string words = "words 1\n";
    for (const auto& cw : catalog_words(*id, *arch.system.instances))
        words += "# " + cw.label + "\n" + view.word_name(cw.word) + "\n";
    write_file(words_path, words);
    if (cfg.machine)
        out << json{{"command", "example"}, {"id", name}, {"files", {system_path, formula_path, words_path}}}.dump()
            << "\n";
    else
        out << system_path << "\n" << formula_path << "\n" << words_path << "\n";
    return 0;
}

int cmd_laws(const Config& cfg, std::ostream& out) {
    std::vector<std::string> names;
    if (!cfg.semiring.empty()) names.push_back(builtin(cfg.semiring).name);
    else
        for (auto n : builtin_names()) names.emplace_back(n);
    bool ok = true;
    for (const auto& name : names) {
        const auto& k = builtin(name);
        auto report = check_laws(k, cfg.samples, cfg.seed);
        ok = ok && report.ok();
        if (cfg.machine) {
            json j{{"command", "laws"}, {"semiring", name}, {"samples", report.samples}, {"ok", report.ok()}};
            json v = json::array();
            for (const auto& x : report.violations)
                v.push_back({{"axiom", x.axiom}, {"a", k.format(x.a)}, {"b", k.format(x.b)}, {"c", k.format(x.c)}});
            j["violations"] = v;
            out << j.dump() << "\n";
        } else {
            out << name << ": " << (report.ok() ? "ok" : "FAILED") << " (" << report.samples << " samples)\n";
            for (const auto& x : report.violations)
                out << "  " << x.axiom << " fails at a=" << k.format(x.a) << " b=" << k.format(x.b)
                    << " c=" << k.format(x.c) << "\n";
        }
    }
    return ok ? 0 : static_cast<int>(ExitCode::invalid);
}

std::string error_kind(ExitCode code) {
    switch (code) {
    case ExitCode::ok: return "ok";
    case ExitCode::invalid: return "invalid";
    case ExitCode::resource: return "resource";
    case ExitCode::capability: return "capability";
    }
    return "invalid";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"Weighted interaction logic checker, evaluator and compiler", "wfoeil"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "human";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "machine"}));

    auto add_system = [&](CLI::App* sub) {
        sub->add_option("system", cfg.system_path, "System file (.wcb)")->required();
        sub->add_option("--semiring", cfg.semiring, "Override the system's semiring");
        sub->add_option("--instances", cfg.instances, "Instantiation, e.g. master=2,slave=3");
    };
    auto add_translation = [&](CLI::App* sub) {
        sub->add_option("--budget", cfg.budget, "State budget per subformula automaton");
        sub->add_option("--alphabet", cfg.alphabet_path, "Restrict words to the interactions in this file");
        sub->add_option("--jobs", cfg.jobs, "Worker threads for alphabet classification")
            ->check(CLI::Range(1u, 64u));
    };

    auto* check = app.add_subcommand("check", "Parse and validate a system and a formula");
    add_system(check);
    check->add_option("formula", cfg.formula_path, "Formula file (.wfl)")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a sentence on words");
    add_system(eval);
    eval->add_option("formula", cfg.formula_path, "Formula file (.wfl)")->required();
    eval->add_option("--word", cfg.words, "A word such as '{master.p_m(1), slave.p_s(1)}'; eps is empty");
    eval->add_option("--words", cfg.words_path, "File with one word per line");

    auto* compile = app.add_subcommand("compile", "Compile a sentence to a weighted automaton");
    add_system(compile);
    compile->add_option("formula", cfg.formula_path, "Formula file (.wfl)")->required();
    compile->add_option("-o,--output", cfg.output, "Automaton file; stdout if omitted");
    add_translation(compile);

    auto* equiv = app.add_subcommand("equiv", "Decide whether two sentences define the same series");
    add_system(equiv);
    equiv->add_option("formula", cfg.formula_path, "First formula file")->required();
    equiv->add_option("other", cfg.second_formula_path, "Second formula file")->required();
    std::size_t bound = 0;
    auto* bounded = equiv->add_option("--bounded", bound, "Only compare words up to this length");
    add_translation(equiv);

    auto* example = app.add_subcommand("example", "Write a catalog architecture as .wcb/.wfl/.words files");
    example->add_option("id", cfg.example, "Architecture name");
    example->add_flag("--list", cfg.list, "List the catalog");
    example->add_option("--dir", cfg.directory, "Output directory");
    example->add_option("--weight", cfg.weights, "Port weight name=value (repeatable)");
    example->add_option("--semiring", cfg.semiring, "Semiring of the generated system");

    auto* laws = app.add_subcommand("laws", "Randomized semiring axiom checks");
    laws->add_option("--semiring", cfg.semiring, "Only this semiring");
    laws->add_option("--samples", cfg.samples, "Samples per axiom");
    laws->add_option("--seed", cfg.seed, "Random seed");

    std::vector<std::string> argv_rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv_rest.begin(), argv_rest.end());
    try {
        app.parse(argv_rest);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::invalid);
    }
    cfg.machine = format == "machine";
    if (bounded->count()) cfg.bound = bound;

    try {
        if (check->parsed()) return cmd_check(cfg, out);
        if (eval->parsed()) return cmd_eval(cfg, out);
        if (compile->parsed()) return cmd_compile(cfg, out, err);
        if (equiv->parsed()) return cmd_equiv(cfg, out);
        if (example->parsed()) return cmd_example(cfg, out);
        if (laws->parsed()) return cmd_laws(cfg, out);
    } catch (const Error& e) {
        const auto code = e.code();
        std::string message = e.what();
        if (auto* budget = dynamic_cast<const BudgetExceededError*>(&e); budget && !budget->subformula().empty())
            message += "; offending subformula: " + budget->subformula();
        if (cfg.machine)
            out << json{{"error", {{"kind", error_kind(code)}, {"message", message}, {"exit", static_cast<int>(code)}}}}
                       .dump()
                << "\n";
        else
            err << "error: " << message << "\n";
        return static_cast<int>(code);
    } catch (const std::exception& e) {
        if (cfg.machine) out << json{{"error", {{"kind", "invalid"}, {"message", e.what()}, {"exit", 1}}}}.dump() << "\n";
        else err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::invalid);
    }
    return static_cast<int>(ExitCode::invalid);
}

}  // namespace wfoeil::cli
