#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "wfoeil/architectures.hpp"
#include "wfoeil/automata.hpp"
#include "wfoeil/parser.hpp"

using namespace wfoeil;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "wfoeil");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<json> json_lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

struct Workdir {
    fs::path dir;
    Workdir() {
        dir = fs::temp_directory_path() / ("wfoeil_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workdir() { fs::remove_all(dir); }
    std::string at(const std::string& name) const { return (dir / name).string(); }
    void example(const std::string& id, std::vector<std::string> extra = {}) const {
        std::vector<std::string> args{"example", id, "--dir", dir.string()};
        args.insert(args.end(), extra.begin(), extra.end());
        REQUIRE(run(args).code == 0);
    }
};

const std::string fixtures = WFOEIL_FIXTURES;

}  // namespace

TEST_CASE("example files match the fixtures") {
    Workdir w;
    for (auto id : all_architectures()) {
        const std::string name(architecture_name(id));
        CAPTURE(name);
        w.example(name);
        for (auto ext : {".wcb", ".wfl", ".words"})
            CHECK(read_file(w.at(name + ext)) == read_file(fixtures + "/" + name + ext));
    }
    const auto listed = run({"example", "--list"});
    CHECK(listed.code == 0);
    CHECK(listed.out.find("publish_subscribe") != std::string::npos);
    CHECK(run({"example", "ring", "--dir", w.dir.string()}).code == 1);
}

TEST_CASE("check") {
    const auto ok = run({"check", fixtures + "/star.wcb", fixtures + "/star.wfl"});
    CHECK(ok.code == 0);
    CHECK(ok.out.starts_with("ok: "));
    const auto machine = run({"--format", "machine", "check", fixtures + "/star.wcb", fixtures + "/star.wfl"});
    CHECK(machine.code == 0);
    const auto lines = json_lines(machine.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["command"] == "check");
    CHECK(lines[0]["ok"] == true);

    Workdir w;
    write_file(w.at("bad.wfl"), "wfl 1\nSum x:node .\n  hashw(p(x), q(x))\n");
    const auto bad = run({"check", fixtures + "/star.wcb", w.at("bad.wfl")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("bad.wfl:3:") != std::string::npos);
    CHECK(bad.err.find("unknown port 'q'") != std::string::npos);

    const auto missing = run({"check", w.at("none.wcb"), w.at("bad.wfl")});
    CHECK(missing.code == 1);
    CHECK(run({"check"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
}

TEST_CASE("eval") {
    const std::string sys = fixtures + "/master_slave.wcb", f = fixtures + "/master_slave.wfl";
    const auto r = run({"--format", "machine", "eval", sys, f, "--words", fixtures + "/master_slave.words"});
    CHECK(r.code == 0);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 4);
    for (const auto& j : lines) {
        CHECK(j["command"] == "eval");
        CHECK(j["value"] == "1");
    }
    CHECK(lines[0]["word"] == "{master.p_m(1), slave.p_s(1)} {master.p_m(2), slave.p_s(2)}");

    Workdir w;
    w.example("master_slave", {"--weight", "k_m=2", "--weight", "k_s=3"});
    const auto weighted = run({"eval", w.at("master_slave.wcb"), w.at("master_slave.wfl"), "--words",
                               w.at("master_slave.words"), "--word", "eps"});
    CHECK(weighted.code == 0);
    CHECK(weighted.out ==
          "0\teps\n"
          "36\t{master.p_m(1), slave.p_s(1)} {master.p_m(2), slave.p_s(2)}\n"
          "36\t{master.p_m(1), slave.p_s(1)} {master.p_m(1), slave.p_s(2)}\n"
          "36\t{master.p_m(2), slave.p_s(1)} {master.p_m(1), slave.p_s(2)}\n"
          "36\t{master.p_m(2), slave.p_s(1)} {master.p_m(2), slave.p_s(2)}\n");

    const auto resized = run({"eval", sys, f, "--instances", "master=1,slave=1", "--word", "{p_m(1), p_s(1)}"});
    CHECK(resized.code == 0);
    CHECK(resized.out == "1\t{master.p_m(1), slave.p_s(1)}\n");

    CHECK(run({"eval", sys, f}).code == 1);
    const auto badword = run({"eval", sys, f, "--word", "{p_m(3)}"});
    CHECK(badword.code == 1);

    write_file(w.at("open.wfl"), "Sum y:master . hashw(p_m(y), p_s(x:slave))\n");
    const auto open = run({"eval", sys, w.at("open.wfl"), "--word", "eps"});
    CHECK(open.code == 1);
    CHECK(open.err.find("x") != std::string::npos);

    write_file(w.at("bare.wcb"), "wcb 1\ntype master { port p_m }\ntype slave { port p_s }\n");
    const auto noinst = run({"eval", w.at("bare.wcb"), f, "--word", "eps"});
    CHECK(noinst.code == 1);
    CHECK(noinst.err.find("instan") != std::string::npos);
}

TEST_CASE("compile is deterministic and agrees with eval") {
    Workdir w;
    const std::string sys = fixtures + "/star.wcb", f = fixtures + "/star.wfl";
    const auto a = run({"compile", sys, f, "--instances", "node=4"});
    const auto b = run({"compile", sys, f, "--instances", "node=4", "--jobs", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.starts_with("wfa 1\n"));
    CHECK(a.err.find("states") != std::string::npos);

    const auto to_file =
        run({"--format", "machine", "compile", sys, f, "--instances", "node=4", "-o", w.at("star.wfa")});
    REQUIRE(to_file.code == 0);
    CHECK(read_file(w.at("star.wfa")) == a.out);
    const auto stats = json_lines(to_file.out);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0]["states"] == 24);
    CHECK(stats[0]["letters"] == 15);

    // Compare the automaton with the evaluator on a handful of words.
    ParametricSystem ps = parse_system(read_file(sys));
    const SystemView view(ps, {4});
    const Wfa wfa = read_wfa(a.out, view);
    const auto letters = view.enumerate_interactions();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        Word word;
        const std::size_t len = rng() % 5;
        for (std::size_t j = 0; j < len; ++j) word.push_back(letters[rng() % letters.size()]);
        const std::string text = word.empty() ? "eps" : view.word_name(word);
        const auto e = run({"eval", sys, f, "--instances", "node=4", "--word", text});
        REQUIRE(e.code == 0);
        CHECK(e.out == ps.semiring_spec().format(wfa_behavior(wfa, word)) + "\t" + text + "\n");
    }
    const auto chain = parse_word("{p(1), p(2)} {p(1), p(3)} {p(1), p(4)}", view);
    CHECK(wfa_behavior(wfa, chain) == Value(1));
}

TEST_CASE("exit codes for resources and capabilities") {
    const auto budget = run({"compile", fixtures + "/blackboard.wcb", fixtures + "/blackboard.wfl", "--budget", "10"});
    CHECK(budget.code == 2);
    CHECK(budget.err.find("offending subformula") != std::string::npos);
    const auto machine = run({"--format", "machine", "compile", fixtures + "/blackboard.wcb",
                              fixtures + "/blackboard.wfl", "--budget", "10"});
    CHECK(machine.code == 2);
    const auto err = json_lines(machine.out);
    REQUIRE(err.size() == 1);
    CHECK(err[0]["error"]["kind"] == "resource");
    CHECK(err[0]["error"]["exit"] == 2);

    const std::string sys = fixtures + "/master_slave.wcb", f = fixtures + "/master_slave.wfl";
    const auto cap = run({"equiv", sys, f, f, "--semiring", "min-plus"});
    CHECK(cap.code == 3);
    CHECK(cap.err.find("--bounded") != std::string::npos);
    const auto bounded = run({"equiv", sys, f, f, "--semiring", "min-plus", "--bounded", "2"});
    CHECK(bounded.code == 0);
    CHECK(bounded.out.starts_with("no difference up to length 2"));

    const auto blowup = run({"compile", fixtures + "/star.wcb", fixtures + "/star.wfl", "--instances", "node=25"});
    CHECK(blowup.code == 2);
    CHECK(blowup.err.find("alphabet") != std::string::npos);
}

TEST_CASE("equiv") {
    Workdir w;
    const std::string sys = fixtures + "/master_slave.wcb", f = fixtures + "/master_slave.wfl";
    write_file(w.at("plus_zero.wfl"), "wfl 1\n(ProdC x:slave . Sum y:master . hashw(master.p_m(y), slave.p_s(x))) (+) 0\n");
    write_file(w.at("shuffle.wfl"), "ProdS x:slave . Sum y:master . hashw(master.p_m(y), slave.p_s(x))\n");
    const auto same = run({"--format", "machine", "equiv", sys, f, w.at("plus_zero.wfl")});
    CHECK(same.code == 0);
    const auto j = json_lines(same.out);
    REQUIRE(j.size() == 1);
    CHECK(j[0]["equivalent"] == true);

    const auto differ = run({"equiv", sys, f, w.at("shuffle.wfl")});
    CHECK(differ.code == 0);
    CHECK(differ.out.starts_with("not equivalent\nwitness: "));
    CHECK(differ.out.find("values: 0 vs 1") != std::string::npos);
}

TEST_CASE("laws") {
    const auto all = run({"laws", "--samples", "200"});
    CHECK(all.code == 0);
    CHECK(all.out.find("viterbi: ok (200 samples)") != std::string::npos);
    const auto one = run({"--format", "machine", "laws", "--semiring", "fuzzy", "--samples", "50"});
    CHECK(one.code == 0);
    const auto lines = json_lines(one.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["semiring"] == "fuzzy");
    CHECK(lines[0]["ok"] == true);
    CHECK(run({"laws", "--semiring", "octonions"}).code == 1);
}
