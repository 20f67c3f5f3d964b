#include "beliefscope/cli.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beliefscope;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("beliefscope-cli-" + std::to_string(counter_++))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

const char* const kBadRow = R"({"nodes": [
  {"id": "O", "states": ["t","f"], "prior": [0.5,0.5]},
  {"id": "F", "states": ["t","f"], "parent": "O", "cpt": [[0.9,0.2],[0.2,0.8]]}]})";

const char* const kDeadEnd = R"({"nodes": [
  {"id": "O", "states": ["t","f"], "prior": [0.5,0.5]},
  {"id": "F", "states": ["t","f"], "parent": "O", "cpt": [[0,1],[0,1]]}]})";

const char* const kFIsTrue = R"({"assignments": {"F": "t"}})";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("infer on the two-node example") {
    TempDir dir;
    const auto r = run({"infer", dir.write("net.json", fixtures::kTwoNode), dir.write("ev.json", kFIsTrue)});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("0.8181818182") != std::string::npos);
}

TEST_CASE("validate") {
    TempDir dir;
    auto r = run({"validate", dir.write("net.json", fixtures::kTwoNode)});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("\"valid\":true") != std::string::npos);

    r = run({"validate", dir.write("bad.json", kBadRow)});
    CHECK(r.code == kExitInvalid);
    CHECK(r.err.find("row sum 1.1") != std::string::npos);
    CHECK(r.out.empty());

    for (auto name : {"diverticulum", "bend", "dirty_lens", "lumen_tracker"}) CHECK(run({"validate", name}).code == 0);
}

TEST_CASE("exit codes by error class") {
    TempDir dir;
    SUBCASE("parse error") {
        const auto r = run({"validate", dir.write("broken.json", "{\"nodes\": [")});
        CHECK(r.code == kExitParse);
        CHECK(r.err.find("line") != std::string::npos);
    }
    SUBCASE("missing file") { CHECK(run({"validate", "/nonexistent/model.json"}).code == kExitParse); }
    SUBCASE("unknown subcommand or option") {
        CHECK(run({"frobnicate"}).code == kExitParse);
        CHECK(run({"infer", "diverticulum", "surround_scene", "--bogus"}).code == kExitParse);
        CHECK(run({"track", "lumen_tracker", "surround_scene", "--mode", "smooth"}).code == kExitParse);
    }
    SUBCASE("unknown scenario") { CHECK(run({"generate", "fog"}).code == kExitParse); }
    SUBCASE("bad evidence") {
        const auto r = run({"infer", dir.write("net.json", fixtures::kTwoNode),
                            dir.write("ev.json", R"({"assignments": {"F": "maybe"}})")});
        CHECK(r.code == kExitInvalid);
        CHECK(r.err.find("state 'maybe' not in {t,f}") != std::string::npos);
    }
    SUBCASE("impossible evidence") {
        const auto r = run({"infer", dir.write("net.json", kDeadEnd), dir.write("ev.json", kFIsTrue)});
        CHECK(r.code == kExitImpossible);
        CHECK(r.err.find("'F'") != std::string::npos);
    }
    SUBCASE("oracle cap") {
        CHECK(run({"check", "diverticulum", "surround_scene", "--frames", "2", "--cap", "4"}).code == kExitParse);
    }
    SUBCASE("malformed rule") {
        const auto r = run({"compile", "IF dark region NEXTTO bright region THEN bend"});
        CHECK(r.code == kExitParse);
        CHECK(r.err.find("column 16") != std::string::npos);
        CHECK(r.err.find("unknown relation NEXTTO") != std::string::npos);
    }
    SUBCASE("dynamic model with infer") { CHECK(run({"infer", "dirty_lens", "static_spot"}).code == kExitInvalid); }
}

TEST_CASE("check passes on every builtin and scenario") {
    for (auto model : {"diverticulum", "bend", "dirty_lens", "lumen_tracker"})
        for (auto scenario : {"static_spot", "moving_spot", "surround_scene", "adjacent_scene", "empty"}) {
            CAPTURE(model);
            CAPTURE(scenario);
            const auto r = run({"check", model, scenario, "--frames", "6", "--seed", "3"});
            CHECK(r.code == kExitOk);
            CHECK(r.out.find("\"max_abs_diff\"") != std::string::npos);
        }
}

TEST_CASE("generate and track are deterministic and transport-agnostic") {
    TempDir dir;
    const auto gen = run({"generate", "static_spot", "--seed", "7", "--frames", "8"});
    REQUIRE(gen.code == 0);
    CHECK(run({"generate", "static_spot", "--seed", "7", "--frames", "8"}).out == gen.out);
    const auto file = dir.write("stream.jsonl", gen.out);
    for (auto model : {"dirty_lens", "lumen_tracker", "diverticulum"}) {
        const auto from_file = run({"track", model, file});
        const auto from_pipe = run({"track", model, "--stream", "-"}, gen.out);
        const auto generated = run({"track", model, "static_spot", "--seed", "7", "--frames", "8"});
        REQUIRE(from_file.code == 0);
        CHECK(from_pipe.out == from_file.out);
        CHECK(generated.out == from_file.out);
        CHECK(run({"track", model, file}).out == from_file.out);
    }
}

TEST_CASE("compile output round-trips through validate and infer") {
    TempDir dir;
    const auto c = run({"compile", "IF bright region SURROUNDING dark region THEN diverticulum"});
    REQUIRE(c.code == 0);
    const auto spec = dir.write("rule.json", c.out);
    CHECK(run({"validate", spec}).code == 0);
    const auto a = run({"infer", spec, "surround_scene"});
    const auto b = run({"infer", "diverticulum", "surround_scene"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("thresholds and defaults are configurable") {
    TempDir dir;
    const auto loose = run({"infer", "bend", "surround_scene", "--tau", "50"});
    const auto tight = run({"infer", "bend", "surround_scene", "--tau", "0.5"});
    CHECK(loose.code == 0);
    CHECK(loose.out != tight.out);
    const auto d = dir.write("defaults.json", R"({"prior": 0.2})");
    const auto shifted = run({"infer", "bend", "empty", "--defaults", d, "--frames", "1"});
    CHECK(shifted.code == 0);
    CHECK(shifted.out != run({"infer", "bend", "empty", "--frames", "1"}).out);
    CHECK(run({"infer", "bend", "empty", "--tau", "-1"}).code == kExitParse);
}

TEST_CASE("output file") {
    TempDir dir;
    const auto path = dir.write("out.json", "");
    CHECK(run({"generate", "empty", "--frames", "2", "--out", path}).code == 0);
    std::ifstream f(path);
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(text == run({"generate", "empty", "--frames", "2"}).out);
}

}
