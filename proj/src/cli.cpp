#include "beliefscope/cli.hpp"

#include "beliefscope/endoscopy.hpp"
#include "beliefscope/error.hpp"
#include "beliefscope/propagation.hpp"
#include "beliefscope/temporal.hpp"
#include "json_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace beliefscope {

namespace {

struct Options {
    std::vector<std::string> positional;
    std::string model, spec, rule;
    std::string scene, stream, scenario, evidence;
    std::string defaults, out;
    std::string mode = "paper";
    std::optional<std::size_t> window;
    std::optional<double> tau, epsilon, delta;
    std::uint64_t seed = 0;
    std::size_t frames = 10;
    std::uint64_t cap = kDefaultOracleCap;
};

struct Context {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    Options opt;
    CptDefaults defaults;
    RelationParams relation;
    MatchParams match;
};

std::string read_file(Context& ctx, const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(ctx.in), std::istreambuf_iterator<char>()};
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void emit(Context& ctx, const std::string& doc) {
    if (ctx.opt.out.empty()) {
        ctx.out << doc;
        if (!doc.empty() && doc.back() != '\n') ctx.out << '\n';
        return;
    }
    std::ofstream f(ctx.opt.out, std::ios::binary);
    f << doc;
    if (!doc.empty() && doc.back() != '\n') f << '\n';
    if (!f) throw std::ios_base::failure("cannot write '" + ctx.opt.out + "'");
}

bool is_builtin(std::string_view name) {
    const auto names = builtin_model_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_scenario(std::string_view name) {
    const auto names = scenario_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

// ----- model and input resolution -----------------------------------------

struct Model {
    NetworkSpec spec;
    ModelKind kind;
};

Model load_model(Context& ctx, std::size_t& next_positional) {
    auto& o = ctx.opt;
    const int given = !o.model.empty() + !o.spec.empty() + !o.rule.empty();
    if (given > 1) throw CLI::ValidationError("give exactly one of --model, --spec, --rule");
    if (given == 0) {
        if (next_positional >= o.positional.size()) throw CLI::ValidationError("no model given");
        const auto& p = o.positional[next_positional++];
        (is_builtin(p) ? o.model : o.spec) = p;
    }
    NetworkSpec spec;
    if (!o.model.empty())
        spec = builtin_model(o.model, ctx.defaults).spec;
    else if (!o.spec.empty())
        spec = parse_network_spec(read_file(ctx, o.spec));
    else
        spec = compile_rule(o.rule, ctx.defaults);
    const auto kind = model_kind(spec);
    return {std::move(spec), kind};
}

struct Input {
    enum class Kind { scene, stream, evidence } kind;
    std::vector<Region> scene;
    FrameStream stream;
    EvidenceSet evidence;
};

Input load_input(Context& ctx, std::size_t& next_positional) {
    auto& o = ctx.opt;
    const int given = !o.scene.empty() + !o.stream.empty() + !o.scenario.empty() + !o.evidence.empty();
    if (given > 1) throw CLI::ValidationError("give exactly one of --scene, --stream, --scenario, --evidence");
    if (given == 0) {
        if (next_positional >= o.positional.size()) throw CLI::ValidationError("no scene, stream or scenario given");
        const auto& p = o.positional[next_positional++];
        if (is_scenario(p)) {
            o.scenario = p;
        } else {
            // Decide by content: a scene or evidence document is one JSON
            // object, a stream is JSONL starting with a dt header.
            const auto text = read_file(ctx, p);
            Input in{Input::Kind::scene, {}, {}, {}};
            bool single = false;
            try {
                const auto j = detail::ojson::parse(text);
                single = j.is_object() && (j.contains("regions") || j.contains("assignments"));
            } catch (const detail::ojson::exception&) {
            }
            if (single && text.find("\"assignments\"") != std::string::npos) {
                in.kind = Input::Kind::evidence;
                in.evidence = parse_evidence(text);
            } else if (single) {
                in.scene = parse_scene(text);
            } else {
                in.kind = Input::Kind::stream;
                in.stream = parse_stream(text);
            }
            return in;
        }
    }
    Input in{Input::Kind::scene, {}, {}, {}};
    if (!o.scene.empty()) {
        in.scene = parse_scene(read_file(ctx, o.scene));
    } else if (!o.evidence.empty()) {
        in.kind = Input::Kind::evidence;
        in.evidence = parse_evidence(read_file(ctx, o.evidence));
    } else if (!o.stream.empty()) {
        in.kind = Input::Kind::stream;
        in.stream = parse_stream(read_file(ctx, o.stream));
    } else {
        in.kind = Input::Kind::stream;
        in.stream = generate_stream({o.scenario, o.seed}, o.frames);
    }
    return in;
}

FilterMode mode_of(const Context& ctx) { return *parse_filter_mode(ctx.opt.mode); }

RelationalSpec per_frame_spec(const Context& ctx, const Model& m) {
    if (m.kind == ModelKind::temporal) return make_temporal_model(m.spec, mode_of(ctx), ctx.relation).per_frame;
    return make_relational_spec(m.spec, ctx.relation);
}

std::size_t window_of(const Context& ctx, const DynamicSpec& d) { return ctx.opt.window.value_or(d.max_window); }

InstantiatedNetwork instantiate_scene(const RelationalSpec& spec, const Input& in, std::span<const Region> regions) {
    if (in.kind == Input::Kind::evidence) return apply_evidence(spec.network(), in.evidence);
    auto rel = relationalize(spec, regions);
    return apply_evidence(rel.network, rel.evidence);
}

/// Every instantiated network the inference for (model, input) runs on.
std::vector<InstantiatedNetwork> instantiate_all(Context& ctx, const Model& m, const Input& in) {
    std::vector<InstantiatedNetwork> nets;
    if (m.kind == ModelKind::dynamic) {
        if (in.kind != Input::Kind::stream) throw ContractError("dynamic models need a frame stream");
        const auto spec = make_dynamic_spec(m.spec, ctx.relation, ctx.match);
        const auto w = std::min(window_of(ctx, spec), spec.max_window);
        if (w < 2) throw ContractError("window >= 2 required");
        if (auto diag = stream_diagnostics(in.stream); !diag.empty()) throw ValidationError(std::move(diag));
        const std::span<const Frame> frames(in.stream.frames);
        for (std::size_t j = 1; j < frames.size(); ++j) {
            const std::size_t first = j + 1 >= w ? j + 1 - w : 0;
            auto rel = build_dynamic_window(spec, frames.subspan(first, j - first + 1));
            nets.push_back(apply_evidence(rel.network, rel.evidence));
        }
        return nets;
    }
    const auto spec = per_frame_spec(ctx, m);
    if (in.kind != Input::Kind::stream) {
        nets.push_back(instantiate_scene(spec, in, in.scene));
        return nets;
    }
    if (m.kind == ModelKind::temporal) {
        const auto model = make_temporal_model(m.spec, mode_of(ctx), ctx.relation);
        const auto trace = filter_stream(model, in.stream);
        for (std::size_t i = 0; i < trace.entries.size(); ++i)
            nets.push_back(instantiate_scene(spec.with_prior(trace.entries[i].effective_prior), in,
                                             in.stream.frames[i].regions));
        return nets;
    }
    for (const auto& f : in.stream.frames) nets.push_back(instantiate_scene(spec, in, f.regions));
    return nets;
}

// ----- subcommands ----------------------------------------------------------

int cmd_validate(Context& ctx) {
    std::size_t pos = 0;
    const auto m = load_model(ctx, pos);
    std::vector<std::string> diag;
    switch (m.kind) {
    case ModelKind::relational: diag = relational_diagnostics(m.spec); break;
    case ModelKind::dynamic: diag = dynamic_diagnostics(m.spec); break;
    case ModelKind::temporal:
        try {
            make_temporal_model(m.spec, mode_of(ctx), ctx.relation);
        } catch (const ValidationError& e) {
            diag = e.diagnostics();
        }
        break;
    }
    if (!diag.empty()) {
        for (const auto& d : diag) ctx.err << "error: " << d << '\n';
        return kExitInvalid;
    }
    detail::ojson j;
    j["valid"] = true;
    j["kind"] = std::string(to_string(m.kind));
    j["nodes"] = m.spec.nodes.size();
    emit(ctx, j.dump());
    return kExitOk;
}

int cmd_compile(Context& ctx) {
    auto& o = ctx.opt;
    if (o.rule.empty()) {
        if (o.positional.empty()) throw CLI::ValidationError("no rule text given");
        for (const auto& p : o.positional) o.rule += (o.rule.empty() ? "" : " ") + p;
    }
    emit(ctx, serialize_network_spec(compile_rule(o.rule, ctx.defaults)));
    return kExitOk;
}

int cmd_infer(Context& ctx) {
    std::size_t pos = 0;
    const auto m = load_model(ctx, pos);
    auto in = load_input(ctx, pos);
    if (m.kind == ModelKind::dynamic) throw ContractError("dynamic models need a frame stream; use track");
    if (in.kind == Input::Kind::stream) {
        if (in.stream.frames.empty()) throw ContractError("stream has no frames");
        in.scene = in.stream.frames.front().regions;
        in.kind = Input::Kind::scene;
    }
    const auto spec = per_frame_spec(ctx, m);
    emit(ctx, beliefs_to_json(propagate(instantiate_scene(spec, in, in.scene))));
    return kExitOk;
}

int cmd_track(Context& ctx) {
    std::size_t pos = 0;
    const auto m = load_model(ctx, pos);
    const auto in = load_input(ctx, pos);
    if (in.kind != Input::Kind::stream) throw ContractError("track needs a frame stream");

    BeliefTrace trace;
    if (m.kind == ModelKind::temporal) {
        trace = filter_stream(make_temporal_model(m.spec, mode_of(ctx), ctx.relation), in.stream);
    } else if (m.kind == ModelKind::dynamic) {
        const auto spec = make_dynamic_spec(m.spec, ctx.relation, ctx.match);
        trace = track_windows(spec, in.stream, window_of(ctx, spec));
    } else {
        if (auto diag = stream_diagnostics(in.stream); !diag.empty()) throw ValidationError(std::move(diag));
        const auto spec = make_relational_spec(m.spec, ctx.relation);
        const auto& h = spec.network().node(spec.network().root());
        trace = {h.id, h.states, {}};
        for (const auto& f : in.stream.frames) {
            auto rel = relationalize(spec, f.regions);
            TraceEntry e;
            e.index = f.index;
            e.effective_prior = spec.network().prior();
            try {
                e.posterior = propagate(apply_evidence(rel.network, rel.evidence)).at(h.id).p;
            } catch (const ImpossibleEvidence& x) {
                throw ImpossibleEvidence(x.node(), f.index);
            }
            e.bindings = std::move(rel.bindings);
            trace.entries.push_back(std::move(e));
        }
    }
    emit(ctx, trace_to_jsonl(trace));
    return kExitOk;
}

int cmd_generate(Context& ctx) {
    auto& o = ctx.opt;
    if (o.scenario.empty()) {
        if (o.positional.empty()) throw CLI::ValidationError("no scenario given");
        o.scenario = o.positional.front();
    }
    emit(ctx, serialize_stream(generate_stream({o.scenario, o.seed}, o.frames)));
    return kExitOk;
}

int cmd_check(Context& ctx) {
    std::size_t pos = 0;
    const auto m = load_model(ctx, pos);
    const auto in = load_input(ctx, pos);
    const auto nets = instantiate_all(ctx, m, in);
    double worst = 0.0;
    for (const auto& n : nets) worst = std::max(worst, max_abs_diff(propagate(n), brute_force_beliefs(n, ctx.opt.cap)));
    detail::ojson j;
    j["checked"] = nets.size();
    j["max_abs_diff"] = worst;
    j["tolerance"] = kOracleTolerance;
    emit(ctx, j.dump());
    if (!(worst < kOracleTolerance)) {
        ctx.err << "error: propagation differs from enumeration by " << worst << '\n';
        return kExitMismatch;
    }
    return kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("args", o.positional, "model, input, scenario or rule text");
    sub->add_option("--model", o.model, "builtin model name");
    sub->add_option("--spec", o.spec, "model spec file");
    sub->add_option("--rule", o.rule, "rule text");
    sub->add_option("--scene", o.scene, "scene file");
    sub->add_option("--stream", o.stream, "frame stream file ('-' for stdin)");
    sub->add_option("--scenario", o.scenario, "synthetic scenario name");
    sub->add_option("--evidence", o.evidence, "evidence file");
    sub->add_option("--defaults", o.defaults, "CPT defaults file");
    sub->add_option("--mode", o.mode, "semi-static update: paper or filter")
        ->check(CLI::IsMember({"paper", "filter"}));
    sub->add_option("--window", o.window, "frames per dynamic window");
    sub->add_option("--tau", o.tau, "adjacency threshold (px)");
    sub->add_option("--epsilon", o.epsilon, "static displacement threshold (px)");
    sub->add_option("--delta", o.delta, "max centroid distance for frame matching (px)");
    sub->add_option("--seed", o.seed, "scenario seed");
    sub->add_option("--frames", o.frames, "scenario frame count");
    sub->add_option("--cap", o.cap, "oracle joint-state cap");
    sub->add_option("--out", o.out, "write the output document here");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Context ctx{in, out, err, {}, {}, {}, {}};
    CLI::App app{"beliefscope: exact inference for relational and temporal recognition networks", "beliefscope"};
    app.require_subcommand(1);
    struct Command {
        const char* name;
        const char* help;
        int (*run)(Context&);
    };
    const Command commands[] = {
        {"validate", "check a model spec and print every diagnostic", cmd_validate},
        {"compile", "compile an IF/THEN rule into a model spec", cmd_compile},
        {"infer", "single-scene inference", cmd_infer},
        {"track", "filter a frame stream", cmd_track},
        {"generate", "emit a synthetic frame stream", cmd_generate},
        {"check", "compare propagation with exhaustive enumeration", cmd_check},
    };
    for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), ctx.opt);

    std::vector<std::string> argv(args.rbegin(), args.rend()); // CLI11 consumes from the back
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParse;
    }

    auto& o = ctx.opt;
    try {
        if (o.tau && !(*o.tau > 0)) throw CLI::ValidationError("--tau must be positive");
        if (o.epsilon && !(*o.epsilon > 0)) throw CLI::ValidationError("--epsilon must be positive");
        if (o.delta && !(*o.delta > 0)) throw CLI::ValidationError("--delta must be positive");
        if (o.tau) ctx.relation.tau = *o.tau;
        if (o.epsilon) ctx.relation.epsilon = *o.epsilon;
        if (o.delta) ctx.match.delta = *o.delta;
        if (!o.defaults.empty()) ctx.defaults = parse_defaults(read_file(ctx, o.defaults));

        for (const auto& c : commands)
            if (app.got_subcommand(c.name)) return c.run(ctx);
        return kExitParse;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const UnknownName& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << " (raise --cap)\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        for (const auto& d : e.diagnostics()) err << "error: " << d << '\n';
        return kExitInvalid;
    } catch (const ImpossibleEvidence& e) {
        err << "error: " << e.what() << '\n';
        return kExitImpossible;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

} // namespace beliefscope
