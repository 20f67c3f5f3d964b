#include "beliefscope/cli.hpp"
#include "beliefscope/endoscopy.hpp"
#include "beliefscope/error.hpp"
#include "beliefscope/propagation.hpp"
#include "beliefscope/relational.hpp"
#include "beliefscope/temporal.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
namespace bs = beliefscope;

namespace {

// Documents cross the boundary as JSON text; the Python wrapper decodes them.

bs::InstantiatedNetwork instantiate(const std::string& spec, const std::string& evidence) {
    const auto net = bs::validate_network(bs::parse_network_spec(spec));
    return bs::apply_evidence(net, evidence.empty() ? bs::EvidenceSet{} : bs::parse_evidence(evidence));
}

std::string infer(const std::string& spec, const std::string& evidence, std::uint64_t schedule_seed) {
    return bs::beliefs_to_json(bs::propagate(instantiate(spec, evidence), {schedule_seed}));
}

std::string brute_force(const std::string& spec, const std::string& evidence, std::uint64_t cap) {
    return bs::beliefs_to_json(bs::brute_force_beliefs(instantiate(spec, evidence), cap));
}

bs::RelationParams relation_params(double tau, double epsilon) {
    bs::RelationParams p;
    p.tau = tau;
    p.epsilon = epsilon;
    return p;
}

std::string infer_scene(const std::string& spec, const std::string& scene, double tau, double epsilon) {
    const auto rspec = bs::make_relational_spec(bs::parse_network_spec(spec), relation_params(tau, epsilon));
    const auto regions = bs::parse_scene(scene);
    auto rel = bs::relationalize(rspec, regions);
    return bs::beliefs_to_json(bs::propagate(bs::apply_evidence(rel.network, rel.evidence)));
}

std::vector<std::string> diagnostics(const std::string& spec) {
    const auto s = bs::parse_network_spec(spec);
    switch (bs::model_kind(s)) {
    case bs::ModelKind::dynamic: return bs::dynamic_diagnostics(s);
    default: return bs::relational_diagnostics(s);
    }
}

std::string track(const std::string& spec, const std::string& stream, const std::string& mode,
                  std::optional<std::size_t> window, double tau, double epsilon, double delta) {
    const auto s = bs::parse_network_spec(spec);
    const auto frames = bs::parse_stream(stream);
    const auto m = bs::parse_filter_mode(mode);
    if (!m) throw bs::ContractError("mode must be 'paper' or 'filter'");
    const auto params = relation_params(tau, epsilon);
    switch (bs::model_kind(s)) {
    case bs::ModelKind::temporal:
        return bs::trace_to_jsonl(bs::filter_stream(bs::make_temporal_model(s, *m, params), frames));
    case bs::ModelKind::dynamic: {
        bs::MatchParams match;
        match.delta = delta;
        const auto d = bs::make_dynamic_spec(s, params, match);
        return bs::trace_to_jsonl(bs::track_windows(d, frames, window.value_or(d.max_window)));
    }
    default: throw bs::ContractError("track needs a model with a 'transition' or a 'window'");
    }
}

std::size_t eval_relation(const std::string& kind, const std::string& scene, double tau, double epsilon) {
    const auto k = bs::parse_relation_kind(kind);
    if (!k) throw bs::UnknownName("unknown relation '" + kind + "'");
    const auto regions = bs::parse_scene(scene);
    if (regions.size() != 2) throw bs::ContractError("eval_relation needs a scene with exactly two regions");
    return bs::eval_relation({*k, relation_params(tau, epsilon)}, regions[0], regions[1]);
}

py::tuple run_cli(const std::vector<std::string>& args, const std::string& stdin_text) {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        code = bs::run_cli(args, in, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact belief propagation for recognition networks";

    auto base = py::register_exception<bs::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<bs::ParseError>(m, "ParseError", base.ptr());
    py::register_exception<bs::ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<bs::EvidenceError>(m, "EvidenceError", base.ptr());
    py::register_exception<bs::ImpossibleEvidence>(m, "ImpossibleEvidence", base.ptr());
    py::register_exception<bs::CapExceeded>(m, "CapExceeded", base.ptr());
    py::register_exception<bs::ContractError>(m, "ContractError", base.ptr());
    py::register_exception<bs::UnknownName>(m, "UnknownName", base.ptr());

    m.def("diagnostics", &diagnostics, py::arg("spec"));
    m.def("infer", &infer, py::arg("spec"), py::arg("evidence") = "", py::arg("schedule_seed") = 0);
    m.def("brute_force", &brute_force, py::arg("spec"), py::arg("evidence") = "",
          py::arg("cap") = bs::kDefaultOracleCap);
    m.def("infer_scene", &infer_scene, py::arg("spec"), py::arg("scene"), py::arg("tau") = 2.0,
          py::arg("epsilon") = 2.0);
    m.def("track", &track, py::arg("spec"), py::arg("stream"), py::arg("mode") = "paper",
          py::arg("window") = py::none(), py::arg("tau") = 2.0, py::arg("epsilon") = 2.0, py::arg("delta") = 10.0);
    m.def(
        "semi_static_prior",
        [](const std::vector<double>& prior, const bs::Matrix& transition, const std::vector<double>& prev,
           const std::string& mode) {
            const auto fm = bs::parse_filter_mode(mode);
            if (!fm) throw bs::ContractError("mode must be 'paper' or 'filter'");
            return bs::semi_static_prior(prior, transition, prev, *fm);
        },
        py::arg("prior"), py::arg("transition"), py::arg("prev"), py::arg("mode") = "paper");
    m.def("eval_relation", &eval_relation, py::arg("kind"), py::arg("scene"), py::arg("tau") = 2.0,
          py::arg("epsilon") = 2.0);
    m.def(
        "generate_stream",
        [](const std::string& name, std::uint64_t seed, std::size_t frames) {
            return bs::serialize_stream(bs::generate_stream({name, seed}, frames));
        },
        py::arg("scenario"), py::arg("seed") = 0, py::arg("frames") = 10);
    m.def(
        "compile_rule", [](const std::string& text) { return bs::serialize_network_spec(bs::compile_rule(text)); },
        py::arg("text"));
    m.def(
        "builtin_model",
        [](const std::string& name) { return bs::serialize_network_spec(bs::builtin_model(name).spec); },
        py::arg("name"));
    m.def("builtin_model_names", [] {
        std::vector<std::string> out;
        for (auto n : bs::builtin_model_names()) out.emplace_back(n);
        return out;
    });
    m.def("scenario_names", [] {
        std::vector<std::string> out;
        for (auto n : bs::scenario_names()) out.emplace_back(n);
        return out;
    });
    m.def("run_cli", &run_cli, py::arg("args"), py::arg("stdin") = "");
}
