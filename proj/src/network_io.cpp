#include "beliefscope/network.hpp"

#include "json_util.hpp"

#include <set>

namespace beliefscope {

using detail::fail;
using detail::get_number;
using detail::get_string;
using detail::ojson;

namespace {

Distribution read_row(const ojson& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Distribution row;
    for (std::size_t i = 0; i < j.size(); ++i) row.push_back(get_number(j[i], path + "/" + std::to_string(i)));
    return row;
}

Matrix read_matrix(const ojson& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of rows");
    Matrix m;
    for (std::size_t i = 0; i < j.size(); ++i) m.push_back(read_row(j[i], path + "/" + std::to_string(i)));
    return m;
}

std::vector<std::string> read_strings(const ojson& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], path + "/" + std::to_string(i)));
    return out;
}

EvaluatorParams read_params(const ojson& j, const std::string& path) {
    detail::require_object(j, path);
    detail::only_keys(j, path, {"tau", "epsilon", "bins"});
    EvaluatorParams p;
    if (j.contains("tau")) p.tau = get_number(j["tau"], path + "/tau");
    if (j.contains("epsilon")) p.epsilon = get_number(j["epsilon"], path + "/epsilon");
    if (j.contains("bins")) p.bins = read_row(j["bins"], path + "/bins");
    return p;
}

NodeSpec read_node(const ojson& j, const std::string& path) {
    detail::require_object(j, path);
    detail::only_keys(j, path, {"id", "kind", "states", "parent", "prior", "cpt", "evaluator", "inputs", "params"});
    NodeSpec n;
    if (!j.contains("id")) fail(path, "missing field 'id'");
    n.id = get_string(j["id"], path + "/id");
    if (n.id.empty()) fail(path + "/id", "node id must be non-empty");
    if (j.contains("kind")) {
        const auto kind = get_string(j["kind"], path + "/kind");
        if (kind == "chance")
            n.kind = NodeKind::chance;
        else if (kind == "relation")
            n.kind = NodeKind::relation;
        else
            fail(path + "/kind", "unknown kind '" + kind + "' (expected chance or relation)");
    }
    if (!j.contains("states")) fail(path, "missing field 'states'");
    n.states = read_strings(j["states"], path + "/states");
    if (j.contains("parent")) {
        const auto& p = j["parent"];
        if (p.is_string())
            n.parents.push_back(p.get<std::string>());
        else if (p.is_array())
            n.parents = read_strings(p, path + "/parent");
        else
            fail(path + "/parent", "expected a node id");
    }
    if (j.contains("prior") && j.contains("cpt")) fail(path, "give either 'prior' or 'cpt', not both");
    if (j.contains("prior"))
        n.cpt.push_back(read_row(j["prior"], path + "/prior"));
    else if (j.contains("cpt"))
        n.cpt = read_matrix(j["cpt"], path + "/cpt");
    else
        fail(path, n.parents.empty() ? "missing field 'prior'" : "missing field 'cpt'");
    if (j.contains("evaluator")) n.evaluator = get_string(j["evaluator"], path + "/evaluator");
    if (j.contains("inputs")) n.inputs = read_strings(j["inputs"], path + "/inputs");
    if (j.contains("params")) n.params = read_params(j["params"], path + "/params");
    return n;
}

FeatureBinding read_binding(const ojson& j, const std::string& path) {
    detail::require_object(j, path);
    detail::only_keys(j, path, {"colour_class", "min_area"});
    FeatureBinding b;
    if (!j.contains("colour_class")) fail(path, "missing field 'colour_class'");
    const auto& c = j["colour_class"];
    if (c.is_string())
        b.colour_classes.push_back(c.get<std::string>());
    else
        b.colour_classes = read_strings(c, path + "/colour_class");
    if (b.colour_classes.empty()) fail(path + "/colour_class", "at least one colour class required");
    if (j.contains("min_area")) b.min_area = get_number(j["min_area"], path + "/min_area");
    return b;
}

WindowSpec read_window(const ojson& j, const std::string& path) {
    detail::require_object(j, path);
    detail::only_keys(j, path, {"max", "delta"});
    WindowSpec w;
    if (j.contains("max")) {
        if (!j["max"].is_number_unsigned()) fail(path + "/max", "expected a non-negative integer");
        w.max = j["max"].get<std::size_t>();
    }
    if (j.contains("delta")) w.delta = get_number(j["delta"], path + "/delta");
    return w;
}

ojson row_json(const Distribution& row) {
    ojson a = ojson::array();
    for (double v : row) a.push_back(v);
    return a;
}

ojson matrix_json(const Matrix& m) {
    ojson a = ojson::array();
    for (const auto& r : m) a.push_back(row_json(r));
    return a;
}

} // namespace

NetworkSpec parse_network_spec(std::string_view text) {
    const ojson j = detail::parse_json(text, "network spec");
    detail::require_object(j, "");
    detail::only_keys(j, "", {"root", "nodes", "bind", "transition", "window"});

    NetworkSpec spec;
    if (j.contains("root")) spec.root = get_string(j["root"], "/root");
    if (!j.contains("nodes")) fail("", "missing field 'nodes'");
    const auto& nodes = j["nodes"];
    if (!nodes.is_array()) fail("/nodes", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "/nodes/" + std::to_string(i);
        auto n = read_node(nodes[i], path);
        if (!ids.insert(n.id).second) fail(path + "/id", "duplicate node id '" + n.id + "'");
        spec.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        for (const auto& p : spec.nodes[i].parents)
            if (!ids.count(p))
                fail("/nodes/" + std::to_string(i) + "/parent",
                     "node '" + spec.nodes[i].id + "' references undeclared parent '" + p + "'");

    if (j.contains("bind")) {
        const auto& b = j["bind"];
        detail::require_object(b, "/bind");
        for (auto it = b.begin(); it != b.end(); ++it)
            spec.bind.emplace_back(it.key(), read_binding(it.value(), "/bind/" + it.key()));
    }
    if (j.contains("transition")) spec.transition = read_matrix(j["transition"], "/transition");
    if (j.contains("window")) spec.window = read_window(j["window"], "/window");
    return spec;
}

std::string serialize_network_spec(const NetworkSpec& spec) {
    ojson j;
    if (spec.root) j["root"] = *spec.root;
    ojson nodes = ojson::array();
    for (const auto& n : spec.nodes) {
        ojson o;
        o["id"] = n.id;
        o["kind"] = std::string(to_string(n.kind));
        o["states"] = n.states;
        if (n.parents.size() == 1)
            o["parent"] = n.parents.front();
        else if (n.parents.size() > 1)
            o["parent"] = n.parents;
        if (n.parents.empty() && n.cpt.size() == 1)
            o["prior"] = row_json(n.cpt.front());
        else
            o["cpt"] = matrix_json(n.cpt);
        if (n.evaluator) o["evaluator"] = *n.evaluator;
        if (!n.inputs.empty()) o["inputs"] = n.inputs;
        if (n.params) {
            ojson p = ojson::object();
            if (n.params->tau) p["tau"] = *n.params->tau;
            if (n.params->epsilon) p["epsilon"] = *n.params->epsilon;
            if (n.params->bins) p["bins"] = row_json(*n.params->bins);
            o["params"] = p;
        }
        nodes.push_back(std::move(o));
    }
    j["nodes"] = std::move(nodes);
    if (!spec.bind.empty()) {
        ojson b = ojson::object();
        for (const auto& [id, binding] : spec.bind) {
            ojson o;
            if (binding.colour_classes.size() == 1)
                o["colour_class"] = binding.colour_classes.front();
            else
                o["colour_class"] = binding.colour_classes;
            if (binding.min_area) o["min_area"] = *binding.min_area;
            b[id] = std::move(o);
        }
        j["bind"] = std::move(b);
    }
    if (spec.transition) j["transition"] = matrix_json(*spec.transition);
    if (spec.window) {
        ojson w;
        w["max"] = spec.window->max;
        if (spec.window->delta) w["delta"] = *spec.window->delta;
        j["window"] = std::move(w);
    }
    return j.dump(2);
}

EvidenceSet parse_evidence(std::string_view text) {
    const ojson j = detail::parse_json(text, "evidence");
    detail::require_object(j, "");
    detail::only_keys(j, "", {"assignments"});
    if (!j.contains("assignments")) fail("", "missing field 'assignments'");
    const auto& a = j["assignments"];
    detail::require_object(a, "/assignments");
    EvidenceSet ev;
    for (auto it = a.begin(); it != a.end(); ++it) {
        if (!ev.assignments.emplace(it.key(), get_string(it.value(), "/assignments/" + it.key())).second)
            fail("/assignments", "node '" + it.key() + "' assigned twice");
    }
    return ev;
}

std::string serialize_evidence(const EvidenceSet& ev) {
    ojson j;
    j["assignments"] = ojson::object();
    for (const auto& [k, v] : ev.assignments) j["assignments"][k] = v;
    return j.dump();
}

} // namespace beliefscope
