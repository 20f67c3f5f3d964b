#include "beliefscope/endoscopy.hpp"

#include "beliefscope/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace beliefscope {

namespace {

constexpr std::array<std::string_view, 4> kModels = {"diverticulum", "bend", "dirty_lens", "lumen_tracker"};

Matrix likelihood(double hit, double false_alarm) {
    return {{hit, complement(hit)}, {false_alarm, complement(false_alarm)}};
}

NodeSpec hypothesis(const std::string& id, const CptDefaults& d) {
    return {id, NodeKind::chance, {id, "not_" + id}, {}, {{d.prior, complement(d.prior)}}, {}, {}, {}};
}

NodeSpec feature(const std::string& id, const std::string& parent, const CptDefaults& d) {
    return {id, NodeKind::chance, {"present", "absent"}, {parent},
            likelihood(d.feature_hit, d.feature_false_alarm), {}, {}, {}};
}

NodeSpec relation(const std::string& id, const std::string& parent, const std::string& evaluator,
                  std::vector<std::string> states, std::vector<std::string> inputs, const CptDefaults& d) {
    return {id, NodeKind::relation, std::move(states), {parent},
            likelihood(d.relation_hit, d.relation_false_alarm), evaluator, std::move(inputs), {}};
}

FeatureBinding colours(std::vector<std::string> c) { return {std::move(c), std::nullopt}; }

void check_probability(double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError(std::string("defaults: '") + key + "' must lie in [0,1]");
}

} // namespace

double complement(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", 1.0 - p);
    return std::stod(buf);
}

CptDefaults parse_defaults(std::string_view text) {
    const auto j = detail::parse_json(text, "defaults");
    detail::require_object(j, "");
    detail::only_keys(j, "", {"prior", "feature_hit", "feature_false_alarm", "relation_hit", "relation_false_alarm",
                              "transition_stay", "window"});
    CptDefaults d;
    auto read = [&](const char* key, double& field) {
        if (!j.contains(key)) return;
        field = detail::get_number(j[key], std::string("/") + key);
        check_probability(field, key);
    };
    read("prior", d.prior);
    read("feature_hit", d.feature_hit);
    read("feature_false_alarm", d.feature_false_alarm);
    read("relation_hit", d.relation_hit);
    read("relation_false_alarm", d.relation_false_alarm);
    read("transition_stay", d.transition_stay);
    if (j.contains("window")) {
        if (!j["window"].is_number_unsigned() || j["window"].get<std::size_t>() < 2)
            detail::fail("/window", "expected an integer >= 2");
        d.window = j["window"].get<std::size_t>();
    }
    return d;
}

std::string serialize_defaults(const CptDefaults& d) {
    detail::ojson j;
    j["prior"] = d.prior;
    j["feature_hit"] = d.feature_hit;
    j["feature_false_alarm"] = d.feature_false_alarm;
    j["relation_hit"] = d.relation_hit;
    j["relation_false_alarm"] = d.relation_false_alarm;
    j["transition_stay"] = d.transition_stay;
    j["window"] = d.window;
    return j.dump(2);
}

std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::relational: return "relational";
    case ModelKind::temporal: return "temporal";
    case ModelKind::dynamic: return "dynamic";
    }
    return "?";
}

ModelKind model_kind(const NetworkSpec& spec) {
    if (spec.window && spec.transition)
        throw ValidationError({"a model takes either 'transition' (semi-static) or 'window' (dynamic), not both"});
    if (spec.window) return ModelKind::dynamic;
    if (spec.transition) return ModelKind::temporal;
    return ModelKind::relational;
}

std::span<const std::string_view> builtin_model_names() { return kModels; }

BuiltinModel builtin_model(std::string_view name, const CptDefaults& d) {
    NetworkSpec s;
    if (name == "diverticulum") {
        // bright region surrounding a (small) dark region
        s.root = "diverticulum";
        s.nodes = {hypothesis("diverticulum", d), feature("bright_region", "diverticulum", d),
                   feature("dark_region", "diverticulum", d),
                   relation("topo_relation", "diverticulum", "surrounding", {"holds", "holds_not"},
                            {"bright_region", "dark_region"}, d)};
        s.bind = {{"bright_region", colours({"bright"})}, {"dark_region", colours({"dark"})}};
        return {"diverticulum", ModelKind::relational, s};
    }
    if (name == "bend") {
        // dark region near a bright arc; the arc is modelled as a bright region
        s.root = "bend";
        s.nodes = {hypothesis("bend", d), feature("dark_region", "bend", d), feature("bright_region", "bend", d),
                   relation("distance_relation", "bend", "distance", {"adjacent", "far"},
                            {"dark_region", "bright_region"}, d)};
        s.bind = {{"dark_region", colours({"dark"})}, {"bright_region", colours({"bright"})}};
        return {"bend", ModelKind::relational, s};
    }
    if (name == "dirty_lens") {
        s.root = "dirty_lens";
        s.nodes = {hypothesis("dirty_lens", d), feature("spot", "dirty_lens", d),
                   relation("static_relation", "dirty_lens", "static", {"holds", "holds_not"}, {"spot"}, d)};
        s.bind = {{"spot", colours({"yellow", "green", "brown"})}};
        s.window = WindowSpec{d.window, std::nullopt};
        return {"dirty_lens", ModelKind::dynamic, s};
    }
    if (name == "lumen_tracker") {
        s.root = "lumen";
        s.nodes = {hypothesis("lumen", d), feature("dark_region", "lumen", d)};
        s.bind = {{"dark_region", colours({"dark"})}};
        const double stay = d.transition_stay;
        s.transition = Matrix{{stay, complement(stay)}, {complement(stay), stay}};
        return {"lumen_tracker", ModelKind::temporal, s};
    }
    throw UnknownName("unknown model '" + std::string(name) + "'");
}

namespace {

// Canonical text for the subtree at `id`; children are sorted so the
// encoding is independent of declaration order and node ids.
std::string canonical(const NetworkSpec& s, const std::string& id, const std::map<std::string, std::string>& sig) {
    std::vector<std::string> kids;
    for (const auto& n : s.nodes)
        if (n.parents.size() == 1 && n.parents.front() == id) kids.push_back(canonical(s, n.id, sig));
    std::sort(kids.begin(), kids.end());
    std::string out = "(" + sig.at(id);
    for (const auto& k : kids) out += k;
    return out + ")";
}

std::optional<std::string> canonical_form(const NetworkSpec& s) {
    const NodeSpec* root = nullptr;
    for (const auto& n : s.nodes) {
        if (n.parents.size() > 1) return std::nullopt;
        if (n.parents.empty()) {
            if (root) return std::nullopt;
            root = &n;
        }
    }
    if (!root) return std::nullopt;

    std::map<std::string, std::string> base;
    for (const auto& n : s.nodes) {
        std::string b = std::string(to_string(n.kind)) + "/" + std::to_string(n.states.size());
        if (&n != root)
            for (const auto& st : n.states) b += "," + st;
        if (n.evaluator) b += "/" + *n.evaluator;
        for (const auto& [id, binding] : s.bind)
            if (id == n.id) {
                auto c = binding.colour_classes;
                std::sort(c.begin(), c.end());
                b += "/bind";
                for (const auto& x : c) b += ":" + x;
                if (binding.min_area) b += "/min" + std::to_string(*binding.min_area);
            }
        base[n.id] = b;
    }
    // Relation inputs refer to other nodes by their own signature, in order.
    std::map<std::string, std::string> sig = base;
    for (const auto& n : s.nodes) {
        if (n.inputs.empty()) continue;
        std::string in = "[";
        for (const auto& i : n.inputs) in += (base.count(i) ? base.at(i) : "?" + i) + ";";
        sig[n.id] += in + "]";
    }
    std::string out = canonical(s, root->id, sig);
    if (s.transition) out += "/transition" + std::to_string(s.transition->size());
    if (s.window) out += "/window";
    return out;
}

} // namespace

bool structurally_isomorphic(const NetworkSpec& a, const NetworkSpec& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    const auto ca = canonical_form(a), cb = canonical_form(b);
    return ca && cb && *ca == *cb;
}

} // namespace beliefscope
