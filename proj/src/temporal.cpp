#include "beliefscope/temporal.hpp"

#include "beliefscope/error.hpp"
#include "beliefscope/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

namespace beliefscope {

std::string_view to_string(FilterMode m) { return m == FilterMode::paper ? "paper" : "filter"; }

std::optional<FilterMode> parse_filter_mode(std::string_view s) {
    if (s == "paper") return FilterMode::paper;
    if (s == "filter") return FilterMode::filter;
    return std::nullopt;
}

std::vector<std::string> stream_diagnostics(const FrameStream& stream) {
    std::vector<std::string> diag;
    if (!(stream.dt > 0) || !std::isfinite(stream.dt)) diag.push_back("stream dt must be positive");
    for (std::size_t i = 0; i < stream.frames.size(); ++i) {
        const auto& f = stream.frames[i];
        const std::string who = "frame " + std::to_string(f.index);
        if (f.index < 0) diag.push_back(who + ": index must be non-negative");
        if (i > 0) {
            const auto& prev = stream.frames[i - 1];
            if (f.index <= prev.index)
                diag.push_back(who + ": index not greater than previous index " + std::to_string(prev.index));
            if (f.t < prev.t) diag.push_back(who + ": timestamp decreases");
            else if (stream.dt > 0 && std::abs((f.t - prev.t) - stream.dt) > 0.1 * stream.dt + 1e-12)
                diag.push_back(who + ": interval " + std::to_string(f.t - prev.t) + " s differs from dt by more than 10%");
        }
        std::set<std::string> ids;
        for (const auto& r : f.regions) {
            try {
                check_region(r);
            } catch (const ContractError& e) {
                diag.push_back(who + ": " + e.what());
            }
            if (!ids.insert(r.id).second) diag.push_back(who + ": duplicate region id '" + r.id + "'");
        }
    }
    return diag;
}

Distribution semi_static_prior(std::span<const double> prior, const Matrix& transition,
                               std::span<const double> prev_belief, FilterMode mode) {
    const std::size_t k = prior.size();
    if (prev_belief.size() != k || transition.size() != k)
        throw ContractError("semi-static prior: dimension mismatch");
    for (const auto& row : transition)
        if (row.size() != k) throw ContractError("semi-static prior: transition must be square");

    Distribution out(k, 0.0);
    for (std::size_t h = 0; h < k; ++h) {
        double mixed = 0.0;
        for (std::size_t prev = 0; prev < k; ++prev) mixed += transition[prev][h] * prev_belief[prev];
        out[h] = mode == FilterMode::paper ? prior[h] * mixed : mixed;
    }
    const double z = std::accumulate(out.begin(), out.end(), 0.0);
    if (!(z > 0.0)) throw ContractError("semi-static prior vanished: prior and transition support are disjoint");
    for (double& v : out) v /= z;
    return out;
}

TemporalModel make_temporal_model(const NetworkSpec& spec, FilterMode mode, const RelationParams& defaults) {
    std::vector<std::string> diag = relational_diagnostics(spec);
    std::size_t k = 0;
    if (diag.empty()) {
        const auto& root = *std::find_if(spec.nodes.begin(), spec.nodes.end(), [](const NodeSpec& n) { return n.is_root(); });
        k = root.states.size();
    }
    if (!spec.transition) {
        diag.push_back("temporal model needs a 'transition' table");
    } else if (k > 0) {
        const auto& t = *spec.transition;
        if (t.size() != k)
            diag.push_back("transition has " + std::to_string(t.size()) + " rows; expected " + std::to_string(k));
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i].size() != k) {
                diag.push_back("transition row " + std::to_string(i) + " has " + std::to_string(t[i].size()) +
                               " entries; expected " + std::to_string(k));
                continue;
            }
            double sum = 0.0;
            bool ok = true;
            for (double v : t[i]) {
                ok = ok && std::isfinite(v) && v >= 0.0 && v <= 1.0;
                sum += v;
            }
            if (!ok) diag.push_back("transition row " + std::to_string(i) + " has entries outside [0,1]");
            else if (std::abs(sum - 1.0) > kRowSumTolerance)
                diag.push_back("transition row " + std::to_string(i) + ": row sum " + std::to_string(sum) + " ≠ 1");
        }
    }
    if (!diag.empty()) throw ValidationError(std::move(diag));

    TemporalModel model{make_relational_spec(spec, defaults), *spec.transition, mode};
    for (auto& row : model.transition) {
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& v : row) v /= sum;
    }
    return model;
}

BeliefTrace filter_stream(const TemporalModel& model, const FrameStream& stream) {
    if (stream.frames.empty()) throw ContractError("cannot filter an empty stream");
    if (auto diag = stream_diagnostics(stream); !diag.empty()) throw ValidationError(std::move(diag));

    const auto& h = model.hypothesis();
    BeliefTrace trace{h.id, h.states, {}};
    const Distribution& prior = model.per_frame.network().prior();
    Distribution prev;
    for (const auto& frame : stream.frames) {
        TraceEntry entry;
        entry.index = frame.index;
        try {
            entry.effective_prior =
                prev.empty() ? prior : semi_static_prior(prior, model.transition, prev, model.mode);
        } catch (const ContractError&) {
            throw ImpossibleEvidence(h.id, frame.index);
        }
        const auto spec = model.per_frame.with_prior(entry.effective_prior);
        auto rel = relationalize(spec, frame.regions);
        try {
            const auto beliefs = propagate(apply_evidence(rel.network, rel.evidence));
            entry.posterior = beliefs.at(h.id).p;
        } catch (const ImpossibleEvidence& e) {
            throw ImpossibleEvidence(e.node(), frame.index);
        }
        entry.bindings = std::move(rel.bindings);
        prev = entry.posterior;
        trace.entries.push_back(std::move(entry));
    }
    return trace;
}

Matching match_regions(const Frame& prev, const Frame& cur, const MatchParams& params) {
    struct Candidate {
        double distance;
        const std::string* a;
        const std::string* b;
    };
    std::vector<Candidate> cands;
    for (const auto& a : prev.regions)
        for (const auto& b : cur.regions) {
            if (a.colour != b.colour) continue;
            const double ratio = static_cast<double>(b.area) / static_cast<double>(a.area);
            if (ratio < params.min_area_ratio || ratio > params.max_area_ratio) continue;
            const double d = centroid_distance(a, b);
            if (d > params.delta) continue;
            cands.push_back({d, &a.id, &b.id});
        }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        return std::tie(x.distance, *x.a, *x.b) < std::tie(y.distance, *y.a, *y.b);
    });

    Matching out;
    std::set<std::string> used_prev, used_cur;
    for (const auto& c : cands) {
        if (used_prev.count(*c.a) || used_cur.count(*c.b)) continue;
        used_prev.insert(*c.a);
        used_cur.insert(*c.b);
        out.emplace_back(*c.a, *c.b);
    }
    return out;
}

std::vector<std::string> dynamic_diagnostics(const NetworkSpec& spec) {
    auto diag = relational_diagnostics(spec, 1);
    if (!diag.empty()) return diag;

    const NodeSpec* root = nullptr;
    for (const auto& n : spec.nodes)
        if (n.is_root()) root = &n;
    std::set<std::string> bound;
    for (const auto& [id, b] : spec.bind) bound.insert(id);
    for (const auto& n : spec.nodes) {
        if (&n == root) continue;
        if (n.parents.front() != root->id)
            diag.push_back("node '" + n.id + "': window templates only allow children of the root");
        if (n.kind == NodeKind::chance && !bound.count(n.id))
            diag.push_back("node '" + n.id + "': per-frame feature must be bound to a region predicate");
        if (n.kind == NodeKind::relation)
            for (const auto& in : n.inputs)
                if (!bound.count(in)) diag.push_back("node '" + n.id + "': input '" + in + "' is not a bound feature");
    }
    if (spec.window) {
        if (spec.window->max < 2) diag.push_back("window max must be at least 2");
        if (spec.window->delta && !(*spec.window->delta > 0)) diag.push_back("window delta must be positive");
    }
    return diag;
}

DynamicSpec make_dynamic_spec(const NetworkSpec& spec, const RelationParams& defaults, const MatchParams& match) {
    if (auto diag = dynamic_diagnostics(spec); !diag.empty()) throw ValidationError(std::move(diag));
    DynamicSpec out{make_relational_spec(spec, defaults, 1), 5, match};
    if (spec.window) {
        out.max_window = spec.window->max;
        if (spec.window->delta) out.match.delta = *spec.window->delta;
    }
    if (!(out.match.delta > 0)) throw ValidationError({"match delta must be positive"});
    return out;
}

Relationalized build_dynamic_window(const DynamicSpec& spec, std::span<const Frame> window) {
    const std::size_t k = window.size();
    if (k < 2) throw ContractError("window >= 2 required, got " + std::to_string(k) + " frame(s)");
    if (k > spec.max_window)
        throw ContractError("window of " + std::to_string(k) + " frames exceeds the configured max of " +
                            std::to_string(spec.max_window));
    for (std::size_t i = 1; i < k; ++i)
        if (window[i].index <= window[i - 1].index) throw ContractError("window frames out of order");

    const Network& tmpl = spec.frame_template.network();
    const NodeSpec& root = tmpl.node(tmpl.root());
    auto unrolled_id = [](const std::string& id, std::size_t i) { return id + "_" + std::to_string(i); };

    NetworkSpec net;
    net.root = root.id;
    net.nodes.push_back(root);
    // Feature instances first (grouped by frame), then the cross-frame links.
    for (std::size_t i = 1; i <= k; ++i)
        for (const auto& f : spec.frame_template.features()) {
            NodeSpec n = tmpl.node(f.node);
            n.id = unrolled_id(n.id, i);
            net.nodes.push_back(std::move(n));
        }
    for (std::size_t i = 1; i < k; ++i)
        for (const auto& r : spec.frame_template.relations()) {
            NodeSpec n = tmpl.node(r.node);
            const auto& input = tmpl.node(r.inputs.front()).id;
            n.id = unrolled_id(n.id, i);
            n.inputs = {unrolled_id(input, i), unrolled_id(input, i + 1)};
            net.nodes.push_back(std::move(n));
        }
    if (auto diag = network_diagnostics(net); !diag.empty()) throw ValidationError(std::move(diag));

    Relationalized out{validate_network(net), {}, {}};

    // region bound to each (feature template node, frame)
    std::map<std::pair<std::size_t, std::size_t>, const Region*> bound;
    for (std::size_t i = 0; i < k; ++i) {
        for (const auto& r : window[i].regions) check_region(r);
        for (const auto& f : spec.frame_template.features()) {
            const auto& fnode = tmpl.node(f.node);
            const auto hit = bind_feature(f, window[i].regions);
            const auto id = unrolled_id(fnode.id, i + 1);
            out.evidence.assignments[id] = fnode.states[hit ? 0 : 1];
            if (hit) {
                bound[{f.node, i}] = &window[i].regions[*hit];
                out.bindings[id] = window[i].regions[*hit].id;
            }
        }
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const auto matching = match_regions(window[i], window[i + 1], spec.match);
        for (const auto& r : spec.frame_template.relations()) {
            const auto a = bound.find({r.inputs.front(), i});
            const auto b = bound.find({r.inputs.front(), i + 1});
            if (a == bound.end() || b == bound.end()) continue;
            const bool paired = std::find(matching.begin(), matching.end(),
                                          std::pair{a->second->id, b->second->id}) != matching.end();
            if (!paired) continue;
            const auto& rnode = tmpl.node(r.node);
            out.evidence.assignments[unrolled_id(rnode.id, i + 1)] =
                rnode.states[eval_relation(r.relation, *a->second, *b->second)];
        }
    }
    return out;
}

BeliefTrace track_windows(const DynamicSpec& spec, const FrameStream& stream, std::size_t window) {
    if (auto diag = stream_diagnostics(stream); !diag.empty()) throw ValidationError(std::move(diag));
    if (window < 2) throw ContractError("window >= 2 required, got " + std::to_string(window));
    window = std::min(window, spec.max_window);

    const auto& h = spec.hypothesis();
    BeliefTrace trace{h.id, h.states, {}};
    const std::span<const Frame> frames(stream.frames);
    for (std::size_t j = 1; j < frames.size(); ++j) {
        const std::size_t first = j + 1 >= window ? j + 1 - window : 0;
        const auto slice = frames.subspan(first, j - first + 1);
        auto rel = build_dynamic_window(spec, slice);
        TraceEntry entry;
        entry.index = frames[j].index;
        entry.effective_prior = rel.network.prior();
        entry.window = std::pair{slice.front().index, slice.back().index};
        try {
            entry.posterior = propagate(apply_evidence(rel.network, rel.evidence)).at(h.id).p;
        } catch (const ImpossibleEvidence& e) {
            throw ImpossibleEvidence(e.node(), frames[j].index);
        }
        entry.bindings = std::move(rel.bindings);
        trace.entries.push_back(std::move(entry));
    }
    return trace;
}

} // namespace beliefscope
