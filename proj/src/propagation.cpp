#include "beliefscope/propagation.hpp"

#include "beliefscope/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace beliefscope {

namespace {

bool normalize(Distribution& v) {
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(sum > 0.0)) return false;
    for (double& x : v) x /= sum;
    return true;
}

Distribution evidence_indicator(const InstantiatedNetwork& inet, std::size_t node) {
    const auto k = inet.network().state_count(node);
    if (const auto& c = inet.clamp(node)) {
        Distribution v(k, 0.0);
        v[*c] = 1.0;
        return v;
    }
    return Distribution(k, 1.0);
}

Beliefs package(const Network& net, std::vector<Distribution> post) {
    std::vector<NodeBelief> out;
    out.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i)
        out.push_back({net.node(i).id, net.node(i).states, std::move(post[i])});
    return Beliefs(std::move(out));
}

} // namespace

const NodeBelief& Beliefs::at(std::string_view id) const {
    for (const auto& b : nodes_)
        if (b.id == id) return b;
    throw UnknownName("no belief for node '" + std::string(id) + "'");
}

double Beliefs::p(std::string_view id, std::string_view state) const {
    const auto& b = at(id);
    for (std::size_t k = 0; k < b.states.size(); ++k)
        if (b.states[k] == state) return b.p[k];
    throw UnknownName("node '" + std::string(id) + "' has no state '" + std::string(state) + "'");
}

Beliefs propagate(const InstantiatedNetwork& inet, const PropagationOptions& options) {
    const Network& net = inet.network();
    const std::size_t n = net.size();
    const auto order = net.order();

    std::vector<std::vector<std::size_t>> kids(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = net.children(i);
        kids[i].assign(c.begin(), c.end());
    }
    if (options.schedule_seed != 0) {
        std::mt19937_64 rng(options.schedule_seed);
        for (auto& k : kids) std::shuffle(k.begin(), k.end(), rng);
    }

    // Upward pass: lambda[i] is the evidence from i's own clamp and subtree,
    // up[i] the message i sends to its parent.
    std::vector<Distribution> lambda(n), up(n);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t x = *it;
        Distribution lam = evidence_indicator(inet, x);
        for (auto c : kids[x])
            for (std::size_t s = 0; s < lam.size(); ++s) lam[s] *= up[c][s];
        if (!normalize(lam)) throw ImpossibleEvidence(net.node(x).id);
        lambda[x] = std::move(lam);

        if (const auto p = net.parent(x); p != Network::npos) {
            const auto& cpt = net.node(x).cpt;
            Distribution msg(net.state_count(p), 0.0);
            for (std::size_t u = 0; u < msg.size(); ++u)
                for (std::size_t s = 0; s < lambda[x].size(); ++s) msg[u] += cpt[u][s] * lambda[x][s];
            if (!normalize(msg)) throw ImpossibleEvidence(net.node(x).id);
            up[x] = std::move(msg);
        }
    }

    // Downward pass: pi[i] is the causal support reaching i from above.
    std::vector<Distribution> pi(n), post(n);
    pi[net.root()] = net.prior();
    for (const std::size_t x : order) {
        Distribution bel = pi[x];
        for (std::size_t s = 0; s < bel.size(); ++s) bel[s] *= lambda[x][s];
        if (!normalize(bel)) throw ImpossibleEvidence(net.node(x).id);
        post[x] = std::move(bel);

        const Distribution own = evidence_indicator(inet, x);
        for (auto c : kids[x]) {
            Distribution msg = pi[x];
            for (std::size_t s = 0; s < msg.size(); ++s) msg[s] *= own[s];
            for (auto other : kids[x])
                if (other != c)
                    for (std::size_t s = 0; s < msg.size(); ++s) msg[s] *= up[other][s];
            if (!normalize(msg)) throw ImpossibleEvidence(net.node(x).id);

            const auto& cpt = net.node(c).cpt;
            Distribution child_pi(net.state_count(c), 0.0);
            for (std::size_t u = 0; u < msg.size(); ++u)
                for (std::size_t s = 0; s < child_pi.size(); ++s) child_pi[s] += msg[u] * cpt[u][s];
            if (!normalize(child_pi)) throw ImpossibleEvidence(net.node(c).id);
            pi[c] = std::move(child_pi);
        }
    }
    return package(net, std::move(post));
}

Beliefs brute_force_beliefs(const InstantiatedNetwork& inet, std::uint64_t state_cap) {
    const Network& net = inet.network();
    const std::size_t n = net.size();

    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t k = net.state_count(i);
        if (total > state_cap / k)
            throw CapExceeded("joint state space exceeds oracle cap of " + std::to_string(state_cap));
        total *= k;
    }

    // Nodes are assigned in breadth-first order so a node's parent is always
    // fixed before the node itself.
    const auto order = net.order();
    std::vector<std::size_t> assign(n, 0);
    std::vector<Distribution> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i].assign(net.state_count(i), 0.0);
    double z = 0.0;

    auto visit = [&](auto&& self, std::size_t depth, double weight) -> void {
        if (depth == n) {
            z += weight;
            for (std::size_t i = 0; i < n; ++i) mass[i][assign[i]] += weight;
            return;
        }
        const std::size_t x = order[depth];
        const auto p = net.parent(x);
        const auto& row = net.node(x).cpt[p == Network::npos ? 0 : assign[p]];
        const auto& clamp = inet.clamp(x);
        const std::size_t lo = clamp ? *clamp : 0;
        const std::size_t hi = clamp ? *clamp + 1 : row.size();
        for (std::size_t s = lo; s < hi; ++s) {
            const double w = weight * row[s];
            if (w == 0.0) continue;
            assign[x] = s;
            self(self, depth + 1, w);
        }
    };
    visit(visit, 0, 1.0);

    if (!(z > 0.0)) {
        // Report the first node, in breadth-first order, whose observed state
        // is unreachable given the evidence fixed above it.
        for (const auto x : order)
            if (inet.observed(x)) throw ImpossibleEvidence(net.node(x).id);
        throw ImpossibleEvidence(net.node(net.root()).id);
    }
    for (auto& m : mass)
        for (double& v : m) v /= z;
    return package(net, std::move(mass));
}

std::map<std::string, std::string> map_assignment(const Beliefs& beliefs) {
    std::map<std::string, std::string> out;
    for (const auto& b : beliefs.nodes()) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < b.p.size(); ++k)
            if (b.p[k] > b.p[best]) best = k;
        out.emplace(b.id, b.states.at(best));
    }
    return out;
}

double max_abs_diff(const Beliefs& a, const Beliefs& b) {
    if (a.nodes().size() != b.nodes().size()) throw ContractError("belief sets cover different nodes");
    double worst = 0.0;
    for (const auto& x : a.nodes()) {
        const auto& y = b.at(x.id);
        if (x.p.size() != y.p.size()) throw ContractError("state count mismatch at node '" + x.id + "'");
        for (std::size_t k = 0; k < x.p.size(); ++k) worst = std::max(worst, std::abs(x.p[k] - y.p[k]));
    }
    return worst;
}

std::string beliefs_to_json(const Beliefs& beliefs) {
    detail::ojson body = detail::ojson::object();
    for (const auto& b : beliefs.nodes()) {
        detail::ojson d = detail::ojson::object();
        for (std::size_t k = 0; k < b.states.size(); ++k) d[b.states[k]] = detail::round10(b.p[k]);
        body[b.id] = std::move(d);
    }
    detail::ojson j;
    j["beliefs"] = std::move(body);
    return j.dump();
}

} // namespace beliefscope
