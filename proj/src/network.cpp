#include "beliefscope/network.hpp"

#include "beliefscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace beliefscope {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

} // namespace

std::string_view to_string(NodeKind kind) {
    return kind == NodeKind::chance ? "chance" : "relation";
}

const NodeSpec* NetworkSpec::find(std::string_view id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

NodeSpec* NetworkSpec::find(std::string_view id) {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

std::vector<std::string> network_diagnostics(const NetworkSpec& spec) {
    std::vector<std::string> diag;
    if (spec.nodes.empty()) {
        diag.push_back("network has no nodes");
        return diag;
    }

    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& n = spec.nodes[i];
        if (!index.emplace(n.id, i).second)
            diag.push_back("duplicate node id " + quoted(n.id));
        if (n.states.size() < 2)
            diag.push_back("node " + quoted(n.id) + " has " + std::to_string(n.states.size()) +
                           " state(s); at least 2 required");
        std::set<std::string> seen;
        for (const auto& s : n.states)
            if (!seen.insert(s).second)
                diag.push_back("node " + quoted(n.id) + " declares state " + quoted(s) + " twice");
    }

    // Parent link used for structure checks; npos when absent or unusable.
    std::vector<std::size_t> parent(spec.nodes.size(), Network::npos);
    std::vector<std::string> roots;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& n = spec.nodes[i];
        if (n.parents.empty()) {
            roots.push_back(n.id);
            continue;
        }
        if (n.parents.size() > 1)
            diag.push_back("node " + n.id + " has " + std::to_string(n.parents.size()) +
                           " parents; tree required");
        for (const auto& p : n.parents)
            if (!index.count(p))
                diag.push_back("node " + quoted(n.id) + " references undeclared parent " + quoted(p));
        if (n.parents.size() == 1) {
            if (auto it = index.find(n.parents.front()); it != index.end())
                parent[i] = it->second;
        }
    }

    if (roots.empty()) {
        diag.push_back("no root: every node has a parent");
    } else if (roots.size() > 1) {
        std::string list;
        for (const auto& r : roots) list += (list.empty() ? "" : ", ") + r;
        diag.push_back("multiple roots: " + list + "; exactly one parentless node required");
    }
    if (spec.root) {
        if (!index.count(*spec.root))
            diag.push_back("declared root " + quoted(*spec.root) + " is not a node");
        else if (std::find(roots.begin(), roots.end(), *spec.root) == roots.end())
            diag.push_back("declared root " + quoted(*spec.root) + " has a parent");
    }

    // Reachability from the parentless nodes, then classify the rest.
    std::vector<bool> reached(spec.nodes.size(), false);
    {
        std::vector<std::vector<std::size_t>> kids(spec.nodes.size());
        for (std::size_t i = 0; i < parent.size(); ++i)
            if (parent[i] != Network::npos) kids[parent[i]].push_back(i);
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < spec.nodes.size(); ++i)
            if (spec.nodes[i].parents.empty()) {
                reached[i] = true;
                queue.push_back(i);
            }
        while (!queue.empty()) {
            auto u = queue.front();
            queue.pop_front();
            for (auto c : kids[u])
                if (!reached[c]) {
                    reached[c] = true;
                    queue.push_back(c);
                }
        }
    }
    std::vector<bool> reported(spec.nodes.size(), false);
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        if (reached[i] || reported[i] || spec.nodes[i].parents.size() != 1 || parent[i] == Network::npos)
            continue;
        // Walk parent links; revisiting a node on the current path is a cycle.
        std::vector<std::size_t> path;
        std::vector<int> pos(spec.nodes.size(), -1);
        std::size_t cur = i;
        while (cur != Network::npos && pos[cur] < 0 && !reached[cur] && !reported[cur]) {
            pos[cur] = static_cast<int>(path.size());
            path.push_back(cur);
            cur = parent[cur];
        }
        if (cur != Network::npos && pos[cur] >= 0) {
            std::string chain;
            for (std::size_t k = static_cast<std::size_t>(pos[cur]); k < path.size(); ++k)
                chain += spec.nodes[path[k]].id + " -> ";
            chain += spec.nodes[cur].id;
            diag.push_back("cycle: " + chain);
            for (std::size_t k = static_cast<std::size_t>(pos[cur]); k < path.size(); ++k)
                reported[path[k]] = true;
        }
    }
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        if (!reached[i] && !reported[i] && spec.nodes[i].parents.size() == 1 && parent[i] != Network::npos)
            diag.push_back("node " + quoted(spec.nodes[i].id) + " is not reachable from the root");

    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& n = spec.nodes[i];
        const std::string who = "node " + quoted(n.id);
        std::optional<std::size_t> expected_rows;
        if (n.parents.empty())
            expected_rows = 1;
        else if (parent[i] != Network::npos)
            expected_rows = spec.nodes[parent[i]].states.size();

        if (expected_rows && n.cpt.size() != *expected_rows) {
            if (n.parents.empty())
                diag.push_back(who + ": prior must be a single distribution, got " +
                               std::to_string(n.cpt.size()) + " rows");
            else
                diag.push_back(who + ": cpt has " + std::to_string(n.cpt.size()) + " rows; expected " +
                               std::to_string(*expected_rows) + " (one per state of parent " +
                               quoted(n.parents.front()) + ")");
        }
        for (std::size_t r = 0; r < n.cpt.size(); ++r) {
            const auto& row = n.cpt[r];
            const std::string where = " (cpt row " + std::to_string(r) + ")";
            if (row.size() != n.states.size()) {
                diag.push_back(who + ": row has " + std::to_string(row.size()) + " entries; expected " +
                               std::to_string(n.states.size()) + where);
                continue;
            }
            bool finite = true;
            double sum = 0.0;
            for (std::size_t k = 0; k < row.size(); ++k) {
                const double v = row[k];
                if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                    diag.push_back(who + ": entry " + num(v) + " outside [0,1]" + where);
                    finite = finite && std::isfinite(v);
                }
                sum += v;
            }
            if (finite && std::abs(sum - 1.0) > kRowSumTolerance)
                diag.push_back(who + ": row sum " + num(sum) + " ≠ 1" + where);
        }
    }
    return diag;
}

Network validate_network(const NetworkSpec& spec) {
    auto diag = network_diagnostics(spec);
    if (!diag.empty()) throw ValidationError(std::move(diag));

    Network net;
    net.nodes_ = spec.nodes;
    net.declared_root_ = spec.root;
    net.bind_ = spec.bind;
    net.transition_ = spec.transition;
    net.window_ = spec.window;
    const std::size_t n = net.nodes_.size();
    for (std::size_t i = 0; i < n; ++i) net.index_.emplace(net.nodes_[i].id, i);

    net.parent_.assign(n, Network::npos);
    net.children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        auto& node = net.nodes_[i];
        if (node.is_root()) {
            net.root_ = i;
        } else {
            const auto p = net.index_.at(node.parents.front());
            net.parent_[i] = p;
            net.children_[p].push_back(i);
        }
        for (auto& row : node.cpt) {
            double sum = 0.0;
            for (double v : row) sum += v;
            for (double& v : row) v /= sum;
        }
    }

    net.order_.reserve(n);
    net.order_.push_back(net.root_);
    for (std::size_t head = 0; head < net.order_.size(); ++head)
        for (auto c : net.children_[net.order_[head]]) net.order_.push_back(c);
    return net;
}

std::optional<std::size_t> Network::index_of(std::string_view id) const {
    if (auto it = index_.find(id); it != index_.end()) return it->second;
    return std::nullopt;
}

std::size_t Network::require(std::string_view id) const {
    if (auto i = index_of(id)) return *i;
    throw EvidenceError("unknown node " + quoted(id));
}

std::optional<std::size_t> Network::state_index(std::size_t node, std::string_view label) const {
    const auto& states = nodes_.at(node).states;
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) return std::nullopt;
    return static_cast<std::size_t>(it - states.begin());
}

Network Network::with_prior(std::span<const double> prior) const {
    if (prior.size() != state_count(root_))
        throw ContractError("prior has " + std::to_string(prior.size()) + " entries; root " +
                            quoted(nodes_[root_].id) + " has " + std::to_string(state_count(root_)) +
                            " states");
    double sum = 0.0;
    for (double v : prior) {
        if (!std::isfinite(v) || v < 0.0) throw ContractError("prior entries must be finite and non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) throw ContractError("prior sums to " + num(sum) + ", not 1");
    Network out = *this;
    auto& row = out.nodes_[root_].cpt.front();
    row.assign(prior.begin(), prior.end());
    for (double& v : row) v /= sum;
    return out;
}

NetworkSpec Network::to_spec() const {
    NetworkSpec spec;
    spec.root = declared_root_ ? declared_root_ : std::optional<std::string>(nodes_[root_].id);
    spec.nodes = nodes_;
    spec.bind = bind_;
    spec.transition = transition_;
    spec.window = window_;
    return spec;
}

InstantiatedNetwork::InstantiatedNetwork(Network net, std::vector<std::optional<std::size_t>> clamps)
    : net_(std::move(net)), clamps_(std::move(clamps)) {
    if (clamps_.size() != net_.size())
        throw ContractError("clamp vector does not match network size");
    for (std::size_t i = 0; i < clamps_.size(); ++i)
        if (clamps_[i] && *clamps_[i] >= net_.state_count(i))
            throw ContractError("clamp out of range for node " + quoted(net_.node(i).id));
}

EvidenceSet InstantiatedNetwork::evidence() const {
    EvidenceSet ev;
    for (std::size_t i = 0; i < clamps_.size(); ++i)
        if (clamps_[i]) ev.assignments.emplace(net_.node(i).id, net_.node(i).states[*clamps_[i]]);
    return ev;
}

InstantiatedNetwork apply_evidence(const Network& net, const EvidenceSet& ev) {
    std::vector<std::optional<std::size_t>> clamps(net.size());
    for (const auto& [id, label] : ev.assignments) {
        const auto node = net.index_of(id);
        if (!node) throw EvidenceError("unknown node " + quoted(id));
        const auto state = net.state_index(*node, label);
        if (!state) {
            std::string set;
            for (const auto& s : net.node(*node).states) set += (set.empty() ? "" : ",") + s;
            throw EvidenceError("state " + quoted(label) + " not in {" + set + "} of node " + quoted(id));
        }
        clamps[*node] = *state;
    }
    return InstantiatedNetwork(net, std::move(clamps));
}

} // namespace beliefscope
