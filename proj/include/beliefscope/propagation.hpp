#ifndef BELIEFSCOPE_PROPAGATION_HPP
#define BELIEFSCOPE_PROPAGATION_HPP

#include "beliefscope/network.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace beliefscope {

struct NodeBelief {
    std::string id;
    std::vector<std::string> states;
    Distribution p;
};

/// Posterior P(node | evidence) for every node, in network order.
class Beliefs {
public:
    Beliefs() = default;
    explicit Beliefs(std::vector<NodeBelief> nodes) : nodes_(std::move(nodes)) {}

    std::span<const NodeBelief> nodes() const noexcept { return nodes_; }
    const NodeBelief& at(std::string_view id) const;
    /// Probability of one state; throws on unknown node or state.
    double p(std::string_view id, std::string_view state) const;

private:
    std::vector<NodeBelief> nodes_;
};

struct PropagationOptions {
    /// Non-zero seeds shuffle the order in which child messages are
    /// combined. Results must not depend on it.
    std::uint64_t schedule_seed = 0;
};

/// Two-pass lambda/pi message passing on the tree. Messages are
/// renormalized at every node. Throws ImpossibleEvidence naming the node
/// where all support vanished.
Beliefs propagate(const InstantiatedNetwork& inet, const PropagationOptions& options = {});

inline constexpr std::uint64_t kDefaultOracleCap = std::uint64_t{1} << 20;

/// Enumerates every joint assignment consistent with the evidence. Throws
/// CapExceeded when the product of all state counts exceeds state_cap.
Beliefs brute_force_beliefs(const InstantiatedNetwork& inet, std::uint64_t state_cap = kDefaultOracleCap);

/// Per-node argmax; ties go to the lowest declared state index.
std::map<std::string, std::string> map_assignment(const Beliefs& beliefs);

/// Largest absolute entry-wise difference. Node sets must agree.
double max_abs_diff(const Beliefs& a, const Beliefs& b);

/// {"beliefs": {node: {state: p}}} with 10 significant digits.
std::string beliefs_to_json(const Beliefs& beliefs);

} // namespace beliefscope

#endif // BELIEFSCOPE_PROPAGATION_HPP
