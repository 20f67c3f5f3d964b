#ifndef BELIEFSCOPE_NETWORK_HPP
#define BELIEFSCOPE_NETWORK_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace beliefscope {

using Distribution = std::vector<double>;
using Matrix = std::vector<Distribution>;

inline constexpr double kRowSumTolerance = 1e-9;

enum class NodeKind { chance, relation };

std::string_view to_string(NodeKind kind);

/// Parameters attached to a relation node. Unset fields fall back to the
/// evaluator defaults.
struct EvaluatorParams {
    std::optional<double> tau;
    std::optional<double> epsilon;
    std::optional<std::vector<double>> bins;

    bool operator==(const EvaluatorParams&) const = default;
};

/// Region predicate bound to a feature node: the feature is present when a
/// region of any listed colour class (and at least min_area pixels) exists.
struct FeatureBinding {
    std::vector<std::string> colour_classes;
    std::optional<double> min_area;

    bool operator==(const FeatureBinding&) const = default;
};

/// Unrolling configuration for dynamic (multi-frame) models.
struct WindowSpec {
    std::size_t max = 5;
    std::optional<double> delta;

    bool operator==(const WindowSpec&) const = default;
};

struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::chance;
    std::vector<std::string> states;
    // More than one entry is representable so validation can report it.
    std::vector<std::string> parents;
    // One row per parent state; a root carries its prior as the single row.
    Matrix cpt;

    std::optional<std::string> evaluator;
    std::vector<std::string> inputs;
    std::optional<EvaluatorParams> params;

    bool is_root() const noexcept { return parents.empty(); }
    bool operator==(const NodeSpec&) const = default;
};

/// Parsed, unvalidated model document. Node order is preserved.
struct NetworkSpec {
    std::optional<std::string> root;
    std::vector<NodeSpec> nodes;
    std::vector<std::pair<std::string, FeatureBinding>> bind;
    std::optional<Matrix> transition;
    std::optional<WindowSpec> window;

    const NodeSpec* find(std::string_view id) const;
    NodeSpec* find(std::string_view id);
    bool operator==(const NetworkSpec&) const = default;
};

/// Parses a model document. Only syntax and references are checked here;
/// numbers and structure are left to validate_network.
NetworkSpec parse_network_spec(std::string_view text);
std::string serialize_network_spec(const NetworkSpec& spec);

/// A validated rooted tree of discrete nodes. Immutable once built.
class Network {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t size() const noexcept { return nodes_.size(); }
    const NodeSpec& node(std::size_t i) const { return nodes_.at(i); }
    std::span<const NodeSpec> nodes() const noexcept { return nodes_; }
    std::optional<std::size_t> index_of(std::string_view id) const;
    std::size_t require(std::string_view id) const;

    std::size_t root() const noexcept { return root_; }
    std::size_t parent(std::size_t i) const { return parent_.at(i); }
    std::span<const std::size_t> children(std::size_t i) const { return children_.at(i); }
    /// Breadth-first order starting at the root.
    std::span<const std::size_t> order() const noexcept { return order_; }

    std::size_t state_count(std::size_t i) const { return nodes_.at(i).states.size(); }
    std::optional<std::size_t> state_index(std::size_t node, std::string_view label) const;

    const Distribution& prior() const { return nodes_[root_].cpt.front(); }
    /// Same network with the root prior replaced.
    Network with_prior(std::span<const double> prior) const;

    NetworkSpec to_spec() const;

private:
    friend Network validate_network(const NetworkSpec& spec);
    Network() = default;

    std::vector<NodeSpec> nodes_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> order_;
    std::size_t root_ = 0;
    // Spec-level extras carried through unchanged.
    std::optional<std::string> declared_root_;
    std::vector<std::pair<std::string, FeatureBinding>> bind_;
    std::optional<Matrix> transition_;
    std::optional<WindowSpec> window_;
};

/// Every violated invariant of spec, in document order. Empty iff valid.
std::vector<std::string> network_diagnostics(const NetworkSpec& spec);

/// Builds the Network, renormalizing rows that sum to 1 within
/// kRowSumTolerance. Throws ValidationError carrying all diagnostics.
Network validate_network(const NetworkSpec& spec);

struct EvidenceSet {
    std::map<std::string, std::string> assignments;

    bool operator==(const EvidenceSet&) const = default;
};

EvidenceSet parse_evidence(std::string_view text);
std::string serialize_evidence(const EvidenceSet& ev);

/// A network plus per-node clamps. CPTs are never touched.
class InstantiatedNetwork {
public:
    InstantiatedNetwork(Network net, std::vector<std::optional<std::size_t>> clamps);

    const Network& network() const noexcept { return net_; }
    const std::optional<std::size_t>& clamp(std::size_t i) const { return clamps_.at(i); }
    bool observed(std::size_t i) const { return clamps_.at(i).has_value(); }
    EvidenceSet evidence() const;

private:
    Network net_;
    std::vector<std::optional<std::size_t>> clamps_;
};

/// Throws EvidenceError on unknown nodes or states.
InstantiatedNetwork apply_evidence(const Network& net, const EvidenceSet& ev);

} // namespace beliefscope

#endif // BELIEFSCOPE_NETWORK_HPP
