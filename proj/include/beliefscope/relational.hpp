#ifndef BELIEFSCOPE_RELATIONAL_HPP
#define BELIEFSCOPE_RELATIONAL_HPP

#include "beliefscope/network.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beliefscope {

enum class ColourClass { dark, bright, yellow, green, brown, other };

std::string_view to_string(ColourClass c);
std::optional<ColourClass> parse_colour(std::string_view s);

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

/// Inclusive pixel rectangle.
struct BBox {
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;

    int width() const noexcept { return xmax - xmin + 1; }
    int height() const noexcept { return ymax - ymin + 1; }
    long long pixel_count() const noexcept { return static_cast<long long>(width()) * height(); }
    bool operator==(const BBox&) const = default;
};

/// Binary grid aligned to a region's bbox, row-major from (xmin, ymin).
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, std::vector<std::uint8_t> bits);
    /// Rows of '0'/'1' characters, top row first.
    static Mask from_rows(std::span<const std::string> rows);
    std::vector<std::string> to_rows() const;

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool at(int col, int row) const { return bits_.at(static_cast<std::size_t>(row) * width_ + col) != 0; }
    long long count() const;
    bool operator==(const Mask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Region {
    std::string id;
    ColourClass colour = ColourClass::other;
    Point centroid;
    long long area = 1;
    BBox bbox;
    std::optional<Mask> mask;

    /// True when the pixel (x, y) belongs to the region. Without a mask the
    /// whole bbox counts.
    bool covers(int x, int y) const;
    bool operator==(const Region&) const = default;
};

/// Throws ContractError when area, bbox ordering or mask agreement fail.
void check_region(const Region& r);

enum class RelationKind { surrounding, adjacent, distance, static_ };

std::string_view to_string(RelationKind k);
std::optional<RelationKind> parse_relation_kind(std::string_view s);

struct RelationParams {
    double tau = 2.0;     ///< adjacency threshold, pixels
    double epsilon = 2.0; ///< static displacement threshold, pixels
    /// Ascending inclusive upper edges for the distance evaluator; empty
    /// means the two bins {<= tau, > tau}.
    std::vector<double> bins;
};

struct Relation {
    RelationKind kind = RelationKind::adjacent;
    RelationParams params;

    /// Number of output states the evaluator can produce.
    std::size_t state_count() const;
};

/// State index produced by the two-valued evaluators.
inline constexpr std::size_t kHolds = 0;
inline constexpr std::size_t kHoldsNot = 1;

/// Minimum Euclidean gap between the pixel squares of two regions (0 when
/// they touch or overlap). Uses masks when present, bboxes otherwise.
double region_gap(const Region& a, const Region& b);
double centroid_distance(const Region& a, const Region& b);
/// a encloses b: disjoint, bbox(b) strictly inside bbox(a), and all four
/// axis rays from b's centroid hit a's mask.
bool surrounds(const Region& a, const Region& b);

/// Deterministic relation value as a state index. For static, a and b must
/// be instances of the same region in consecutive frames.
std::size_t eval_relation(const Relation& relation, const Region& a, const Region& b);

struct RelationNode {
    std::size_t node = 0;
    Relation relation;
    std::vector<std::size_t> inputs;
};

struct BoundFeature {
    std::size_t node = 0;
    FeatureBinding binding;
    std::vector<ColourClass> colours;
};

/// Validated network with relation-node metadata and feature bindings.
class RelationalSpec {
public:
    const Network& network() const noexcept { return net_; }
    std::span<const RelationNode> relations() const noexcept { return relations_; }
    std::span<const BoundFeature> features() const noexcept { return features_; }

    RelationalSpec with_prior(std::span<const double> prior) const;

private:
    friend RelationalSpec make_relational_spec(const NetworkSpec&, const RelationParams&, std::size_t);
    explicit RelationalSpec(Network net) : net_(std::move(net)) {}

    Network net_;
    std::vector<RelationNode> relations_;
    std::vector<BoundFeature> features_;
};

/// Network diagnostics plus relation/binding checks. relation_arity is the
/// number of inputs each relation node must name (2 within one scene, 1 in
/// a dynamic window template where the pair spans consecutive frames).
std::vector<std::string> relational_diagnostics(const NetworkSpec& spec, std::size_t relation_arity = 2);

RelationalSpec make_relational_spec(const NetworkSpec& spec, const RelationParams& defaults = {},
                                    std::size_t relation_arity = 2);

/// Index of the region bound by a predicate: largest area wins, ties go to
/// the lowest region id.
std::optional<std::size_t> bind_feature(const BoundFeature& feature, std::span<const Region> regions);

struct Relationalized {
    Network network;
    EvidenceSet evidence;
    /// feature node id -> bound region id
    std::map<std::string, std::string> bindings;
};

/// Instantiates relation nodes from observed regions and drops the
/// functional links. Relation nodes with an unmatched input stay unobserved.
Relationalized relationalize(const RelationalSpec& spec, std::span<const Region> regions);

std::vector<Region> parse_scene(std::string_view text);
std::string serialize_scene(std::span<const Region> regions);

} // namespace beliefscope

#endif // BELIEFSCOPE_RELATIONAL_HPP
