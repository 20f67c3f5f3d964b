#ifndef BELIEFSCOPE_ENDOSCOPY_HPP
#define BELIEFSCOPE_ENDOSCOPY_HPP

#include "beliefscope/network.hpp"
#include "beliefscope/temporal.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace beliefscope {

/// Every CPT number the shipped models and the rule compiler use. These are
/// configuration, chosen only to respect qualitative orderings: features
/// and relations are more likely under the object that causes them, and
/// the same object tends to persist between frames.
struct CptDefaults {
    double prior = 0.5;                ///< P(hypothesis)
    double feature_hit = 0.8;          ///< P(feature present | hypothesis)
    double feature_false_alarm = 0.2;  ///< P(feature present | not hypothesis)
    double relation_hit = 0.8;         ///< P(relation holds | hypothesis)
    double relation_false_alarm = 0.2; ///< P(relation holds | not hypothesis)
    double transition_stay = 0.9;      ///< P(H_t = H_{t-1})
    std::size_t window = 5;            ///< frames per dynamic-recognition window
};

/// 1 - p with decimal round-off removed (0.2 rather than 0.19999...).
double complement(double p);

/// Keys are the field names above; all optional. Throws ParseError.
CptDefaults parse_defaults(std::string_view text);
std::string serialize_defaults(const CptDefaults& d);

enum class ModelKind { relational, temporal, dynamic };

std::string_view to_string(ModelKind k);
/// A "window" makes a dynamic model, a "transition" a temporal one.
ModelKind model_kind(const NetworkSpec& spec);

struct BuiltinModel {
    std::string name;
    ModelKind kind;
    NetworkSpec spec;
};

std::span<const std::string_view> builtin_model_names();
/// diverticulum, bend, dirty_lens or lumen_tracker. Throws UnknownName.
BuiltinModel builtin_model(std::string_view name, const CptDefaults& defaults = {});

/// Compiles one IF/THEN rule:
///
///   rule     := "IF" feature (relation feature)? ("&" temporal)? "THEN" object
///   feature  := colour+ ("or" colour)* noun
///   relation := "SURROUNDING" | "ADJACENT"
///   temporal := "STATIC" ("in" "image")?
///
/// Keywords are case-insensitive. Throws ParseError with the 1-based
/// column of the offending token.
NetworkSpec compile_rule(std::string_view text, const CptDefaults& defaults = {});

/// Same node kinds, state counts, relation evaluators, bindings and edges,
/// ignoring node ids and hypothesis state labels.
bool structurally_isomorphic(const NetworkSpec& a, const NetworkSpec& b);

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
};

std::span<const std::string_view> scenario_names();

/// Deterministic synthetic stream. Frame i has index i and t = 0.04 * i.
/// Centroid jitter comes from std::mt19937_64 seeded with the scenario
/// seed: each draw maps the top 53 bits of one output to u in [0, 1) and
/// yields (2u - 1) * amplitude, drawn x then y per region in region order.
///
///   static_spot     3x3 yellow spot fixed at (31, 23), jitter 0.5 px
///   moving_spot     same spot translating +15 px in x per frame
///   surround_scene  15x15 bright ring (2 px wall) around a 3x3 dark blob
///   adjacent_scene  10x6 bright block with a 4x4 dark blob 1 px to its right
///   empty           no regions
///
/// Relational scenes use 0.25 px jitter. Throws UnknownName.
FrameStream generate_stream(const Scenario& scenario, std::size_t n_frames);

} // namespace beliefscope

#endif // BELIEFSCOPE_ENDOSCOPY_HPP
