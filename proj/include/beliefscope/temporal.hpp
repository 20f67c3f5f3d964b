#ifndef BELIEFSCOPE_TEMPORAL_HPP
#define BELIEFSCOPE_TEMPORAL_HPP

#include "beliefscope/relational.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace beliefscope {

struct Frame {
    long long index = 0;
    double t = 0.0; ///< seconds
    std::vector<Region> regions;

    bool operator==(const Frame&) const = default;
};

struct FrameStream {
    double dt = 0.04; ///< nominal inter-frame interval, seconds
    std::vector<Frame> frames;

    bool operator==(const FrameStream&) const = default;
};

/// Ordering, timing and region problems of a stream; empty iff valid.
std::vector<std::string> stream_diagnostics(const FrameStream& stream);

/// JSONL: a {"dt": ...} header line, then one frame object per line.
FrameStream parse_stream(std::string_view text);
std::string serialize_stream(const FrameStream& stream);

/// paper: the static prior multiplies the transition-mixed previous
/// posterior. filter: plain forward filtering.
enum class FilterMode { paper, filter };

std::string_view to_string(FilterMode m);
std::optional<FilterMode> parse_filter_mode(std::string_view s);

/// Causal support for the hypothesis at the current frame.
/// transition[i][j] = P(H_t = j | H_{t-1} = i).
Distribution semi_static_prior(std::span<const double> prior, const Matrix& transition,
                               std::span<const double> prev_belief, FilterMode mode);

struct TemporalModel {
    RelationalSpec per_frame; ///< hypothesis at the root
    Matrix transition;
    FilterMode mode = FilterMode::paper;

    const NodeSpec& hypothesis() const { return per_frame.network().node(per_frame.network().root()); }
};

/// Requires a "transition" table square over the root's states.
TemporalModel make_temporal_model(const NetworkSpec& spec, FilterMode mode, const RelationParams& defaults = {});

struct TraceEntry {
    long long index = 0;
    Distribution posterior;
    Distribution effective_prior;
    /// feature node id -> region id
    std::map<std::string, std::string> bindings;
    /// First and last frame index of a dynamic-recognition window.
    std::optional<std::pair<long long, long long>> window;
};

struct BeliefTrace {
    std::string hypothesis;
    std::vector<std::string> states;
    std::vector<TraceEntry> entries;
};

/// Semi-static recognition over a stream: each frame's posterior becomes
/// the next frame's causal support.
BeliefTrace filter_stream(const TemporalModel& model, const FrameStream& stream);

std::string trace_to_jsonl(const BeliefTrace& trace);

struct MatchParams {
    double delta = 10.0; ///< max centroid distance, pixels
    double min_area_ratio = 0.5;
    double max_area_ratio = 2.0;
};

/// (prev region id, cur region id) pairs.
using Matching = std::vector<std::pair<std::string, std::string>>;

/// Greedy nearest-centroid matching between consecutive frames. A pair is
/// admissible only for equal colour class, area ratio within bounds and
/// centroid distance <= delta. Each region is matched at most once.
Matching match_regions(const Frame& prev, const Frame& cur, const MatchParams& params = {});

/// Template for dynamic recognition: root hypothesis, per-frame feature
/// children, and relation children whose single input names the feature
/// they link across consecutive frames.
struct DynamicSpec {
    RelationalSpec frame_template;
    std::size_t max_window = 5;
    MatchParams match;

    const NodeSpec& hypothesis() const {
        return frame_template.network().node(frame_template.network().root());
    }
};

std::vector<std::string> dynamic_diagnostics(const NetworkSpec& spec);
DynamicSpec make_dynamic_spec(const NetworkSpec& spec, const RelationParams& defaults = {},
                              const MatchParams& match = {});

/// Unrolls the template over K consecutive frames: feature f becomes f_1..f_K
/// and relation r becomes r_1..r_{K-1}, r_i linking frames i and i+1.
Relationalized build_dynamic_window(const DynamicSpec& spec, std::span<const Frame> window);

/// Dynamic recognition over a stream: one entry per frame from the second
/// on, using the latest `window` frames (capped at max_window).
BeliefTrace track_windows(const DynamicSpec& spec, const FrameStream& stream, std::size_t window);

} // namespace beliefscope

#endif // BELIEFSCOPE_TEMPORAL_HPP
