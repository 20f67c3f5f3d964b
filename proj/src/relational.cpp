#include "beliefscope/relational.hpp"

#include "beliefscope/error.hpp"
#include "region_json.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace beliefscope {

namespace {

constexpr std::string_view kColourNames[] = {"dark", "bright", "yellow", "green", "brown", "other"};
constexpr std::string_view kRelationNames[] = {"surrounding", "adjacent", "distance", "static"};

// Pixel rectangles covering a region: one per mask pixel, or the bbox.
struct Cell {
    int x0, y0, x1, y1;
};

std::vector<Cell> cells(const Region& r) {
    std::vector<Cell> out;
    if (!r.mask) {
        out.push_back({r.bbox.xmin, r.bbox.ymin, r.bbox.xmax, r.bbox.ymax});
        return out;
    }
    for (int row = 0; row < r.mask->height(); ++row)
        for (int col = 0; col < r.mask->width(); ++col)
            if (r.mask->at(col, row)) {
                const int x = r.bbox.xmin + col, y = r.bbox.ymin + row;
                out.push_back({x, y, x, y});
            }
    return out;
}

double cell_gap(const Cell& a, const Cell& b) {
    const int dx = std::max({0, b.x0 - a.x1 - 1, a.x0 - b.x1 - 1});
    const int dy = std::max({0, b.y0 - a.y1 - 1, a.y0 - b.y1 - 1});
    return std::hypot(static_cast<double>(dx), static_cast<double>(dy));
}

bool bbox_overlap(const BBox& a, const BBox& b) {
    return a.xmin <= b.xmax && b.xmin <= a.xmax && a.ymin <= b.ymax && b.ymin <= a.ymax;
}

long long pixels_inside(const Region& r, const BBox& box) {
    long long n = 0;
    for (int y = std::max(r.bbox.ymin, box.ymin); y <= std::min(r.bbox.ymax, box.ymax); ++y)
        for (int x = std::max(r.bbox.xmin, box.xmin); x <= std::min(r.bbox.xmax, box.xmax); ++x)
            n += r.covers(x, y);
    return n;
}

// Pixel-exact when both masks are known. A region without a mask is only
// known by bbox and area, so it is taken as disjoint from the other when
// its area still fits in the part of its bbox the other leaves free.
bool disjoint(const Region& a, const Region& b) {
    if (!bbox_overlap(a.bbox, b.bbox)) return true;
    if (a.mask && b.mask) {
        for (int y = b.bbox.ymin; y <= b.bbox.ymax; ++y)
            for (int x = b.bbox.xmin; x <= b.bbox.xmax; ++x)
                if (a.covers(x, y) && b.covers(x, y)) return false;
        return true;
    }
    if (a.mask || b.mask) {
        const Region& known = a.mask ? a : b;
        const Region& vague = a.mask ? b : a;
        return pixels_inside(known, vague.bbox) + vague.area <= vague.bbox.pixel_count();
    }
    const Region& outer = a.bbox.pixel_count() >= b.bbox.pixel_count() ? a : b;
    return a.area + b.area <= outer.bbox.pixel_count();
}

bool strictly_inside(const BBox& inner, const BBox& outer) {
    return outer.xmin < inner.xmin && inner.xmax < outer.xmax && outer.ymin < inner.ymin &&
           inner.ymax < outer.ymax;
}

} // namespace

std::string_view to_string(ColourClass c) { return kColourNames[static_cast<int>(c)]; }

std::optional<ColourClass> parse_colour(std::string_view s) {
    for (int i = 0; i < 6; ++i)
        if (kColourNames[i] == s) return static_cast<ColourClass>(i);
    return std::nullopt;
}

std::string_view to_string(RelationKind k) { return kRelationNames[static_cast<int>(k)]; }

std::optional<RelationKind> parse_relation_kind(std::string_view s) {
    for (int i = 0; i < 4; ++i)
        if (kRelationNames[i] == s) return static_cast<RelationKind>(i);
    return std::nullopt;
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 1 || height < 1 || bits_.size() != static_cast<std::size_t>(width) * height)
        throw ContractError("mask dimensions do not match its bit count");
}

Mask Mask::from_rows(std::span<const std::string> rows) {
    if (rows.empty()) throw ContractError("mask has no rows");
    const auto w = rows.front().size();
    std::vector<std::uint8_t> bits;
    for (const auto& r : rows) {
        if (r.size() != w) throw ContractError("mask rows differ in length");
        for (char c : r) {
            if (c != '0' && c != '1') throw ContractError("mask rows may only contain '0' and '1'");
            bits.push_back(c == '1');
        }
    }
    return Mask(static_cast<int>(w), static_cast<int>(rows.size()), std::move(bits));
}

std::vector<std::string> Mask::to_rows() const {
    std::vector<std::string> rows(height_, std::string(width_, '0'));
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (at(x, y)) rows[y][x] = '1';
    return rows;
}

long long Mask::count() const { return std::count(bits_.begin(), bits_.end(), 1); }

bool Region::covers(int x, int y) const {
    if (x < bbox.xmin || x > bbox.xmax || y < bbox.ymin || y > bbox.ymax) return false;
    return !mask || mask->at(x - bbox.xmin, y - bbox.ymin);
}

void check_region(const Region& r) {
    const std::string who = "region '" + r.id + "'";
    if (r.area < 1) throw ContractError(who + ": area must be at least 1");
    if (r.bbox.xmin > r.bbox.xmax || r.bbox.ymin > r.bbox.ymax) throw ContractError(who + ": bbox is not well-ordered");
    if (r.area > r.bbox.pixel_count()) throw ContractError(who + ": area exceeds bbox");
    if (!std::isfinite(r.centroid.x) || !std::isfinite(r.centroid.y)) throw ContractError(who + ": centroid not finite");
    if (!r.mask) return;
    if (r.mask->width() != r.bbox.width() || r.mask->height() != r.bbox.height())
        throw ContractError(who + ": mask extent differs from bbox");
    if (r.mask->count() != r.area) throw ContractError(who + ": mask pixel count differs from area");
    bool top = false, bottom = false, left = false, right = false;
    for (int y = 0; y < r.mask->height(); ++y)
        for (int x = 0; x < r.mask->width(); ++x)
            if (r.mask->at(x, y)) {
                top = top || y == 0;
                bottom = bottom || y == r.mask->height() - 1;
                left = left || x == 0;
                right = right || x == r.mask->width() - 1;
            }
    if (!(top && bottom && left && right)) throw ContractError(who + ": mask does not fill its bbox extent");
}

std::size_t Relation::state_count() const {
    if (kind == RelationKind::distance) return (params.bins.empty() ? 1 : params.bins.size()) + 1;
    return 2;
}

double region_gap(const Region& a, const Region& b) {
    const auto ca = cells(a), cb = cells(b);
    double best = INFINITY;
    for (const auto& x : ca)
        for (const auto& y : cb) {
            best = std::min(best, cell_gap(x, y));
            if (best == 0.0) return 0.0;
        }
    return best;
}

double centroid_distance(const Region& a, const Region& b) {
    return std::hypot(a.centroid.x - b.centroid.x, a.centroid.y - b.centroid.y);
}

bool surrounds(const Region& a, const Region& b) {
    if (!strictly_inside(b.bbox, a.bbox) || !disjoint(a, b)) return false;
    // Without a mask the ray test has nothing to hit; containment plus
    // disjointness decides.
    if (!a.mask) return true;

    const int cx = static_cast<int>(std::lround(b.centroid.x));
    const int cy = static_cast<int>(std::lround(b.centroid.y));
    auto ray = [&](int dx, int dy) {
        for (int x = cx + dx, y = cy + dy; x >= a.bbox.xmin && x <= a.bbox.xmax && y >= a.bbox.ymin && y <= a.bbox.ymax;
             x += dx, y += dy)
            if (a.covers(x, y)) return true;
        return false;
    };
    return ray(-1, 0) && ray(1, 0) && ray(0, -1) && ray(0, 1);
}

std::size_t eval_relation(const Relation& relation, const Region& a, const Region& b) {
    check_region(a);
    check_region(b);
    const auto& p = relation.params;
    switch (relation.kind) {
    case RelationKind::surrounding:
        return surrounds(a, b) ? kHolds : kHoldsNot;
    case RelationKind::adjacent:
        return region_gap(a, b) <= p.tau ? kHolds : kHoldsNot;
    case RelationKind::distance: {
        const double d = region_gap(a, b);
        const std::vector<double> edges = p.bins.empty() ? std::vector<double>{p.tau} : p.bins;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (d <= edges[i]) return i;
        return edges.size();
    }
    case RelationKind::static_:
        if (a.colour != b.colour)
            throw ContractError("static relation applied to unmatched regions '" + a.id + "' and '" + b.id + "'");
        return centroid_distance(a, b) <= p.epsilon ? kHolds : kHoldsNot;
    }
    throw ContractError("unknown relation kind");
}

// ---------------------------------------------------------------------------

namespace {

RelationParams resolve_params(const NodeSpec& n, const RelationParams& defaults) {
    RelationParams p = defaults;
    if (n.params) {
        if (n.params->tau) p.tau = *n.params->tau;
        if (n.params->epsilon) p.epsilon = *n.params->epsilon;
        if (n.params->bins) p.bins = *n.params->bins;
    }
    return p;
}

} // namespace

std::vector<std::string> relational_diagnostics(const NetworkSpec& spec, std::size_t relation_arity) {
    auto diag = network_diagnostics(spec);

    std::set<std::string> has_children;
    for (const auto& n : spec.nodes)
        for (const auto& p : n.parents) has_children.insert(p);

    for (const auto& n : spec.nodes) {
        const std::string who = "node '" + n.id + "'";
        if (n.kind == NodeKind::chance) {
            if (n.evaluator || !n.inputs.empty() || n.params)
                diag.push_back(who + ": only relation nodes take evaluator, inputs or params");
            continue;
        }
        if (n.is_root()) diag.push_back(who + ": a relation node cannot be the root");
        if (has_children.count(n.id)) diag.push_back(who + ": relation nodes must be leaves");
        if (!n.evaluator) {
            diag.push_back(who + ": relation node has no evaluator");
            continue;
        }
        const auto kind = parse_relation_kind(*n.evaluator);
        if (!kind) {
            diag.push_back(who + ": unknown evaluator '" + *n.evaluator + "'");
            continue;
        }
        if (n.inputs.size() != relation_arity)
            diag.push_back(who + ": relation takes " + std::to_string(relation_arity) + " input(s), got " +
                           std::to_string(n.inputs.size()));
        for (const auto& in : n.inputs) {
            const auto* f = spec.find(in);
            if (!f)
                diag.push_back(who + ": input '" + in + "' is not a node");
            else if (f->kind != NodeKind::chance || has_children.count(in))
                diag.push_back(who + ": input '" + in + "' must be a feature (leaf chance) node");
        }
        if (n.params) {
            if (n.params->tau && !(*n.params->tau > 0)) diag.push_back(who + ": tau must be positive");
            if (n.params->epsilon && !(*n.params->epsilon > 0)) diag.push_back(who + ": epsilon must be positive");
            if (n.params->bins) {
                const auto& b = *n.params->bins;
                if (b.empty()) diag.push_back(who + ": bins must not be empty");
                for (std::size_t i = 0; i < b.size(); ++i)
                    if (!(b[i] > 0) || (i > 0 && !(b[i] > b[i - 1])))
                        diag.push_back(who + ": bins must be positive and strictly ascending");
            }
        }
        Relation r{*kind, resolve_params(n, {})};
        if (n.states.size() != r.state_count())
            diag.push_back(who + ": evaluator '" + *n.evaluator + "' yields " + std::to_string(r.state_count()) +
                           " values but node declares " + std::to_string(n.states.size()) + " states");
    }

    std::set<std::string> bound;
    for (const auto& [id, b] : spec.bind) {
        const std::string who = "binding '" + id + "'";
        if (!bound.insert(id).second) diag.push_back(who + ": bound twice");
        const auto* n = spec.find(id);
        if (!n) {
            diag.push_back(who + ": no such node");
            continue;
        }
        if (n->kind != NodeKind::chance) diag.push_back(who + ": only chance nodes can be bound to regions");
        if (n->is_root()) diag.push_back(who + ": the root cannot be bound to a region");
        if (n->states.size() != 2) diag.push_back(who + ": bound features need exactly 2 states (present, absent)");
        for (const auto& c : b.colour_classes)
            if (!parse_colour(c)) diag.push_back(who + ": unknown colour class '" + c + "'");
        if (b.min_area && !(*b.min_area > 0)) diag.push_back(who + ": min_area must be positive");
    }
    return diag;
}

RelationalSpec make_relational_spec(const NetworkSpec& spec, const RelationParams& defaults,
                                    std::size_t relation_arity) {
    auto diag = relational_diagnostics(spec, relation_arity);
    if (!(defaults.tau > 0) || !(defaults.epsilon > 0)) diag.push_back("relation thresholds must be positive");
    if (!diag.empty()) throw ValidationError(std::move(diag));

    RelationalSpec out(validate_network(spec));
    const Network& net = out.net_;
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto& n = net.node(i);
        if (n.kind != NodeKind::relation) continue;
        RelationNode r;
        r.node = i;
        r.relation = {*parse_relation_kind(*n.evaluator), resolve_params(n, defaults)};
        for (const auto& in : n.inputs) r.inputs.push_back(net.require(in));
        if (r.relation.state_count() != n.states.size())
            throw ValidationError({"node '" + n.id + "': bins do not match declared states"});
        out.relations_.push_back(std::move(r));
    }
    for (const auto& [id, b] : spec.bind) {
        BoundFeature f;
        f.node = net.require(id);
        f.binding = b;
        for (const auto& c : b.colour_classes) f.colours.push_back(*parse_colour(c));
        out.features_.push_back(std::move(f));
    }
    return out;
}

RelationalSpec RelationalSpec::with_prior(std::span<const double> prior) const {
    RelationalSpec copy = *this;
    copy.net_ = net_.with_prior(prior);
    return copy;
}

std::optional<std::size_t> bind_feature(const BoundFeature& feature, std::span<const Region> regions) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const auto& r = regions[i];
        if (std::find(feature.colours.begin(), feature.colours.end(), r.colour) == feature.colours.end()) continue;
        if (feature.binding.min_area && static_cast<double>(r.area) < *feature.binding.min_area) continue;
        if (!best || r.area > regions[*best].area || (r.area == regions[*best].area && r.id < regions[*best].id))
            best = i;
    }
    return best;
}

Relationalized relationalize(const RelationalSpec& spec, std::span<const Region> regions) {
    std::set<std::string> ids;
    for (const auto& r : regions) {
        check_region(r);
        if (!ids.insert(r.id).second) throw ContractError("duplicate region id '" + r.id + "'");
    }

    const Network& net = spec.network();
    Relationalized out{net, {}, {}};
    std::map<std::size_t, std::size_t> matched; // feature node -> region index
    for (const auto& f : spec.features()) {
        const auto& node = net.node(f.node);
        const auto hit = bind_feature(f, regions);
        out.evidence.assignments[node.id] = node.states[hit ? 0 : 1];
        if (hit) {
            matched[f.node] = *hit;
            out.bindings[node.id] = regions[*hit].id;
        }
    }
    for (const auto& r : spec.relations()) {
        std::vector<const Region*> args;
        for (auto in : r.inputs)
            if (auto it = matched.find(in); it != matched.end()) args.push_back(&regions[it->second]);
        if (args.size() != r.inputs.size() || args.size() != 2) continue;
        const auto& node = net.node(r.node);
        out.evidence.assignments[node.id] = node.states[eval_relation(r.relation, *args[0], *args[1])];
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace detail {

Region read_region(const ojson& j, const std::string& path) {
    require_object(j, path);
    only_keys(j, path, {"id", "colour_class", "centroid", "area", "bbox", "mask"});
    for (const char* k : {"id", "colour_class", "centroid", "area", "bbox"})
        if (!j.contains(k)) fail(path, std::string("missing field '") + k + "'");
    Region r;
    r.id = get_string(j["id"], path + "/id");
    const auto colour = get_string(j["colour_class"], path + "/colour_class");
    const auto c = parse_colour(colour);
    if (!c) fail(path + "/colour_class", "unknown colour class '" + colour + "'");
    r.colour = *c;
    const auto& cen = j["centroid"];
    if (!cen.is_array() || cen.size() != 2) fail(path + "/centroid", "expected [x, y]");
    r.centroid = {get_number(cen[0], path + "/centroid/0"), get_number(cen[1], path + "/centroid/1")};
    if (!j["area"].is_number_integer()) fail(path + "/area", "expected an integer");
    r.area = j["area"].get<long long>();
    const auto& bb = j["bbox"];
    if (!bb.is_array() || bb.size() != 4) fail(path + "/bbox", "expected [xmin, ymin, xmax, ymax]");
    int v[4];
    for (int i = 0; i < 4; ++i) {
        if (!bb[i].is_number_integer()) fail(path + "/bbox/" + std::to_string(i), "expected an integer");
        v[i] = bb[i].get<int>();
    }
    r.bbox = {v[0], v[1], v[2], v[3]};
    if (j.contains("mask")) {
        const auto& m = j["mask"];
        if (!m.is_array()) fail(path + "/mask", "expected an array of '0'/'1' strings");
        std::vector<std::string> rows;
        for (std::size_t i = 0; i < m.size(); ++i) rows.push_back(get_string(m[i], path + "/mask/" + std::to_string(i)));
        try {
            r.mask = Mask::from_rows(rows);
        } catch (const ContractError& e) {
            fail(path + "/mask", e.what());
        }
    }
    return r;
}

ojson region_json(const Region& r) {
    ojson o;
    o["id"] = r.id;
    o["colour_class"] = std::string(to_string(r.colour));
    o["centroid"] = {round10(r.centroid.x), round10(r.centroid.y)};
    o["area"] = r.area;
    o["bbox"] = {r.bbox.xmin, r.bbox.ymin, r.bbox.xmax, r.bbox.ymax};
    if (r.mask) o["mask"] = r.mask->to_rows();
    return o;
}

std::vector<Region> read_regions(const ojson& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of regions");
    std::vector<Region> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_region(j[i], path + "/" + std::to_string(i)));
    return out;
}

} // namespace detail

std::vector<Region> parse_scene(std::string_view text) {
    const auto j = detail::parse_json(text, "scene");
    detail::require_object(j, "");
    detail::only_keys(j, "", {"regions"});
    if (!j.contains("regions")) detail::fail("", "missing field 'regions'");
    return detail::read_regions(j["regions"], "/regions");
}

std::string serialize_scene(std::span<const Region> regions) {
    detail::ojson j;
    j["regions"] = detail::ojson::array();
    for (const auto& r : regions) j["regions"].push_back(detail::region_json(r));
    return j.dump();
}

} // namespace beliefscope
