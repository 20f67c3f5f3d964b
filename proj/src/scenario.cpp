#include "beliefscope/endoscopy.hpp"

#include "beliefscope/error.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace beliefscope {

namespace {

constexpr std::array<std::string_view, 5> kScenarios = {"static_spot", "moving_spot", "surround_scene",
                                                        "adjacent_scene", "empty"};
constexpr double kFrameInterval = 0.04;

class Jitter {
public:
    explicit Jitter(std::uint64_t seed) : rng_(seed) {}

    double operator()(double amplitude) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return (2.0 * u - 1.0) * amplitude;
    }

private:
    std::mt19937_64 rng_; // output sequence is fixed by the standard
};

Region block(std::string id, ColourClass colour, BBox box) {
    Region r;
    r.id = std::move(id);
    r.colour = colour;
    r.bbox = box;
    r.area = box.pixel_count();
    r.centroid = {(box.xmin + box.xmax) / 2.0, (box.ymin + box.ymax) / 2.0};
    r.mask = Mask(box.width(), box.height(), std::vector<std::uint8_t>(static_cast<std::size_t>(r.area), 1));
    return r;
}

Region ring(std::string id, ColourClass colour, BBox box, int wall) {
    Region r;
    r.id = std::move(id);
    r.colour = colour;
    r.bbox = box;
    std::vector<std::uint8_t> bits;
    long long area = 0;
    for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x) {
            const bool on = x < wall || y < wall || x >= box.width() - wall || y >= box.height() - wall;
            bits.push_back(on);
            area += on;
        }
    r.area = area;
    r.centroid = {(box.xmin + box.xmax) / 2.0, (box.ymin + box.ymax) / 2.0};
    r.mask = Mask(box.width(), box.height(), std::move(bits));
    return r;
}

void jitter(std::vector<Region>& regions, Jitter& rng, double amplitude) {
    for (auto& r : regions) {
        r.centroid.x += rng(amplitude);
        r.centroid.y += rng(amplitude);
    }
}

} // namespace

std::span<const std::string_view> scenario_names() { return kScenarios; }

FrameStream generate_stream(const Scenario& scenario, std::size_t n_frames) {
    if (n_frames < 1) throw ContractError("n_frames must be at least 1");
    const auto& name = scenario.name;
    if (std::find(kScenarios.begin(), kScenarios.end(), name) == kScenarios.end())
        throw UnknownName("unknown scenario '" + name + "'");

    Jitter rng(scenario.seed);
    FrameStream stream;
    stream.dt = kFrameInterval;
    for (std::size_t i = 0; i < n_frames; ++i) {
        Frame f;
        f.index = static_cast<long long>(i);
        f.t = kFrameInterval * static_cast<double>(i);
        if (name == "static_spot") {
            f.regions.push_back(block("r1", ColourClass::yellow, {30, 22, 32, 24}));
            jitter(f.regions, rng, 0.5);
        } else if (name == "moving_spot") {
            const int x = 10 + 15 * static_cast<int>(i);
            f.regions.push_back(block("r1", ColourClass::yellow, {x, 22, x + 2, 24}));
            jitter(f.regions, rng, 0.5);
        } else if (name == "surround_scene") {
            f.regions.push_back(ring("r1", ColourClass::bright, {20, 20, 34, 34}, 2));
            f.regions.push_back(block("r2", ColourClass::dark, {26, 26, 28, 28}));
            jitter(f.regions, rng, 0.25);
        } else if (name == "adjacent_scene") {
            f.regions.push_back(block("r1", ColourClass::bright, {10, 10, 19, 15}));
            f.regions.push_back(block("r2", ColourClass::dark, {21, 11, 24, 14}));
            jitter(f.regions, rng, 0.25);
        }
        stream.frames.push_back(std::move(f));
    }
    return stream;
}

} // namespace beliefscope
