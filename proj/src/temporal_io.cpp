#include "beliefscope/temporal.hpp"

#include "region_json.hpp"

namespace beliefscope {

using detail::ojson;

FrameStream parse_stream(std::string_view text) {
    FrameStream stream;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        const std::string where = "line " + std::to_string(line_no);
        const auto j = detail::parse_json(line, "stream", line_no - 1);
        detail::require_object(j, where);
        if (!have_header) {
            detail::only_keys(j, where, {"dt"});
            if (!j.contains("dt")) detail::fail(where, "first line must be the {\"dt\": ...} header");
            stream.dt = detail::get_number(j["dt"], where + "/dt");
            have_header = true;
            continue;
        }
        detail::only_keys(j, where, {"index", "t", "regions"});
        for (const char* k : {"index", "t", "regions"})
            if (!j.contains(k)) detail::fail(where, std::string("missing field '") + k + "'");
        if (!j["index"].is_number_integer()) detail::fail(where + "/index", "expected an integer");
        Frame f;
        f.index = j["index"].get<long long>();
        f.t = detail::get_number(j["t"], where + "/t");
        f.regions = detail::read_regions(j["regions"], where + "/regions");
        stream.frames.push_back(std::move(f));
    }
    if (!have_header) detail::fail("stream", "missing {\"dt\": ...} header line");
    return stream;
}

std::string serialize_stream(const FrameStream& stream) {
    std::string out;
    ojson header;
    header["dt"] = detail::round10(stream.dt);
    out += header.dump() + "\n";
    for (const auto& f : stream.frames) {
        ojson j;
        j["index"] = f.index;
        j["t"] = detail::round10(f.t);
        j["regions"] = ojson::array();
        for (const auto& r : f.regions) j["regions"].push_back(detail::region_json(r));
        out += j.dump() + "\n";
    }
    return out;
}

std::string trace_to_jsonl(const BeliefTrace& trace) {
    auto dist = [&](const Distribution& d) {
        ojson o = ojson::object();
        for (std::size_t k = 0; k < trace.states.size(); ++k) o[trace.states[k]] = detail::round10(d.at(k));
        return o;
    };
    std::string out;
    for (const auto& e : trace.entries) {
        ojson j;
        j["index"] = e.index;
        if (e.window) j["window"] = {e.window->first, e.window->second};
        j["posterior"] = dist(e.posterior);
        j["effective_prior"] = dist(e.effective_prior);
        j["bindings"] = ojson::object();
        for (const auto& [k, v] : e.bindings) j["bindings"][k] = v;
        out += j.dump() + "\n";
    }
    return out;
}

} // namespace beliefscope
