#ifndef BELIEFSCOPE_SRC_REGION_JSON_HPP
#define BELIEFSCOPE_SRC_REGION_JSON_HPP

#include "beliefscope/relational.hpp"
#include "json_util.hpp"

namespace beliefscope::detail {

Region read_region(const ojson& j, const std::string& path);
ojson region_json(const Region& r);
std::vector<Region> read_regions(const ojson& j, const std::string& path);

} // namespace beliefscope::detail

#endif
