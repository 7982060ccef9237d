#pragma once

#include <vector>

#include "json.hpp"

#include "cursive/pathtrace.hpp"
#include "cursive/segmenter.hpp"

namespace cursive {

// [{column, status, crossing_count}, ...]
nlohmann::json cuts_to_json(const std::vector<CandidateCut>& cuts);
std::vector<CandidateCut> cuts_from_json(const nlohmann::json& j);

// {seed_column, columns:[...]}
nlohmann::json path_to_json(const SegmentationPath& p);
SegmentationPath path_from_json(const nlohmann::json& j);

nlohmann::json paths_to_json(const std::vector<SegmentationPath>& paths);
std::vector<SegmentationPath> paths_from_json(const nlohmann::json& j);

}  // namespace cursive
