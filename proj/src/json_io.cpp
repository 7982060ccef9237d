#include "cursive/json_io.hpp"

#include "cursive/error.hpp"

namespace cursive {

nlohmann::json cuts_to_json(const std::vector<CandidateCut>& cuts) {
    auto j = nlohmann::json::array();
    for (const auto& c : cuts)
        j.push_back({{"column", c.column}, {"status", std::string(to_string(c.status))}, {"crossing_count", c.crossing_count}});
    return j;
}

std::vector<CandidateCut> cuts_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw FormatError("cut list must be a JSON array");
    std::vector<CandidateCut> cuts;
    try {
        for (const auto& e : j)
            cuts.push_back({e.at("column").get<int>(), cut_status_from_string(e.at("status").get<std::string>()),
                            e.value("crossing_count", 0)});
    } catch (const nlohmann::json::exception& err) {
        throw FormatError(std::string("malformed cut list: ") + err.what());
    }
    return cuts;
}

nlohmann::json path_to_json(const SegmentationPath& p) {
    return {{"seed_column", p.seed_column}, {"columns", p.columns}};
}

SegmentationPath path_from_json(const nlohmann::json& j) {
    try {
        return {j.at("seed_column").get<int>(), j.at("columns").get<std::vector<int>>()};
    } catch (const nlohmann::json::exception& err) {
        throw FormatError(std::string("malformed path: ") + err.what());
    }
}

nlohmann::json paths_to_json(const std::vector<SegmentationPath>& paths) {
    auto j = nlohmann::json::array();
    for (const auto& p : paths) j.push_back(path_to_json(p));
    return j;
}

std::vector<SegmentationPath> paths_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw FormatError("path list must be a JSON array");
    std::vector<SegmentationPath> paths;
    for (const auto& e : j) paths.push_back(path_from_json(e));
    return paths;
}

}  // namespace cursive
