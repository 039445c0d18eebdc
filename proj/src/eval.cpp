#include "raftcensus/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "raftcensus/error.hpp"

namespace raftcensus {

std::vector<MatchPair> match_detections(const Census& census, const std::vector<TruthPoint>& truth,
                                        double max_dist) {
    if (!(max_dist > 0.0)) throw DataError("max match distance must be positive");
    std::vector<MatchPair> candidates;
    for (const auto& d : census.records)
        for (const auto& t : truth) {
            const double dist = std::hypot(d.centroid_row - t.row, d.centroid_col - t.col);
            if (dist <= max_dist) candidates.push_back({d.id, t.id, dist});
        }
    std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
        return std::tie(a.distance, a.detection_id, a.truth_id) <
               std::tie(b.distance, b.detection_id, b.truth_id);
    });
    std::unordered_set<int> used_det;
    std::unordered_set<int> used_truth;
    std::vector<MatchPair> matches;
    for (const auto& c : candidates) {
        if (used_det.count(c.detection_id) || used_truth.count(c.truth_id)) continue;
        used_det.insert(c.detection_id);
        used_truth.insert(c.truth_id);
        matches.push_back(c);
    }
    return matches;
}

MetricsReport compute_rates(const std::vector<MatchPair>& matches, std::size_t total_detections,
                            std::size_t total_platforms) {
    if (matches.size() > total_detections || matches.size() > total_platforms)
        throw DataError(fmt::format("inconsistent counts: {} matches for {} detections and {} platforms",
                                    matches.size(), total_detections, total_platforms));
    MetricsReport r;
    r.matches = matches;
    r.true_positives = matches.size();
    r.total_detections = total_detections;
    r.total_platforms = total_platforms;
    r.false_detections = total_detections - r.true_positives;
    r.missed = total_platforms - r.true_positives;
    r.tfa_undefined = total_detections == 0;
    r.tfr_undefined = total_platforms == 0;
    r.tfa_percent = r.tfa_undefined ? 0.0 : 100.0 * static_cast<double>(r.false_detections) / total_detections;
    r.tfr_percent = r.tfr_undefined ? 0.0 : 100.0 * static_cast<double>(r.missed) / total_platforms;
    return r;
}

MetricsReport evaluate_census(const Census& census, const std::vector<TruthPoint>& truth, double max_dist) {
    return compute_rates(match_detections(census, truth, max_dist), census.count(), truth.size());
}

std::string report_to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["tfa_percent"] = r.tfa_percent;
    j["tfr_percent"] = r.tfr_percent;
    j["tfa_undefined"] = r.tfa_undefined;
    j["tfr_undefined"] = r.tfr_undefined;
    j["true_positives"] = r.true_positives;
    j["false_detections"] = r.false_detections;
    j["missed"] = r.missed;
    j["total_detections"] = r.total_detections;
    j["total_platforms"] = r.total_platforms;
    j["matches"] = nlohmann::ordered_json::array();
    for (const auto& m : r.matches)
        j["matches"].push_back({{"detection_id", m.detection_id}, {"truth_id", m.truth_id}, {"distance_px", m.distance}});
    return j.dump(2) + "\n";
}

std::string report_to_table(const MetricsReport& r) {
    std::string s;
    s += fmt::format("{:<28}{:>10}\n", "total platforms", r.total_platforms);
    s += fmt::format("{:<28}{:>10}\n", "total detections", r.total_detections);
    s += fmt::format("{:<28}{:>10}\n", "true positives", r.true_positives);
    s += fmt::format("{:<28}{:>10}\n", "false detections", r.false_detections);
    s += fmt::format("{:<28}{:>10}\n", "missed detections", r.missed);
    s += fmt::format("{:<28}{:>9.2f}%{}\n", "TFA (false acceptance)", r.tfa_percent, r.tfa_undefined ? " (no detections)" : "");
    s += fmt::format("{:<28}{:>9.2f}%{}\n", "TFR (false rejection)", r.tfr_percent, r.tfr_undefined ? " (no platforms)" : "");
    return s;
}

}  // namespace raftcensus
