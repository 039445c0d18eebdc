#pragma once

#include <string>
#include <vector>

#include "raftcensus/census_io.hpp"
#include "raftcensus/pipeline.hpp"

namespace raftcensus {

struct MatchPair {
    int detection_id = 0;
    int truth_id = 0;
    double distance = 0.0;
};

/// Greedy one-to-one matching by ascending centroid distance (ties broken by
/// detection id, then truth id). Pairs farther than max_dist never match.
std::vector<MatchPair> match_detections(const Census& census, const std::vector<TruthPoint>& truth,
                                        double max_dist = 3.0);

struct MetricsReport {
    double tfa_percent = 0.0;  ///< 100 * false / total detections
    double tfr_percent = 0.0;  ///< 100 * missed / total platforms
    bool tfa_undefined = false;  ///< no detections; tfa reported as 0
    bool tfr_undefined = false;  ///< no platforms; tfr reported as 0
    std::size_t true_positives = 0;
    std::size_t false_detections = 0;
    std::size_t missed = 0;
    std::size_t total_detections = 0;
    std::size_t total_platforms = 0;
    std::vector<MatchPair> matches;
};

MetricsReport compute_rates(const std::vector<MatchPair>& matches, std::size_t total_detections,
                            std::size_t total_platforms);

MetricsReport evaluate_census(const Census& census, const std::vector<TruthPoint>& truth,
                              double max_dist = 3.0);

std::string report_to_json(const MetricsReport& r);
std::string report_to_table(const MetricsReport& r);

}  // namespace raftcensus
