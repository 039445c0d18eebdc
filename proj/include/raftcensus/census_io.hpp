#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "raftcensus/pipeline.hpp"

namespace raftcensus {

/// `id,row,col,area_px[,easting,northing]`; geographic columns appear when
/// the census carries a geotransform.
std::string census_to_csv(const Census& c);
void write_census_csv(const Census& c, const std::filesystem::path& path);
/// Reads back the CSV written above (bbox and digest are not part of it).
Census read_census_csv(const std::filesystem::path& path);

/// GeoJSON FeatureCollection of Point features; requires geo.
std::string census_to_geojson(const Census& c);
void write_census_geojson(const Census& c, const std::filesystem::path& path);

struct TruthPoint {
    int id = 0;
    double row = 0.0;
    double col = 0.0;
};

/// `id,row,col` ground-truth raft centroids.
void write_truth_csv(const std::vector<TruthPoint>& pts, const std::filesystem::path& path);
std::vector<TruthPoint> read_truth_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace raftcensus
