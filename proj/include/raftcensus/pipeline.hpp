#pragma once

#include <optional>
#include <string>
#include <vector>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/blobs.hpp"
#include "raftcensus/mask.hpp"
#include "raftcensus/mlp.hpp"
#include "raftcensus/waterdetect.hpp"

namespace raftcensus {

struct CensusConfig {
    WaterMethod water_method = NdwiOtsu{};
    MlpModel platform_model;
    double platform_threshold = 0.5;
    WaterCleanup water_cleanup;
    /// Light closing applied to the platform mask before labelling.
    StructElem platform_close_se = StructElem::square(3);
    BlobFilter blob_filter;
};

/// Throws DataError unless the platform model is a [10, 2, 1] band model and
/// every threshold is in range.
void validate(const CensusConfig& cfg);

/// Stable hex digest of every setting that influences the census.
std::string config_digest(const CensusConfig& cfg);

struct CensusRecord {
    int id = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    std::optional<double> easting;
    std::optional<double> northing;
    int area_px = 0;
    BoundingBox bbox;

    bool operator==(const CensusRecord&) const = default;
};

struct Census {
    std::vector<CensusRecord> records;
    std::string source;
    std::string config_digest;
    std::optional<GeoInfo> geo;
    std::size_t count() const { return records.size(); }
};

/// Intermediate rasters of one run, kept for rendering and diagnostics.
struct CensusProducts {
    BinaryMask raw_water;
    BinaryMask water;     ///< cleaned
    BinaryMask platform;  ///< after the light closing
    std::vector<Blob> accepted;
    std::vector<RejectedBlob> rejected;
    Census census;
};

/// Pixels that are water and that the platform net scores at or above the
/// threshold. Non-water pixels are never evaluated.
BinaryMask platform_mask(const BandStack& s, const BinaryMask& water, const CensusConfig& cfg);

/// Geographic position of a (row, col) pixel centre.
std::pair<double, double> pixel_to_geo(const GeoInfo& geo, double row, double col);

CensusProducts run_census_detailed(const BandStack& s, const CensusConfig& cfg);
Census run_census(const BandStack& s, const CensusConfig& cfg);

}  // namespace raftcensus
