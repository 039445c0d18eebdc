#include "raftcensus/pipeline.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "raftcensus/error.hpp"
#include "raftcensus/parallel.hpp"

namespace raftcensus {

void validate(const CensusConfig& cfg) {
    validate(cfg.water_method);
    require_band_model(cfg.platform_model);
    if (cfg.platform_model.layer_sizes() != std::vector<int>{10, 2, 1})
        throw DataError("platform model must have layer sizes [10, 2, 1]");
    if (!(cfg.platform_threshold > 0.0 && cfg.platform_threshold < 1.0))
        throw DataError("platform threshold must lie in (0, 1)");
    validate(cfg.blob_filter);
}

std::string config_digest(const CensusConfig& cfg) {
    std::string text;
    if (const auto* mlp = std::get_if<MlpWater>(&cfg.water_method)) {
        text += fmt::format("water=mlp class={} thr={:.17g}\n", mlp->water_class, mlp->threshold);
        text += serialize_model(mlp->model);
    } else {
        const auto& nd = std::get<NdwiOtsu>(cfg.water_method);
        text += fmt::format("water=ndwi sep={:.17g}\n", nd.options.min_class_separation);
    }
    text += fmt::format("platform_thr={:.17g}\n", cfg.platform_threshold);
    text += serialize_model(cfg.platform_model);
    text += fmt::format("se={} {} {} {}\n", cfg.water_cleanup.close_se.describe(),
                        cfg.water_cleanup.open_se.describe(), cfg.water_cleanup.erode_se.describe(),
                        cfg.platform_close_se.describe());
    const auto& f = cfg.blob_filter;
    text += fmt::format("filter={} {:.17g} {:.17g} {}\n", f.max_area, f.max_equivalent_diameter,
                        f.min_solidity, f.required_euler);
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

BinaryMask platform_mask(const BandStack& s, const BinaryMask& water, const CensusConfig& cfg) {
    require_band_model(cfg.platform_model);
    if (water.width() != s.width() || water.height() != s.height())
        throw DataError("platform_mask: water mask and stack dimensions differ");
    BinaryMask out(s.width(), s.height());
    parallel_for(static_cast<std::size_t>(s.height()), [&](std::size_t row) {
        std::vector<double> scratch, y;
        const int r = static_cast<int>(row);
        for (int c = 0; c < s.width(); ++c) {
            if (!water.at(r, c)) continue;
            cfg.platform_model.forward_into(s.pixel(r, c), scratch, y);
            if (y[0] >= cfg.platform_threshold) out.set(r, c);
        }
    });
    return out;
}

std::pair<double, double> pixel_to_geo(const GeoInfo& geo, double row, double col) {
    return {geo.origin_easting + (col + 0.5) * BandStack::kPixelSize,
            geo.origin_northing - (row + 0.5) * BandStack::kPixelSize};
}

CensusProducts run_census_detailed(const BandStack& s, const CensusConfig& cfg) {
    validate(cfg);
    CensusProducts out;
    try {
        out.raw_water = detect_water(s, cfg.water_method);
    } catch (const DegenerateHistogramError& e) {
        throw NoWaterError(fmt::format("no water found ({})", e.what()));
    }
    out.water = clean_water_mask(out.raw_water, cfg.water_cleanup);
    out.platform = close(platform_mask(s, out.water, cfg), cfg.platform_close_se);

    std::vector<Blob> blobs = label_components(out.platform);
    for (Blob& b : blobs) compute_features(b);
    FilterResult filtered = filter_blobs(blobs, cfg.blob_filter);
    out.accepted = std::move(filtered.accepted);
    out.rejected = std::move(filtered.rejected);

    std::vector<CensusRecord> records;
    for (const Blob& b : out.accepted) {
        const BlobGeometry& g = *b.geometry;
        CensusRecord rec;
        rec.centroid_row = g.centroid_row;
        rec.centroid_col = g.centroid_col;
        rec.area_px = g.area;
        rec.bbox = g.bbox;
        if (s.geo()) {
            const auto [e, n] = pixel_to_geo(*s.geo(), g.centroid_row, g.centroid_col);
            rec.easting = e;
            rec.northing = n;
        }
        records.push_back(rec);
    }
    std::sort(records.begin(), records.end(), [](const CensusRecord& a, const CensusRecord& b) {
        if (a.centroid_row != b.centroid_row) return a.centroid_row < b.centroid_row;
        return a.centroid_col < b.centroid_col;
    });
    for (std::size_t i = 0; i < records.size(); ++i) records[i].id = static_cast<int>(i) + 1;

    out.census.records = std::move(records);
    out.census.source = s.source();
    out.census.config_digest = config_digest(cfg);
    out.census.geo = s.geo();
    return out;
}

Census run_census(const BandStack& s, const CensusConfig& cfg) {
    return run_census_detailed(s, cfg).census;
}

}  // namespace raftcensus
