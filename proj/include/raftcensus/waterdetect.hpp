#pragma once

#include <array>
#include <cstdint>
#include <variant>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/mask.hpp"
#include "raftcensus/mlp.hpp"
#include "raftcensus/morphology.hpp"

namespace raftcensus {

using Histogram = std::array<std::uint64_t, 256>;

/// McFeeters NDWI (G - NIR) / (G + NIR); pixels with G + NIR == 0 map to 0.
Plane compute_ndwi(const Plane& green, const Plane& nir);

/// Otsu split t maximising the between-class variance of {<= t} vs {> t};
/// smallest t wins ties. Candidates are compared exactly in integer
/// arithmetic. Throws DataError("degenerate histogram") when fewer than two
/// bins are occupied; the total count must stay below 2^32.
int otsu_threshold(const Histogram& hist);

/// Otsu's separability measure: between-class over total variance at t.
double otsu_separability(const Histogram& hist, int t);

/// Bin of an NDWI value in [-1, 1] on a 256-bin grid.
int ndwi_bin(double ndwi);
Histogram ndwi_histogram(const Plane& ndwi);

struct NdwiOptions {
    /// When the Otsu classes' mean NDWI differ by less than this, the scene is
    /// treated as a single cover type and the NDWI > 0 rule decides instead.
    double min_class_separation = 0.2;
};

/// Binary water mask: NDWI bin > Otsu threshold.
BinaryMask water_mask_ndwi(const BandStack& s, const NdwiOptions& opt = {});

/// Pixel is water iff output[water_class - 1] >= threshold (water_class is
/// 1-based).
BinaryMask water_mask_mlp(const BandStack& s, const MlpModel& m, int water_class = 3,
                          double threshold = 0.90);

struct NdwiOtsu {
    NdwiOptions options;
};
struct MlpWater {
    MlpModel model;
    int water_class = 3;
    double threshold = 0.90;
};
using WaterMethod = std::variant<NdwiOtsu, MlpWater>;

void validate(const WaterMethod& method);
BinaryMask detect_water(const BandStack& s, const WaterMethod& method);

struct WaterCleanup {
    StructElem close_se = StructElem::square(5);
    StructElem open_se = StructElem::square(3);
    StructElem erode_se = StructElem::square(5);
};

/// erode(open(close(mask))) with the three elements above.
BinaryMask clean_water_mask(const BinaryMask& mask, const WaterCleanup& se = {});

/// Checks that a model consumes the ten bands in canonical order.
void require_band_model(const MlpModel& m);

}  // namespace raftcensus
