#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/census_io.hpp"
#include "raftcensus/mask.hpp"
#include "raftcensus/mlp.hpp"
#include "raftcensus/morphology.hpp"

namespace raftcensus {

using Spectrum = std::array<double, kBandCount>;

/// Mean reflectance per surface class, in canonical band order.
struct ClassSpectra {
    Spectrum water{};
    Spectrum land{};
    Spectrum vegetation{};
    Spectrum raft{};
    bool operator==(const ClassSpectra&) const = default;
};

/// Built-in table; identical to config/default_spectra.json.
ClassSpectra default_spectra();
ClassSpectra load_spectra(const std::filesystem::path& path);
std::string spectra_to_json(const ClassSpectra& s);

struct LabeledPixels {
    LabeledSet samples;  ///< n_features == 10
    std::vector<std::string> class_names;
};

/// CSV with header `b2,...,b12,label`.
std::string labeled_pixels_to_csv(const LabeledPixels& p);

/// Platform training samples: bottom-hat holes of the water mask (optionally
/// intersected with a correction mask) labelled 1, plus the same number of
/// water pixels drawn at random, labelled 0.
LabeledPixels extract_platform_samples(const BandStack& s, const BinaryMask& water,
                                       const std::optional<BinaryMask>& correction,
                                       std::uint64_t seed = 1,
                                       const StructElem& se = StructElem::square(5));

inline constexpr std::size_t kDefaultPlatformSamples = 6488;

/// Balanced raft / water pixels drawn straight from the class spectra.
LabeledPixels synthesize_platform_pixels(const ClassSpectra& spectra,
                                         std::size_t per_class = kDefaultPlatformSamples,
                                         double noise_sigma = 0.004, std::uint64_t seed = 1);

enum class SceneLayout { Coastal, LandOnly, WaterOnly };

struct SynthParams {
    int width = 512;
    int height = 512;
    int raft_count = 10;
    int raft_size_px = 3;  ///< 2 or 3
    double noise_sigma = 0.004;
    std::uint64_t seed = 1;
    ClassSpectra spectra = default_spectra();
    SceneLayout layout = SceneLayout::Coastal;
    int min_raft_gap = 4;  ///< background pixels between any two rafts
    int coast_margin = 8;  ///< clearance from land and from the frame
    bool georeferenced = true;
};

/// Per-pixel surface class of a synthetic scene.
enum class SurfaceClass : std::uint8_t { Land = 0, Vegetation = 1, Water = 2, Raft = 3 };

struct SceneTruth {
    BinaryMask water_mask;  ///< water region, rafts included
    BinaryMask raft_mask;
    std::vector<TruthPoint> raft_centroids;  ///< ordered by (row, col)
    std::vector<SurfaceClass> classes;       ///< row-major
};

struct SyntheticScene {
    BandStack stack;
    SceneTruth truth;
};

SyntheticScene generate_synthetic_scene(const SynthParams& p);

/// Three-class (land, vegetation, water) training pixels from a labelled
/// scene; raft pixels count as land. Up to `per_class` pixels per class.
LabeledPixels water_training_pixels(const BandStack& s, const std::vector<SurfaceClass>& classes,
                                    std::size_t per_class, std::uint64_t seed = 1);

/// Class map raster as 8-bit PGM values 1..4 (land, vegetation, water, raft).
void write_class_map(const std::vector<SurfaceClass>& classes, int width, int height,
                     const std::filesystem::path& path);
std::vector<SurfaceClass> read_class_map(const std::filesystem::path& path, int& width, int& height);
void write_mask_pgm(const BinaryMask& m, const std::filesystem::path& path);
BinaryMask read_mask_pgm(const std::filesystem::path& path);

}  // namespace raftcensus
