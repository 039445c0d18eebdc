#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "raftcensus/datasets.hpp"
#include "raftcensus/error.hpp"
#include "raftcensus/waterdetect.hpp"

using namespace raftcensus;

namespace {

/// Spectrum table keyed by surface class.
const Spectrum& class_mean(const ClassSpectra& s, SurfaceClass c) {
    switch (c) {
        case SurfaceClass::Land: return s.land;
        case SurfaceClass::Vegetation: return s.vegetation;
        case SurfaceClass::Water: return s.water;
        case SurfaceClass::Raft: return s.raft;
    }
    return s.water;
}

double ndwi_of(const Spectrum& x) {
    const double g = x[band_index(BandId::B3)], n = x[band_index(BandId::B8)];
    return (g - n) / (g + n);
}

}  // namespace

TEST(Spectra, ConfigFileMatchesBuiltInTable) {
    const ClassSpectra file = load_spectra(std::filesystem::path(RAFTCENSUS_SOURCE_DIR) / "config" / "default_spectra.json");
    EXPECT_EQ(file, default_spectra());
}

TEST(Spectra, JsonRoundTripAndValidation) {
    const auto dir = fixtures::temp_dir("spectra");
    std::ofstream(dir / "s.json") << spectra_to_json(default_spectra());
    EXPECT_EQ(load_spectra(dir / "s.json"), default_spectra());
    std::ofstream(dir / "bad.json") << R"({"water": [0.1, 0.2]})";
    EXPECT_THROW(load_spectra(dir / "bad.json"), DataError);
}

TEST(Spectra, NdwiMarginAtZeroNoise) {
    const ClassSpectra s = default_spectra();
    const double water = ndwi_of(s.water);
    const double others = std::max({ndwi_of(s.land), ndwi_of(s.vegetation), ndwi_of(s.raft)});
    EXPECT_GT(water - others, 0.2);
    EXPECT_GT(water, 0.0);
    EXPECT_LT(others, 0.0);
}

TEST(Mining, FourHolePixels) {
    const BandStack s = fixtures::constant_stack(20, 20, default_spectra().water);
    BinaryMask water(20, 20, true);
    for (auto [r, c] : {std::pair{5, 5}, {5, 6}, {6, 5}, {6, 6}}) water.set(r, c, false);
    const auto px = extract_platform_samples(s, water, std::nullopt);
    ASSERT_EQ(px.samples.size(), 8u);
    EXPECT_EQ(std::count(px.samples.labels.begin(), px.samples.labels.end(), 1), 4);
    EXPECT_EQ(std::count(px.samples.labels.begin(), px.samples.labels.end(), 0), 4);
    EXPECT_EQ(px.class_names, (std::vector<std::string>{"water", "platform"}));
}

TEST(Mining, CorrectionVetoesAll) {
    const BandStack s = fixtures::constant_stack(20, 20, default_spectra().water);
    BinaryMask water(20, 20, true);
    water.set(9, 9, false);
    try {
        extract_platform_samples(s, water, BinaryMask(20, 20, false));
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("zero candidates"), std::string::npos);
    }
}

TEST(Mining, CorrectionRestrictsCandidates) {
    const BandStack s = fixtures::constant_stack(20, 20, default_spectra().water);
    BinaryMask water(20, 20, true);
    water.set(5, 5, false);
    water.set(12, 12, false);
    BinaryMask corr(20, 20);
    corr.set(12, 12);
    const auto px = extract_platform_samples(s, water, corr);
    EXPECT_EQ(px.samples.size(), 2u);
}

TEST(Mining, DimensionMismatch) {
    const BandStack s = fixtures::constant_stack(10, 10, default_spectra().water);
    EXPECT_THROW(extract_platform_samples(s, BinaryMask(10, 9, true), std::nullopt), DataError);
}

TEST(Mining, SyntheticScenePrecisionAndBalance) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        SynthParams p;
        p.seed = seed;
        const auto scene = generate_synthetic_scene(p);
        const BinaryMask water = water_mask_ndwi(scene.stack);
        const auto px = extract_platform_samples(scene.stack, water, std::nullopt, seed);
        const auto& lab = px.samples.labels;
        const auto pos = std::count(lab.begin(), lab.end(), 1);
        EXPECT_EQ(pos, std::count(lab.begin(), lab.end(), 0));
        const BinaryMask bh = bottom_hat(water, StructElem::square(5));
        const auto raft_hits = mask_and(bh, scene.truth.raft_mask).count();
        EXPECT_EQ(static_cast<std::size_t>(pos), bh.count());
        EXPECT_GE(static_cast<double>(raft_hits), 0.95 * static_cast<double>(pos)) << "seed " << seed;
    }
}

TEST(Mining, DeterministicPerSeed) {
    const auto scene = generate_synthetic_scene(SynthParams{});
    const BinaryMask water = water_mask_ndwi(scene.stack);
    const auto a = extract_platform_samples(scene.stack, water, std::nullopt, 3);
    const auto b = extract_platform_samples(scene.stack, water, std::nullopt, 3);
    EXPECT_EQ(a.samples.x, b.samples.x);
    EXPECT_EQ(labeled_pixels_to_csv(a), labeled_pixels_to_csv(b));
}

TEST(SyntheticPixels, DefaultSizeAndBalance) {
    const auto px = synthesize_platform_pixels(default_spectra());
    EXPECT_EQ(px.samples.size(), 2 * kDefaultPlatformSamples);
    EXPECT_EQ(px.samples.size(), 12976u);
    EXPECT_EQ(std::count(px.samples.labels.begin(), px.samples.labels.end(), 1), 6488);
    for (double v : px.samples.x) EXPECT_GE(v, 0.0);
}

TEST(SyntheticPixels, CsvHeader) {
    const auto px = synthesize_platform_pixels(default_spectra(), 2, 0.0, 1);
    std::istringstream in(labeled_pixels_to_csv(px));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "b2,b3,b4,b5,b6,b7,b8,b8a,b11,b12,label");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Scene, ZeroNoiseEqualsClassMeans) {
    SynthParams p;
    p.noise_sigma = 0.0;
    p.width = p.height = 128;
    const auto scene = generate_synthetic_scene(p);
    for (int r = 0; r < p.height; ++r)
        for (int c = 0; c < p.width; ++c) {
            const auto cls = scene.truth.classes[static_cast<std::size_t>(r * p.width + c)];
            const auto px = scene.stack.pixel(r, c);
            const Spectrum& want = class_mean(p.spectra, cls);
            for (std::size_t b = 0; b < kBandCount; ++b) ASSERT_EQ(px[b], want[b]);
        }
}

TEST(Scene, NoRaftsMeansWaterRegionOnly) {
    SynthParams p;
    p.raft_count = 0;
    p.width = p.height = 128;
    const auto scene = generate_synthetic_scene(p);
    EXPECT_EQ(scene.truth.raft_mask.count(), 0u);
    EXPECT_TRUE(scene.truth.raft_centroids.empty());
    for (int r = 0; r < p.height; ++r)
        for (int c = 0; c < p.width; ++c) {
            const auto cls = scene.truth.classes[static_cast<std::size_t>(r * p.width + c)];
            EXPECT_EQ(scene.truth.water_mask.at(r, c), cls == SurfaceClass::Water);
        }
}

TEST(Scene, DeterministicPerSeed) {
    SynthParams p;
    p.seed = 77;
    const auto a = generate_synthetic_scene(p);
    const auto b = generate_synthetic_scene(p);
    EXPECT_EQ(a.stack, b.stack);
    EXPECT_EQ(a.truth.raft_mask, b.truth.raft_mask);
    p.seed = 78;
    EXPECT_FALSE(generate_synthetic_scene(p).stack == a.stack);
}

TEST(Scene, RaftsInsideWaterAndSeparated) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        for (int size : {2, 3}) {
            SynthParams p;
            p.seed = seed;
            p.raft_size_px = size;
            const auto scene = generate_synthetic_scene(p);
            const auto& t = scene.truth;
            EXPECT_EQ(t.raft_centroids.size(), 10u);
            EXPECT_EQ(t.raft_mask.count(), static_cast<std::size_t>(10 * size * size));
            EXPECT_TRUE(is_subset(t.raft_mask, t.water_mask));
            // 8-connected dilation of each raft must not reach another one.
            const BinaryMask grown = dilate(t.raft_mask, StructElem::square(5));
            const auto blobs = [&] {
                std::size_t n = 0;
                BinaryMask seen(p.width, p.height);
                for (int r = 0; r < p.height; ++r)
                    for (int c = 0; c < p.width; ++c)
                        if (grown.at(r, c) && !seen.at(r, c)) {
                            ++n;
                            std::vector<std::pair<int, int>> stack{{r, c}};
                            seen.set(r, c);
                            while (!stack.empty()) {
                                auto [y, x] = stack.back();
                                stack.pop_back();
                                for (int dy = -1; dy <= 1; ++dy)
                                    for (int dx = -1; dx <= 1; ++dx)
                                        if (grown.in_bounds(y + dy, x + dx) && grown.at(y + dy, x + dx) &&
                                            !seen.at(y + dy, x + dx)) {
                                            seen.set(y + dy, x + dx);
                                            stack.push_back({y + dy, x + dx});
                                        }
                            }
                        }
                return n;
            }();
            EXPECT_EQ(blobs, 10u) << "seed " << seed << " size " << size;
            EXPECT_TRUE(std::is_sorted(t.raft_centroids.begin(), t.raft_centroids.end(),
                                       [](const TruthPoint& a, const TruthPoint& b) {
                                           return std::pair{a.row, a.col} < std::pair{b.row, b.col};
                                       }));
        }
}

TEST(Scene, TooManyRaftsRejected) {
    SynthParams p;
    p.width = p.height = 32;
    p.raft_count = 500;
    try {
        generate_synthetic_scene(p);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("rafts do not fit"), std::string::npos);
    }
}

TEST(Scene, GeoreferencingOptional) {
    SynthParams p;
    p.width = p.height = 64;
    EXPECT_TRUE(generate_synthetic_scene(p).stack.geo());
    p.georeferenced = false;
    EXPECT_FALSE(generate_synthetic_scene(p).stack.geo());
}

TEST(WaterPixels, ThreeClassesWithRaftsAsLand) {
    SynthParams p;
    p.width = p.height = 128;
    const auto scene = generate_synthetic_scene(p);
    const auto px = water_training_pixels(scene.stack, scene.truth.classes, 300, 1);
    EXPECT_EQ(px.class_names, (std::vector<std::string>{"land", "vegetation", "water"}));
    for (int cls = 0; cls < 3; ++cls)
        EXPECT_EQ(std::count(px.samples.labels.begin(), px.samples.labels.end(), cls), 300);
}

TEST(RasterIo, ClassMapAndMaskRoundTrip) {
    SynthParams p;
    p.width = 40;
    p.height = 30;
    p.raft_count = 2;
    const auto scene = generate_synthetic_scene(p);
    const auto dir = fixtures::temp_dir("raster");
    write_class_map(scene.truth.classes, p.width, p.height, dir / "c.pgm");
    int w = 0, h = 0;
    EXPECT_EQ(read_class_map(dir / "c.pgm", w, h), scene.truth.classes);
    EXPECT_EQ(w, 40);
    EXPECT_EQ(h, 30);
    write_mask_pgm(scene.truth.raft_mask, dir / "m.pgm");
    EXPECT_EQ(read_mask_pgm(dir / "m.pgm"), scene.truth.raft_mask);
}
