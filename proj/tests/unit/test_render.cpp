#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "raftcensus/datasets.hpp"
#include "raftcensus/error.hpp"
#include "raftcensus/pipeline.hpp"
#include "raftcensus/render.hpp"

using namespace raftcensus;

namespace {

std::size_t marker_pixels(const RgbImage& img) {
    std::size_t n = 0;
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) n += img.at(r, c) == kMarkerColour;
    return n;
}

bool is_plus_at(const RgbImage& img, int r, int c) {
    for (auto [dr, dc] : {std::pair{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}})
        if (img.at(r + dr, c + dc) != kMarkerColour) return false;
    return true;
}

}  // namespace

TEST(Render, EmptyMasksGiveGreyscale) {
    SynthParams p;
    p.width = p.height = 64;
    const auto sc = generate_synthetic_scene(p);
    const BinaryMask none(64, 64);
    const RgbImage img = render_overlay(sc.stack, none, none, Census{});
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) {
            const auto px = img.at(r, c);
            EXPECT_EQ(px[0], px[1]);
            EXPECT_EQ(px[1], px[2]);
        }
}

TEST(Render, AllWaterIsUniformTint) {
    const BandStack s = fixtures::constant_stack(16, 8, default_spectra().water);
    const RgbImage img = render_overlay(s, BinaryMask(16, 8, true), BinaryMask(16, 8), Census{});
    const auto first = img.at(0, 0);
    EXPECT_GT(first[2], first[0]);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 16; ++c) EXPECT_EQ(img.at(r, c), first);
}

TEST(Render, PlatformTintedRed) {
    const BandStack s = fixtures::constant_stack(4, 4, default_spectra().water);
    BinaryMask plat(4, 4);
    plat.set(2, 2);
    const auto img = render_overlay(s, BinaryMask(4, 4, true), plat, Census{});
    EXPECT_GT(img.at(2, 2)[0], img.at(2, 2)[2]);
}

TEST(Render, OneCrossPerRaft) {
    SynthParams p;
    p.width = p.height = 256;
    p.raft_count = 5;
    p.seed = 4;
    const auto sc = generate_synthetic_scene(p);
    CensusConfig cfg;
    cfg.platform_model = fixtures::trained_platform_model();
    const auto prod = run_census_detailed(sc.stack, cfg);
    ASSERT_EQ(prod.census.count(), 5u);
    const RgbImage img = render_overlay(sc.stack, prod.water, prod.platform, prod.census);
    EXPECT_EQ(marker_pixels(img), 25u);
    for (const auto& t : sc.truth.raft_centroids)
        EXPECT_TRUE(is_plus_at(img, static_cast<int>(std::lround(t.row)), static_cast<int>(std::lround(t.col))))
            << "raft " << t.id;
}

TEST(Render, PpmBytesDeterministic) {
    SynthParams p;
    p.width = p.height = 32;
    p.raft_count = 1;
    const auto sc = generate_synthetic_scene(p);
    const auto a = encode_ppm(render_overlay(sc.stack, sc.truth.water_mask, sc.truth.raft_mask, Census{}));
    const auto b = encode_ppm(render_overlay(sc.stack, sc.truth.water_mask, sc.truth.raft_mask, Census{}));
    EXPECT_EQ(a, b);
    const std::string head(a.begin(), a.begin() + 13);
    EXPECT_EQ(head, "P6\n32 32\n255\n");
    EXPECT_EQ(a.size(), 13u + 32 * 32 * 3);
}

TEST(Render, ErrorsOnMismatchAndUnwritablePath) {
    const BandStack s = fixtures::constant_stack(4, 4, default_spectra().water);
    EXPECT_THROW(render_overlay(s, BinaryMask(4, 3), BinaryMask(4, 4), Census{}), DataError);
    const auto img = render_overlay(s, BinaryMask(4, 4), BinaryMask(4, 4), Census{});
    EXPECT_THROW(write_ppm(img, "/nonexistent_dir/x.ppm"), DataError);
}
