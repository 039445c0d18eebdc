#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/mask.hpp"
#include "raftcensus/pipeline.hpp"

namespace raftcensus {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  ///< row-major triplets

    std::array<std::uint8_t, 3> at(int row, int col) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(row) * width + col);
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
};

inline constexpr std::array<std::uint8_t, 3> kMarkerColour = {255, 255, 0};

/// Grey background from B3 (min-max stretch), water tinted blue, platform
/// pixels tinted red, and a five-pixel plus inside a 3x3 box at every census
/// centroid.
RgbImage render_overlay(const BandStack& s, const BinaryMask& water, const BinaryMask& platform,
                        const Census& census);

/// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);
void write_ppm(const RgbImage& img, const std::filesystem::path& path);

}  // namespace raftcensus
