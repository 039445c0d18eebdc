#include "raftcensus/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "raftcensus/error.hpp"

namespace raftcensus {

RgbImage render_overlay(const BandStack& s, const BinaryMask& water, const BinaryMask& platform,
                        const Census& census) {
    const int w = s.width();
    const int h = s.height();
    if (water.width() != w || water.height() != h || platform.width() != w || platform.height() != h)
        throw DataError("render_overlay: mask dimensions differ from stack");

    const auto& green = s.plane(BandId::B3).values();
    const auto [lo_it, hi_it] = std::minmax_element(green.begin(), green.end());
    const double lo = green.empty() ? 0.0 : *lo_it;
    const double span = green.empty() ? 0.0 : *hi_it - lo;

    RgbImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3)};
    for (std::size_t i = 0; i < green.size(); ++i) {
        const int g = span > 0.0 ? static_cast<int>(std::lround((green[i] - lo) / span * 255.0)) : 0;
        const int half = g / 2;
        std::uint8_t* px = img.rgb.data() + 3 * i;
        if (platform.bits()[i]) {
            px[0] = static_cast<std::uint8_t>(half + 128);
            px[1] = px[2] = static_cast<std::uint8_t>(half);
        } else if (water.bits()[i]) {
            px[0] = px[1] = static_cast<std::uint8_t>(half);
            px[2] = static_cast<std::uint8_t>(half + 128);
        } else {
            px[0] = px[1] = px[2] = static_cast<std::uint8_t>(g);
        }
    }

    for (const auto& rec : census.records) {
        const int r = static_cast<int>(std::lround(rec.centroid_row));
        const int c = static_cast<int>(std::lround(rec.centroid_col));
        constexpr int kPlus[5][2] = {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (const auto& d : kPlus) {
            const int rr = r + d[0];
            const int cc = c + d[1];
            if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
            std::uint8_t* px = img.rgb.data() + 3 * (static_cast<std::size_t>(rr) * w + cc);
            std::copy(kMarkerColour.begin(), kMarkerColour.end(), px);
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
    const std::string header = fmt::format("P6\n{} {}\n255\n", img.width, img.height);
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.rgb.begin(), img.rgb.end());
    return out;
}

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    const auto bytes = encode_ppm(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(fmt::format("failed writing {}", path.string()));
}

}  // namespace raftcensus
