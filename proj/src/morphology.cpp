#include "raftcensus/morphology.hpp"

#include <algorithm>
#include <cstdint>

#include <fmt/format.h>

#include "raftcensus/error.hpp"

namespace raftcensus {

StructElem StructElem::square(int k) {
    if (k < 1 || k % 2 == 0) throw DataError(fmt::format("square SE size must be odd, got {}", k));
    const int r = k / 2;
    std::vector<std::pair<int, int>> offs;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) offs.emplace_back(dy, dx);
    return StructElem(std::move(offs), r, fmt::format("square:{}", k));
}

StructElem StructElem::disk(int r) {
    if (r < 1) throw DataError(fmt::format("disk SE radius must be >= 1, got {}", r));
    std::vector<std::pair<int, int>> offs;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dy * dy + dx * dx <= r * r) offs.emplace_back(dy, dx);
    return StructElem(std::move(offs), r, fmt::format("disk:{}", r));
}

StructElem StructElem::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw DataError(fmt::format("bad structuring element '{}'", text));
    const std::string kind = text.substr(0, colon);
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw DataError(fmt::format("bad structuring element '{}'", text));
    }
    if (kind == "square") return square(n);
    if (kind == "disk") return disk(n);
    throw DataError(fmt::format("bad structuring element '{}'", text));
}

namespace {

// Accumulates the shifted mask for every offset with AND (erosion) or OR
// (dilation); neighbours outside the frame contribute false.
template <bool IsErosion>
BinaryMask shift_accumulate(const BinaryMask& m, const StructElem& se) {
    const int w = m.width();
    const int h = m.height();
    BinaryMask out(w, h, IsErosion);
    const std::uint8_t* src = m.bits().data();
    std::uint8_t* dst = out.bits().data();
    for (const auto& [dy, dx] : se.offsets()) {
        const int c_lo = std::clamp(-dx, 0, w);
        const int c_hi = std::clamp(w - dx, 0, w);
        for (int r = 0; r < h; ++r) {
            std::uint8_t* drow = dst + static_cast<std::ptrdiff_t>(r) * w;
            const int sr = r + dy;
            if (sr < 0 || sr >= h) {
                if constexpr (IsErosion) std::fill(drow, drow + w, std::uint8_t{0});
                continue;
            }
            const std::uint8_t* srow = src + static_cast<std::ptrdiff_t>(sr) * w + dx;
            if constexpr (IsErosion) {
                std::fill(drow, drow + c_lo, std::uint8_t{0});
                std::fill(drow + c_hi, drow + w, std::uint8_t{0});
                for (int c = c_lo; c < c_hi; ++c) drow[c] &= srow[c];
            } else {
                for (int c = c_lo; c < c_hi; ++c) drow[c] |= srow[c];
            }
        }
    }
    return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& m, const StructElem& se) { return shift_accumulate<true>(m, se); }
BinaryMask dilate(const BinaryMask& m, const StructElem& se) { return shift_accumulate<false>(m, se); }
BinaryMask open(const BinaryMask& m, const StructElem& se) { return dilate(erode(m, se), se); }
BinaryMask close(const BinaryMask& m, const StructElem& se) { return erode(dilate(m, se), se); }
BinaryMask bottom_hat(const BinaryMask& m, const StructElem& se) { return mask_minus(close(m, se), m); }

}  // namespace raftcensus
