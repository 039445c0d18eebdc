#include "raftcensus/mask.hpp"

#include <algorithm>
#include <numeric>

#include "raftcensus/error.hpp"

namespace raftcensus {

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw DataError("mask dimensions must be non-negative");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

template <typename Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, Op op) {
    if (!a.same_shape(b)) throw DataError("mask dimension mismatch");
    BinaryMask out(a.width(), a.height());
    auto& o = out.bits();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = op(a.bits()[i] != 0, b.bits()[i] != 0) ? 1 : 0;
    return out;
}

}  // namespace

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    return combine(a, b, [](bool x, bool y) { return x && y; });
}
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    return combine(a, b, [](bool x, bool y) { return x || y; });
}
BinaryMask mask_minus(const BinaryMask& a, const BinaryMask& b) {
    return combine(a, b, [](bool x, bool y) { return x && !y; });
}
BinaryMask mask_not(const BinaryMask& a) {
    BinaryMask out(a.width(), a.height());
    for (std::size_t i = 0; i < out.size(); ++i) out.bits()[i] = a.bits()[i] ? 0 : 1;
    return out;
}
bool is_subset(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw DataError("mask dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.bits()[i] && !b.bits()[i]) return false;
    return true;
}

}  // namespace raftcensus
