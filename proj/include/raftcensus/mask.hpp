#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace raftcensus {

/// Row-major boolean plane. Stored as bytes (0/1) so rows can be combined
/// with plain loops.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool v = true) { bits_[index(row, col)] = v ? 1 : 0; }
    bool in_bounds(int row, int col) const {
        return row >= 0 && col >= 0 && row < height_ && col < width_;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& bits() { return bits_; }

    std::size_t count() const;
    bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
/// a \ b
BinaryMask mask_minus(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_not(const BinaryMask& a);
bool is_subset(const BinaryMask& a, const BinaryMask& b);

}  // namespace raftcensus
