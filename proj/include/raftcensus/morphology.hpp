#pragma once

#include <string>
#include <utility>
#include <vector>

#include "raftcensus/mask.hpp"

namespace raftcensus {

/// Structuring element: a symmetric set of (dy, dx) offsets containing the
/// origin.
class StructElem {
public:
    /// k x k square, k odd and >= 1.
    static StructElem square(int k);
    /// Offsets with dy^2 + dx^2 <= r^2, r >= 1.
    static StructElem disk(int r);
    /// Parses "square:K" or "disk:R".
    static StructElem parse(const std::string& text);

    const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }
    int radius() const { return radius_; }
    std::string describe() const { return name_; }

    bool operator==(const StructElem& o) const { return offsets_ == o.offsets_; }

private:
    StructElem(std::vector<std::pair<int, int>> offsets, int radius, std::string name)
        : offsets_(std::move(offsets)), radius_(radius), name_(std::move(name)) {}

    std::vector<std::pair<int, int>> offsets_;
    int radius_ = 0;
    std::string name_;
};

// Out-of-frame neighbours count as false for both erosion and dilation.
BinaryMask erode(const BinaryMask& m, const StructElem& se);
BinaryMask dilate(const BinaryMask& m, const StructElem& se);
BinaryMask open(const BinaryMask& m, const StructElem& se);
BinaryMask close(const BinaryMask& m, const StructElem& se);
/// close(m) \ m: dark holes the closing fills in.
BinaryMask bottom_hat(const BinaryMask& m, const StructElem& se);

}  // namespace raftcensus
