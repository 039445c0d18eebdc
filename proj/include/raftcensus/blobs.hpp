#pragma once

#include <optional>
#include <string>
#include <vector>

#include "raftcensus/mask.hpp"

namespace raftcensus {

struct PixelCoord {
    int row = 0;
    int col = 0;
    auto operator<=>(const PixelCoord&) const = default;
};

struct BoundingBox {
    int r0 = 0, c0 = 0, r1 = 0, c1 = 0;  ///< inclusive
    bool operator==(const BoundingBox&) const = default;
};

struct BlobGeometry {
    int area = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    BoundingBox bbox;
    double equivalent_diameter = 0.0;  ///< sqrt(4 * area / pi)
    int euler_number = 1;              ///< 1 - holes
    int convex_area = 0;
    double solidity = 1.0;             ///< area / convex_area
};

struct Blob {
    int label = 0;
    std::vector<PixelCoord> pixels;  ///< row-major order
    std::optional<BlobGeometry> geometry;
};

/// 8-connected foreground components, labelled 1..N in row-major order of
/// their first pixel.
std::vector<Blob> label_components(const BinaryMask& m);

/// Fills blob.geometry. Holes are 4-connected background regions enclosed by
/// the blob; the convex area counts pixel centres inside or on the hull of
/// all pixel corners.
void compute_features(Blob& b);

/// Euler number of a single blob's pixel set using 8/4 connectivity,
/// computed from 2x2 bit-quad counts.
int euler_number(const std::vector<PixelCoord>& pixels);
/// Pixel centres covered by the convex hull of the pixels' unit squares.
int convex_area(const std::vector<PixelCoord>& pixels);

struct BlobFilter {
    int max_area = 25;
    double max_equivalent_diameter = 6.0;
    double min_solidity = 0.8;
    int required_euler = 1;
};
void validate(const BlobFilter& f);

struct RejectedBlob {
    Blob blob;
    std::string reason;  ///< "area", "eqdiam", "euler" or "solidity"
};

struct FilterResult {
    std::vector<Blob> accepted;
    std::vector<RejectedBlob> rejected;
};

/// Keeps blobs that pass all four predicates; rejections carry the first
/// failing one. Throws DataError when a blob has no geometry yet.
FilterResult filter_blobs(const std::vector<Blob>& blobs, const BlobFilter& f);

}  // namespace raftcensus
