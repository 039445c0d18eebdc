#include "raftcensus/blobs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "raftcensus/error.hpp"

namespace raftcensus {

std::vector<Blob> label_components(const BinaryMask& m) {
    const int w = m.width();
    const int h = m.height();
    std::vector<int> labels(m.size(), 0);
    std::vector<Blob> blobs;
    std::vector<PixelCoord> stack;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * w + c;
            if (!m.bits()[idx] || labels[idx] != 0) continue;
            Blob blob;
            blob.label = static_cast<int>(blobs.size()) + 1;
            labels[idx] = blob.label;
            stack.push_back({r, c});
            while (!stack.empty()) {
                const PixelCoord p = stack.back();
                stack.pop_back();
                blob.pixels.push_back(p);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nr = p.row + dy;
                        const int nc = p.col + dx;
                        if (!m.in_bounds(nr, nc)) continue;
                        const std::size_t n = static_cast<std::size_t>(nr) * w + nc;
                        if (m.bits()[n] && labels[n] == 0) {
                            labels[n] = blob.label;
                            stack.push_back({nr, nc});
                        }
                    }
            }
            std::sort(blob.pixels.begin(), blob.pixels.end());
            blobs.push_back(std::move(blob));
        }
    }
    return blobs;
}

namespace {

BoundingBox bounds(const std::vector<PixelCoord>& pixels) {
    BoundingBox b{pixels.front().row, pixels.front().col, pixels.front().row, pixels.front().col};
    for (const auto& p : pixels) {
        b.r0 = std::min(b.r0, p.row);
        b.c0 = std::min(b.c0, p.col);
        b.r1 = std::max(b.r1, p.row);
        b.c1 = std::max(b.c1, p.col);
    }
    return b;
}

// Local raster of the blob with a one-pixel background margin.
struct LocalRaster {
    int r0, c0, w, h;
    std::vector<std::uint8_t> bits;
    bool at(int r, int c) const {
        if (r < 0 || c < 0 || r >= h || c >= w) return false;
        return bits[static_cast<std::size_t>(r) * w + c] != 0;
    }
};

LocalRaster rasterize(const std::vector<PixelCoord>& pixels) {
    const BoundingBox b = bounds(pixels);
    LocalRaster lr{b.r0 - 1, b.c0 - 1, b.c1 - b.c0 + 3, b.r1 - b.r0 + 3, {}};
    lr.bits.assign(static_cast<std::size_t>(lr.w) * lr.h, 0);
    for (const auto& p : pixels)
        lr.bits[static_cast<std::size_t>(p.row - lr.r0) * lr.w + (p.col - lr.c0)] = 1;
    return lr;
}

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
long ceil_div(long a, long b) { return -floor_div(-a, b); }

struct Pt {
    long x, y;
    auto operator<=>(const Pt&) const = default;
};

long cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

int euler_number(const std::vector<PixelCoord>& pixels) {
    if (pixels.empty()) return 0;
    const LocalRaster lr = rasterize(pixels);
    long q1 = 0, q3 = 0, qd = 0;
    for (int r = -1; r < lr.h; ++r)
        for (int c = -1; c < lr.w; ++c) {
            const bool a = lr.at(r, c), b = lr.at(r, c + 1), d = lr.at(r + 1, c), e = lr.at(r + 1, c + 1);
            const int n = a + b + d + e;
            if (n == 1) ++q1;
            else if (n == 3) ++q3;
            else if (n == 2 && a == e) ++qd;
        }
    return static_cast<int>((q1 - q3 - 2 * qd) / 4);
}

int convex_area(const std::vector<PixelCoord>& pixels) {
    if (pixels.empty()) return 0;
    // Doubled coordinates: pixel (r, c) has corners (2c +- 1, 2r +- 1) and its
    // centre at (2c, 2r). Only the outermost pixels of each row can contribute
    // hull vertices.
    const BoundingBox b = bounds(pixels);
    std::vector<int> lo(static_cast<std::size_t>(b.r1 - b.r0 + 1), b.c1 + 1);
    std::vector<int> hi(lo.size(), b.c0 - 1);
    for (const auto& p : pixels) {
        auto& l = lo[static_cast<std::size_t>(p.row - b.r0)];
        auto& h = hi[static_cast<std::size_t>(p.row - b.r0)];
        l = std::min(l, p.col);
        h = std::max(h, p.col);
    }
    std::vector<Pt> pts;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) continue;
        const long y = 2L * (b.r0 + static_cast<long>(i));
        for (long dy : {-1L, 1L}) {
            pts.push_back({2L * lo[i] - 1, y + dy});
            pts.push_back({2L * hi[i] + 1, y + dy});
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Andrew's monotone chain, collinear points dropped.
    std::vector<Pt> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Pt& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);

    // Scanline through each row of pixel centres: intersect with every edge
    // spanning that row and count centres between the extreme crossings.
    long count = 0;
    for (long r = b.r0; r <= b.r1; ++r) {
        const long y = 2 * r;
        long c_min = 0, c_max = -1;
        bool any = false;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Pt& p = hull[i];
            const Pt& q = hull[(i + 1) % hull.size()];
            if (p.y == q.y || y < std::min(p.y, q.y) || y > std::max(p.y, q.y)) continue;
            // x = p.x + (y - p.y)(q.x - p.x)/(q.y - p.y); centre column = x / 2.
            long num = p.x * (q.y - p.y) + (y - p.y) * (q.x - p.x);
            long den = q.y - p.y;
            if (den < 0) {
                num = -num;
                den = -den;
            }
            const long lo_c = ceil_div(num, 2 * den);
            const long hi_c = floor_div(num, 2 * den);
            if (!any) {
                c_min = lo_c;
                c_max = hi_c;
                any = true;
            } else {
                c_min = std::min(c_min, lo_c);
                c_max = std::max(c_max, hi_c);
            }
        }
        if (any && c_max >= c_min) count += c_max - c_min + 1;
    }
    return static_cast<int>(count);
}

void compute_features(Blob& b) {
    if (b.pixels.empty()) throw DataError("compute_features: empty blob");
    BlobGeometry g;
    g.area = static_cast<int>(b.pixels.size());
    double sr = 0.0, sc = 0.0;
    for (const auto& p : b.pixels) {
        sr += p.row;
        sc += p.col;
    }
    g.centroid_row = sr / g.area;
    g.centroid_col = sc / g.area;
    g.bbox = bounds(b.pixels);
    g.equivalent_diameter = std::sqrt(4.0 * g.area / std::numbers::pi);
    g.euler_number = euler_number(b.pixels);
    g.convex_area = convex_area(b.pixels);
    g.solidity = static_cast<double>(g.area) / g.convex_area;
    b.geometry = g;
}

void validate(const BlobFilter& f) {
    if (f.max_area <= 0) throw DataError("max_area must be positive");
    if (!(f.max_equivalent_diameter > 0.0)) throw DataError("max equivalent diameter must be positive");
    if (!(f.min_solidity > 0.0 && f.min_solidity <= 1.0))
        throw DataError("min_solidity must lie in (0, 1]");
}

FilterResult filter_blobs(const std::vector<Blob>& blobs, const BlobFilter& f) {
    validate(f);
    FilterResult result;
    for (const Blob& b : blobs) {
        if (!b.geometry) throw DataError(fmt::format("blob {} has no computed features", b.label));
        const BlobGeometry& g = *b.geometry;
        const char* reason = nullptr;
        if (!(g.area < f.max_area)) reason = "area";
        else if (!(g.equivalent_diameter < f.max_equivalent_diameter)) reason = "eqdiam";
        else if (g.euler_number != f.required_euler) reason = "euler";
        else if (!(g.solidity > f.min_solidity)) reason = "solidity";
        if (reason) result.rejected.push_back({b, reason});
        else result.accepted.push_back(b);
    }
    return result;
}

}  // namespace raftcensus
