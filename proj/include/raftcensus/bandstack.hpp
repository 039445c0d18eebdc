#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace raftcensus {

/// The ten Sentinel-2 bands at 10 m or 20 m native resolution. The 60 m
/// bands (B1, B9, B10) have no representation.
enum class BandId { B2, B3, B4, B5, B6, B7, B8, B8A, B11, B12 };

inline constexpr std::size_t kBandCount = 10;

/// Canonical feature order used for every per-pixel classifier.
inline constexpr std::array<BandId, kBandCount> kAllBands = {
    BandId::B2, BandId::B3, BandId::B4,  BandId::B5,  BandId::B6,
    BandId::B7, BandId::B8, BandId::B8A, BandId::B11, BandId::B12};

std::string_view band_name(BandId b);
std::optional<BandId> parse_band(std::string_view name);
/// Native ground sampling distance in meters (10 or 20).
int native_resolution_m(BandId b);
inline std::size_t band_index(BandId b) { return static_cast<std::size_t>(b); }

/// Row-major reflectance plane.
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, double fill = 0.0);
    Plane(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    double at(int row, int col) const { return values_[index(row, col)]; }
    double& at(int row, int col) { return values_[index(row, col)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool operator==(const Plane&) const = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

struct GeoInfo {
    double origin_easting = 0.0;   ///< meters, top-left corner of pixel (0,0)
    double origin_northing = 0.0;  ///< meters; northing decreases with row
    std::string crs;

    bool operator==(const GeoInfo&) const = default;
};

/// Ten co-registered planes at a common 10 m grid.
class BandStack {
public:
    static constexpr double kPixelSize = 10.0;

    BandStack() = default;
    /// Throws DataError unless all planes share the same dimensions and hold
    /// finite, non-negative values.
    BandStack(std::array<Plane, kBandCount> planes, std::optional<GeoInfo> geo = std::nullopt,
              std::string source = {});

    int width() const { return planes_[0].width(); }
    int height() const { return planes_[0].height(); }
    double pixel_size() const { return kPixelSize; }

    const Plane& plane(BandId b) const { return planes_[band_index(b)]; }
    const std::array<Plane, kBandCount>& planes() const { return planes_; }
    const std::optional<GeoInfo>& geo() const { return geo_; }
    const std::string& source() const { return source_; }

    void set_geo(std::optional<GeoInfo> geo) { geo_ = std::move(geo); }

    /// Feature vector of one pixel in kAllBands order.
    std::array<double, kBandCount> pixel(int row, int col) const;

    bool operator==(const BandStack&) const = default;

private:
    std::array<Plane, kBandCount> planes_;
    std::optional<GeoInfo> geo_;
    std::string source_;
};

enum class ResampleMethod { Nearest, Bilinear };

/// Upsample by an integer factor. Bilinear samples at pixel centers
/// (src = (dst + 0.5) / factor - 0.5) with coordinates clamped to the edges.
Plane resample_plane(const Plane& p, int factor, ResampleMethod method);

/// 2x2 (or factor x factor) block mean; inverse direction of resample_plane,
/// used when exporting native-resolution band files.
Plane block_average(const Plane& p, int factor);

BandStack crop(const BandStack& s, int x0, int y0, int w, int h);

/// Reads a JSON manifest of per-band PGM files. 20 m bands must be exactly
/// half the 10 m dimensions unless the manifest sets "resampled": true.
BandStack load_band_stack(const std::filesystem::path& manifest_path);

/// Writes ten PGM files plus manifest.json into `dir`. With `native` set,
/// 20 m bands are block-averaged to half resolution first.
void write_band_stack(const BandStack& s, const std::filesystem::path& dir, bool native = true);

/// Reflectance <-> digital number scaling (DN / 10000).
inline constexpr double kReflectanceScale = 10000.0;

}  // namespace raftcensus
