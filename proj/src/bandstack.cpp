#include "raftcensus/bandstack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "raftcensus/error.hpp"
#include "raftcensus/pgm.hpp"

namespace raftcensus {

namespace {
constexpr std::array<std::string_view, kBandCount> kBandNames = {
    "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B8A", "B11", "B12"};
}

std::string_view band_name(BandId b) { return kBandNames[band_index(b)]; }

std::optional<BandId> parse_band(std::string_view name) {
    for (BandId b : kAllBands)
        if (band_name(b) == name) return b;
    return std::nullopt;
}

int native_resolution_m(BandId b) {
    switch (b) {
        case BandId::B2:
        case BandId::B3:
        case BandId::B4:
        case BandId::B8:
            return 10;
        default:
            return 20;
    }
}

Plane::Plane(int width, int height, double fill)
    : Plane(width, height,
            std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                    static_cast<std::size_t>(std::max(height, 0)),
                                fill)) {}

Plane::Plane(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width < 0 || height < 0) throw DataError("plane dimensions must be non-negative");
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw DataError("plane value count does not match width*height");
}

BandStack::BandStack(std::array<Plane, kBandCount> planes, std::optional<GeoInfo> geo,
                     std::string source)
    : planes_(std::move(planes)), geo_(std::move(geo)), source_(std::move(source)) {
    const int w = planes_[0].width();
    const int h = planes_[0].height();
    for (BandId b : kAllBands) {
        const Plane& p = planes_[band_index(b)];
        if (p.width() != w || p.height() != h)
            throw DataError(fmt::format("dimension mismatch: band {} is {}x{}, expected {}x{}",
                                        band_name(b), p.width(), p.height(), w, h));
        for (double v : p.values())
            if (!std::isfinite(v) || v < 0.0)
                throw DataError(fmt::format("band {} holds a negative or non-finite value",
                                            band_name(b)));
    }
}

std::array<double, kBandCount> BandStack::pixel(int row, int col) const {
    std::array<double, kBandCount> f{};
    for (std::size_t i = 0; i < kBandCount; ++i) f[i] = planes_[i].at(row, col);
    return f;
}

Plane resample_plane(const Plane& p, int factor, ResampleMethod method) {
    if (factor <= 0) throw DataError("resample factor must be >= 1");
    if (factor == 1) return p;
    const int w = p.width() * factor;
    const int h = p.height() * factor;
    Plane out(w, h);
    if (p.size() == 0) return out;

    if (method == ResampleMethod::Nearest) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) out.at(r, c) = p.at(r / factor, c / factor);
        return out;
    }

    // Precompute the two source taps and the weight for each output column/row.
    struct Tap {
        int i0, i1;
        double t;
    };
    auto taps = [factor](int n_out, int n_in) {
        std::vector<Tap> v(static_cast<std::size_t>(n_out));
        for (int i = 0; i < n_out; ++i) {
            double src = (i + 0.5) / factor - 0.5;
            src = std::clamp(src, 0.0, static_cast<double>(n_in - 1));
            const int i0 = static_cast<int>(std::floor(src));
            const int i1 = std::min(i0 + 1, n_in - 1);
            v[static_cast<std::size_t>(i)] = {i0, i1, src - i0};
        }
        return v;
    };
    const auto cols = taps(w, p.width());
    const auto rows = taps(h, p.height());
    for (int r = 0; r < h; ++r) {
        const Tap& ry = rows[static_cast<std::size_t>(r)];
        for (int c = 0; c < w; ++c) {
            const Tap& cx = cols[static_cast<std::size_t>(c)];
            const double top = (1.0 - cx.t) * p.at(ry.i0, cx.i0) + cx.t * p.at(ry.i0, cx.i1);
            const double bottom = (1.0 - cx.t) * p.at(ry.i1, cx.i0) + cx.t * p.at(ry.i1, cx.i1);
            out.at(r, c) = (1.0 - ry.t) * top + ry.t * bottom;
        }
    }
    return out;
}

Plane block_average(const Plane& p, int factor) {
    if (factor <= 0) throw DataError("block factor must be >= 1");
    if (p.width() % factor != 0 || p.height() % factor != 0)
        throw DataError(fmt::format("plane {}x{} is not divisible by {}", p.width(), p.height(), factor));
    const int w = p.width() / factor;
    const int h = p.height() / factor;
    Plane out(w, h);
    const double inv = 1.0 / (factor * factor);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double sum = 0.0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx) sum += p.at(r * factor + dy, c * factor + dx);
            out.at(r, c) = sum * inv;
        }
    return out;
}

BandStack crop(const BandStack& s, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > s.width() || y0 + h > s.height())
        throw DataError(fmt::format("crop rectangle ({},{},{},{}) outside {}x{} stack", x0, y0, w,
                                    h, s.width(), s.height()));
    std::array<Plane, kBandCount> planes;
    for (std::size_t i = 0; i < kBandCount; ++i) {
        const Plane& src = s.planes()[i];
        Plane dst(w, h);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) dst.at(r, c) = src.at(y0 + r, x0 + c);
        planes[i] = std::move(dst);
    }
    std::optional<GeoInfo> geo = s.geo();
    if (geo) {
        geo->origin_easting += x0 * BandStack::kPixelSize;
        geo->origin_northing -= y0 * BandStack::kPixelSize;
    }
    return BandStack(std::move(planes), std::move(geo), s.source());
}

namespace {

Plane plane_from_pgm(const PgmImage& img) {
    Plane p(img.width, img.height);
    auto& v = p.values();
    for (std::size_t i = 0; i < img.samples.size(); ++i) v[i] = img.samples[i] / kReflectanceScale;
    return p;
}

PgmImage pgm_from_plane(const Plane& p) {
    PgmImage img{p.width(), p.height(), 65535, {}};
    img.samples.reserve(p.size());
    for (double v : p.values()) {
        const double dn = std::round(v * kReflectanceScale);
        img.samples.push_back(static_cast<std::uint16_t>(std::clamp(dn, 0.0, 65535.0)));
    }
    return img;
}

}  // namespace

BandStack load_band_stack(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError(fmt::format("cannot open manifest {}", manifest_path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed manifest {}: {}", manifest_path.string(), e.what()));
    }
    if (!j.is_object() || !j.contains("bands") || !j["bands"].is_object())
        throw DataError("manifest has no \"bands\" object");
    const auto& bands = j["bands"];
    for (auto it = bands.begin(); it != bands.end(); ++it)
        if (!parse_band(it.key()))
            throw DataError(fmt::format("manifest lists unsupported band {}", it.key()));

    const bool resampled = j.value("resampled", false);
    const auto base = manifest_path.parent_path();

    std::array<PgmImage, kBandCount> raw;
    for (BandId b : kAllBands) {
        const std::string key(band_name(b));
        if (!bands.contains(key) || !bands[key].is_string())
            throw DataError(fmt::format("missing band {} in manifest", key));
        std::filesystem::path file = bands[key].get<std::string>();
        if (file.is_relative()) file = base / file;
        raw[band_index(b)] = read_pgm(file);
        if (raw[band_index(b)].maxval != 65535)
            throw DataError(fmt::format("band {} file {} must be 16-bit (maxval 65535)", key,
                                        file.string()));
    }

    // Same-resolution bands must agree; 20 m bands must be half the 10 m grid.
    auto is_coarse = [resampled](BandId b) { return !resampled && native_resolution_m(b) == 20; };
    const PgmImage& ref10 = raw[band_index(BandId::B2)];
    const PgmImage& ref20 = raw[band_index(BandId::B5)];
    for (BandId b : kAllBands) {
        const PgmImage& img = raw[band_index(b)];
        const PgmImage& ref = is_coarse(b) ? ref20 : ref10;
        if (img.width != ref.width || img.height != ref.height)
            throw DataError(fmt::format("dimension mismatch: band {} is {}x{}, expected {}x{}",
                                        band_name(b), img.width, img.height, ref.width,
                                        ref.height));
    }
    if (!resampled && (ref20.width * 2 != ref10.width || ref20.height * 2 != ref10.height))
        throw DataError(fmt::format("20 m bands are {}x{}, expected exactly half of {}x{}",
                                    ref20.width, ref20.height, ref10.width, ref10.height));

    std::array<Plane, kBandCount> planes;
    for (BandId b : kAllBands) {
        Plane p = plane_from_pgm(raw[band_index(b)]);
        if (is_coarse(b)) p = resample_plane(p, 2, ResampleMethod::Bilinear);
        planes[band_index(b)] = std::move(p);
    }

    std::optional<GeoInfo> geo;
    if (j.contains("geo") && !j["geo"].is_null()) {
        const auto& g = j["geo"];
        try {
            geo = GeoInfo{g.at("origin_easting").get<double>(), g.at("origin_northing").get<double>(),
                          g.value("crs", std::string{})};
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("malformed geo block: {}", e.what()));
        }
    }
    return BandStack(std::move(planes), std::move(geo), j.value("source", std::string{}));
}

void write_band_stack(const BandStack& s, const std::filesystem::path& dir, bool native) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json j;
    j["bands"] = nlohmann::ordered_json::object();
    for (BandId b : kAllBands) {
        const std::string file = fmt::format("{}.pgm", band_name(b));
        Plane p = s.plane(b);
        if (native && native_resolution_m(b) == 20) p = block_average(p, 2);
        write_pgm(dir / file, pgm_from_plane(p));
        j["bands"][std::string(band_name(b))] = file;
    }
    if (!native) j["resampled"] = true;
    if (s.geo()) {
        j["geo"] = {{"origin_easting", s.geo()->origin_easting},
                    {"origin_northing", s.geo()->origin_northing},
                    {"crs", s.geo()->crs}};
    }
    if (!s.source().empty()) j["source"] = s.source();
    std::ofstream out(dir / "manifest.json");
    if (!out) throw DataError(fmt::format("cannot write manifest in {}", dir.string()));
    out << j.dump(2) << '\n';
}

}  // namespace raftcensus
