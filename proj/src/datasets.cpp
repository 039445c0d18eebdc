#include "raftcensus/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "raftcensus/error.hpp"
#include "raftcensus/pgm.hpp"
#include "raftcensus/rng.hpp"

namespace raftcensus {

ClassSpectra default_spectra() {
    ClassSpectra s;
    s.water = {0.090, 0.080, 0.050, 0.040, 0.030, 0.025, 0.020, 0.018, 0.010, 0.008};
    s.land = {0.080, 0.100, 0.120, 0.160, 0.220, 0.260, 0.300, 0.310, 0.250, 0.180};
    s.vegetation = {0.040, 0.070, 0.040, 0.120, 0.300, 0.380, 0.420, 0.440, 0.220, 0.110};
    s.raft = {0.085, 0.075, 0.070, 0.080, 0.100, 0.110, 0.120, 0.120, 0.090, 0.060};
    return s;
}

ClassSpectra load_spectra(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open spectra config {}", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed spectra config: {}", e.what()));
    }
    ClassSpectra s;
    const std::pair<const char*, Spectrum*> fields[] = {
        {"water", &s.water}, {"land", &s.land}, {"vegetation", &s.vegetation}, {"raft", &s.raft}};
    if (!j.is_object() || j.size() != 4) throw DataError("spectra config must map exactly four classes");
    for (const auto& [name, dst] : fields) {
        if (!j.contains(name) || !j[name].is_array() || j[name].size() != kBandCount)
            throw DataError(fmt::format("spectra config: class '{}' needs {} reflectances", name, kBandCount));
        for (std::size_t i = 0; i < kBandCount; ++i) {
            const double v = j[name][i].get<double>();
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DataError(fmt::format("spectra config: bad reflectance for '{}'", name));
            (*dst)[i] = v;
        }
    }
    return s;
}

std::string spectra_to_json(const ClassSpectra& s) {
    nlohmann::ordered_json j;
    j["water"] = s.water;
    j["land"] = s.land;
    j["vegetation"] = s.vegetation;
    j["raft"] = s.raft;
    return j.dump(2) + "\n";
}

std::string labeled_pixels_to_csv(const LabeledPixels& p) {
    std::string s = "b2,b3,b4,b5,b6,b7,b8,b8a,b11,b12,label\n";
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        for (double v : p.samples.row(i)) s += fmt::format("{:.17g},", v);
        s += fmt::format("{}\n", p.samples.labels[i]);
    }
    return s;
}

LabeledPixels extract_platform_samples(const BandStack& s, const BinaryMask& water,
                                       const std::optional<BinaryMask>& correction,
                                       std::uint64_t seed, const StructElem& se) {
    if (water.width() != s.width() || water.height() != s.height())
        throw DataError("extract_platform_samples: water mask and stack dimensions differ");
    BinaryMask candidates = bottom_hat(water, se);
    if (correction) {
        if (!correction->same_shape(water)) throw DataError("correction mask dimensions differ");
        candidates = mask_and(candidates, *correction);
    }

    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < water.size(); ++i) {
        if (candidates.bits()[i]) positives.push_back(i);
        else if (water.bits()[i]) negatives.push_back(i);
    }
    if (positives.empty()) throw DataError("zero candidates: no platform samples found");
    if (negatives.size() < positives.size())
        throw DataError(fmt::format("only {} water pixels for {} platform candidates", negatives.size(),
                                    positives.size()));

    // Partial Fisher-Yates: the first k slots become a uniform sample.
    Rng rng(seed);
    const std::size_t k = positives.size();
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, negatives.size() - i));
        std::swap(negatives[i], negatives[j]);
    }

    LabeledPixels out;
    out.class_names = {"water", "platform"};
    out.samples.n_features = static_cast<int>(kBandCount);
    const int w = s.width();
    auto push = [&](std::size_t idx, int label) {
        const auto px = s.pixel(static_cast<int>(idx / static_cast<std::size_t>(w)),
                                static_cast<int>(idx % static_cast<std::size_t>(w)));
        out.samples.push(px, label);
    };
    for (std::size_t idx : positives) push(idx, 1);
    for (std::size_t i = 0; i < k; ++i) push(negatives[i], 0);
    return out;
}

namespace {

Spectrum noisy(const Spectrum& mean, double sigma, Rng& rng) {
    Spectrum v{};
    for (std::size_t b = 0; b < kBandCount; ++b)
        v[b] = sigma > 0.0 ? std::max(0.0, mean[b] + sigma * normal01(rng)) : mean[b];
    return v;
}

}  // namespace

LabeledPixels synthesize_platform_pixels(const ClassSpectra& spectra, std::size_t per_class,
                                         double noise_sigma, std::uint64_t seed) {
    if (per_class == 0) throw DataError("per_class must be positive");
    Rng rng(seed);
    LabeledPixels out;
    out.class_names = {"water", "platform"};
    out.samples.n_features = static_cast<int>(kBandCount);
    for (std::size_t i = 0; i < per_class; ++i) out.samples.push(noisy(spectra.raft, noise_sigma, rng), 1);
    for (std::size_t i = 0; i < per_class; ++i) out.samples.push(noisy(spectra.water, noise_sigma, rng), 0);
    return out;
}

SyntheticScene generate_synthetic_scene(const SynthParams& p) {
    if (p.width <= 0 || p.height <= 0) throw DataError("scene dimensions must be positive");
    if (p.raft_count < 0) throw DataError("raft_count must be non-negative");
    if (p.raft_size_px != 2 && p.raft_size_px != 3) throw DataError("raft size must be 2 or 3 px");
    if (p.noise_sigma < 0.0) throw DataError("noise sigma must be non-negative");
    if (p.min_raft_gap < 2) throw DataError("rafts need a gap of at least 2 px");

    Rng rng(p.seed);
    const int w = p.width;
    const int h = p.height;

    // Land occupies columns left of a sinusoidal coastline; its inner half is
    // vegetated.
    std::vector<int> coast(static_cast<std::size_t>(h), 0);
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    for (int r = 0; r < h; ++r) {
        int x = 0;
        if (p.layout == SceneLayout::Coastal)
            x = static_cast<int>(std::floor(0.3 * w + 0.06 * w * std::sin(2.0 * std::numbers::pi * r / h + phase)));
        else if (p.layout == SceneLayout::LandOnly)
            x = w;
        coast[static_cast<std::size_t>(r)] = std::clamp(x, 0, w);
    }

    SceneTruth truth;
    truth.water_mask = BinaryMask(w, h);
    truth.raft_mask = BinaryMask(w, h);
    truth.classes.assign(static_cast<std::size_t>(w) * h, SurfaceClass::Water);
    for (int r = 0; r < h; ++r) {
        const int cx = coast[static_cast<std::size_t>(r)];
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            if (c >= cx) {
                truth.water_mask.set(r, c);
            } else {
                truth.classes[i] = c < cx / 2 ? SurfaceClass::Vegetation : SurfaceClass::Land;
            }
        }
    }

    // Rafts: rejection sampling of top-left corners.
    const int size = p.raft_size_px;
    const int m = p.coast_margin;
    struct Square {
        int r0, c0;
    };
    std::vector<Square> placed;
    const long max_attempts = 2000L * std::max(1, p.raft_count) + 10000L;
    long attempts = 0;
    while (static_cast<int>(placed.size()) < p.raft_count) {
        if (++attempts > max_attempts)
            throw DataError(fmt::format("rafts do not fit: placed {} of {}", placed.size(), p.raft_count));
        if (h - 2 * m - size + 1 <= 0 || w - 2 * m - size + 1 <= 0) continue;
        const int r0 = m + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h - 2 * m - size + 1)));
        const int c0 = m + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(w - 2 * m - size + 1)));
        bool ok = true;
        for (int r = std::max(0, r0 - m); r <= std::min(h - 1, r0 + size - 1 + m) && ok; ++r)
            if (c0 - m < coast[static_cast<std::size_t>(r)]) ok = false;
        for (const Square& q : placed) {
            const int gap_r = std::max(q.r0 - (r0 + size), r0 - (q.r0 + size));
            const int gap_c = std::max(q.c0 - (c0 + size), c0 - (q.c0 + size));
            if (std::max(gap_r, gap_c) < p.min_raft_gap) ok = false;
        }
        if (ok) placed.push_back({r0, c0});
    }
    std::sort(placed.begin(), placed.end(),
              [](const Square& a, const Square& b) { return a.r0 != b.r0 ? a.r0 < b.r0 : a.c0 < b.c0; });
    for (std::size_t k = 0; k < placed.size(); ++k) {
        const Square& q = placed[k];
        for (int r = q.r0; r < q.r0 + size; ++r)
            for (int c = q.c0; c < q.c0 + size; ++c) {
                truth.raft_mask.set(r, c);
                truth.classes[static_cast<std::size_t>(r) * w + c] = SurfaceClass::Raft;
            }
        const double off = (size - 1) / 2.0;
        truth.raft_centroids.push_back({static_cast<int>(k) + 1, q.r0 + off, q.c0 + off});
    }

    // Reflectance: class mean plus Gaussian noise, band-major then row-major.
    std::array<Plane, kBandCount> planes;
    for (std::size_t b = 0; b < kBandCount; ++b) {
        Plane plane(w, h);
        auto& v = plane.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Spectrum* mean = nullptr;
            switch (truth.classes[i]) {
                case SurfaceClass::Land: mean = &p.spectra.land; break;
                case SurfaceClass::Vegetation: mean = &p.spectra.vegetation; break;
                case SurfaceClass::Water: mean = &p.spectra.water; break;
                case SurfaceClass::Raft: mean = &p.spectra.raft; break;
            }
            const double base = (*mean)[b];
            v[i] = p.noise_sigma > 0.0 ? std::max(0.0, base + p.noise_sigma * normal01(rng)) : base;
        }
        planes[b] = std::move(plane);
    }

    std::optional<GeoInfo> geo;
    if (p.georeferenced) geo = GeoInfo{510000.0, 4680000.0, "EPSG:32629"};
    const std::string source = fmt::format("synthetic seed={} {}x{} rafts={}", p.seed, w, h, p.raft_count);
    return {BandStack(std::move(planes), std::move(geo), source), std::move(truth)};
}

LabeledPixels water_training_pixels(const BandStack& s, const std::vector<SurfaceClass>& classes,
                                    std::size_t per_class, std::uint64_t seed) {
    if (classes.size() != static_cast<std::size_t>(s.width()) * s.height())
        throw DataError("class map and stack dimensions differ");
    std::array<std::vector<std::size_t>, 3> pools;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        int label = 0;
        switch (classes[i]) {
            case SurfaceClass::Land:
            case SurfaceClass::Raft: label = 0; break;
            case SurfaceClass::Vegetation: label = 1; break;
            case SurfaceClass::Water: label = 2; break;
        }
        pools[static_cast<std::size_t>(label)].push_back(i);
    }
    Rng rng(seed);
    LabeledPixels out;
    out.class_names = {"land", "vegetation", "water"};
    out.samples.n_features = static_cast<int>(kBandCount);
    for (std::size_t label = 0; label < pools.size(); ++label) {
        auto& pool = pools[label];
        const std::size_t k = std::min(per_class, pool.size());
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        for (std::size_t i = 0; i < k; ++i) {
            const auto idx = pool[i];
            out.samples.push(s.pixel(static_cast<int>(idx / static_cast<std::size_t>(s.width())),
                                     static_cast<int>(idx % static_cast<std::size_t>(s.width()))),
                             static_cast<int>(label));
        }
    }
    return out;
}

void write_class_map(const std::vector<SurfaceClass>& classes, int width, int height,
                     const std::filesystem::path& path) {
    PgmImage img{width, height, 255, {}};
    img.samples.reserve(classes.size());
    for (SurfaceClass c : classes) img.samples.push_back(static_cast<std::uint16_t>(static_cast<int>(c) + 1));
    write_pgm(path, img);
}

std::vector<SurfaceClass> read_class_map(const std::filesystem::path& path, int& width, int& height) {
    const PgmImage img = read_pgm(path);
    width = img.width;
    height = img.height;
    std::vector<SurfaceClass> out;
    out.reserve(img.samples.size());
    for (std::uint16_t v : img.samples) {
        if (v < 1 || v > 4) throw DataError(fmt::format("class map {} has invalid value {}", path.string(), v));
        out.push_back(static_cast<SurfaceClass>(v - 1));
    }
    return out;
}

void write_mask_pgm(const BinaryMask& m, const std::filesystem::path& path) {
    PgmImage img{m.width(), m.height(), 255, {}};
    img.samples.reserve(m.size());
    for (auto b : m.bits()) img.samples.push_back(b ? 255 : 0);
    write_pgm(path, img);
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
    const PgmImage img = read_pgm(path);
    BinaryMask m(img.width, img.height);
    for (std::size_t i = 0; i < img.samples.size(); ++i) m.bits()[i] = img.samples[i] > 0 ? 1 : 0;
    return m;
}

}  // namespace raftcensus
