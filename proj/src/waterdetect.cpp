#include "raftcensus/waterdetect.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "raftcensus/error.hpp"
#include "raftcensus/parallel.hpp"

namespace raftcensus {

Plane compute_ndwi(const Plane& green, const Plane& nir) {
    if (green.width() != nir.width() || green.height() != nir.height())
        throw DataError("compute_ndwi: dimension mismatch between green and NIR planes");
    Plane out(green.width(), green.height());
    const auto& g = green.values();
    const auto& n = nir.values();
    auto& o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        const double sum = g[i] + n[i];
        o[i] = sum == 0.0 ? 0.0 : std::clamp((g[i] - n[i]) / sum, -1.0, 1.0);
    }
    return out;
}

int otsu_threshold(const Histogram& hist) {
    using boost::multiprecision::int256_t;
    std::uint64_t total = 0;
    int occupied = 0;
    for (std::uint64_t c : hist) {
        total += c;
        occupied += c > 0 ? 1 : 0;
    }
    if (total == 0) throw DegenerateHistogramError("empty histogram");
    if (occupied < 2) throw DegenerateHistogramError("degenerate histogram: single occupied bin");
    if (total >= (std::uint64_t{1} << 32)) throw DataError("histogram total exceeds 2^32");

    // sigma_b^2 * N^2 = D^2 / (n0 n1) with D = S0 * N - S * n0.
    int256_t sum_all = 0;
    for (int i = 0; i < 256; ++i) sum_all += int256_t(i) * hist[static_cast<std::size_t>(i)];

    int best_t = -1;
    int256_t best_num = 0;
    int256_t best_den = 1;
    std::uint64_t n0 = 0;
    int256_t s0 = 0;
    for (int t = 0; t < 255; ++t) {
        n0 += hist[static_cast<std::size_t>(t)];
        s0 += int256_t(t) * hist[static_cast<std::size_t>(t)];
        const std::uint64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const int256_t d = s0 * total - sum_all * n0;
        const int256_t num = d * d;
        const int256_t den = int256_t(n0) * int256_t(n1);
        if (best_t < 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t;
}

double otsu_separability(const Histogram& hist, int t) {
    double n = 0, s = 0, ss = 0, n0 = 0, s0 = 0;
    for (int i = 0; i < 256; ++i) {
        const double c = static_cast<double>(hist[static_cast<std::size_t>(i)]);
        n += c;
        s += c * i;
        ss += c * i * i;
        if (i <= t) {
            n0 += c;
            s0 += c * i;
        }
    }
    const double n1 = n - n0;
    if (n == 0 || n0 == 0 || n1 == 0) return 0.0;
    const double mu = s / n;
    const double total_var = ss / n - mu * mu;
    const double mu0 = s0 / n0;
    const double mu1 = (s - s0) / n1;
    const double between = (n0 / n) * (n1 / n) * (mu0 - mu1) * (mu0 - mu1);
    return total_var <= 0.0 ? 0.0 : between / total_var;
}

int ndwi_bin(double ndwi) {
    const int b = static_cast<int>(std::floor((ndwi + 1.0) * 128.0));
    return std::clamp(b, 0, 255);
}

Histogram ndwi_histogram(const Plane& ndwi) {
    Histogram h{};
    for (double v : ndwi.values()) ++h[static_cast<std::size_t>(ndwi_bin(v))];
    return h;
}

BinaryMask water_mask_ndwi(const BandStack& s, const NdwiOptions& opt) {
    const Plane ndwi = compute_ndwi(s.plane(BandId::B3), s.plane(BandId::B8));
    const Histogram hist = ndwi_histogram(ndwi);
    const int t = otsu_threshold(hist);

    double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
    for (int i = 0; i < 256; ++i) {
        const double c = static_cast<double>(hist[static_cast<std::size_t>(i)]);
        const double centre = -1.0 + (i + 0.5) / 128.0;
        (i <= t ? n0 : n1) += c;
        (i <= t ? s0 : s1) += c * centre;
    }
    const bool bimodal = (s1 / n1 - s0 / n0) >= opt.min_class_separation;

    BinaryMask mask(s.width(), s.height());
    const auto& v = ndwi.values();
    auto& bits = mask.bits();
    for (std::size_t i = 0; i < v.size(); ++i)
        bits[i] = (bimodal ? ndwi_bin(v[i]) > t : v[i] > 0.0) ? 1 : 0;
    return mask;
}

void require_band_model(const MlpModel& m) {
    if (m.n_inputs() != static_cast<int>(kBandCount))
        throw DataError(fmt::format("model arity mismatch: pixel classifiers take {} bands, model has {} inputs",
                                    kBandCount, m.n_inputs()));
    if (m.feature_order() != band_feature_names())
        throw DataError("bad feature order: model was not trained on canonical band order");
}

BinaryMask water_mask_mlp(const BandStack& s, const MlpModel& m, int water_class, double threshold) {
    require_band_model(m);
    if (water_class < 1 || water_class > m.n_outputs())
        throw DataError(fmt::format("water class {} outside model's {} outputs", water_class, m.n_outputs()));
    if (!(threshold > 0.0 && threshold < 1.0)) throw DataError("water threshold must lie in (0, 1)");

    BinaryMask mask(s.width(), s.height());
    const auto out_index = static_cast<std::size_t>(water_class - 1);
    parallel_for(static_cast<std::size_t>(s.height()), [&](std::size_t row) {
        std::vector<double> scratch, out;
        const int r = static_cast<int>(row);
        for (int c = 0; c < s.width(); ++c) {
            const auto px = s.pixel(r, c);
            m.forward_into(px, scratch, out);
            mask.set(r, c, out[out_index] >= threshold);
        }
    });
    return mask;
}

void validate(const WaterMethod& method) {
    if (const auto* mlp = std::get_if<MlpWater>(&method)) {
        require_band_model(mlp->model);
        if (mlp->water_class < 1 || mlp->water_class > mlp->model.n_outputs())
            throw DataError("water class index exceeds model output count");
        if (!(mlp->threshold > 0.0 && mlp->threshold < 1.0))
            throw DataError("water threshold must lie in (0, 1)");
    }
}

BinaryMask detect_water(const BandStack& s, const WaterMethod& method) {
    validate(method);
    if (const auto* ndwi = std::get_if<NdwiOtsu>(&method)) return water_mask_ndwi(s, ndwi->options);
    const auto& mlp = std::get<MlpWater>(method);
    return water_mask_mlp(s, mlp.model, mlp.water_class, mlp.threshold);
}

BinaryMask clean_water_mask(const BinaryMask& mask, const WaterCleanup& se) {
    return erode(open(close(mask, se.close_se), se.open_se), se.erode_se);
}

}  // namespace raftcensus
