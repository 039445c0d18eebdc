#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include <fmt/format.h>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/datasets.hpp"
#include "raftcensus/mlp.hpp"
#include "raftcensus/pgm.hpp"

namespace fixtures {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() /
                         fmt::format("raftcensus_{}_{}_{}", tag, ::getpid(), counter++);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline raftcensus::BandStack constant_stack(int w, int h, const raftcensus::Spectrum& values) {
    std::array<raftcensus::Plane, raftcensus::kBandCount> planes;
    for (std::size_t b = 0; b < raftcensus::kBandCount; ++b) planes[b] = raftcensus::Plane(w, h, values[b]);
    return raftcensus::BandStack(std::move(planes));
}

/// Platform net trained on the default synthetic pixel set; shared per binary.
inline const raftcensus::MlpModel& trained_platform_model() {
    static const raftcensus::MlpModel model = [] {
        const auto px = raftcensus::synthesize_platform_pixels(raftcensus::default_spectra(), 2000, 0.004, 11);
        const auto init = raftcensus::MlpModel::random({10, 2, 1}, raftcensus::band_feature_names(), 11);
        return raftcensus::train(init, px.samples, raftcensus::TrainConfig{}).model;
    }();
    return model;
}

}  // namespace fixtures
