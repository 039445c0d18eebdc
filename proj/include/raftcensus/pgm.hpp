#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace raftcensus {

/// Decoded binary PGM (P5). Samples are stored widened to 16 bits.
struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::vector<std::uint16_t> samples;
};

/// Reads a P5 file with maxval 1..65535 (two-byte big-endian samples above 255).
PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmImage& img);

}  // namespace raftcensus
