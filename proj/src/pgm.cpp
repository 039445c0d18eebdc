#include "raftcensus/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include <fmt/format.h>

#include "raftcensus/error.hpp"

namespace raftcensus {
namespace {

class HeaderReader {
public:
    explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    long next_int(const std::filesystem::path& path) {
        skip_space_and_comments();
        long value = 0;
        bool any = false;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000) break;
            ++pos_;
            any = true;
        }
        if (!any) throw DataError(fmt::format("invalid PGM header in {}", path.string()));
        return value;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open PGM file {}", path.string()));
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw DataError(fmt::format("not a binary PGM (P5): {}", path.string()));

    HeaderReader header(bytes);
    PgmImage img;
    const long w = header.next_int(path);
    const long h = header.next_int(path);
    const long maxval = header.next_int(path);
    if (w <= 0 || h <= 0 || w > 65536 || h > 65536)
        throw DataError(fmt::format("invalid PGM dimensions in {}", path.string()));
    if (maxval <= 0 || maxval > 65535)
        throw DataError(fmt::format("invalid PGM maxval {} in {}", maxval, path.string()));
    if (header.pos() >= bytes.size() || !std::isspace(bytes[header.pos()]))
        throw DataError(fmt::format("invalid PGM header in {}", path.string()));
    header.advance(1);

    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.maxval = static_cast<int>(maxval);
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - header.pos() < count * bytes_per_sample)
        throw DataError(fmt::format("truncated PGM data in {}", path.string()));

    img.samples.resize(count);
    const unsigned char* data = bytes.data() + header.pos();
    for (std::size_t i = 0; i < count; ++i) {
        std::uint16_t v = bytes_per_sample == 2
                              ? static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1])
                              : data[i];
        if (v > maxval) throw DataError(fmt::format("PGM sample exceeds maxval in {}", path.string()));
        img.samples[i] = v;
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& img) {
    if (img.maxval <= 0 || img.maxval > 65535 ||
        img.samples.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
        throw DataError("write_pgm: inconsistent image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    const std::string header = fmt::format("P5\n{} {}\n{}\n", img.width, img.height, img.maxval);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::vector<unsigned char> buf;
    buf.reserve(img.samples.size() * 2);
    for (std::uint16_t v : img.samples) {
        if (img.maxval > 255) buf.push_back(static_cast<unsigned char>(v >> 8));
        buf.push_back(static_cast<unsigned char>(v & 0xff));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError(fmt::format("failed writing {}", path.string()));
}

}  // namespace raftcensus
