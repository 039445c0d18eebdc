#include "raftcensus/census_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "raftcensus/error.hpp"

namespace raftcensus {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    out << text;
    if (!out) throw DataError(fmt::format("failed writing {}", path.string()));
}

std::string census_to_csv(const Census& c) {
    const bool geo = c.geo.has_value();
    std::string s = geo ? "id,row,col,area_px,easting,northing\n" : "id,row,col,area_px\n";
    for (const auto& r : c.records) {
        s += fmt::format("{},{:.4f},{:.4f},{}", r.id, r.centroid_row, r.centroid_col, r.area_px);
        if (geo && r.easting && r.northing) s += fmt::format(",{:.3f},{:.3f}", *r.easting, *r.northing);
        s += "\n";
    }
    return s;
}

void write_census_csv(const Census& c, const std::filesystem::path& path) {
    write_text_file(path, census_to_csv(c));
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (first) {
            header = cells;
            first = false;
        } else {
            if (cells.size() != header.size())
                throw DataError(fmt::format("{}: row has {} cells, header has {}", path.string(),
                                            cells.size(), header.size()));
            rows.push_back(std::move(cells));
        }
    }
    if (first) throw DataError(fmt::format("{}: empty CSV", path.string()));
    return rows;
}

double to_double(const std::string& s, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw DataError(fmt::format("{}: bad number '{}'", path.string(), s));
    return v;
}

int to_int(const std::string& s, const std::filesystem::path& path) {
    const double v = to_double(s, path);
    if (v != static_cast<int>(v)) throw DataError(fmt::format("{}: bad integer '{}'", path.string(), s));
    return static_cast<int>(v);
}

}  // namespace

Census read_census_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_csv(path, header);
    const std::vector<std::string> plain = {"id", "row", "col", "area_px"};
    const std::vector<std::string> geo = {"id", "row", "col", "area_px", "easting", "northing"};
    if (header != plain && header != geo)
        throw DataError(fmt::format("{}: not a census CSV", path.string()));
    Census c;
    if (header == geo) c.geo = GeoInfo{};
    for (const auto& r : rows) {
        CensusRecord rec;
        rec.id = to_int(r[0], path);
        rec.centroid_row = to_double(r[1], path);
        rec.centroid_col = to_double(r[2], path);
        rec.area_px = to_int(r[3], path);
        if (c.geo) {
            rec.easting = to_double(r[4], path);
            rec.northing = to_double(r[5], path);
        }
        c.records.push_back(rec);
    }
    return c;
}

std::string census_to_geojson(const Census& c) {
    if (!c.geo) throw DataError("GeoJSON export needs a georeferenced census");
    nlohmann::ordered_json j;
    j["type"] = "FeatureCollection";
    if (!c.geo->crs.empty())
        j["crs"] = {{"type", "name"}, {"properties", {{"name", c.geo->crs}}}};
    j["source"] = c.source;
    j["config_digest"] = c.config_digest;
    j["count"] = c.count();
    j["features"] = nlohmann::ordered_json::array();
    for (const auto& r : c.records) {
        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"},
                         {"coordinates", {r.easting.value_or(0.0), r.northing.value_or(0.0)}}};
        f["properties"] = {{"id", r.id},
                           {"area_px", r.area_px},
                           {"bbox", {r.bbox.r0, r.bbox.c0, r.bbox.r1, r.bbox.c1}}};
        j["features"].push_back(std::move(f));
    }
    return j.dump(2) + "\n";
}

void write_census_geojson(const Census& c, const std::filesystem::path& path) {
    write_text_file(path, census_to_geojson(c));
}

void write_truth_csv(const std::vector<TruthPoint>& pts, const std::filesystem::path& path) {
    std::string s = "id,row,col\n";
    for (const auto& p : pts) s += fmt::format("{},{:.4f},{:.4f}\n", p.id, p.row, p.col);
    write_text_file(path, s);
}

std::vector<TruthPoint> read_truth_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_csv(path, header);
    if (header != std::vector<std::string>{"id", "row", "col"})
        throw DataError(fmt::format("{}: not a truth CSV (expected id,row,col)", path.string()));
    std::vector<TruthPoint> pts;
    for (const auto& r : rows) pts.push_back({to_int(r[0], path), to_double(r[1], path), to_double(r[2], path)});
    return pts;
}

}  // namespace raftcensus
