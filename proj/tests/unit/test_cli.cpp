#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "raftcensus/cli.hpp"
#include "raftcensus/census_io.hpp"

using namespace raftcensus;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// Small scene plus a platform model trained on it.
fs::path prepared(const std::string& tag, std::uint64_t seed = 2) {
    const fs::path dir = fixtures::temp_dir(tag);
    const auto s = std::to_string(seed);
    EXPECT_EQ(run({"synth", "--out", (dir / "scene").string(), "--seed", s, "--width", "256", "--height", "256"}).code, 0);
    EXPECT_EQ(run({"train-platform", "--manifest", (dir / "scene" / "manifest.json").string(), "--out",
                   (dir / "p.mlp").string(), "--seed", s})
                  .code,
              0);
    return dir;
}

}  // namespace

TEST(Cli, HelpMatchesGolden) {
    std::string all = run({"--help"}).out;
    for (const char* c : {"import", "synth", "train-water", "train-platform", "census", "eval", "render"}) {
        const CliResult r = run({c, "--help"});
        EXPECT_EQ(r.code, 0);
        all += std::string("==== ") + c + "\n" + r.out;
    }
    EXPECT_EQ(all, slurp(fs::path(RAFTCENSUS_SOURCE_DIR) / "tests" / "golden" / "help.txt"));
}

TEST(Cli, NoSubcommandIsUsageError) {
    const CliResult r = run({});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
    EXPECT_EQ(run({"synth", "--out", "x", "--bogus"}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"census", "--manifest", "m.json"}).code, kExitUsage);
    EXPECT_EQ(run({"census", "--manifest", "m.json", "--platform-model", "p", "--out", "o", "--water-method", "sobel"}).code,
              kExitUsage);
}

TEST(Cli, MissingManifestIsDataError) {
    const fs::path dir = fixtures::temp_dir("cli_missing");
    const CliResult r = run({"census", "--manifest", (dir / "none.json").string(), "--platform-model", "p.mlp", "--out",
                       (dir / "c.csv").string()});
    EXPECT_EQ(r.code, kExitData);
    EXPECT_EQ(r.err.rfind("error[data]", 0), 0u);
}

TEST(Cli, ManifestWithoutBandIsDataError) {
    const fs::path dir = prepared("cli_band");
    const fs::path m = dir / "scene" / "manifest.json";
    auto j = nlohmann::json::parse(slurp(m));
    j["bands"].erase("B11");
    std::ofstream(m) << j.dump();
    const CliResult r = run({"census", "--manifest", m.string(), "--platform-model", (dir / "p.mlp").string(), "--out",
                       (dir / "c.csv").string()});
    EXPECT_EQ(r.code, kExitData);
    EXPECT_NE(r.err.find("missing band"), std::string::npos);
}

TEST(Cli, CensusWritesCsvAndGeoJson) {
    const fs::path dir = prepared("cli_census");
    const CliResult r = run({"census", "--manifest", (dir / "scene" / "manifest.json").string(), "--platform-model",
                       (dir / "p.mlp").string(), "--out", (dir / "c.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "c.geojson"));
    const Census c = read_census_csv(dir / "c.csv");
    EXPECT_EQ(c.count(), 10u);
    EXPECT_EQ(slurp(dir / "c.csv").substr(0, 35), "id,row,col,area_px,easting,northing");
}

TEST(Cli, NoGeoSceneHasPixelColumnsOnly) {
    const fs::path dir = fixtures::temp_dir("cli_nogeo");
    ASSERT_EQ(run({"synth", "--out", (dir / "s").string(), "--width", "128", "--height", "128", "--rafts", "3", "--no-geo"}).code, 0);
    ASSERT_EQ(run({"train-platform", "--synthetic", "--samples", "500", "--out", (dir / "p.mlp").string()}).code, 0);
    ASSERT_EQ(run({"census", "--manifest", (dir / "s" / "manifest.json").string(), "--platform-model",
                   (dir / "p.mlp").string(), "--out", (dir / "c.csv").string()})
                  .code,
              0);
    EXPECT_FALSE(fs::exists(dir / "c.geojson"));
    EXPECT_EQ(slurp(dir / "c.csv").substr(0, 19), "id,row,col,area_px\n");
}

TEST(Cli, LandOnlySceneCountsZero) {
    const fs::path dir = fixtures::temp_dir("cli_land");
    ASSERT_EQ(run({"synth", "--out", (dir / "s").string(), "--layout", "land", "--rafts", "0", "--width", "128",
                   "--height", "128"})
                  .code,
              0);
    ASSERT_EQ(run({"train-platform", "--synthetic", "--samples", "500", "--out", (dir / "p.mlp").string()}).code, 0);
    const CliResult r = run({"census", "--manifest", (dir / "s" / "manifest.json").string(), "--platform-model",
                       (dir / "p.mlp").string(), "--out", (dir / "c.csv").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_census_csv(dir / "c.csv").count(), 0u);
}

TEST(Cli, EvalReportsRates) {
    const fs::path dir = prepared("cli_eval");
    ASSERT_EQ(run({"census", "--manifest", (dir / "scene" / "manifest.json").string(), "--platform-model",
                   (dir / "p.mlp").string(), "--out", (dir / "c.csv").string()})
                  .code,
              0);
    const CliResult r = run({"eval", "--census", (dir / "c.csv").string(), "--truth", (dir / "scene" / "truth.csv").string(),
                       "--out", (dir / "r.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("TFA"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
    EXPECT_EQ(j["total_platforms"].get<int>(), 10);
}

TEST(Cli, TrainWaterAndMlpCensus) {
    const fs::path dir = prepared("cli_water");
    const CliResult tw = run({"train-water", "--manifest", (dir / "scene" / "manifest.json").string(), "--classes",
                        (dir / "scene" / "classes.pgm").string(), "--out", (dir / "w.mlp").string(), "--per-class", "800"});
    ASSERT_EQ(tw.code, 0) << tw.err;
    const CliResult r = run({"census", "--manifest", (dir / "scene" / "manifest.json").string(), "--platform-model",
                       (dir / "p.mlp").string(), "--water-method", "mlp", "--water-model", (dir / "w.mlp").string(),
                       "--out", (dir / "c.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GE(read_census_csv(dir / "c.csv").count(), 9u);
    EXPECT_EQ(run({"census", "--manifest", (dir / "scene" / "manifest.json").string(), "--platform-model",
                   (dir / "p.mlp").string(), "--water-method", "mlp", "--out", (dir / "c2.csv").string()})
                  .code,
              kExitUsage);
}

TEST(Cli, ImportCropsAndReexports) {
    const fs::path dir = prepared("cli_import");
    const CliResult r = run({"import", "--manifest", (dir / "scene" / "manifest.json").string(), "--crop", "10", "20", "64",
                       "32", "--out", (dir / "crop").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "crop" / "manifest.json"));
    EXPECT_DOUBLE_EQ(j["geo"]["origin_easting"].get<double>(), 510100.0);
    EXPECT_DOUBLE_EQ(j["geo"]["origin_northing"].get<double>(), 4679800.0);
    EXPECT_EQ(run({"import", "--manifest", (dir / "crop" / "manifest.json").string()}).code, 0);
    EXPECT_EQ(run({"import", "--manifest", (dir / "scene" / "manifest.json").string(), "--crop", "250", "0", "64",
                   "32", "--out", (dir / "bad").string()})
                  .code,
              kExitData);
}

TEST(Cli, RenderWritesPpm) {
    const fs::path dir = prepared("cli_render");
    const CliResult r = run({"render", "--manifest", (dir / "scene" / "manifest.json").string(), "--platform-model",
                       (dir / "p.mlp").string(), "--out", (dir / "o.ppm").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "o.ppm").substr(0, 15), "P6\n256 256\n255\n");
}

TEST(Cli, ByteIdenticalAcrossRuns) {
    const fs::path a = prepared("cli_det_a", 5);
    const fs::path b = prepared("cli_det_b", 5);
    for (const fs::path& d : {a, b}) {
        ASSERT_EQ(run({"census", "--manifest", (d / "scene" / "manifest.json").string(), "--platform-model",
                       (d / "p.mlp").string(), "--out", (d / "c.csv").string()})
                      .code,
                  0);
        ASSERT_EQ(run({"render", "--manifest", (d / "scene" / "manifest.json").string(), "--platform-model",
                       (d / "p.mlp").string(), "--out", (d / "o.ppm").string()})
                      .code,
                  0);
        ASSERT_EQ(run({"eval", "--census", (d / "c.csv").string(), "--truth", (d / "scene" / "truth.csv").string(),
                       "--out", (d / "r.json").string()})
                      .code,
                  0);
    }
    for (const char* f : {"scene/B2.pgm", "scene/B11.pgm", "scene/manifest.json", "scene/truth.csv", "p.mlp", "c.csv",
                          "c.geojson", "o.ppm", "r.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(CliBinary, ExitCodes) {
    const std::string bin = RAFTCENSUS_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("--help"), 0);
    EXPECT_EQ(status(""), 1);
    EXPECT_EQ(status("eval --census /nonexistent/c.csv --truth /nonexistent/t.csv"), 2);
}
