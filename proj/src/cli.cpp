#include "raftcensus/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/census_io.hpp"
#include "raftcensus/datasets.hpp"
#include "raftcensus/error.hpp"
#include "raftcensus/eval.hpp"
#include "raftcensus/mlp.hpp"
#include "raftcensus/pipeline.hpp"
#include "raftcensus/render.hpp"
#include "raftcensus/waterdetect.hpp"

namespace fs = std::filesystem;

namespace raftcensus {
namespace {

struct WaterOptions {
    std::string method = "ndwi";
    std::string model_path;
    double threshold = 0.90;
    int water_class = 3;
};

struct CensusOptions {
    std::string manifest;
    std::string platform_model;
    WaterOptions water;
    double platform_threshold = 0.5;
    BlobFilter filter;
};

struct TrainOptions {
    int epochs = TrainConfig{}.max_epochs;
    double lr = TrainConfig{}.learning_rate;
    double momentum = TrainConfig{}.momentum;
    double target_loss = TrainConfig{}.target_loss;
    std::uint64_t seed = TrainConfig{}.seed;
};

void add_water_options(CLI::App* app, WaterOptions& w) {
    app->add_option("--water-method", w.method, "Water masking route")
        ->check(CLI::IsMember({"ndwi", "mlp"}))
        ->capture_default_str();
    app->add_option("--water-model", w.model_path, "Water MLP model file (with --water-method mlp)");
    app->add_option("--water-threshold", w.threshold, "Binarisation threshold of the water output")
        ->capture_default_str();
    app->add_option("--water-class", w.water_class, "1-based water output index")->capture_default_str();
}

void add_census_options(CLI::App* app, CensusOptions& o) {
    app->add_option("--manifest", o.manifest, "Band manifest (JSON)")->required();
    app->add_option("--platform-model", o.platform_model, "Platform MLP model file")->required();
    add_water_options(app, o.water);
    app->add_option("--platform-threshold", o.platform_threshold, "Platform output threshold")
        ->capture_default_str();
    app->add_option("--max-area", o.filter.max_area, "Blob area must be below this (px)")
        ->capture_default_str();
    app->add_option("--max-eqdiam", o.filter.max_equivalent_diameter,
                    "Blob equivalent diameter must be below this (px)")
        ->capture_default_str();
    app->add_option("--min-solidity", o.filter.min_solidity, "Blob solidity must exceed this")
        ->capture_default_str();
}

void add_train_options(CLI::App* app, TrainOptions& t) {
    app->add_option("--seed", t.seed, "Seed for initialisation, shuffling and sampling")->capture_default_str();
    app->add_option("--epochs", t.epochs, "Maximum training epochs")->capture_default_str();
    app->add_option("--lr", t.lr, "Learning rate")->capture_default_str();
    app->add_option("--momentum", t.momentum, "Momentum coefficient")->capture_default_str();
    app->add_option("--target-loss", t.target_loss, "Stop once validation MSE reaches this")
        ->capture_default_str();
}

TrainConfig to_config(const TrainOptions& t) {
    TrainConfig cfg;
    cfg.max_epochs = t.epochs;
    cfg.learning_rate = t.lr;
    cfg.momentum = t.momentum;
    cfg.target_loss = t.target_loss;
    cfg.seed = t.seed;
    return cfg;
}

WaterMethod make_water_method(const WaterOptions& w) {
    if (w.method == "ndwi") return NdwiOtsu{};
    if (w.model_path.empty()) throw CLI::ValidationError("--water-model", "required with --water-method mlp");
    return MlpWater{load_model(w.model_path), w.water_class, w.threshold};
}

CensusConfig make_census_config(const CensusOptions& o) {
    CensusConfig cfg;
    cfg.water_method = make_water_method(o.water);
    cfg.platform_model = load_model(o.platform_model);
    cfg.platform_threshold = o.platform_threshold;
    cfg.blob_filter = o.filter;
    validate(cfg);
    return cfg;
}

void print_confusion(std::ostream& out, const std::string& title, const ConfusionMatrix& cm,
                     const std::vector<std::string>& names) {
    out << title << " (rows = truth, cols = predicted)\n";
    out << fmt::format("{:>12}", "");
    for (const auto& n : names) out << fmt::format("{:>12}", n);
    out << "\n";
    for (int t = 0; t < cm.classes; ++t) {
        out << fmt::format("{:>12}", names[static_cast<std::size_t>(t)]);
        for (int p = 0; p < cm.classes; ++p) out << fmt::format("{:>12}", cm.at(t, p));
        out << "\n";
    }
    out << fmt::format("error rate: {:.4f}%\n", 100.0 * cm.error_rate());
}

void report_training(std::ostream& out, const TrainResult& r, const std::vector<std::string>& names) {
    const EpochRecord& last = r.history.back();
    out << fmt::format("epochs run: {}  best epoch: {}  final train mse: {:.6g}  val mse: {:.6g}{}\n",
                       r.history.size(), r.best_epoch, last.train_loss, last.validation_loss,
                       r.reached_target ? "  (target reached)" : "");
    const Decision decision = r.model.n_outputs() == 1 ? Decision{0.5} : Decision{ArgmaxDecision{}};
    if (r.train_set.size()) print_confusion(out, "train", evaluate_confusion(r.model, r.train_set, decision), names);
    if (r.validation_set.size())
        print_confusion(out, "validation", evaluate_confusion(r.model, r.validation_set, decision), names);
    if (r.test_set.size()) print_confusion(out, "test", evaluate_confusion(r.model, r.test_set, decision), names);
}

fs::path sibling_with_extension(const fs::path& p, const std::string& ext) {
    fs::path q = p;
    q.replace_extension(ext);
    return q;
}

std::string stack_summary(const BandStack& s) {
    nlohmann::ordered_json j;
    j["width"] = s.width();
    j["height"] = s.height();
    j["pixel_size_m"] = s.pixel_size();
    j["source"] = s.source();
    if (s.geo()) j["geo"] = {{"origin_easting", s.geo()->origin_easting},
                             {"origin_northing", s.geo()->origin_northing},
                             {"crs", s.geo()->crs}};
    j["bands"] = nlohmann::ordered_json::object();
    for (BandId b : kAllBands) {
        const auto& v = s.plane(b).values();
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        j["bands"][std::string(band_name(b))] = {
            {"native_resolution_m", native_resolution_m(b)},
            {"min", v.empty() ? 0.0 : *lo},
            {"max", v.empty() ? 0.0 : *hi},
            {"mean", v.empty() ? 0.0 : sum / static_cast<double>(v.size())}};
    }
    return j.dump(2) + "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"raft_census: census of mussel-raft platforms in ten-band Sentinel-2 stacks",
                 "raft_census"};
    app.require_subcommand(1);
    app.allow_extras(false);

    // import
    std::string import_manifest, import_out;
    std::vector<int> import_crop;
    auto* import_cmd = app.add_subcommand("import", "Load and validate a band manifest; optionally crop and re-export at 10 m");
    import_cmd->add_option("--manifest", import_manifest, "Band manifest (JSON)")->required();
    import_cmd->add_option("--out", import_out, "Directory for a resampled (10 m) copy of the stack");
    import_cmd->add_option("--crop", import_crop, "Crop rectangle: X0 Y0 W H (pixels)")->expected(4);

    // synth
    SynthParams synth;
    std::string synth_out, synth_layout = "coastal", synth_spectra;
    bool synth_no_geo = false;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labelled scene");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--seed", synth.seed, "Scene seed")->capture_default_str();
    synth_cmd->add_option("--width", synth.width, "Width (px)")->capture_default_str();
    synth_cmd->add_option("--height", synth.height, "Height (px)")->capture_default_str();
    synth_cmd->add_option("--rafts", synth.raft_count, "Number of rafts")->capture_default_str();
    synth_cmd->add_option("--raft-size", synth.raft_size_px, "Raft edge (2 or 3 px)")->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise_sigma, "Gaussian noise sigma (reflectance)")->capture_default_str();
    synth_cmd->add_option("--layout", synth_layout, "Scene layout")
        ->check(CLI::IsMember({"coastal", "land", "water"}))
        ->capture_default_str();
    synth_cmd->add_option("--spectra", synth_spectra, "Class spectra JSON (defaults built in)");
    synth_cmd->add_flag("--no-geo", synth_no_geo, "Omit the geotransform");

    // train-water
    std::string tw_manifest, tw_classes, tw_out;
    int tw_hidden = 8;
    std::size_t tw_per_class = 2000;
    TrainOptions tw_train;
    auto* tw_cmd = app.add_subcommand("train-water", "Train the land/vegetation/water classifier");
    tw_cmd->add_option("--manifest", tw_manifest, "Band manifest (JSON)")->required();
    tw_cmd->add_option("--classes", tw_classes, "Class-map PGM (1 land, 2 vegetation, 3 water, 4 raft)")->required();
    tw_cmd->add_option("--out", tw_out, "Model output path")->required();
    tw_cmd->add_option("--hidden", tw_hidden, "Hidden units")->capture_default_str();
    tw_cmd->add_option("--per-class", tw_per_class, "Samples per class")->capture_default_str();
    add_train_options(tw_cmd, tw_train);

    // train-platform
    std::string tp_manifest, tp_correction, tp_out, tp_samples_out;
    bool tp_synthetic = false;
    std::size_t tp_samples = kDefaultPlatformSamples;
    double tp_noise = 0.004;
    WaterOptions tp_water;
    TrainOptions tp_train;
    auto* tp_cmd = app.add_subcommand("train-platform", "Train the [10,2,1] platform classifier");
    tp_cmd->add_option("--manifest", tp_manifest, "Band manifest to mine bottom-hat samples from");
    tp_cmd->add_option("--correction", tp_correction, "Mask PGM restricting mined platform candidates");
    tp_cmd->add_flag("--synthetic", tp_synthetic, "Train on pixels drawn from the default spectra");
    tp_cmd->add_option("--samples", tp_samples, "Platform samples per class with --synthetic")->capture_default_str();
    tp_cmd->add_option("--noise", tp_noise, "Noise sigma with --synthetic")->capture_default_str();
    tp_cmd->add_option("--samples-out", tp_samples_out, "Also write the training pixels as CSV");
    tp_cmd->add_option("--out", tp_out, "Model output path")->required();
    add_water_options(tp_cmd, tp_water);
    add_train_options(tp_cmd, tp_train);

    // census
    CensusOptions census_opt;
    std::string census_out, census_geojson;
    auto* census_cmd = app.add_subcommand("census", "Detect platforms and write the census");
    add_census_options(census_cmd, census_opt);
    census_cmd->add_option("--out", census_out, "Census CSV path")->required();
    census_cmd->add_option("--geojson", census_geojson, "GeoJSON path (default: next to --out when georeferenced)");

    // eval
    std::string eval_census, eval_truth, eval_out;
    double eval_dist = 3.0;
    auto* eval_cmd = app.add_subcommand("eval", "Score a census against ground truth (TFA/TFR)");
    eval_cmd->add_option("--census", eval_census, "Census CSV")->required();
    eval_cmd->add_option("--truth", eval_truth, "Truth CSV (id,row,col)")->required();
    eval_cmd->add_option("--max-match-dist", eval_dist, "Matching gate (px)")->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "Report JSON path");

    // render
    CensusOptions render_opt;
    std::string render_out;
    auto* render_cmd = app.add_subcommand("render", "Render masks and census markers as a PPM overlay");
    add_census_options(render_cmd, render_opt);
    render_cmd->add_option("--out", render_out, "PPM output path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*import_cmd) {
            BandStack s = load_band_stack(import_manifest);
            if (!import_crop.empty())
                s = crop(s, import_crop[0], import_crop[1], import_crop[2], import_crop[3]);
            if (!import_out.empty()) write_band_stack(s, import_out, false);
            out << stack_summary(s);
        } else if (*synth_cmd) {
            if (!synth_spectra.empty()) synth.spectra = load_spectra(synth_spectra);
            synth.layout = synth_layout == "land"    ? SceneLayout::LandOnly
                           : synth_layout == "water" ? SceneLayout::WaterOnly
                                                     : SceneLayout::Coastal;
            synth.georeferenced = !synth_no_geo;
            const SyntheticScene scene = generate_synthetic_scene(synth);
            const fs::path dir = synth_out;
            write_band_stack(scene.stack, dir, true);
            write_truth_csv(scene.truth.raft_centroids, dir / "truth.csv");
            write_mask_pgm(scene.truth.water_mask, dir / "water_truth.pgm");
            write_mask_pgm(scene.truth.raft_mask, dir / "raft_truth.pgm");
            write_class_map(scene.truth.classes, synth.width, synth.height, dir / "classes.pgm");
            out << fmt::format("wrote {}x{} scene with {} rafts to {}\n", synth.width, synth.height,
                               scene.truth.raft_centroids.size(), dir.string());
        } else if (*tw_cmd) {
            const BandStack s = load_band_stack(tw_manifest);
            int w = 0, h = 0;
            const auto classes = read_class_map(tw_classes, w, h);
            if (w != s.width() || h != s.height()) throw DataError("class map and stack dimensions differ");
            const LabeledPixels px = water_training_pixels(s, classes, tw_per_class, tw_train.seed);
            const MlpModel init = MlpModel::random({10, tw_hidden, 3}, band_feature_names(), tw_train.seed);
            const TrainResult r = train(init, px.samples, to_config(tw_train));
            save_model(r.model, tw_out);
            report_training(out, r, px.class_names);
        } else if (*tp_cmd) {
            LabeledPixels px;
            if (tp_synthetic) {
                if (!tp_manifest.empty()) throw CLI::ValidationError("--synthetic", "excludes --manifest");
                px = synthesize_platform_pixels(default_spectra(), tp_samples, tp_noise, tp_train.seed);
            } else {
                if (tp_manifest.empty()) throw CLI::ValidationError("--manifest", "required unless --synthetic");
                const BandStack s = load_band_stack(tp_manifest);
                std::optional<BinaryMask> correction;
                if (!tp_correction.empty()) correction = read_mask_pgm(tp_correction);
                const BinaryMask water = detect_water(s, make_water_method(tp_water));
                px = extract_platform_samples(s, water, correction, tp_train.seed);
            }
            if (!tp_samples_out.empty()) write_text_file(tp_samples_out, labeled_pixels_to_csv(px));
            const MlpModel init = MlpModel::random({10, 2, 1}, band_feature_names(), tp_train.seed);
            const TrainResult r = train(init, px.samples, to_config(tp_train));
            save_model(r.model, tp_out);
            out << fmt::format("{} samples ({} platform)\n", px.samples.size(), px.samples.size() / 2);
            report_training(out, r, px.class_names);
        } else if (*census_cmd) {
            const BandStack s = load_band_stack(census_opt.manifest);
            const Census c = run_census(s, make_census_config(census_opt));
            write_census_csv(c, census_out);
            if (c.geo) {
                const fs::path gj = census_geojson.empty() ? sibling_with_extension(census_out, ".geojson")
                                                           : fs::path(census_geojson);
                write_census_geojson(c, gj);
            } else if (!census_geojson.empty()) {
                throw DataError("GeoJSON requested but the stack has no geotransform");
            }
            out << fmt::format("{} platforms detected (config {})\n", c.count(), c.config_digest);
        } else if (*eval_cmd) {
            const Census c = read_census_csv(eval_census);
            const auto truth = read_truth_csv(eval_truth);
            const MetricsReport r = evaluate_census(c, truth, eval_dist);
            if (!eval_out.empty()) write_text_file(eval_out, report_to_json(r));
            out << report_to_table(r);
        } else if (*render_cmd) {
            const BandStack s = load_band_stack(render_opt.manifest);
            const CensusProducts p = run_census_detailed(s, make_census_config(render_opt));
            write_ppm(render_overlay(s, p.water, p.platform, p.census), render_out);
            out << fmt::format("rendered {} platforms to {}\n", p.census.count(), render_out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NoWaterError& e) {
        err << "error[data/no-water]: " << e.what() << "\n";
        return kExitData;
    } catch (const DataError& e) {
        err << "error[data]: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error[data]: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace raftcensus
