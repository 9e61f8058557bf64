#include "bovigeom/config.hpp"
#include "bovigeom/depth_raster.hpp"
#include "bovigeom/error.hpp"
#include "bovigeom/evaluation.hpp"
#include "bovigeom/features.hpp"
#include "bovigeom/forest.hpp"
#include "bovigeom/height_map.hpp"
#include "bovigeom/landmarks.hpp"
#include "bovigeom/ply.hpp"
#include "bovigeom/point_cloud.hpp"
#include "bovigeom/random.hpp"
#include "bovigeom/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace bovigeom;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kConfigSchema = "1";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct Logger {
    bool json = false;
    std::mutex mu;

    void event(const std::string& kind, const std::map<std::string, std::string>& fields) {
        std::lock_guard<std::mutex> lock(mu);
        if (json) {
            nlohmann::json doc;
            doc["event"] = kind;
            for (const auto& [k, v] : fields) doc[k] = v;
            std::cerr << doc.dump() << "\n";
        } else {
            std::cerr << kind;
            for (const auto& [k, v] : fields) std::cerr << " " << k << "=" << v;
            std::cerr << "\n";
        }
    }
};

Logger g_log;

int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Batch driver: one failure does not stop the batch; failures are collected
// and reported at the end.
struct BatchFailure {
    std::string item;
    std::string message;
};

template <typename Fn>
std::vector<BatchFailure> run_batch(const std::vector<std::string>& items, int jobs, Fn&& fn) {
    std::vector<BatchFailure> failures;
    std::mutex failures_mu;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) break;
            try {
                fn(items[i]);
                g_log.event("done", {{"item", items[i]}});
            } catch (const std::exception& e) {
                {
                    std::lock_guard<std::mutex> lock(failures_mu);
                    failures.push_back({items[i], e.what()});
                }
                g_log.event("failed", {{"item", items[i]}, {"error", e.what()}});
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < n; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::sort(failures.begin(), failures.end(),
              [](const BatchFailure& a, const BatchFailure& b) { return a.item < b.item; });
    return failures;
}

std::vector<std::string> list_files(const std::string& dir, const std::string& extension) {
    if (!fs::is_directory(dir))
        throw ConfigError("not a directory: '" + dir + "'");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

DepthRaster load_depth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open depth csv '" + path + "'");
    return parse_depth_raster(in);
}

LandmarkSet load_keypoints(const std::string& path, const DepthRaster& raster) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open keypoint json '" + path + "'");
    return parse_keypoints(in, Extent2i{raster.width, raster.height});
}

// Paths inside a manifest resolve relative to the manifest's directory.
std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).string();
}

int summarize_batch(const std::vector<BatchFailure>& failures, std::size_t total) {
    g_log.event("batch", {{"processed", std::to_string(total)},
                          {"failed", std::to_string(failures.size())}});
    if (failures.empty()) return kExitOk;
    for (const BatchFailure& f : failures)
        std::cerr << "failed: " << f.item << ": " << f.message << "\n";
    return kExitData;
}

// ---- convert ---------------------------------------------------------------

int cmd_convert(const std::string& camera_path, const std::string& in_dir,
                const std::string& out_dir, int jobs) {
    const PipelineConfig cfg = PipelineConfig::load_file(camera_path);
    const auto files = list_files(in_dir, ".csv");
    if (files.empty())
        throw ConfigError("no .csv files in '" + in_dir + "'");
    fs::create_directories(out_dir);

    const auto failures = run_batch(files, jobs, [&](const std::string& path) {
        const DepthRaster raster = load_depth_csv(path);
        HeightMap map = raster_to_heightmap(raster, cfg.camera);
        if (cfg.convert.pad_width > 0)
            map = pad_center(map, cfg.convert.pad_width, cfg.convert.pad_height,
                             static_cast<std::uint8_t>(cfg.convert.pad_fill))
                      .map;
        const fs::path out = fs::path(out_dir) / (fs::path(path).stem().string() + ".pgm");
        std::ofstream os(out, std::ios::binary);
        if (!os)
            throw DataError("cannot write '" + out.string() + "'");
        write_pgm(map, os);
    });
    return summarize_batch(failures, files.size());
}

// ---- cloud -----------------------------------------------------------------

int cmd_cloud(const std::string& camera_path, const std::string& in_dir, const std::string& out_dir,
              double voxel_mm, std::size_t points, std::uint64_t seed, int jobs) {
    const PipelineConfig cfg = PipelineConfig::load_file(camera_path);
    const auto files = list_files(in_dir, ".csv");
    if (files.empty())
        throw ConfigError("no .csv files in '" + in_dir + "'");
    fs::create_directories(out_dir);

    // Per-file seeds derive from the sorted item index, so output does not
    // depend on scheduling.
    std::map<std::string, std::uint64_t> item_seed;
    for (std::size_t i = 0; i < files.size(); ++i) item_seed[files[i]] = derive_seed(seed, i);

    const auto failures = run_batch(files, jobs, [&](const std::string& path) {
        const DepthRaster raster = load_depth_csv(path);
        PointCloud cloud = backproject(raster, cfg.camera);
        if (voxel_mm > 0.0) {
            VoxelGridSpec grid;
            grid.voxel_size_mm = voxel_mm;
            cloud = voxel_downsample(cloud, grid);
        }
        if (points > 0) cloud = subsample(cloud, points, item_seed.at(path));
        const fs::path out = fs::path(out_dir) / (fs::path(path).stem().string() + ".ply");
        std::ofstream os(out, std::ios::binary);
        if (!os)
            throw DataError("cannot write '" + out.string() + "'");
        write_ply(cloud, os);
    });
    return summarize_batch(failures, files.size());
}

// ---- features ----------------------------------------------------------------

std::vector<std::uint8_t> load_mask_pgm(const std::string& path, int& w, int& h) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open mask '" + path + "'");
    const HeightMap m = read_pgm(in);
    w = m.width;
    h = m.height;
    return m.gray;
}

FeatureRecord extract_one(const ManifestEntry& entry, const std::string& base_dir,
                          const PipelineConfig& cfg, FeatureVariant variant) {
    const DepthRaster raster = load_depth_csv(resolve_path(base_dir, entry.depth_csv_path));
    const LandmarkSet detected =
        load_keypoints(resolve_path(base_dir, entry.keypoint_json_path), raster);

    RefinementConfig refinement = cfg.refinement;
    std::vector<std::uint8_t> mask;
    if (!entry.mask_path.empty()) {
        mask = load_mask_pgm(resolve_path(base_dir, entry.mask_path), refinement.mask_width,
                             refinement.mask_height);
        refinement.mask = &mask;
    }
    const LandmarkSet nine =
        derive_spikes(refine_keypoints(detected, raster, cfg.camera, refinement));

    FeatureRecord record;
    record.cow_id = entry.cow_id;
    record.image_id = entry.image_id;
    record.label = entry.true_bcs;
    if (variant == FeatureVariant::depth_image) {
        record.variant = FeatureVariant::depth_image;
        record.values = extract_features(raster, cfg.camera, nine, cfg.features).values;
    } else {
        record.variant = FeatureVariant::point_cloud;
        const PointCloud cloud = backproject(raster, cfg.camera);
        const LandmarkSet lifted = landmarks_to_3d(nine, raster, cfg.camera);
        record.values =
            extract_features_cloud(cloud, cfg.camera.ground_distance_mm, lifted, cfg.features).values;
    }
    return record;
}

FeatureVariant parse_variant(const std::string& name) {
    if (name == "depth" || name == "depth_image") return FeatureVariant::depth_image;
    if (name == "cloud" || name == "point_cloud") return FeatureVariant::point_cloud;
    throw ConfigError("--variant must be 'depth' or 'cloud'");
}

struct ExtractedFeatures {
    std::vector<FeatureRecord> rows;
    std::vector<BatchFailure> failures;
    std::size_t total = 0;
};

ExtractedFeatures extract_from_manifest(const std::string& camera_path,
                                        const std::string& manifest_path,
                                        const std::string& variant_name, int jobs) {
    const PipelineConfig cfg = PipelineConfig::load_file(camera_path);
    const FeatureVariant variant = parse_variant(variant_name);

    std::ifstream in(manifest_path);
    if (!in)
        throw ConfigError("cannot open manifest '" + manifest_path + "'");
    const auto entries = read_manifest(in);
    if (entries.empty())
        throw DataError("manifest has no rows");
    const std::string base_dir = fs::path(manifest_path).parent_path().string();

    std::vector<std::string> items;
    std::map<std::string, const ManifestEntry*> by_image;
    for (const auto& entry : entries) {
        items.push_back(entry.image_id);
        if (!by_image.emplace(entry.image_id, &entry).second)
            throw DataError("manifest: duplicate image_id '" + entry.image_id + "'");
    }

    std::map<std::string, FeatureRecord> results;
    std::mutex results_mu;
    ExtractedFeatures out;
    out.total = items.size();
    out.failures = run_batch(items, jobs, [&](const std::string& image_id) {
        FeatureRecord record = extract_one(*by_image.at(image_id), base_dir, cfg, variant);
        std::lock_guard<std::mutex> lock(results_mu);
        results.emplace(image_id, std::move(record));
    });
    for (const auto& entry : entries) {
        const auto it = results.find(entry.image_id);
        if (it != results.end()) out.rows.push_back(it->second);
    }
    return out;
}

int cmd_features(const std::string& camera_path, const std::string& manifest_path,
                 const std::string& variant_name, const std::string& out_path, int jobs) {
    const ExtractedFeatures extracted =
        extract_from_manifest(camera_path, manifest_path, variant_name, jobs);
    std::ofstream os(out_path);
    if (!os)
        throw DataError("cannot write '" + out_path + "'");
    write_feature_csv(extracted.rows, os);
    g_log.event("features", {{"rows", std::to_string(extracted.rows.size())}, {"out", out_path}});
    return summarize_batch(extracted.failures, extracted.total);
}

// ---- train / predict ---------------------------------------------------------

std::vector<FeatureRecord> load_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open features csv '" + path + "'");
    return read_feature_csv(in);
}

std::pair<FeatureMatrix, std::vector<BcsLabel>> gather_images(const EvalDataset& ds,
                                                              const std::vector<std::size_t>& idx) {
    FeatureMatrix m;
    m.n_rows = idx.size();
    m.n_cols = kNumFeatures;
    m.feature_names.assign(FeatureVector::names().begin(), FeatureVector::names().end());
    std::vector<BcsLabel> labels;
    for (const std::size_t i : idx) {
        m.data.insert(m.data.end(), ds.images[i].features.begin(), ds.images[i].features.end());
        labels.push_back(ds.cows[ds.images[i].cow].true_bcs);
    }
    return {std::move(m), std::move(labels)};
}

int cmd_train(const std::string& features_path, const std::string& grid_name, std::uint64_t seed,
              const std::string& out_path, int jobs) {
    if (grid_name != "table1" && grid_name != "default")
        throw ConfigError("--grid must be 'table1' or 'default'");
    const EvalDataset ds = dataset_from_features(load_feature_csv(features_path));

    const SplitPlan plan = cow_level_split(ds.cows, {0.70, 0.15, 0.15}, seed);
    CvSets sets;
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
        switch (plan.assignment.at(ds.cows[ds.images[i].cow].cow_id)) {
        case Partition::train: sets.train_images.push_back(i); break;
        case Partition::val: sets.val_images.push_back(i); break;
        case Partition::test: sets.test_images.push_back(i); break;
        }
    }
    auto [train_x, train_y] = gather_images(ds, sets.train_images);
    auto [val_x, val_y] = gather_images(ds, sets.val_images);

    ForestHyperparams best;
    best.seed = derive_seed(seed, 1);
    if (grid_name == "table1") {
        const auto result =
            grid_search(train_x, train_y, val_x, val_y, table1_grid(derive_seed(seed, 1)), jobs);
        best = result.best;
        g_log.event("grid", {{"best", best.describe()},
                             {"val_accuracy", std::to_string(result.best_accuracy)}});
    }

    std::vector<std::size_t> fit(sets.train_images);
    fit.insert(fit.end(), sets.val_images.begin(), sets.val_images.end());
    auto [fit_x, fit_y] = gather_images(ds, fit);
    ForestHyperparams final_hp = best;
    final_hp.seed = derive_seed(seed, 2);
    const ForestModel model = train_forest(fit_x, fit_y, final_hp, jobs);

    std::ofstream os(out_path);
    if (!os)
        throw DataError("cannot write '" + out_path + "'");
    os << model.to_json() << "\n";
    g_log.event("train", {{"trees", std::to_string(model.trees.size())},
                          {"oob_accuracy", std::to_string(model.oob_accuracy)},
                          {"out", out_path}});
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& features_path,
                const std::string& out_path) {
    std::ifstream min(model_path);
    if (!min)
        throw ConfigError("cannot open model '" + model_path + "'");
    const ForestModel model = ForestModel::from_json(min);
    if (!model.feature_names.empty() &&
        !std::equal(model.feature_names.begin(), model.feature_names.end(),
                    FeatureVector::names().begin(), FeatureVector::names().end()))
        throw ConfigError("model feature schema does not match the 24 geometric features");

    const auto rows = load_feature_csv(features_path);
    std::ofstream os(out_path);
    if (!os)
        throw DataError("cannot write '" + out_path + "'");
    os << "cow_id,image_id,pred_bcs";
    for (int c = 0; c < BcsLabel::kNumClasses; ++c) {
        char head[16];
        std::snprintf(head, sizeof head, ",p%.2f", BcsLabel::from_index(c).value());
        os << head;
    }
    os << "\n";
    for (const FeatureRecord& row : rows) {
        const Prediction p = predict(model, std::span<const double>(row.values));
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", p.label.value());
        os << row.cow_id << "," << row.image_id << "," << buf;
        for (const double prob : p.probabilities) {
            std::snprintf(buf, sizeof buf, ",%.6f", prob);
            os << buf;
        }
        os << "\n";
    }
    g_log.event("predict", {{"rows", std::to_string(rows.size())}, {"out", out_path}});
    return kExitOk;
}

// ---- eval ----------------------------------------------------------------------

int cmd_eval(const std::string& camera_path, const std::string& manifest_path,
             const std::string& features_path, const std::string& variant_name, int repeats,
             bool repeats_given, std::uint64_t seed, const std::string& out_path, int jobs) {
    std::array<double, 3> ratios = {0.70, 0.15, 0.15};
    std::string grid_name = "table1";
    std::vector<FeatureRecord> rows;
    if (!features_path.empty()) {
        rows = load_feature_csv(features_path);
    } else {
        if (camera_path.empty() || manifest_path.empty())
            throw ConfigError("eval needs --features, or --camera with --manifest");
        const PipelineConfig cfg = PipelineConfig::load_file(camera_path);
        ratios = cfg.evaluation.ratios;
        grid_name = cfg.evaluation.grid;
        if (!repeats_given) repeats = cfg.evaluation.repeats;
        ExtractedFeatures extracted =
            extract_from_manifest(camera_path, manifest_path, variant_name, jobs);
        if (!extracted.failures.empty())
            return summarize_batch(extracted.failures, extracted.total);
        rows = std::move(extracted.rows);
    }

    const EvalDataset ds = dataset_from_features(rows);
    const EvalReport report =
        run_cv(ds, {forest_pipeline("rf-" + variant_name + "-" + grid_name, grid_name == "table1",
                                    {}, jobs)},
               repeats, seed, ratios);

    std::ofstream os(out_path);
    if (!os)
        throw DataError("cannot write '" + out_path + "'");
    os << report.to_json() << "\n";
    std::cout << report.to_table();
    for (const PipelineReport& pr : report.pipelines)
        for (const RepeatOutcome& out : pr.repeats)
            if (!out.error.empty()) {
                std::cerr << "repeat error: " << out.error << "\n";
                return kExitData;
            }
    return kExitOk;
}

// ---- synth ----------------------------------------------------------------------

int cmd_synth(int count, std::uint64_t seed, const std::string& out_dir, int images_per_cow,
              double noise_sigma, int classes, int jobs) {
    SynthDatasetParams params;
    params.n_cows = count;
    params.images_per_cow = images_per_cow;
    params.noise_sigma_mm = noise_sigma;
    params.n_classes = classes;
    params.seed = seed;
    params.validate();

    CameraConfig cam;
    cam.ground_distance_mm = 2515.0;
    cam.fx = 700.0;
    cam.fy = 700.0;
    cam.cx = params.geometry.raster_width / 2.0;
    cam.cy = params.geometry.raster_height / 2.0;

    fs::create_directories(fs::path(out_dir) / "depth");
    fs::create_directories(fs::path(out_dir) / "keypoints");

    OracleDensity density;
    density.line_samples = 20001;
    density.triangle_samples = 40000;

    std::vector<std::string> items;
    for (int i = 0; i < count; ++i) items.push_back(std::to_string(i));

    std::vector<ManifestEntry> manifest(static_cast<std::size_t>(count) * images_per_cow);
    std::vector<FeatureRecord> oracle_rows(static_cast<std::size_t>(count));
    const auto failures = run_batch(items, jobs, [&](const std::string& item) {
        const int index = std::stoi(item);
        const SynthCow cow = generate_synth_cow(params, index, cam, &density);
        for (int img = 0; img < images_per_cow; ++img) {
            const std::string image_id = cow.cow_id + "_" + std::to_string(img);
            const std::string depth_rel = "depth/" + image_id + ".csv";
            const std::string kp_rel = "keypoints/" + image_id + ".json";
            {
                std::ofstream os(fs::path(out_dir) / depth_rel);
                if (!os)
                    throw DataError("cannot write depth csv for " + image_id);
                write_depth_csv(cow.images[static_cast<std::size_t>(img)].raster, os);
            }
            {
                std::ofstream os(fs::path(out_dir) / kp_rel);
                if (!os)
                    throw DataError("cannot write keypoints for " + image_id);
                write_keypoints(cow.images[static_cast<std::size_t>(img)].detected, image_id, os);
            }
            ManifestEntry entry;
            entry.cow_id = cow.cow_id;
            entry.image_id = image_id;
            entry.true_bcs = cow.label.value();
            entry.depth_csv_path = depth_rel;
            entry.keypoint_json_path = kp_rel;
            manifest[static_cast<std::size_t>(index) * images_per_cow + img] = std::move(entry);
        }
        FeatureRecord oracle_row;
        oracle_row.cow_id = cow.cow_id;
        oracle_row.image_id = cow.cow_id + "_oracle";
        oracle_row.variant = FeatureVariant::depth_image;
        oracle_row.values = cow.oracle.values;
        oracle_row.label = cow.label.value();
        oracle_rows[static_cast<std::size_t>(index)] = std::move(oracle_row);
    });

    {
        std::ofstream os(fs::path(out_dir) / "manifest.csv");
        if (!os)
            throw DataError("cannot write manifest.csv");
        write_manifest(manifest, os, false, false);
    }
    {
        std::ofstream os(fs::path(out_dir) / "oracle_features.csv");
        if (!os)
            throw DataError("cannot write oracle_features.csv");
        write_feature_csv(oracle_rows, os);
    }
    g_log.event("synth", {{"cows", std::to_string(count)},
                          {"images", std::to_string(count * images_per_cow)},
                          {"out", out_dir}});
    return summarize_batch(failures, items.size());
}

// ---- stats ----------------------------------------------------------------------

int cmd_stats(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw ConfigError("cannot open manifest '" + manifest_path + "'");
    const auto entries = read_manifest(in);
    if (entries.empty())
        throw DataError("manifest has no rows");

    // Cow-level histogram per year group (single "all" group when the
    // manifest has no year column).
    std::map<std::string, std::map<std::string, double>> cow_label;
    for (const auto& entry : entries) {
        const std::string year = entry.year.empty() ? "all" : entry.year;
        cow_label[year][entry.cow_id] = entry.true_bcs;
    }
    for (const auto& [year, cows] : cow_label) {
        std::map<int, int> hist;
        for (const auto& [cow, bcs] : cows) ++hist[BcsLabel::from_value(bcs).index()];
        std::size_t max_count = 1;
        for (const auto& [idx, n] : hist) max_count = std::max<std::size_t>(max_count, n);
        std::cout << "BCS distribution (" << year << "), " << cows.size() << " cows\n";
        for (int c = 0; c < BcsLabel::kNumClasses; ++c) {
            const int n = hist.count(c) ? hist.at(c) : 0;
            const int bar = static_cast<int>(50.0 * n / static_cast<double>(max_count));
            char head[32];
            std::snprintf(head, sizeof head, "  %.2f %5d ", BcsLabel::from_index(c).value(), n);
            std::cout << head << std::string(static_cast<std::size_t>(bar), '#') << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth-image and point-cloud geometry pipeline for bovine body condition scoring"};
    app.set_version_flag("--version", std::string("bovigeom ") + kVersion + " (config schema " +
                                          kConfigSchema + ")");
    std::string log_mode = "text";
    app.add_option("--log", log_mode, "log format: text | json")->capture_default_str();

    std::string camera, in_dir, out_dir, manifest, features_csv, model_path, out_path;
    std::string variant = "depth";
    std::string grid_name = "table1";
    double voxel_mm = 0.0;
    std::size_t points = 0;
    std::uint64_t seed = 1;
    int jobs = 1;
    int repeats = 5;
    int count = 100;
    int images_per_cow = 3;
    int classes = 5;
    double noise_sigma = 3.0;

    CLI::App* convert = app.add_subcommand("convert", "depth csv directory -> pgm height maps");
    convert->add_option("--camera", camera, "camera/pipeline toml")->required();
    convert->add_option("--in", in_dir, "input directory of depth .csv")->required();
    convert->add_option("--out", out_dir, "output directory for .pgm")->required();
    convert->add_option("--jobs", jobs, "worker threads (0 = auto)");

    CLI::App* cloud = app.add_subcommand("cloud", "depth csv directory -> ply point clouds");
    cloud->add_option("--camera", camera)->required();
    cloud->add_option("--in", in_dir)->required();
    cloud->add_option("--out", out_dir)->required();
    cloud->add_option("--voxel", voxel_mm, "voxel size in mm (0 = no downsampling)");
    cloud->add_option("--points", points, "subsample to a fixed point count (0 = keep all)");
    cloud->add_option("--seed", seed, "subsampling seed");
    cloud->add_option("--jobs", jobs);

    CLI::App* features = app.add_subcommand("features", "manifest -> 24 geometric features csv");
    features->add_option("--camera", camera)->required();
    features->add_option("--manifest", manifest)->required();
    features->add_option("--variant", variant, "depth | cloud")->required();
    features->add_option("--out", out_path)->required();
    features->add_option("--jobs", jobs);

    CLI::App* train = app.add_subcommand("train", "features csv -> random forest model json");
    train->add_option("--features", features_csv)->required();
    train->add_option("--grid", grid_name, "table1 | default");
    train->add_option("--seed", seed);
    train->add_option("--out", out_path)->required();
    train->add_option("--jobs", jobs);

    CLI::App* predict_cmd = app.add_subcommand("predict", "model + features csv -> predictions csv");
    predict_cmd->add_option("--model", model_path)->required();
    predict_cmd->add_option("--features", features_csv)->required();
    predict_cmd->add_option("--out", out_path)->required();

    CLI::App* eval = app.add_subcommand("eval", "cow-level repeated cross-validation report");
    eval->add_option("--camera", camera);
    eval->add_option("--manifest", manifest);
    eval->add_option("--features", features_csv, "precomputed features csv (skips extraction)");
    eval->add_option("--variant", variant, "depth | cloud");
    eval->add_option("--repeats", repeats);
    eval->add_option("--seed", seed);
    eval->add_option("--out", out_path)->required();
    eval->add_option("--jobs", jobs);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    synth->add_option("--count", count, "number of cows")->required();
    synth->add_option("--seed", seed);
    synth->add_option("--out", out_dir)->required();
    synth->add_option("--images-per-cow", images_per_cow);
    synth->add_option("--noise-sigma", noise_sigma, "depth noise sigma in mm");
    synth->add_option("--classes", classes, "number of BCS classes");
    synth->add_option("--jobs", jobs);

    CLI::App* stats = app.add_subcommand("stats", "BCS histogram from a manifest");
    stats->add_option("--manifest", manifest)->required();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }
    if (log_mode != "text" && log_mode != "json") {
        std::cerr << "error: --log must be 'text' or 'json'\n";
        return kExitConfig;
    }
    g_log.json = log_mode == "json";

    try {
        const int effective_jobs = resolve_jobs(jobs);
        if (convert->parsed()) return cmd_convert(camera, in_dir, out_dir, effective_jobs);
        if (cloud->parsed())
            return cmd_cloud(camera, in_dir, out_dir, voxel_mm, points, seed, effective_jobs);
        if (features->parsed())
            return cmd_features(camera, manifest, variant, out_path, effective_jobs);
        if (train->parsed())
            return cmd_train(features_csv, grid_name, seed, out_path, effective_jobs);
        if (predict_cmd->parsed()) return cmd_predict(model_path, features_csv, out_path);
        if (eval->parsed())
            return cmd_eval(camera, manifest, features_csv, variant, repeats,
                            eval->count("--repeats") > 0, seed, out_path, effective_jobs);
        if (synth->parsed())
            return cmd_synth(count, seed, out_dir, images_per_cow, noise_sigma, classes,
                             effective_jobs);
        if (stats->parsed()) return cmd_stats(manifest);
    } catch (const ConfigError& e) {
        g_log.event("error", {{"kind", "config"}, {"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        g_log.event("error", {{"kind", "data"}, {"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        g_log.event("error", {{"kind", "internal"}, {"message", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
