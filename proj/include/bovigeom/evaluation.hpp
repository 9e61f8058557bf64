#pragma once

#include "bovigeom/features.hpp"
#include "bovigeom/forest.hpp"
#include "bovigeom/landmarks.hpp"
#include "bovigeom/stats.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bovigeom {

struct CowRecord {
    std::string cow_id;
    std::vector<std::string> image_ids;
    BcsLabel true_bcs;
};

enum class Partition : int { train = 0, val = 1, test = 2 };
const std::string& partition_str(Partition p);

/// Cow-exclusive partition assignment for one cross-validation repeat.
struct SplitPlan {
    int repeat_index = 0;
    std::uint64_t seed = 0;
    std::map<std::string, Partition> assignment;

    /// Re-checks exclusivity and the 70/15/15 (+-2 cows) balance; runs on
    /// every split, not only in tests.
    void audit(const std::vector<CowRecord>& records, const std::array<double, 3>& ratios) const;
};

/// Stratified greedy allocation: cows are processed class by class in BCS
/// order (seeded shuffle within each class) and each goes to the partition
/// currently furthest below its running target count.
SplitPlan cow_level_split(const std::vector<CowRecord>& records,
                          const std::array<double, 3>& ratios, std::uint64_t seed);

/// Most frequent label; ties resolve to the lowest BCS value.
BcsLabel majority_vote(std::span<const BcsLabel> preds);

/// Fraction of predictions with |pred - truth| <= tol (+1e-9 slack).
double tolerance_accuracy(std::span<const BcsLabel> pred, std::span<const BcsLabel> truth, double tol);

/// Percentage of correct keypoints: fraction of matched landmarks whose
/// Euclidean pixel error is <= k.
double pck(std::span<const LandmarkSet> pred, std::span<const LandmarkSet> truth, double k_px);

struct RmseReport {
    double overall = 0.0;
    std::array<double, kNumLandmarks> per_landmark{};
    std::array<bool, kNumLandmarks> present{};
};
RmseReport keypoint_rmse(std::span<const LandmarkSet> pred, std::span<const LandmarkSet> truth);

/// Feature-space dataset for the cross-validation driver; images reference
/// their cow by index.
struct EvalImage {
    std::string image_id;
    std::size_t cow = 0;
    std::array<double, kNumFeatures> features{};
};

struct EvalDataset {
    std::vector<CowRecord> cows;
    std::vector<EvalImage> images;
};

/// Group labeled feature rows into an EvalDataset (sorted by cow then image
/// id; every row needs a label and all rows of a cow must agree on it).
EvalDataset dataset_from_features(const std::vector<FeatureRecord>& rows);

struct CvSets {
    std::vector<std::size_t> train_images;
    std::vector<std::size_t> val_images;
    std::vector<std::size_t> test_images;
};

/// A pipeline trains on the train/val images and returns one prediction per
/// test image, in test_images order.
using PipelineFn =
    std::function<std::vector<BcsLabel>(const EvalDataset&, const CvSets&, std::uint64_t repeat_seed)>;

struct NamedPipeline {
    std::string name;
    PipelineFn fn;
};

/// The reference tabular pipeline: exhaustive grid search scored on the
/// validation cows, retrain on train+val with the winner, predict test.
NamedPipeline forest_pipeline(const std::string& name, bool use_table1_grid,
                              ForestHyperparams base = {}, int n_jobs = 1);

struct RepeatOutcome {
    int repeat = 0;
    std::uint64_t seed = 0;
    std::map<double, double> accuracy; // tolerance -> cow-level accuracy
    std::size_t n_test_cows = 0;
    std::string error; // non-empty when the repeat aborted
};

struct PipelineReport {
    std::string name;
    std::vector<RepeatOutcome> repeats;
    std::map<double, double> mean_accuracy;
    std::map<double, double> se_accuracy; // sample SD / sqrt(repeats)
};

struct PairwiseTest {
    std::string a;
    std::string b;
    double tolerance = 0.0;
    bool valid = false;
    double t = 0.0;
    double p = 1.0;
    std::string note;
};

struct EvalReport {
    std::uint64_t base_seed = 0;
    int repeats = 0;
    std::array<double, 3> ratios{};
    std::vector<double> tolerances;
    std::vector<PipelineReport> pipelines;
    std::vector<PairwiseTest> tests;

    std::string to_json() const;
    std::string to_table() const; // aligned mean/SE per tolerance
};

/// Repeated cow-level subsampling cross-validation: per repeat a fresh
/// SplitPlan (seed = base_seed + repeat) shared by all pipelines, cow-level
/// majority voting, tolerance accuracies, and pairwise Welch tests.
EvalReport run_cv(const EvalDataset& dataset, const std::vector<NamedPipeline>& pipelines,
                  int repeats, std::uint64_t base_seed,
                  const std::array<double, 3>& ratios = {0.70, 0.15, 0.15});

/// Dataset manifest row; mask_path and year are optional columns.
struct ManifestEntry {
    std::string cow_id;
    std::string image_id;
    double true_bcs = 0.0;
    std::string depth_csv_path;
    std::string keypoint_json_path;
    std::string mask_path;
    std::string year;
};

std::vector<ManifestEntry> read_manifest(std::istream& in);
void write_manifest(const std::vector<ManifestEntry>& rows, std::ostream& out, bool with_mask,
                    bool with_year);

} // namespace bovigeom
