#include "bovigeom/evaluation.hpp"

#include "bovigeom/error.hpp"
#include "bovigeom/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace bovigeom {

const std::string& partition_str(Partition p) {
    static const std::array<std::string, 3> names = {"train", "val", "test"};
    return names[static_cast<int>(p)];
}

void SplitPlan::audit(const std::vector<CowRecord>& records, const std::array<double, 3>& ratios) const {
    if (assignment.size() != records.size())
        throw ConfigError("split audit: assignment covers " + std::to_string(assignment.size()) +
                          " cows, dataset has " + std::to_string(records.size()));
    std::array<std::size_t, 3> counts{};
    for (const CowRecord& cow : records) {
        const auto it = assignment.find(cow.cow_id);
        if (it == assignment.end())
            throw ConfigError("split audit: cow '" + cow.cow_id + "' is unassigned");
        ++counts[static_cast<int>(it->second)];
    }
    const double n = static_cast<double>(records.size());
    for (int p = 0; p < 3; ++p) {
        const double target = ratios[static_cast<std::size_t>(p)] * n;
        if (std::abs(static_cast<double>(counts[static_cast<std::size_t>(p)]) - target) > 2.0 + 1e-9)
            throw ConfigError("split audit: partition '" + partition_str(static_cast<Partition>(p)) +
                              "' holds " + std::to_string(counts[static_cast<std::size_t>(p)]) +
                              " cows, target " + std::to_string(target));
    }
}

SplitPlan cow_level_split(const std::vector<CowRecord>& records, const std::array<double, 3>& ratios,
                          std::uint64_t seed) {
    if (records.size() < 3)
        throw ConfigError("cow_level_split: need at least 3 cows for 3 partitions");
    double ratio_sum = 0.0;
    for (const double r : ratios) {
        if (r < 0.0)
            throw ConfigError("cow_level_split: ratios must be non-negative");
        ratio_sum += r;
    }
    if (std::abs(ratio_sum - 1.0) > 1e-9)
        throw ConfigError("cow_level_split: ratios must sum to 1");

    {
        std::set<std::string> ids;
        for (const CowRecord& cow : records)
            if (!ids.insert(cow.cow_id).second)
                throw DataError("cow_level_split: duplicate cow_id '" + cow.cow_id + "'");
    }

    // Class lists in BCS order, each sorted by cow_id so the plan does not
    // depend on input row order, then shuffled with the split seed.
    std::array<std::vector<const CowRecord*>, BcsLabel::kNumClasses> by_class;
    for (const CowRecord& cow : records) by_class[cow.true_bcs.index()].push_back(&cow);
    Rng rng(seed);
    for (auto& cls : by_class) {
        std::sort(cls.begin(), cls.end(),
                  [](const CowRecord* a, const CowRecord* b) { return a->cow_id < b->cow_id; });
        for (std::size_t i = 0; i + 1 < cls.size(); ++i) {
            const std::size_t j = i + rng.next_below(cls.size() - i);
            std::swap(cls[i], cls[j]);
        }
    }

    SplitPlan plan;
    plan.seed = seed;
    std::array<double, 3> assigned{};
    std::size_t processed = 0;
    for (const auto& cls : by_class) {
        for (const CowRecord* cow : cls) {
            ++processed;
            int best = 0;
            double best_deficit = -std::numeric_limits<double>::infinity();
            for (int p = 0; p < 3; ++p) {
                const double deficit =
                    ratios[static_cast<std::size_t>(p)] * static_cast<double>(processed) -
                    assigned[static_cast<std::size_t>(p)];
                if (deficit > best_deficit + 1e-12) {
                    best_deficit = deficit;
                    best = p;
                }
            }
            assigned[static_cast<std::size_t>(best)] += 1.0;
            plan.assignment.emplace(cow->cow_id, static_cast<Partition>(best));
        }
    }
    plan.audit(records, ratios);
    return plan;
}

BcsLabel majority_vote(std::span<const BcsLabel> preds) {
    if (preds.empty())
        throw ConfigError("majority_vote: empty prediction list");
    std::array<std::size_t, BcsLabel::kNumClasses> counts{};
    for (const BcsLabel l : preds) ++counts[l.index()];
    int best = 0;
    for (int c = 1; c < BcsLabel::kNumClasses; ++c)
        if (counts[c] > counts[best]) best = c; // ties keep the lower BCS
    return BcsLabel::from_index(best);
}

double tolerance_accuracy(std::span<const BcsLabel> pred, std::span<const BcsLabel> truth, double tol) {
    if (pred.size() != truth.size())
        throw ConfigError("tolerance_accuracy: length mismatch");
    if (pred.empty())
        throw ConfigError("tolerance_accuracy: empty inputs");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (std::abs(pred[i].value() - truth[i].value()) <= tol + 1e-9) ++hit;
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

namespace {

// Landmarks carried by both sets of one image pair, in name order.
std::vector<LandmarkName> matched_names(const LandmarkSet& a, const LandmarkSet& b) {
    std::vector<LandmarkName> names;
    for (int i = 0; i < kNumLandmarks; ++i) {
        const auto name = static_cast<LandmarkName>(i);
        if (a.has(name) != b.has(name))
            throw ConfigError("keypoint metrics: landmark '" + landmark_name_str(name) +
                              "' present in only one set");
        if (a.has(name)) names.push_back(name);
    }
    if (names.empty())
        throw ConfigError("keypoint metrics: no landmarks to compare");
    return names;
}

} // namespace

double pck(std::span<const LandmarkSet> pred, std::span<const LandmarkSet> truth, double k_px) {
    if (pred.size() != truth.size() || pred.empty())
        throw ConfigError("pck: prediction/truth image counts differ or are empty");
    std::size_t total = 0, hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (const LandmarkName name : matched_names(pred[i], truth[i])) {
            const Landmark& p = pred[i].at(name);
            const Landmark& t = truth[i].at(name);
            ++total;
            if (std::hypot(p.u - t.u, p.v - t.v) <= k_px) ++hit;
        }
    }
    return static_cast<double>(hit) / static_cast<double>(total);
}

RmseReport keypoint_rmse(std::span<const LandmarkSet> pred, std::span<const LandmarkSet> truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw ConfigError("keypoint_rmse: prediction/truth image counts differ or are empty");
    std::array<double, kNumLandmarks> sq{};
    std::array<std::size_t, kNumLandmarks> n{};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (const LandmarkName name : matched_names(pred[i], truth[i])) {
            const Landmark& p = pred[i].at(name);
            const Landmark& t = truth[i].at(name);
            const double du = p.u - t.u;
            const double dv = p.v - t.v;
            sq[static_cast<int>(name)] += du * du + dv * dv;
            ++n[static_cast<int>(name)];
        }
    }
    RmseReport report;
    double total_sq = 0.0;
    std::size_t total_n = 0;
    for (int i = 0; i < kNumLandmarks; ++i) {
        if (n[i] == 0) continue;
        report.present[i] = true;
        report.per_landmark[i] = std::sqrt(sq[i] / static_cast<double>(n[i]));
        total_sq += sq[i];
        total_n += n[i];
    }
    report.overall = std::sqrt(total_sq / static_cast<double>(total_n));
    return report;
}

EvalDataset dataset_from_features(const std::vector<FeatureRecord>& rows) {
    std::map<std::string, std::vector<const FeatureRecord*>> by_cow;
    for (const FeatureRecord& row : rows) {
        if (!row.label)
            throw DataError("dataset: image '" + row.image_id + "' has no label");
        by_cow[row.cow_id].push_back(&row);
    }
    if (by_cow.empty())
        throw DataError("dataset: no rows");

    EvalDataset ds;
    for (auto& [cow_id, cow_rows] : by_cow) {
        std::sort(cow_rows.begin(), cow_rows.end(), [](const FeatureRecord* a, const FeatureRecord* b) {
            return a->image_id < b->image_id;
        });
        CowRecord cow;
        cow.cow_id = cow_id;
        cow.true_bcs = BcsLabel::from_value(*cow_rows.front()->label);
        for (const FeatureRecord* row : cow_rows) {
            if (BcsLabel::from_value(*row->label) != cow.true_bcs)
                throw DataError("dataset: cow '" + cow_id + "' has conflicting labels across images");
            cow.image_ids.push_back(row->image_id);
            EvalImage img;
            img.image_id = row->image_id;
            img.cow = ds.cows.size();
            img.features = row->values;
            ds.images.push_back(img);
        }
        ds.cows.push_back(std::move(cow));
    }
    return ds;
}

namespace {

FeatureMatrix gather_matrix(const EvalDataset& ds, std::span<const std::size_t> image_idx) {
    FeatureMatrix m;
    m.n_rows = image_idx.size();
    m.n_cols = kNumFeatures;
    m.feature_names.assign(FeatureVector::names().begin(), FeatureVector::names().end());
    m.data.reserve(m.n_rows * m.n_cols);
    for (const std::size_t i : image_idx)
        m.data.insert(m.data.end(), ds.images[i].features.begin(), ds.images[i].features.end());
    return m;
}

std::vector<BcsLabel> gather_labels(const EvalDataset& ds, std::span<const std::size_t> image_idx) {
    std::vector<BcsLabel> labels;
    labels.reserve(image_idx.size());
    for (const std::size_t i : image_idx) labels.push_back(ds.cows[ds.images[i].cow].true_bcs);
    return labels;
}

} // namespace

NamedPipeline forest_pipeline(const std::string& name, bool use_table1_grid, ForestHyperparams base,
                              int n_jobs) {
    PipelineFn fn = [use_table1_grid, base, n_jobs](const EvalDataset& ds, const CvSets& sets,
                                                    std::uint64_t repeat_seed) {
        const FeatureMatrix train_x = gather_matrix(ds, sets.train_images);
        const std::vector<BcsLabel> train_y = gather_labels(ds, sets.train_images);
        const FeatureMatrix val_x = gather_matrix(ds, sets.val_images);
        const std::vector<BcsLabel> val_y = gather_labels(ds, sets.val_images);

        ForestHyperparams best = base;
        best.seed = derive_seed(repeat_seed, 1);
        if (use_table1_grid) {
            const auto grid = table1_grid(derive_seed(repeat_seed, 1));
            best = grid_search(train_x, train_y, val_x, val_y, grid, n_jobs).best;
        }

        // Retrain on train+val with the selected configuration.
        std::vector<std::size_t> fit_idx(sets.train_images.begin(), sets.train_images.end());
        fit_idx.insert(fit_idx.end(), sets.val_images.begin(), sets.val_images.end());
        ForestHyperparams final_hp = best;
        final_hp.seed = derive_seed(repeat_seed, 2);
        const ForestModel model =
            train_forest(gather_matrix(ds, fit_idx), gather_labels(ds, fit_idx), final_hp, n_jobs);

        std::vector<BcsLabel> preds;
        preds.reserve(sets.test_images.size());
        for (const std::size_t i : sets.test_images)
            preds.push_back(predict(model, std::span<const double>(ds.images[i].features)).label);
        return preds;
    };
    return {name, std::move(fn)};
}

EvalReport run_cv(const EvalDataset& dataset, const std::vector<NamedPipeline>& pipelines, int repeats,
                  std::uint64_t base_seed, const std::array<double, 3>& ratios) {
    if (pipelines.empty())
        throw ConfigError("run_cv: no pipelines");
    if (repeats < 1)
        throw ConfigError("run_cv: repeats must be >= 1");

    EvalReport report;
    report.base_seed = base_seed;
    report.repeats = repeats;
    report.ratios = ratios;
    report.tolerances = {0.0, 0.25, 0.5};
    report.pipelines.resize(pipelines.size());
    for (std::size_t p = 0; p < pipelines.size(); ++p) report.pipelines[p].name = pipelines[p].name;

    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t repeat_seed = base_seed + static_cast<std::uint64_t>(r);
        SplitPlan plan;
        bool split_ok = true;
        std::string split_error;
        CvSets sets;
        std::vector<std::size_t> test_cows;
        try {
            plan = cow_level_split(dataset.cows, ratios, repeat_seed);
            plan.repeat_index = r;
            for (std::size_t i = 0; i < dataset.images.size(); ++i) {
                switch (plan.assignment.at(dataset.cows[dataset.images[i].cow].cow_id)) {
                case Partition::train: sets.train_images.push_back(i); break;
                case Partition::val: sets.val_images.push_back(i); break;
                case Partition::test: sets.test_images.push_back(i); break;
                }
            }
            for (std::size_t c = 0; c < dataset.cows.size(); ++c)
                if (plan.assignment.at(dataset.cows[c].cow_id) == Partition::test) test_cows.push_back(c);
        } catch (const std::exception& e) {
            split_ok = false;
            split_error = e.what();
        }

        for (std::size_t p = 0; p < pipelines.size(); ++p) {
            RepeatOutcome outcome;
            outcome.repeat = r;
            outcome.seed = repeat_seed;
            if (!split_ok) {
                outcome.error = "repeat " + std::to_string(r) + ": split failed: " + split_error;
                report.pipelines[p].repeats.push_back(std::move(outcome));
                continue;
            }
            try {
                const std::vector<BcsLabel> image_preds =
                    pipelines[p].fn(dataset, sets, repeat_seed);
                if (image_preds.size() != sets.test_images.size())
                    throw DataError("pipeline returned " + std::to_string(image_preds.size()) +
                                    " predictions for " + std::to_string(sets.test_images.size()) +
                                    " test images");

                // Majority vote per test cow.
                std::map<std::size_t, std::vector<BcsLabel>> per_cow;
                for (std::size_t k = 0; k < sets.test_images.size(); ++k)
                    per_cow[dataset.images[sets.test_images[k]].cow].push_back(image_preds[k]);
                std::vector<BcsLabel> voted, truth;
                for (const std::size_t c : test_cows) {
                    voted.push_back(majority_vote(per_cow.at(c)));
                    truth.push_back(dataset.cows[c].true_bcs);
                }
                outcome.n_test_cows = voted.size();
                for (const double tol : report.tolerances)
                    outcome.accuracy[tol] = tolerance_accuracy(voted, truth, tol);
            } catch (const std::exception& e) {
                outcome.error = "repeat " + std::to_string(r) + ": " + e.what();
            }
            report.pipelines[p].repeats.push_back(std::move(outcome));
        }
    }

    for (PipelineReport& pr : report.pipelines) {
        for (const double tol : report.tolerances) {
            std::vector<double> accs;
            for (const RepeatOutcome& out : pr.repeats)
                if (out.error.empty()) accs.push_back(out.accuracy.at(tol));
            if (accs.empty()) continue;
            pr.mean_accuracy[tol] = mean(accs);
            pr.se_accuracy[tol] =
                accs.size() > 1 ? sample_sd(accs) / std::sqrt(static_cast<double>(accs.size())) : 0.0;
        }
    }

    for (std::size_t i = 0; i < report.pipelines.size(); ++i) {
        for (std::size_t j = i + 1; j < report.pipelines.size(); ++j) {
            for (const double tol : report.tolerances) {
                PairwiseTest test;
                test.a = report.pipelines[i].name;
                test.b = report.pipelines[j].name;
                test.tolerance = tol;
                std::vector<double> a, b;
                for (const RepeatOutcome& out : report.pipelines[i].repeats)
                    if (out.error.empty()) a.push_back(out.accuracy.at(tol));
                for (const RepeatOutcome& out : report.pipelines[j].repeats)
                    if (out.error.empty()) b.push_back(out.accuracy.at(tol));
                try {
                    const TTestResult r = welch_ttest(a, b);
                    test.valid = true;
                    test.t = r.t;
                    test.p = r.p;
                } catch (const std::exception& e) {
                    test.note = e.what();
                }
                report.tests.push_back(std::move(test));
            }
        }
    }
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::json doc;
    doc["base_seed"] = base_seed;
    doc["repeats"] = repeats;
    doc["ratios"] = ratios;
    doc["tolerances"] = tolerances;
    doc["pipelines"] = nlohmann::json::array();
    for (const PipelineReport& pr : pipelines) {
        nlohmann::json p;
        p["name"] = pr.name;
        p["per_repeat"] = nlohmann::json::array();
        for (const RepeatOutcome& out : pr.repeats) {
            nlohmann::json o;
            o["repeat"] = out.repeat;
            o["seed"] = out.seed;
            o["n_test_cows"] = out.n_test_cows;
            if (!out.error.empty()) {
                o["error"] = out.error;
            } else {
                nlohmann::json acc;
                for (const auto& [tol, a] : out.accuracy) acc[std::to_string(tol)] = a;
                o["accuracy"] = acc;
            }
            p["per_repeat"].push_back(std::move(o));
        }
        nlohmann::json mean_doc, se_doc;
        for (const auto& [tol, m] : pr.mean_accuracy) mean_doc[std::to_string(tol)] = m;
        for (const auto& [tol, s] : pr.se_accuracy) se_doc[std::to_string(tol)] = s;
        p["mean"] = mean_doc;
        p["se"] = se_doc;
        doc["pipelines"].push_back(std::move(p));
    }
    doc["pairwise_tests"] = nlohmann::json::array();
    for (const PairwiseTest& test : tests) {
        nlohmann::json t;
        t["a"] = test.a;
        t["b"] = test.b;
        t["tolerance"] = test.tolerance;
        t["valid"] = test.valid;
        if (test.valid) {
            t["t"] = test.t;
            t["p"] = test.p;
        } else {
            t["note"] = test.note;
        }
        doc["pairwise_tests"].push_back(std::move(t));
    }
    return doc.dump(2);
}

std::string EvalReport::to_table() const {
    std::ostringstream os;
    char buf[64];
    os << "Cow-level accuracy (mean +- SE over " << repeats << " repeats)\n";
    std::size_t name_w = 8;
    for (const PipelineReport& pr : pipelines) name_w = std::max(name_w, pr.name.size());
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), "pipeline");
    os << buf;
    for (const double tol : tolerances) {
        std::snprintf(buf, sizeof buf, " | Error %-4.4g mean    se  ", tol);
        os << buf;
    }
    os << "\n";
    for (const PipelineReport& pr : pipelines) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), pr.name.c_str());
        os << buf;
        for (const double tol : tolerances) {
            if (pr.mean_accuracy.count(tol)) {
                std::snprintf(buf, sizeof buf, " |       %6.3f %6.3f", pr.mean_accuracy.at(tol),
                              pr.se_accuracy.at(tol));
            } else {
                std::snprintf(buf, sizeof buf, " |       %6s %6s", "n/a", "n/a");
            }
            os << buf;
        }
        os << "\n";
    }
    if (!tests.empty()) {
        os << "\nPairwise two-sided Welch t-tests\n";
        for (const PairwiseTest& test : tests) {
            if (test.valid)
                std::snprintf(buf, sizeof buf, "  tol %-4.4g  t=%8.4f  p=%.6f  ", test.tolerance,
                              test.t, test.p);
            else
                std::snprintf(buf, sizeof buf, "  tol %-4.4g  (%s)  ", test.tolerance,
                              test.note.c_str());
            os << test.a << " vs " << test.b << buf << "\n";
        }
    }
    return os.str();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        std::string cell = line.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(std::move(cell));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

} // namespace

std::vector<ManifestEntry> read_manifest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("manifest: empty file");
    const std::vector<std::string> header = split_line(line);
    const std::vector<std::string> required = {"cow_id", "image_id", "true_bcs", "depth_csv_path",
                                               "keypoint_json_path"};
    if (header.size() < required.size())
        throw DataError("manifest: header too short");
    for (std::size_t i = 0; i < required.size(); ++i)
        if (header[i] != required[i])
            throw DataError("manifest: column " + std::to_string(i) + " must be '" + required[i] +
                            "', got '" + header[i] + "'");
    int mask_col = -1, year_col = -1;
    for (std::size_t i = required.size(); i < header.size(); ++i) {
        if (header[i] == "mask_path") mask_col = static_cast<int>(i);
        else if (header[i] == "year") year_col = static_cast<int>(i);
        else throw DataError("manifest: unknown column '" + header[i] + "'");
    }

    std::vector<ManifestEntry> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError("manifest: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        ManifestEntry entry;
        entry.cow_id = cells[0];
        entry.image_id = cells[1];
        const auto* end = cells[2].data() + cells[2].size();
        const auto res = std::from_chars(cells[2].data(), end, entry.true_bcs);
        if (res.ec != std::errc{} || res.ptr != end)
            throw DataError("manifest: bad true_bcs '" + cells[2] + "' at line " + std::to_string(line_no));
        entry.depth_csv_path = cells[3];
        entry.keypoint_json_path = cells[4];
        if (mask_col >= 0) entry.mask_path = cells[static_cast<std::size_t>(mask_col)];
        if (year_col >= 0) entry.year = cells[static_cast<std::size_t>(year_col)];
        rows.push_back(std::move(entry));
    }
    return rows;
}

void write_manifest(const std::vector<ManifestEntry>& rows, std::ostream& out, bool with_mask,
                    bool with_year) {
    out << "cow_id,image_id,true_bcs,depth_csv_path,keypoint_json_path";
    if (with_mask) out << ",mask_path";
    if (with_year) out << ",year";
    out << "\n";
    char buf[16];
    for (const ManifestEntry& row : rows) {
        std::snprintf(buf, sizeof buf, "%.2f", row.true_bcs);
        out << row.cow_id << "," << row.image_id << "," << buf << "," << row.depth_csv_path << ","
            << row.keypoint_json_path;
        if (with_mask) out << "," << row.mask_path;
        if (with_year) out << "," << row.year;
        out << "\n";
    }
}

} // namespace bovigeom
