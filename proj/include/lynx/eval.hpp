#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lynx/bayes.hpp"
#include "lynx/grasp.hpp"
#include "lynx/miner.hpp"

namespace lynx {

struct PipelineConfig {
    std::string dataset_path;
    std::string background_path;
    std::string out_dir;
    MinerConfig miner;
    GraspConfig grasp;
    int folds = 10;
    bool round_robin = false;
    bool use_grasp = true;
    uint64_t seed = 0;
    int threads = 1;

    /// Pushes the shared thread count into the nested configs.
    void sync_threads();
};

/// One binary problem of the round-robin decomposition.
struct PairwiseEntry {
    std::string class_a, class_b;
    std::vector<MinedFeature> features;  // mined pool for this pair
    Selection selection;                 // indices into features
    BayesModel model;                    // fitted on the selected subset

    std::vector<MinedFeature> selected() const;
};

/// Mines, selects and fits one model per unordered class pair. Pairs with
/// an empty class are skipped with a warning on stderr.
std::vector<PairwiseEntry> round_robin_fit(const LabeledDataset& d, const PipelineConfig& cfg);

/// Majority vote over the pairwise models; ties break on summed
/// discriminant margins, then on class order. votes_out, when given,
/// receives the per-class vote counts.
std::string round_robin_predict(const std::vector<PairwiseEntry>& models,
                                const RelationalSequence& s,
                                std::vector<int>* votes_out = nullptr);

/// Class labels covered by a set of pairwise models, first-appearance order.
std::vector<std::string> round_robin_classes(const std::vector<PairwiseEntry>& models);

struct EvalReport {
    std::vector<std::string> classes;
    int folds = 0;
    bool with_selection = false;
    std::vector<double> acc_selected;  // per fold; empty when !with_selection
    std::vector<double> acc_all;       // per fold, all mined features
    double mean_selected = 0.0;
    double mean_all = 0.0;
    std::vector<long> mined_counts;
    std::vector<long> selected_counts;
    std::vector<std::vector<long>> confusion;  // rows: truth, cols: prediction
    double seconds = 0.0;                      // wall clock; kept out of the canonical files
};

/// Stratified fold assignment: fold -> item indices. Throws data_error when
/// some class has fewer than k members.
std::vector<std::vector<size_t>> stratified_folds(const LabeledDataset& d, int k, uint64_t seed);

/// Per-fold mine/select/fit on the training fold only, evaluation on the
/// held-out fold. When artifact_dir is non-empty, per-fold patterns,
/// selections and models are written beneath it.
EvalReport cross_validate(const LabeledDataset& d, const PipelineConfig& cfg,
                          const std::string& artifact_dir = "");

/// Plants one next-linked fluent chain per class among random filler
/// events; a noisy sequence carries another class's chain instead.
LabeledDataset generate_synthetic(int classes, int per_class, int motif_len, double noise,
                                  uint64_t seed);

/// The matching bias for generate_synthetic output.
LanguageBias synthetic_background(int motif_len);

std::string report_csv(const EvalReport& r);
std::string report_json(const EvalReport& r, const PipelineConfig& cfg);

// --- trained model bundles (the `train` artifact) ---

struct TrainedModel {
    std::string class_a, class_b;  // empty for the multiclass form
    std::vector<Pattern> features;
    BayesModel model;
};

struct ModelBundle {
    std::vector<std::string> classes;
    std::vector<TrainedModel> models;

    bool pairwise() const { return !models.empty() && !models.front().class_a.empty(); }
};

ModelBundle fit_multiclass_bundle(const LabeledDataset& d,
                                  const std::vector<MinedFeature>& features, double epsilon,
                                  int threads);
ModelBundle fit_round_robin_bundle(const LabeledDataset& d,
                                   const std::vector<MinedFeature>& features, double epsilon,
                                   int threads);
std::string bundle_predict(const ModelBundle& b, const RelationalSequence& s,
                           int declared_dims = 0);

std::string serialize_bundle(const ModelBundle& b);
ModelBundle parse_bundle(std::istream& in);
ModelBundle parse_bundle_file(const std::string& path);

}  // namespace lynx
