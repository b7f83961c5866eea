#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lynx/bayes.hpp"
#include "lynx/feature.hpp"
#include "lynx/format.hpp"
#include "lynx/rng.hpp"

namespace lynx {

/// A feature subset (indices into the pool, ascending) with its
/// resubstitution error.
struct Selection {
    std::vector<int> indices;
    long score = 0;
};

struct GraspConfig {
    int maxiter = 30;
    int construction_size = 0;  // 0 → min(10, |pool|)
    uint64_t seed = 0;
    bool fixed_alpha = false;   // per-iteration uniform alpha when false
    double alpha = 0.0;         // used when fixed_alpha
    double epsilon = 1.0;       // smoothing of the embedded classifier
    int threads = 1;
};

struct IterationTrace {
    int iteration = 0;
    double alpha = 0.0;
    long constructed_score = 0;
    long local_score = 0;
    long incumbent_score = 0;
};

struct ConstructionStep {
    long best = 0;    // min extension error
    long worst = 0;   // max extension error
    long chosen = 0;  // error of the sampled extension
    int rcl_size = 0;
};

/// Scores subsets against a bit matrix built once per pool. The batched
/// scorer is the OpenMP kernel; threads == 1 runs the serial reference.
class SubsetScorer {
public:
    SubsetScorer(const LabeledDataset& d, const std::vector<MinedFeature>& pool, double epsilon,
                 int threads);

    long score(const std::vector<int>& subset) const;
    std::vector<long> score_batch(const std::vector<std::vector<int>>& subsets) const;
    size_t pool_size() const { return matrix_.cols; }

private:
    std::vector<int> labels_;
    std::vector<std::string> classes_;
    FeatureMatrix matrix_;
    double epsilon_;
    int threads_;
};

/// Randomized greedy construction: n additions, each sampled uniformly from
/// the restricted candidate list {S' : err(S') <= min + alpha (max - min)}.
Selection construct(const SubsetScorer& scorer, double alpha, int n, Rng& rng,
                    std::vector<ConstructionStep>* steps = nullptr);
Selection construct(const LabeledDataset& d, const std::vector<MinedFeature>& pool, double alpha,
                    int n, Rng& rng, double epsilon = 1.0, int threads = 1,
                    std::vector<ConstructionStep>* steps = nullptr);

/// All add moves (S ∪ {i}) followed by all swap moves (S \ {i} ∪ {k}),
/// ascending indices, deduplicated.
std::vector<std::vector<int>> neighborhood(const std::vector<int>& selection, int pool_size);

/// First-improvement descent over the add/swap neighborhood.
Selection local_search(const SubsetScorer& scorer, Selection start);
Selection local_search(const LabeledDataset& d, const std::vector<MinedFeature>& pool,
                       Selection start, double epsilon = 1.0, int threads = 1);

/// The full iterated construction + local search loop; the incumbent only
/// moves on strict improvement and the whole run is a pure function of cfg.
Selection grasp_select(const LabeledDataset& d, const std::vector<MinedFeature>& pool,
                       const GraspConfig& cfg, std::vector<IterationTrace>* trace = nullptr);

std::string trace_csv(const std::vector<IterationTrace>& trace);

}  // namespace lynx
