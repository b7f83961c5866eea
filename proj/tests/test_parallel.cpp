// The OpenMP kernels must be bit-identical to their serial reference
// implementations for any worker count.
#include <doctest.h>

#include "helpers.hpp"
#include "lynx/bayes.hpp"
#include "lynx/eval.hpp"
#include "lynx/grasp.hpp"
#include "lynx/miner.hpp"

using namespace lynx;

namespace {

const int kWorkers[] = {2, 4};

}  // namespace

TEST_CASE("stats kernel: serial reference equals the OpenMP path") {
    LabeledDataset d = generate_synthetic(3, 12, 2, 0.1, 61);
    MinerConfig cfg;
    cfg.bias = synthetic_background(2);
    cfg.confidence_threshold = 0.5;
    std::vector<MinedFeature> feats = mine(d, cfg);
    REQUIRE(!feats.empty());
    std::vector<Pattern> candidates;
    for (const MinedFeature& f : feats) candidates.push_back(f.pattern);

    std::vector<IndexedSequence> index = index_dataset(d);
    std::vector<MinedFeature> serial = compute_stats_batch(candidates, d, index, 1);
    for (int t : kWorkers) {
        std::vector<MinedFeature> parallel = compute_stats_batch(candidates, d, index, t);
        REQUIRE(parallel.size() == serial.size());
        for (size_t i = 0; i < serial.size(); ++i) {
            CHECK(parallel[i].freq == serial[i].freq);
            CHECK(parallel[i].supports == serial[i].supports);
            CHECK(parallel[i].confidences == serial[i].confidences);
        }
    }
}

TEST_CASE("vectorize kernel: identical bit matrices") {
    LabeledDataset d = generate_synthetic(2, 20, 2, 0.2, 62);
    MinerConfig cfg;
    cfg.bias = synthetic_background(2);
    cfg.confidence_threshold = 0.5;
    std::vector<MinedFeature> feats = mine(d, cfg);
    REQUIRE(!feats.empty());

    FeatureMatrix serial = vectorize_dataset(d, feats, 1);
    for (int t : kWorkers) {
        FeatureMatrix parallel = vectorize_dataset(d, feats, t);
        CHECK(parallel.bits == serial.bits);
    }
}

TEST_CASE("subset scorer: identical scores and GRASP outcomes") {
    LabeledDataset d = generate_synthetic(2, 15, 2, 0.25, 63);
    MinerConfig cfg;
    cfg.bias = synthetic_background(2);
    cfg.confidence_threshold = 0.5;
    std::vector<MinedFeature> pool = mine(d, cfg);
    REQUIRE(pool.size() >= 3);

    std::vector<std::vector<int>> subsets;
    for (size_t i = 0; i < pool.size(); ++i) subsets.push_back({static_cast<int>(i)});
    subsets.push_back({0, 1});
    subsets.push_back({1, 2});

    SubsetScorer serial(d, pool, 1.0, 1);
    std::vector<long> base = serial.score_batch(subsets);
    for (int t : kWorkers) {
        SubsetScorer parallel(d, pool, 1.0, t);
        CHECK(parallel.score_batch(subsets) == base);
    }

    GraspConfig g;
    g.maxiter = 8;
    g.construction_size = 2;
    g.seed = 17;
    std::vector<IterationTrace> trace1, traceN;
    g.threads = 1;
    Selection s1 = grasp_select(d, pool, g, &trace1);
    for (int t : kWorkers) {
        g.threads = t;
        traceN.clear();
        Selection sN = grasp_select(d, pool, g, &traceN);
        CHECK(sN.indices == s1.indices);
        CHECK(sN.score == s1.score);
        CHECK(trace_csv(traceN) == trace_csv(trace1));
    }
}

TEST_CASE("mine and cross_validate: output independent of worker count") {
    LabeledDataset d = generate_synthetic(3, 8, 2, 0.1, 64);
    MinerConfig cfg;
    cfg.bias = synthetic_background(2);
    cfg.confidence_threshold = 0.6;
    cfg.threads = 1;
    std::string serial = serialize_patterns(mine(d, cfg));
    for (int t : kWorkers) {
        cfg.threads = t;
        CHECK(serialize_patterns(mine(d, cfg)) == serial);
    }

    PipelineConfig pc;
    pc.miner = cfg;
    pc.grasp.maxiter = 3;
    pc.grasp.construction_size = 2;
    pc.folds = 4;
    pc.seed = 64;
    pc.threads = 1;
    EvalReport base = cross_validate(d, pc);
    std::string csv = report_csv(base);
    for (int t : kWorkers) {
        pc.threads = t;
        CHECK(report_csv(cross_validate(d, pc)) == csv);
    }
}
