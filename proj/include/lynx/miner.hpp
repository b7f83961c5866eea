#pragma once

#include <map>
#include <string>
#include <vector>

#include "lynx/feature.hpp"
#include "lynx/format.hpp"
#include "lynx/logic.hpp"

namespace lynx {

struct MinerConfig {
    LanguageBias bias;
    double confidence_threshold = 1.0;
    bool keep_all_levels = true;  // false: record only patterns of length == maxsize
    int nstep_max = 3;            // nstep atoms generated for n in [2, nstep_max]
    int max_dim_atoms = 0;        // 0 → defaults to bias.maxsize
    int threads = 1;

    int dim_atom_cap() const { return max_dim_atoms > 0 ? max_dim_atoms : bias.maxsize; }
};

/// Constants observed in the dataset, per (predicate, argument position).
/// Feeds the '#' mode during refinement.
struct Vocabulary {
    std::map<std::pair<std::string, int>, std::vector<std::string>> constants;
    std::map<std::string, size_t> arities;

    static Vocabulary from_dataset(const LabeledDataset& d);
};

/// One-step specializations of p: one type/mode-consistent non-dimensional
/// atom, or one dimensional atom whose source is the event of an existing
/// fluent atom of p. Refining the empty pattern yields the level-1 seeds.
std::vector<Pattern> refine(const Pattern& p, const MinerConfig& cfg, const Vocabulary& vocab,
                            int n_dims);

/// False iff a negconstraint subsumes p, some posconstraint fails to
/// subsume p, two predicates of an atmostone group occur, or the seed
/// literal is not a key predicate while key() is set.
bool check_constraints(const Pattern& p, const LanguageBias& bias);

/// Per-sequence subsumption recount; the serial reference the batched
/// kernel and the tests are checked against.
MinedFeature compute_stats(const Pattern& p, const LabeledDataset& d);

/// Statistics for a batch of candidates. threads == 1 runs the serial
/// reference loop; otherwise an OpenMP team splits the candidates. Output
/// is identical either way.
std::vector<MinedFeature> compute_stats_batch(const std::vector<Pattern>& candidates,
                                              const LabeledDataset& d,
                                              const std::vector<IndexedSequence>& index,
                                              int threads);

/// Level-wise frequent pattern mining with OI-equivalence pruning and the
/// final confidence-threshold filter.
std::vector<MinedFeature> mine(const LabeledDataset& d, const MinerConfig& cfg);

std::vector<IndexedSequence> index_dataset(const LabeledDataset& d);

}  // namespace lynx
