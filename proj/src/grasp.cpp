#include "lynx/grasp.hpp"

#include <algorithm>
#include <set>

#include "lynx/parallel.hpp"

namespace lynx {

SubsetScorer::SubsetScorer(const LabeledDataset& d, const std::vector<MinedFeature>& pool,
                           double epsilon, int threads)
    : epsilon_(epsilon), threads_(threads) {
    matrix_ = vectorize_dataset(d, pool, threads);
    classes_ = d.classes;
    labels_.reserve(d.items.size());
    for (const auto& item : d.items) labels_.push_back(d.class_index(item.label));
}

long SubsetScorer::score(const std::vector<int>& subset) const {
    return error_count_from_matrix(labels_, classes_, matrix_, subset, epsilon_);
}

std::vector<long> SubsetScorer::score_batch(const std::vector<std::vector<int>>& subsets) const {
    std::vector<long> out(subsets.size(), 0);
    int t = effective_threads(threads_);
    if (t == 1) {
        for (size_t i = 0; i < subsets.size(); ++i) out[i] = score(subsets[i]);
    } else {
        const long n = static_cast<long>(subsets.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(t)
        for (long i = 0; i < n; ++i)
            out[static_cast<size_t>(i)] = score(subsets[static_cast<size_t>(i)]);
    }
    return out;
}

Selection construct(const SubsetScorer& scorer, double alpha, int n, Rng& rng,
                    std::vector<ConstructionStep>* steps) {
    if (alpha < 0.0 || alpha > 1.0) throw data_error("alpha must lie in [0, 1]");
    if (scorer.pool_size() == 0) throw data_error("cannot construct from an empty pool");
    if (n < 0 || static_cast<size_t>(n) > scorer.pool_size())
        throw data_error("construction size exceeds the pool");

    Selection sel;
    sel.score = scorer.score(sel.indices);

    for (int step = 0; step < n; ++step) {
        std::vector<std::vector<int>> extensions;
        extensions.reserve(scorer.pool_size() - sel.indices.size());
        for (int i = 0; i < static_cast<int>(scorer.pool_size()); ++i) {
            if (std::binary_search(sel.indices.begin(), sel.indices.end(), i)) continue;
            std::vector<int> ext = sel.indices;
            ext.insert(std::upper_bound(ext.begin(), ext.end(), i), i);
            extensions.push_back(std::move(ext));
        }
        std::vector<long> scores = scorer.score_batch(extensions);

        long lo = scores[0], hi = scores[0];
        for (long s : scores) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        const double threshold =
            static_cast<double>(lo) + alpha * static_cast<double>(hi - lo);
        std::vector<size_t> rcl;
        for (size_t i = 0; i < scores.size(); ++i)
            if (static_cast<double>(scores[i]) <= threshold) rcl.push_back(i);

        size_t pick = rcl[rng.uniform_index(rcl.size())];
        if (steps)
            steps->push_back({lo, hi, scores[pick], static_cast<int>(rcl.size())});
        sel.indices = std::move(extensions[pick]);
        sel.score = scores[pick];
    }
    return sel;
}

Selection construct(const LabeledDataset& d, const std::vector<MinedFeature>& pool, double alpha,
                    int n, Rng& rng, double epsilon, int threads,
                    std::vector<ConstructionStep>* steps) {
    SubsetScorer scorer(d, pool, epsilon, threads);
    return construct(scorer, alpha, n, rng, steps);
}

std::vector<std::vector<int>> neighborhood(const std::vector<int>& selection, int pool_size) {
    std::vector<std::vector<int>> out;
    std::set<std::vector<int>> seen;
    auto push = [&](std::vector<int> v) {
        if (seen.insert(v).second) out.push_back(std::move(v));
    };

    // add: S ∪ {i}
    for (int i = 0; i < pool_size; ++i) {
        if (std::binary_search(selection.begin(), selection.end(), i)) continue;
        std::vector<int> v = selection;
        v.insert(std::upper_bound(v.begin(), v.end(), i), i);
        push(std::move(v));
    }
    // swap: S \ {i} ∪ {k}
    for (int i : selection) {
        for (int k = 0; k < pool_size; ++k) {
            if (std::binary_search(selection.begin(), selection.end(), k)) continue;
            std::vector<int> v;
            v.reserve(selection.size());
            for (int x : selection)
                if (x != i) v.push_back(x);
            v.insert(std::upper_bound(v.begin(), v.end(), k), k);
            push(std::move(v));
        }
    }
    return out;
}

Selection local_search(const SubsetScorer& scorer, Selection start) {
    Selection cur = std::move(start);
    while (true) {
        std::vector<std::vector<int>> neigh =
            neighborhood(cur.indices, static_cast<int>(scorer.pool_size()));
        if (neigh.empty()) return cur;
        std::vector<long> scores = scorer.score_batch(neigh);
        size_t pick = neigh.size();
        for (size_t i = 0; i < neigh.size(); ++i) {
            if (scores[i] < cur.score) {  // first improvement in neighborhood order
                pick = i;
                break;
            }
        }
        if (pick == neigh.size()) return cur;
        cur.indices = std::move(neigh[pick]);
        cur.score = scores[pick];
    }
}

Selection local_search(const LabeledDataset& d, const std::vector<MinedFeature>& pool,
                       Selection start, double epsilon, int threads) {
    SubsetScorer scorer(d, pool, epsilon, threads);
    if (start.indices.empty() && start.score == 0) start.score = scorer.score(start.indices);
    return local_search(scorer, std::move(start));
}

Selection grasp_select(const LabeledDataset& d, const std::vector<MinedFeature>& pool,
                       const GraspConfig& cfg, std::vector<IterationTrace>* trace) {
    if (pool.empty()) throw data_error("cannot select from an empty feature pool");
    SubsetScorer scorer(d, pool, cfg.epsilon, cfg.threads);

    int n = cfg.construction_size > 0 ? cfg.construction_size
                                      : std::min<int>(10, static_cast<int>(pool.size()));
    if (static_cast<size_t>(n) > pool.size())
        throw data_error("construction size exceeds the pool");

    Selection incumbent;
    incumbent.score = scorer.score(incumbent.indices);

    for (int iter = 0; iter < cfg.maxiter; ++iter) {
        Rng rng(Rng::derive(cfg.seed, static_cast<uint64_t>(iter)));
        double alpha = cfg.fixed_alpha ? cfg.alpha : rng.uniform01();
        Selection constructed = construct(scorer, alpha, n, rng);
        Selection improved = local_search(scorer, constructed);
        if (improved.score < incumbent.score) incumbent = improved;
        if (trace)
            trace->push_back(
                {iter, alpha, constructed.score, improved.score, incumbent.score});
    }
    return incumbent;
}

std::string trace_csv(const std::vector<IterationTrace>& trace) {
    std::string out = "iteration,alpha,constructed_score,local_score,incumbent_score\n";
    for (const IterationTrace& t : trace) {
        out += std::to_string(t.iteration) + "," + format_double(t.alpha) + "," +
               std::to_string(t.constructed_score) + "," + std::to_string(t.local_score) + "," +
               std::to_string(t.incumbent_score) + "\n";
    }
    return out;
}

}  // namespace lynx
