#include "lynx/eval.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lynx/rng.hpp"

namespace lynx {

void PipelineConfig::sync_threads() {
    miner.threads = threads;
    grasp.threads = threads;
}

std::vector<MinedFeature> PairwiseEntry::selected() const {
    std::vector<MinedFeature> out;
    out.reserve(selection.indices.size());
    for (int i : selection.indices) out.push_back(features[static_cast<size_t>(i)]);
    return out;
}

namespace {

LabeledDataset restrict_to_pair(const LabeledDataset& d, const std::string& a,
                                const std::string& b) {
    LabeledDataset out;
    out.classes = {a, b};
    out.dimensions = d.dimensions;
    for (const auto& item : d.items)
        if (item.label == a || item.label == b) out.items.push_back(item);
    return out;
}

LabeledDataset subset_dataset(const LabeledDataset& d, const std::vector<size_t>& take) {
    LabeledDataset out;
    out.classes = d.classes;
    out.dimensions = d.dimensions;
    out.items.reserve(take.size());
    for (size_t i : take) out.items.push_back(d.items[i]);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Round robin
// ---------------------------------------------------------------------------

std::vector<PairwiseEntry> round_robin_fit(const LabeledDataset& d, const PipelineConfig& cfg) {
    if (d.classes.size() < 2) throw data_error("round robin needs at least two classes");
    std::vector<PairwiseEntry> out;
    int pair_idx = 0;
    for (size_t a = 0; a < d.classes.size(); ++a) {
        for (size_t b = a + 1; b < d.classes.size(); ++b, ++pair_idx) {
            LabeledDataset pair = restrict_to_pair(d, d.classes[a], d.classes[b]);
            std::vector<long> counts = pair.class_counts();
            if (counts[0] == 0 || counts[1] == 0) {
                std::cerr << "warning: skipping pair (" << d.classes[a] << ", " << d.classes[b]
                          << "): empty class in this split\n";
                continue;
            }
            PairwiseEntry e;
            e.class_a = d.classes[a];
            e.class_b = d.classes[b];
            e.features = mine(pair, cfg.miner);

            if (cfg.use_grasp && !e.features.empty()) {
                GraspConfig g = cfg.grasp;
                g.seed = Rng::derive(cfg.seed, 0x5000 + static_cast<uint64_t>(pair_idx));
                e.selection = grasp_select(pair, e.features, g);
            } else {
                e.selection.indices.resize(e.features.size());
                for (size_t i = 0; i < e.features.size(); ++i)
                    e.selection.indices[i] = static_cast<int>(i);
                e.selection.score = e.features.empty()
                                        ? error_count(pair, {}, cfg.grasp.epsilon, cfg.threads)
                                        : error_count(pair, e.features, cfg.grasp.epsilon,
                                                      cfg.threads);
            }
            e.model = fit(pair, e.selected(), cfg.grasp.epsilon, cfg.threads);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<std::string> round_robin_classes(const std::vector<PairwiseEntry>& models) {
    std::vector<std::string> classes;
    auto add = [&](const std::string& c) {
        if (std::find(classes.begin(), classes.end(), c) == classes.end())
            classes.push_back(c);
    };
    for (const PairwiseEntry& e : models) {
        add(e.class_a);
        add(e.class_b);
    }
    return classes;
}

std::string round_robin_predict(const std::vector<PairwiseEntry>& models,
                                const RelationalSequence& s, std::vector<int>* votes_out) {
    if (models.empty()) throw data_error("round robin prediction needs at least one model");
    std::vector<std::string> classes = round_robin_classes(models);
    std::vector<int> votes(classes.size(), 0);
    std::vector<double> margin(classes.size(), 0.0);
    auto index_of = [&](const std::string& c) {
        return static_cast<size_t>(
            std::find(classes.begin(), classes.end(), c) - classes.begin());
    };

    for (const PairwiseEntry& e : models) {
        BinaryVector x = vectorize(s, e.selected());
        double ga = discriminant(e.model, x, 0);
        double gb = discriminant(e.model, x, 1);
        int w = predict_index(e.model, x);
        size_t winner = index_of(w == 0 ? e.class_a : e.class_b);
        ++votes[winner];
        margin[winner] += w == 0 ? ga - gb : gb - ga;
    }
    if (votes_out) *votes_out = votes;

    size_t best = 0;
    for (size_t c = 1; c < classes.size(); ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best]))
            best = c;
    }
    return classes[best];
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

std::vector<std::vector<size_t>> stratified_folds(const LabeledDataset& d, int k,
                                                  uint64_t seed) {
    if (k < 2) throw data_error("cross-validation needs k >= 2 folds");
    std::vector<std::vector<size_t>> folds(static_cast<size_t>(k));
    Rng rng(Rng::derive(seed, 0xF01D));
    for (size_t c = 0; c < d.classes.size(); ++c) {
        std::vector<size_t> members;
        for (size_t i = 0; i < d.items.size(); ++i)
            if (d.items[i].label == d.classes[c]) members.push_back(i);
        if (static_cast<int>(members.size()) < k)
            throw data_error("class '" + d.classes[c] + "' has fewer members (" +
                             std::to_string(members.size()) + ") than folds (" +
                             std::to_string(k) + ")");
        rng.shuffle(members);
        for (size_t i = 0; i < members.size(); ++i)
            folds[i % static_cast<size_t>(k)].push_back(members[i]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace {

struct FoldOutcome {
    long mined = 0;
    long selected = 0;
    double acc_all = 0.0;
    double acc_selected = 0.0;
    std::vector<int> primary_predictions;  // class index per test item
    std::vector<MinedFeature> features;    // multiclass-path mined set
    Selection selection;
    ModelBundle primary_bundle;
};

double accuracy_of(const std::vector<int>& pred, const LabeledDataset& test) {
    long ok = 0;
    for (size_t i = 0; i < test.items.size(); ++i)
        if (pred[i] == test.class_index(test.items[i].label)) ++ok;
    return test.items.empty() ? 0.0
                              : static_cast<double>(ok) / static_cast<double>(test.size());
}

FoldOutcome run_fold_multiclass(const LabeledDataset& train, const LabeledDataset& test,
                                const PipelineConfig& cfg, int fold) {
    FoldOutcome out;
    out.features = mine(train, cfg.miner);
    out.mined = static_cast<long>(out.features.size());

    BayesModel model_all = fit(train, out.features, cfg.grasp.epsilon, cfg.threads);
    std::vector<int> pred_all;
    pred_all.reserve(test.size());
    for (const auto& item : test.items) {
        BinaryVector x = vectorize(item.seq, out.features, test.dimensions);
        pred_all.push_back(predict_index(model_all, x));
    }
    out.acc_all = accuracy_of(pred_all, test);

    std::vector<int> pred_primary = pred_all;
    BayesModel primary_model = model_all;
    if (cfg.use_grasp) {
        if (!out.features.empty()) {
            GraspConfig g = cfg.grasp;
            g.seed = Rng::derive(cfg.seed, 0x100 + static_cast<uint64_t>(fold));
            out.selection = grasp_select(train, out.features, g);
        }
        out.selected = static_cast<long>(out.selection.indices.size());
        std::vector<MinedFeature> chosen;
        for (int i : out.selection.indices)
            chosen.push_back(out.features[static_cast<size_t>(i)]);
        BayesModel model_sel = fit(train, chosen, cfg.grasp.epsilon, cfg.threads);
        std::vector<int> pred_sel;
        pred_sel.reserve(test.size());
        for (const auto& item : test.items) {
            BinaryVector x = vectorize(item.seq, chosen, test.dimensions);
            pred_sel.push_back(predict_index(model_sel, x));
        }
        out.acc_selected = accuracy_of(pred_sel, test);
        pred_primary = std::move(pred_sel);
        primary_model = std::move(model_sel);

        out.primary_bundle.classes = train.classes;
        TrainedModel tm;
        for (const MinedFeature& f : chosen) tm.features.push_back(f.pattern);
        tm.model = primary_model;
        out.primary_bundle.models.push_back(std::move(tm));
    } else {
        out.primary_bundle.classes = train.classes;
        TrainedModel tm;
        for (const MinedFeature& f : out.features) tm.features.push_back(f.pattern);
        tm.model = primary_model;
        out.primary_bundle.models.push_back(std::move(tm));
    }
    out.primary_predictions = std::move(pred_primary);
    return out;
}

FoldOutcome run_fold_round_robin(const LabeledDataset& train, const LabeledDataset& test,
                                 const PipelineConfig& cfg, int fold) {
    // Mine each pair once; derive both the all-features and the selected
    // variant from the same pools.
    FoldOutcome out;
    PipelineConfig base = cfg;
    base.use_grasp = false;
    base.seed = Rng::derive(cfg.seed, 0x200 + static_cast<uint64_t>(fold));
    std::vector<PairwiseEntry> entries_all = round_robin_fit(train, base);
    for (const PairwiseEntry& e : entries_all) out.mined += static_cast<long>(e.features.size());

    std::vector<int> pred_all;
    for (const auto& item : test.items)
        pred_all.push_back(test.class_index(round_robin_predict(entries_all, item.seq)));
    out.acc_all = accuracy_of(pred_all, test);

    std::vector<PairwiseEntry> primary = entries_all;
    if (cfg.use_grasp) {
        std::vector<PairwiseEntry> entries_sel = entries_all;
        int pair_idx = 0;
        for (PairwiseEntry& e : entries_sel) {
            LabeledDataset pair = restrict_to_pair(train, e.class_a, e.class_b);
            if (!e.features.empty()) {
                GraspConfig g = cfg.grasp;
                g.seed = Rng::derive(base.seed, 0x5000 + static_cast<uint64_t>(pair_idx));
                e.selection = grasp_select(pair, e.features, g);
                e.model = fit(pair, e.selected(), cfg.grasp.epsilon, cfg.threads);
            }
            ++pair_idx;
        }
        for (const PairwiseEntry& e : entries_sel)
            out.selected += static_cast<long>(e.selection.indices.size());
        std::vector<int> pred_sel;
        for (const auto& item : test.items)
            pred_sel.push_back(test.class_index(round_robin_predict(entries_sel, item.seq)));
        out.acc_selected = accuracy_of(pred_sel, test);
        out.primary_predictions = pred_sel;
        primary = std::move(entries_sel);
    } else {
        out.primary_predictions = pred_all;
    }

    out.primary_bundle.classes = train.classes;
    for (const PairwiseEntry& e : primary) {
        TrainedModel tm;
        tm.class_a = e.class_a;
        tm.class_b = e.class_b;
        for (const MinedFeature& f : e.selected()) tm.features.push_back(f.pattern);
        tm.model = e.model;
        out.primary_bundle.models.push_back(std::move(tm));
    }
    // Stash the union of mined pools for the fold artifacts.
    for (const PairwiseEntry& e : entries_all)
        for (const MinedFeature& f : e.features) out.features.push_back(f);
    return out;
}

}  // namespace

EvalReport cross_validate(const LabeledDataset& d, const PipelineConfig& cfg_in,
                          const std::string& artifact_dir) {
    PipelineConfig cfg = cfg_in;
    cfg.sync_threads();
    auto t0 = std::chrono::steady_clock::now();

    std::vector<std::vector<size_t>> folds = stratified_folds(d, cfg.folds, cfg.seed);

    EvalReport rep;
    rep.classes = d.classes;
    rep.folds = cfg.folds;
    rep.with_selection = cfg.use_grasp;
    rep.confusion.assign(d.classes.size(), std::vector<long>(d.classes.size(), 0));

    namespace fs = std::filesystem;
    if (!artifact_dir.empty()) fs::create_directories(artifact_dir);

    for (int f = 0; f < cfg.folds; ++f) {
        std::vector<size_t> train_idx;
        for (int g = 0; g < cfg.folds; ++g)
            if (g != f)
                train_idx.insert(train_idx.end(), folds[static_cast<size_t>(g)].begin(),
                                 folds[static_cast<size_t>(g)].end());
        std::sort(train_idx.begin(), train_idx.end());
        LabeledDataset train = subset_dataset(d, train_idx);
        LabeledDataset test = subset_dataset(d, folds[static_cast<size_t>(f)]);

        FoldOutcome oc = cfg.round_robin ? run_fold_round_robin(train, test, cfg, f)
                                         : run_fold_multiclass(train, test, cfg, f);

        rep.acc_all.push_back(oc.acc_all);
        if (cfg.use_grasp) rep.acc_selected.push_back(oc.acc_selected);
        rep.mined_counts.push_back(oc.mined);
        rep.selected_counts.push_back(cfg.use_grasp ? oc.selected : oc.mined);
        for (size_t i = 0; i < test.items.size(); ++i) {
            int truth = test.class_index(test.items[i].label);
            int pred = oc.primary_predictions[i];
            ++rep.confusion[static_cast<size_t>(truth)][static_cast<size_t>(pred)];
        }

        if (!artifact_dir.empty()) {
            fs::path dir = fs::path(artifact_dir) / ("fold_" + std::to_string(f));
            fs::create_directories(dir);
            std::ofstream(dir / "patterns.txt") << serialize_patterns(oc.features);
            if (cfg.use_grasp && !cfg.round_robin) {
                std::vector<MinedFeature> chosen;
                for (int i : oc.selection.indices)
                    chosen.push_back(oc.features[static_cast<size_t>(i)]);
                std::ofstream(dir / "selected.txt") << serialize_patterns(chosen);
            }
            std::ofstream(dir / "model.txt") << serialize_bundle(oc.primary_bundle);
        }
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    rep.mean_all = mean(rep.acc_all);
    rep.mean_selected = mean(rep.acc_selected);
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

LabeledDataset generate_synthetic(int classes, int per_class, int motif_len, double noise,
                                  uint64_t seed) {
    if (motif_len < 1) throw data_error("motif length must be at least 1");
    if (classes < 1) throw data_error("at least one class is required");

    LabeledDataset ds;
    ds.dimensions = per_class > 0 ? 1 : 0;
    const int alphabet = std::max(classes, 2);
    Rng rng(Rng::derive(seed, 0x5EED));

    auto motif_of = [&](int c) {
        std::vector<std::string> m;
        for (int t = 0; t < motif_len; ++t)
            m.push_back("g" + std::to_string((c + t) % alphabet));
        return m;
    };

    int counter = 0;
    for (int c = 0; c < classes; ++c) {
        std::string label = "c" + std::to_string(c + 1);
        if (per_class > 0 && ds.class_index(label) < 0) ds.classes.push_back(label);
        for (int k = 0; k < per_class; ++k) {
            bool noisy = rng.uniform01() < noise;
            int motif_class = c;
            if (noisy) {
                if (classes > 1) {
                    size_t other = rng.uniform_index(static_cast<size_t>(classes - 1));
                    motif_class = static_cast<int>(other) >= c
                                      ? static_cast<int>(other) + 1
                                      : static_cast<int>(other);
                } else {
                    motif_class = -1;  // drop the motif entirely
                }
            }

            int fillers = 2 + static_cast<int>(rng.uniform_index(3));
            int pos = static_cast<int>(rng.uniform_index(static_cast<size_t>(fillers) + 1));
            std::vector<std::string> symbols;
            for (int i = 0; i < fillers; ++i) {
                if (i == pos && motif_class >= 0)
                    for (const std::string& m : motif_of(motif_class)) symbols.push_back(m);
                symbols.push_back("n" + std::to_string(rng.uniform_index(5)));
            }
            if (pos == fillers && motif_class >= 0)
                for (const std::string& m : motif_of(motif_class)) symbols.push_back(m);

            RelationalSequence seq;
            seq.id = "s" + std::to_string(++counter);
            std::vector<std::string> events;
            for (size_t i = 0; i < symbols.size(); ++i) {
                std::string ev = "e" + std::to_string(i + 1);
                events.push_back(ev);
                Atom a;
                a.predicate = "f";
                a.args = {Term::constant(ev), Term::constant(symbols[i])};
                seq.fluents.push_back(std::move(a));
            }
            seq.orders[1] = std::move(events);
            ds.items.push_back({std::move(seq), label});
        }
    }
    return ds;
}

LanguageBias synthetic_background(int motif_len) {
    LanguageBias b;
    b.maxsize = motif_len;
    b.minfreq = 0.1;
    b.types["f"] = {"event", "symbol"};
    b.modes["f"] = {'+', '#'};
    return b;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string report_csv(const EvalReport& r) {
    std::string out = "fold,mined_features,selected_features,accuracy_selected,accuracy_all\n";
    for (int f = 0; f < r.folds; ++f) {
        size_t i = static_cast<size_t>(f);
        out += std::to_string(f + 1) + "," + std::to_string(r.mined_counts[i]) + "," +
               std::to_string(r.selected_counts[i]) + ",";
        out += r.with_selection ? format_double(r.acc_selected[i]) : std::string();
        out += "," + format_double(r.acc_all[i]) + "\n";
    }
    out += "mean,,,";
    out += r.with_selection ? format_double(r.mean_selected) : std::string();
    out += "," + format_double(r.mean_all) + "\n";
    return out;
}

std::string report_json(const EvalReport& r, const PipelineConfig& cfg) {
    nlohmann::json j;
    j["classes"] = r.classes;
    j["folds"] = r.folds;
    j["with_selection"] = r.with_selection;
    j["accuracy_all"] = r.acc_all;
    j["mean_accuracy_all"] = r.mean_all;
    if (r.with_selection) {
        j["accuracy_selected"] = r.acc_selected;
        j["mean_accuracy_selected"] = r.mean_selected;
    }
    j["mined_features"] = r.mined_counts;
    j["selected_features"] = r.selected_counts;
    j["confusion"] = r.confusion;
    j["config"] = {
        {"seed", cfg.seed},
        {"confidence_threshold", cfg.miner.confidence_threshold},
        {"minfreq", cfg.miner.bias.minfreq},
        {"maxsize", cfg.miner.bias.maxsize},
        {"maxiter", cfg.grasp.maxiter},
        {"construction_size", cfg.grasp.construction_size},
        {"epsilon", cfg.grasp.epsilon},
        {"round_robin", cfg.round_robin},
        {"use_grasp", cfg.use_grasp},
    };
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Model bundles
// ---------------------------------------------------------------------------

ModelBundle fit_multiclass_bundle(const LabeledDataset& d,
                                  const std::vector<MinedFeature>& features, double epsilon,
                                  int threads) {
    ModelBundle b;
    b.classes = d.classes;
    TrainedModel tm;
    for (const MinedFeature& f : features) tm.features.push_back(f.pattern);
    tm.model = fit(d, features, epsilon, threads);
    b.models.push_back(std::move(tm));
    return b;
}

ModelBundle fit_round_robin_bundle(const LabeledDataset& d,
                                   const std::vector<MinedFeature>& features, double epsilon,
                                   int threads) {
    if (d.classes.size() < 2) throw data_error("round robin needs at least two classes");
    ModelBundle b;
    b.classes = d.classes;
    for (size_t a = 0; a < d.classes.size(); ++a) {
        for (size_t c = a + 1; c < d.classes.size(); ++c) {
            LabeledDataset pair = restrict_to_pair(d, d.classes[a], d.classes[c]);
            std::vector<long> counts = pair.class_counts();
            if (counts[0] == 0 || counts[1] == 0) {
                std::cerr << "warning: skipping pair (" << d.classes[a] << ", " << d.classes[c]
                          << "): empty class\n";
                continue;
            }
            TrainedModel tm;
            tm.class_a = d.classes[a];
            tm.class_b = d.classes[c];
            for (const MinedFeature& f : features) tm.features.push_back(f.pattern);
            tm.model = fit(pair, features, epsilon, threads);
            b.models.push_back(std::move(tm));
        }
    }
    return b;
}

std::string bundle_predict(const ModelBundle& b, const RelationalSequence& s,
                           int declared_dims) {
    if (b.models.empty()) throw data_error("empty model bundle");

    auto vectorize_patterns = [&](const std::vector<Pattern>& pats) {
        IndexedSequence is = index_sequence(s, declared_dims);
        BinaryVector x(pats.size(), 0);
        for (size_t i = 0; i < pats.size(); ++i)
            x[i] = subsumes_sequence(pats[i], is) ? 1 : 0;
        return x;
    };

    if (!b.pairwise()) {
        const TrainedModel& tm = b.models.front();
        return predict(tm.model, vectorize_patterns(tm.features));
    }

    std::vector<int> votes(b.classes.size(), 0);
    std::vector<double> margin(b.classes.size(), 0.0);
    auto index_of = [&](const std::string& c) {
        return static_cast<size_t>(
            std::find(b.classes.begin(), b.classes.end(), c) - b.classes.begin());
    };
    for (const TrainedModel& tm : b.models) {
        BinaryVector x = vectorize_patterns(tm.features);
        double ga = discriminant(tm.model, x, 0);
        double gb = discriminant(tm.model, x, 1);
        int w = predict_index(tm.model, x);
        size_t winner = index_of(w == 0 ? tm.class_a : tm.class_b);
        ++votes[winner];
        margin[winner] += w == 0 ? ga - gb : gb - ga;
    }
    size_t best = 0;
    for (size_t c = 1; c < b.classes.size(); ++c)
        if (votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best]))
            best = c;
    return b.classes[best];
}

std::string serialize_bundle(const ModelBundle& b) {
    std::string out = "lynx-bundle\nclasses " + std::to_string(b.classes.size());
    for (const std::string& c : b.classes) out += " " + c;
    out += "\nmodels " + std::to_string(b.models.size()) + "\n";
    for (const TrainedModel& tm : b.models) {
        if (tm.class_a.empty())
            out += "model multiclass\n";
        else
            out += "model pair " + tm.class_a + " " + tm.class_b + "\n";
        out += "features " + std::to_string(tm.features.size()) + "\n";
        for (const Pattern& p : tm.features) out += serialize_pattern(p) + "\n";
        out += serialize_model(tm.model);
    }
    return out;
}

ModelBundle parse_bundle(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    size_t pos = 0;
    auto next_line = [&]() -> std::string {
        while (pos < lines.size()) {
            if (lines[pos].find_first_not_of(" \t") != std::string::npos) return lines[pos++];
            ++pos;
        }
        throw data_error("truncated model bundle");
    };

    if (next_line() != "lynx-bundle") throw data_error("not a lynx model bundle");
    ModelBundle b;
    {
        std::istringstream hs(next_line());
        std::string kw;
        size_t q = 0;
        hs >> kw >> q;
        if (kw != "classes") throw data_error("malformed bundle: expected classes");
        b.classes.resize(q);
        for (auto& c : b.classes)
            if (!(hs >> c)) throw data_error("malformed bundle class list");
    }
    size_t count = 0;
    {
        std::istringstream hs(next_line());
        std::string kw;
        hs >> kw >> count;
        if (kw != "models") throw data_error("malformed bundle: expected models");
    }
    for (size_t m = 0; m < count; ++m) {
        TrainedModel tm;
        {
            std::istringstream hs(next_line());
            std::string kw, kind;
            hs >> kw >> kind;
            if (kw != "model") throw data_error("malformed bundle: expected model");
            if (kind == "pair") {
                if (!(hs >> tm.class_a >> tm.class_b))
                    throw data_error("malformed bundle pair header");
            } else if (kind != "multiclass") {
                throw data_error("malformed bundle model kind: " + kind);
            }
        }
        size_t nfeat = 0;
        {
            std::istringstream hs(next_line());
            std::string kw;
            hs >> kw >> nfeat;
            if (kw != "features") throw data_error("malformed bundle: expected features");
        }
        for (size_t i = 0; i < nfeat; ++i) tm.features.push_back(parse_pattern_text(next_line()));
        tm.model = parse_model_record(lines, pos);
        if (static_cast<size_t>(tm.model.d()) != nfeat)
            throw data_error("bundle feature count does not match the p matrix");
        b.models.push_back(std::move(tm));
    }
    return b;
}

ModelBundle parse_bundle_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open model file: " + path);
    return parse_bundle(in);
}

}  // namespace lynx
