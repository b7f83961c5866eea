#include "lynx/miner.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lynx/parallel.hpp"

namespace lynx {

Vocabulary Vocabulary::from_dataset(const LabeledDataset& d) {
    Vocabulary v;
    std::map<std::pair<std::string, int>, std::set<std::string>> seen;
    auto scan = [&](const Atom& a) {
        v.arities.emplace(a.predicate, a.args.size());
        for (size_t i = 0; i < a.args.size(); ++i)
            seen[{a.predicate, static_cast<int>(i)}].insert(a.args[i].name);
    };
    for (const auto& item : d.items) {
        for (const Atom& a : item.seq.fluents) scan(a);
        for (const Atom& a : item.seq.statics) scan(a);
    }
    for (auto& [key, consts] : seen)
        v.constants[key] = std::vector<std::string>(consts.begin(), consts.end());
    return v;
}

std::vector<IndexedSequence> index_dataset(const LabeledDataset& d) {
    std::vector<IndexedSequence> out;
    out.reserve(d.items.size());
    for (const auto& item : d.items) out.push_back(index_sequence(item.seq, d.dimensions));
    return out;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

namespace {

std::string fresh_variable(const Pattern& p, int offset) {
    std::set<std::string> taken;
    for (const std::string& v : pattern_variables(p)) taken.insert(v);
    int k = 0;
    std::string name;
    int remaining = offset;
    while (true) {
        name = "V" + std::to_string(k++);
        if (!taken.count(name)) {
            if (remaining == 0) return name;
            --remaining;
        }
    }
}

// Type of each variable in p, derived from the declared argument types;
// variables occurring only in dimensional atoms are events.
std::map<std::string, std::string> variable_types(const Pattern& p, const LanguageBias& bias) {
    std::map<std::string, std::string> out;
    for (const Atom& a : p.atoms) {
        auto it = bias.types.find(a.predicate);
        if (it == bias.types.end()) continue;
        for (size_t i = 0; i < a.args.size() && i < it->second.size(); ++i)
            if (a.args[i].is_variable()) out.emplace(a.args[i].name, it->second[i]);
    }
    for (const DimAtom& d : p.dims) {
        if (d.from.is_variable()) out.emplace(d.from.name, "event");
        if (d.to.is_variable()) out.emplace(d.to.name, "event");
    }
    return out;
}

// Event terms of p in first-occurrence order: first arguments of fluent
// atoms, then dimensional endpoints.
std::vector<Term> event_terms(const Pattern& p, const LanguageBias& bias, bool fluent_only) {
    std::vector<Term> out;
    auto add = [&](const Term& t) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    };
    for (const Atom& a : p.atoms)
        if (bias.is_fluent(a.predicate) && !a.args.empty()) add(a.args.front());
    if (!fluent_only)
        for (const DimAtom& d : p.dims) {
            add(d.from);
            add(d.to);
        }
    return out;
}

}  // namespace

std::vector<Pattern> refine(const Pattern& p, const MinerConfig& cfg, const Vocabulary& vocab,
                            int n_dims) {
    const LanguageBias& bias = cfg.bias;
    std::vector<Pattern> out;

    // (a) one non-dimensional atom, consistent with the type/mode bias.
    if (p.length() < bias.maxsize) {
        std::map<std::string, std::string> vtypes = variable_types(p, bias);
        for (const auto& [pred, mode] : bias.modes) {
            if (p.is_empty() && bias.key_predicates &&
                std::find(bias.key_predicates->begin(), bias.key_predicates->end(), pred) ==
                    bias.key_predicates->end())
                continue;
            auto tit = bias.types.find(pred);
            if (tit == bias.types.end()) continue;
            const std::vector<std::string>& types = tit->second;

            // Candidate terms per argument position. '+' draws from the
            // pattern's variables of the right type (fresh when seeding the
            // empty pattern), '-' introduces a fresh variable, '#' takes a
            // constant observed in the dataset at that position.
            std::vector<std::vector<Term>> slots(mode.size());
            bool feasible = true;
            int fresh_count = 0;
            for (size_t i = 0; i < mode.size() && feasible; ++i) {
                switch (mode[i]) {
                    case '+': {
                        if (p.is_empty()) {
                            slots[i].push_back(Term::variable(fresh_variable(p, fresh_count++)));
                        } else {
                            for (const auto& [var, type] : vtypes)
                                if (type == types[i]) slots[i].push_back(Term::variable(var));
                            if (slots[i].empty()) feasible = false;
                        }
                        break;
                    }
                    case '-':
                        slots[i].push_back(Term::variable(fresh_variable(p, fresh_count++)));
                        break;
                    case '#': {
                        auto vit = vocab.constants.find({pred, static_cast<int>(i)});
                        if (vit == vocab.constants.end()) {
                            feasible = false;
                        } else {
                            for (const std::string& c : vit->second)
                                slots[i].push_back(Term::constant(c));
                        }
                        break;
                    }
                    default: feasible = false;
                }
            }
            if (!feasible) continue;

            std::vector<size_t> pick(mode.size(), 0);
            while (true) {
                Atom a;
                a.predicate = pred;
                for (size_t i = 0; i < mode.size(); ++i) a.args.push_back(slots[i][pick[i]]);
                if (!p.contains(a)) {
                    Pattern q = p;
                    q.atoms.push_back(std::move(a));
                    out.push_back(std::move(q));
                }
                size_t i = 0;
                for (; i < pick.size(); ++i) {
                    if (++pick[i] < slots[i].size()) break;
                    pick[i] = 0;
                }
                if (i == pick.size()) break;
            }
        }
    }

    // (b) one dimensional atom anchored at the event of an existing fluent.
    if (static_cast<int>(p.dims.size()) < cfg.dim_atom_cap()) {
        std::vector<Term> sources = event_terms(p, bias, /*fluent_only=*/true);
        std::vector<Term> targets = event_terms(p, bias, /*fluent_only=*/false);
        Term fresh = Term::variable(fresh_variable(p, 0));
        targets.push_back(fresh);

        for (int dim = 1; dim <= n_dims; ++dim) {
            for (const Term& from : sources) {
                for (const Term& to : targets) {
                    if (to == from) continue;
                    auto push = [&](DimOp op, int steps) {
                        DimAtom da{op, dim, steps, from, to};
                        if (p.contains(da)) return;
                        Pattern q = p;
                        q.dims.push_back(std::move(da));
                        out.push_back(std::move(q));
                    };
                    push(DimOp::Next, 0);
                    push(DimOp::After, 0);
                    for (int n = 2; n <= cfg.nstep_max; ++n) push(DimOp::NStep, n);
                }
            }
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

bool check_constraints(const Pattern& p, const LanguageBias& bias) {
    for (const Pattern& neg : bias.negconstraints)
        if (oi_subsumes_pattern(neg, p)) return false;
    for (const Pattern& pos : bias.posconstraints)
        if (!oi_subsumes_pattern(pos, p)) return false;
    for (const auto& group : bias.atmostone_groups) {
        int present = 0;
        for (const std::string& pred : group) {
            for (const Atom& a : p.atoms)
                if (a.predicate == pred) {
                    ++present;
                    break;
                }
        }
        if (present >= 2) return false;
    }
    if (bias.key_predicates && !p.atoms.empty()) {
        const std::string& seed = p.atoms.front().predicate;
        if (std::find(bias.key_predicates->begin(), bias.key_predicates->end(), seed) ==
            bias.key_predicates->end())
            return false;
    }
    return true;
}

// The anti-monotone subset of check_constraints, safe to prune the search
// frontier with. posconstraints are not anti-monotone (a refinement may
// gain the required atoms), so they only filter what gets recorded.
static bool frontier_constraints(const Pattern& p, const LanguageBias& bias) {
    for (const Pattern& neg : bias.negconstraints)
        if (oi_subsumes_pattern(neg, p)) return false;
    for (const auto& group : bias.atmostone_groups) {
        int present = 0;
        for (const std::string& pred : group) {
            for (const Atom& a : p.atoms)
                if (a.predicate == pred) {
                    ++present;
                    break;
                }
        }
        if (present >= 2) return false;
    }
    if (bias.key_predicates && !p.atoms.empty()) {
        const std::string& seed = p.atoms.front().predicate;
        if (std::find(bias.key_predicates->begin(), bias.key_predicates->end(), seed) ==
            bias.key_predicates->end())
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Statistics kernels
// ---------------------------------------------------------------------------

MinedFeature compute_stats(const Pattern& p, const LabeledDataset& d) {
    MinedFeature f;
    f.pattern = p;
    f.classes = d.classes;
    f.supports.assign(d.classes.size(), 0);
    f.confidences.assign(d.classes.size(), 0.0);
    for (const auto& item : d.items) {
        IndexedSequence is = index_sequence(item.seq, d.dimensions);
        if (subsumes_sequence(p, is)) {
            ++f.freq;
            ++f.supports[static_cast<size_t>(d.class_index(item.label))];
        }
    }
    if (f.freq > 0)
        for (size_t c = 0; c < f.supports.size(); ++c)
            f.confidences[c] = static_cast<double>(f.supports[c]) / static_cast<double>(f.freq);
    return f;
}

namespace {

MinedFeature stats_one(const Pattern& p, const LabeledDataset& d,
                       const std::vector<IndexedSequence>& index,
                       const std::vector<int>& labels) {
    MinedFeature f;
    f.pattern = p;
    f.classes = d.classes;
    f.supports.assign(d.classes.size(), 0);
    f.confidences.assign(d.classes.size(), 0.0);
    for (size_t s = 0; s < index.size(); ++s) {
        if (subsumes_sequence(p, index[s])) {
            ++f.freq;
            ++f.supports[static_cast<size_t>(labels[s])];
        }
    }
    if (f.freq > 0)
        for (size_t c = 0; c < f.supports.size(); ++c)
            f.confidences[c] = static_cast<double>(f.supports[c]) / static_cast<double>(f.freq);
    return f;
}

void stats_batch_serial(const std::vector<Pattern>& candidates, const LabeledDataset& d,
                        const std::vector<IndexedSequence>& index,
                        const std::vector<int>& labels, std::vector<MinedFeature>& out) {
    for (size_t i = 0; i < candidates.size(); ++i)
        out[i] = stats_one(candidates[i], d, index, labels);
}

void stats_batch_parallel(const std::vector<Pattern>& candidates, const LabeledDataset& d,
                          const std::vector<IndexedSequence>& index,
                          const std::vector<int>& labels, std::vector<MinedFeature>& out,
                          int threads) {
    const long n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (long i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] =
            stats_one(candidates[static_cast<size_t>(i)], d, index, labels);
}

}  // namespace

std::vector<MinedFeature> compute_stats_batch(const std::vector<Pattern>& candidates,
                                              const LabeledDataset& d,
                                              const std::vector<IndexedSequence>& index,
                                              int threads) {
    std::vector<int> labels;
    labels.reserve(d.items.size());
    for (const auto& item : d.items) labels.push_back(d.class_index(item.label));

    std::vector<MinedFeature> out(candidates.size());
    int t = effective_threads(threads);
    if (t == 1)
        stats_batch_serial(candidates, d, index, labels, out);
    else
        stats_batch_parallel(candidates, d, index, labels, out, t);
    return out;
}

// ---------------------------------------------------------------------------
// Level-wise search
// ---------------------------------------------------------------------------

namespace {

// Renaming-invariant fingerprint: equivalent patterns always share it.
std::string signature(const Pattern& p) {
    std::vector<std::string> parts;
    for (const Atom& a : p.atoms) {
        std::string s = a.predicate + "/";
        for (const Term& t : a.args) {
            s += t.is_variable() ? "_" : t.name;
            s += ";";
        }
        parts.push_back(std::move(s));
    }
    for (const DimAtom& d : p.dims) {
        std::string s = "@" + std::to_string(static_cast<int>(d.op)) + "." +
                        std::to_string(d.dim) + "." + std::to_string(d.steps) + "/";
        s += d.from.is_variable() ? "_" : d.from.name;
        s += ";";
        s += d.to.is_variable() ? "_" : d.to.name;
        parts.push_back(std::move(s));
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const std::string& s : parts) out += s + "|";
    return out;
}

// Drop OI-equivalent duplicates, keeping the first of each class.
std::vector<Pattern> dedupe_equivalent(std::vector<Pattern> candidates) {
    std::map<std::string, std::vector<size_t>> buckets;
    std::vector<bool> keep(candidates.size(), true);
    for (size_t i = 0; i < candidates.size(); ++i) {
        std::vector<size_t>& bucket = buckets[signature(candidates[i])];
        for (size_t j : bucket) {
            if (oi_equivalent(candidates[i], candidates[j])) {
                keep[i] = false;
                break;
            }
        }
        if (keep[i]) bucket.push_back(i);
    }
    std::vector<Pattern> out;
    out.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i)
        if (keep[i]) out.push_back(std::move(candidates[i]));
    return out;
}

void validate_vocabulary(const LabeledDataset& d, const LanguageBias& bias) {
    Vocabulary v = Vocabulary::from_dataset(d);
    std::vector<std::string> missing, mismatched;
    for (const auto& [pred, arity] : v.arities) {
        auto it = bias.types.find(pred);
        if (it == bias.types.end())
            missing.push_back(pred);
        else if (it->second.size() != arity)
            mismatched.push_back(pred);
    }
    if (!missing.empty() || !mismatched.empty()) {
        std::string msg = "dataset/background vocabulary mismatch:";
        if (!missing.empty()) {
            msg += " undeclared predicates:";
            for (const std::string& p : missing) msg += " " + p;
        }
        if (!mismatched.empty()) {
            msg += " arity conflicts:";
            for (const std::string& p : mismatched) msg += " " + p;
        }
        throw data_error(msg);
    }
}

}  // namespace

std::vector<MinedFeature> mine(const LabeledDataset& d, const MinerConfig& cfg) {
    if (d.items.empty()) throw data_error("cannot mine an empty dataset");
    if (cfg.confidence_threshold <= 0.0 || cfg.confidence_threshold > 1.0)
        throw data_error("confidence threshold must lie in (0, 1]");
    if (!cfg.bias.minfreq_absolute && cfg.bias.minfreq > 1.0)
        throw data_error("relative minfreq must lie in (0, 1]");
    if (cfg.bias.minfreq <= 0.0) throw data_error("minfreq must be positive");
    validate_vocabulary(d, cfg.bias);

    const Vocabulary vocab = Vocabulary::from_dataset(d);
    const std::vector<IndexedSequence> index = index_dataset(d);
    const double min_count =
        cfg.bias.minfreq_absolute ? cfg.bias.minfreq
                                  : cfg.bias.minfreq * static_cast<double>(d.items.size());

    std::vector<MinedFeature> recorded;
    std::vector<Pattern> frontier{Pattern{}};
    const int max_levels = cfg.bias.maxsize + cfg.dim_atom_cap();

    for (int level = 1; level <= max_levels; ++level) {
        // Candidate generation from the previous level's frequent patterns.
        std::vector<Pattern> candidates;
        for (const Pattern& p : frontier)
            for (Pattern& q : refine(p, cfg, vocab, d.dimensions))
                candidates.push_back(std::move(q));
        if (candidates.empty()) break;

        std::vector<Pattern> admitted;
        admitted.reserve(candidates.size());
        for (Pattern& p : candidates)
            if (frontier_constraints(p, cfg.bias)) admitted.push_back(std::move(p));
        admitted = dedupe_equivalent(std::move(admitted));
        if (admitted.empty()) break;

        std::vector<MinedFeature> stats = compute_stats_batch(admitted, d, index, cfg.threads);

        frontier.clear();
        for (MinedFeature& f : stats) {
            if (static_cast<double>(f.freq) <= min_count) continue;  // strict bound
            frontier.push_back(f.pattern);
            bool record = cfg.keep_all_levels || f.pattern.length() == cfg.bias.maxsize;
            if (record && check_constraints(f.pattern, cfg.bias))
                recorded.push_back(std::move(f));
        }
        if (frontier.empty()) break;
    }

    std::vector<MinedFeature> out;
    out.reserve(recorded.size());
    for (MinedFeature& f : recorded)
        if (f.max_confidence() >= cfg.confidence_threshold) out.push_back(std::move(f));
    return out;
}

}  // namespace lynx
