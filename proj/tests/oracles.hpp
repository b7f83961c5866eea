// Test-side reference implementations, deliberately independent of the
// engine's search machinery: plain exhaustive enumeration everywhere.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lynx/bayes.hpp"
#include "lynx/format.hpp"
#include "lynx/logic.hpp"
#include "lynx/miner.hpp"

namespace oracle {

using namespace lynx;

inline std::vector<std::string> collect_vars(const Pattern& p) {
    std::vector<std::string> vars;
    std::set<std::string> seen;
    auto add = [&](const Term& t) {
        if (t.is_variable() && seen.insert(t.name).second) vars.push_back(t.name);
    };
    for (const Atom& a : p.atoms)
        for (const Term& t : a.args) add(t);
    for (const DimAtom& d : p.dims) {
        add(d.from);
        add(d.to);
    }
    return vars;
}

inline std::set<std::string> collect_consts(const Pattern& p) {
    std::set<std::string> cs;
    auto add = [&](const Term& t) {
        if (!t.is_variable()) cs.insert(t.name);
    };
    for (const Atom& a : p.atoms)
        for (const Term& t : a.args) add(t);
    for (const DimAtom& d : p.dims) {
        add(d.from);
        add(d.to);
    }
    return cs;
}

// Brute-force subsumption: try every injective assignment of the pattern's
// variables to the sequence's constants.
inline bool brute_subsumes_sequence(const Pattern& p, const RelationalSequence& s) {
    std::set<std::string> universe_set;
    for (const Atom& a : s.fluents)
        for (const Term& t : a.args) universe_set.insert(t.name);
    for (const Atom& a : s.statics)
        for (const Term& t : a.args) universe_set.insert(t.name);
    for (const auto& [dim, evs] : s.orders)
        for (const std::string& e : evs) universe_set.insert(e);
    std::vector<std::string> universe(universe_set.begin(), universe_set.end());

    std::set<Atom> ground(s.fluents.begin(), s.fluents.end());
    ground.insert(s.statics.begin(), s.statics.end());
    std::map<int, std::map<std::string, int>> positions;
    for (const auto& [dim, evs] : s.orders)
        for (size_t i = 0; i < evs.size(); ++i) positions[dim][evs[i]] = static_cast<int>(i);

    std::vector<std::string> vars = collect_vars(p);
    std::set<std::string> forbidden = collect_consts(p);
    std::map<std::string, std::string> theta;

    auto name_of = [&](const Term& t) -> const std::string& {
        return t.is_variable() ? theta.at(t.name) : t.name;
    };
    auto holds = [&]() {
        for (const Atom& a : p.atoms) {
            Atom g;
            g.predicate = a.predicate;
            for (const Term& t : a.args) g.args.push_back(Term::constant(name_of(t)));
            if (!ground.count(g)) return false;
        }
        for (const DimAtom& d : p.dims) {
            auto dit = positions.find(d.dim);
            if (dit == positions.end()) return false;
            auto pf = dit->second.find(name_of(d.from));
            auto pt = dit->second.find(name_of(d.to));
            if (pf == dit->second.end() || pt == dit->second.end()) return false;
            int delta = pt->second - pf->second;
            if (d.op == DimOp::Next && delta != 1) return false;
            if (d.op == DimOp::After && delta <= 0) return false;
            if (d.op == DimOp::NStep && delta != d.steps) return false;
        }
        return true;
    };

    std::set<std::string> used;
    std::function<bool(size_t)> rec = [&](size_t k) -> bool {
        if (k == vars.size()) return holds();
        for (const std::string& u : universe) {
            if (used.count(u) || forbidden.count(u)) continue;
            theta[vars[k]] = u;
            used.insert(u);
            if (rec(k + 1)) return true;
            used.erase(u);
            theta.erase(vars[k]);
        }
        return false;
    };
    return rec(0);
}

// Brute-force θ_OI-subsumption: every injective assignment of p's
// variables to q's terms.
inline bool brute_oi_subsumes(const Pattern& p, const Pattern& q) {
    std::vector<Term> targets;
    std::set<Term> tset;
    auto add = [&](const Term& t) {
        if (tset.insert(t).second) targets.push_back(t);
    };
    for (const Atom& a : q.atoms)
        for (const Term& t : a.args) add(t);
    for (const DimAtom& d : q.dims) {
        add(d.from);
        add(d.to);
    }

    std::vector<std::string> vars = collect_vars(p);
    std::set<Term> forbidden;
    for (const std::string& c : collect_consts(p)) forbidden.insert(Term::constant(c));

    std::set<Atom> qatoms(q.atoms.begin(), q.atoms.end());
    std::set<DimAtom> qdims(q.dims.begin(), q.dims.end());

    std::map<std::string, Term> theta;
    auto image = [&](const Term& t) { return t.is_variable() ? theta.at(t.name) : t; };
    auto holds = [&]() {
        for (const Atom& a : p.atoms) {
            Atom g;
            g.predicate = a.predicate;
            for (const Term& t : a.args) g.args.push_back(image(t));
            if (!qatoms.count(g)) return false;
        }
        for (const DimAtom& d : p.dims) {
            DimAtom g = d;
            g.from = image(d.from);
            g.to = image(d.to);
            if (!qdims.count(g)) return false;
        }
        return true;
    };

    std::set<Term> used;
    std::function<bool(size_t)> rec = [&](size_t k) -> bool {
        if (k == vars.size()) return holds();
        for (const Term& t : targets) {
            if (used.count(t) || forbidden.count(t)) continue;
            theta[vars[k]] = t;
            used.insert(t);
            if (rec(k + 1)) return true;
            used.erase(t);
            theta.erase(vars[k]);
        }
        return false;
    };
    return rec(0);
}

inline bool brute_oi_equivalent(const Pattern& p, const Pattern& q) {
    return brute_oi_subsumes(p, q) && brute_oi_subsumes(q, p);
}

// ---------------------------------------------------------------------------
// Bayes oracles: the literal product/posterior route.
// ---------------------------------------------------------------------------

// ln P(x|Y_j) + ln P(Y_j) via the literal class-conditional product.
inline double logproduct_discriminant(const std::vector<double>& p,
                                      const std::vector<double>& priors, const BinaryVector& x,
                                      int j) {
    const size_t q = priors.size();
    double prod = 1.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double pij = p[i * q + static_cast<size_t>(j)];
        prod *= x[i] ? pij : (1.0 - pij);
    }
    return std::log(prod) + std::log(priors[static_cast<size_t>(j)]);
}

// Argmax of the normalized posterior, ties to larger prior then class order.
inline int posterior_argmax(const std::vector<double>& p, const std::vector<double>& priors,
                            const BinaryVector& x) {
    const size_t q = priors.size();
    std::vector<double> post(q, 0.0);
    double total = 0.0;
    for (size_t j = 0; j < q; ++j) {
        double prod = priors[j];
        for (size_t i = 0; i < x.size(); ++i) {
            double pij = p[i * q + j];
            prod *= x[i] ? pij : (1.0 - pij);
        }
        post[j] = prod;
        total += prod;
    }
    for (size_t j = 0; j < q; ++j) post[j] /= total;
    size_t best = 0;
    for (size_t j = 1; j < q; ++j)
        if (post[j] > post[best] || (post[j] == post[best] && priors[j] > priors[best]))
            best = j;
    return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// Exhaustive pattern enumeration for the miner completeness check.
// Mirrors the declarative bias rules with its own code and naming scheme,
// applies no pruning, and defers every filter to the end.
// ---------------------------------------------------------------------------

struct EnumCaps {
    int max_dims = 1;   // pattern length itself is capped by bias.maxsize
    int nstep_max = 1;  // < 2 disables nstep
    int n_dims = 1;
};

namespace detail {

inline std::map<std::string, std::string> var_types(const Pattern& p, const LanguageBias& bias) {
    std::map<std::string, std::string> out;
    for (const Atom& a : p.atoms) {
        auto it = bias.types.find(a.predicate);
        if (it == bias.types.end()) continue;
        for (size_t i = 0; i < a.args.size(); ++i)
            if (a.args[i].is_variable()) out.emplace(a.args[i].name, it->second[i]);
    }
    for (const DimAtom& d : p.dims) {
        if (d.from.is_variable()) out.emplace(d.from.name, "event");
        if (d.to.is_variable()) out.emplace(d.to.name, "event");
    }
    return out;
}

inline std::string next_var(const Pattern& p, int extra) {
    std::set<std::string> taken;
    for (const std::string& v : collect_vars(p)) taken.insert(v);
    int k = 0, left = extra;
    while (true) {
        std::string name = "W" + std::to_string(k++);
        if (!taken.count(name)) {
            if (left == 0) return name;
            --left;
        }
    }
}

inline void enum_rec(const Pattern& p, const LanguageBias& bias, const Vocabulary& vocab,
                     const EnumCaps& caps, std::vector<Pattern>& out) {
    if (!p.is_empty()) out.push_back(p);

    if (p.length() < bias.maxsize) {
        std::map<std::string, std::string> vt = var_types(p, bias);
        for (const auto& [pred, mode] : bias.modes) {
            if (p.is_empty() && bias.key_predicates &&
                std::find(bias.key_predicates->begin(), bias.key_predicates->end(), pred) ==
                    bias.key_predicates->end())
                continue;
            const std::vector<std::string>& types = bias.types.at(pred);
            std::vector<std::vector<Term>> slots(mode.size());
            bool ok = true;
            int fresh = 0;
            for (size_t i = 0; i < mode.size() && ok; ++i) {
                if (mode[i] == '-' || (mode[i] == '+' && p.is_empty())) {
                    slots[i].push_back(Term::variable(next_var(p, fresh++)));
                } else if (mode[i] == '+') {
                    for (const auto& [v, t] : vt)
                        if (t == types[i]) slots[i].push_back(Term::variable(v));
                    ok = !slots[i].empty();
                } else {  // '#'
                    auto it = vocab.constants.find({pred, static_cast<int>(i)});
                    ok = it != vocab.constants.end();
                    if (ok)
                        for (const std::string& c : it->second)
                            slots[i].push_back(Term::constant(c));
                }
            }
            if (!ok) continue;
            std::vector<size_t> pick(mode.size(), 0);
            while (true) {
                Atom a;
                a.predicate = pred;
                for (size_t i = 0; i < mode.size(); ++i) a.args.push_back(slots[i][pick[i]]);
                if (!p.contains(a)) {
                    Pattern q = p;
                    q.atoms.push_back(a);
                    enum_rec(q, bias, vocab, caps, out);
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

    if (static_cast<int>(p.dims.size()) < caps.max_dims) {
        std::vector<Term> sources, targets;
        auto addu = [](std::vector<Term>& v, const Term& t) {
            if (std::find(v.begin(), v.end(), t) == v.end()) v.push_back(t);
        };
        for (const Atom& a : p.atoms)
            if (bias.is_fluent(a.predicate) && !a.args.empty()) addu(sources, a.args.front());
        targets = sources;
        for (const DimAtom& d : p.dims) {
            addu(targets, d.from);
            addu(targets, d.to);
        }
        targets.push_back(Term::variable(next_var(p, 0)));
        for (int dim = 1; dim <= caps.n_dims; ++dim) {
            for (const Term& from : sources) {
                for (const Term& to : targets) {
                    if (from == to) continue;
                    std::vector<DimAtom> cands;
                    cands.push_back({DimOp::Next, dim, 0, from, to});
                    cands.push_back({DimOp::After, dim, 0, from, to});
                    for (int n = 2; n <= caps.nstep_max; ++n)
                        cands.push_back({DimOp::NStep, dim, n, from, to});
                    for (const DimAtom& da : cands) {
                        if (p.contains(da)) continue;
                        Pattern q = p;
                        q.dims.push_back(da);
                        enum_rec(q, bias, vocab, caps, out);
                    }
                }
            }
        }
    }
}

}  // namespace detail

// Every valid pattern for the bias over a dataset, with statistics computed
// by the brute matcher, filtered exactly as the miner contract prescribes
// and de-duplicated with the brute equivalence check.
inline std::vector<MinedFeature> brute_mine(const LabeledDataset& d, const LanguageBias& bias,
                                            double confidence_threshold, const EnumCaps& caps) {
    Vocabulary vocab = Vocabulary::from_dataset(d);
    std::vector<Pattern> all;
    detail::enum_rec(Pattern{}, bias, vocab, caps, all);

    // De-duplicate modulo OI-equivalence, first kept.
    std::vector<Pattern> unique;
    for (const Pattern& p : all) {
        bool dup = false;
        for (const Pattern& u : unique)
            if (brute_oi_equivalent(p, u)) {
                dup = true;
                break;
            }
        if (!dup) unique.push_back(p);
    }

    const double min_count = bias.minfreq_absolute
                                 ? bias.minfreq
                                 : bias.minfreq * static_cast<double>(d.items.size());
    std::vector<MinedFeature> out;
    for (const Pattern& p : unique) {
        // Full constraint check on the final pattern.
        bool pass = true;
        for (const Pattern& neg : bias.negconstraints)
            if (brute_oi_subsumes(neg, p)) pass = false;
        for (const Pattern& pos : bias.posconstraints)
            if (!brute_oi_subsumes(pos, p)) pass = false;
        for (const auto& group : bias.atmostone_groups) {
            int present = 0;
            for (const std::string& pred : group)
                for (const Atom& a : p.atoms)
                    if (a.predicate == pred) {
                        ++present;
                        break;
                    }
            if (present >= 2) pass = false;
        }
        if (bias.key_predicates && !p.atoms.empty() &&
            std::find(bias.key_predicates->begin(), bias.key_predicates->end(),
                      p.atoms.front().predicate) == bias.key_predicates->end())
            pass = false;
        if (!pass) continue;

        MinedFeature f;
        f.pattern = p;
        f.classes = d.classes;
        f.supports.assign(d.classes.size(), 0);
        f.confidences.assign(d.classes.size(), 0.0);
        for (const auto& item : d.items) {
            if (brute_subsumes_sequence(p, item.seq)) {
                ++f.freq;
                ++f.supports[static_cast<size_t>(d.class_index(item.label))];
            }
        }
        if (static_cast<double>(f.freq) <= min_count) continue;
        for (size_t c = 0; c < f.supports.size(); ++c)
            f.confidences[c] =
                static_cast<double>(f.supports[c]) / static_cast<double>(f.freq);
        if (f.max_confidence() < confidence_threshold) continue;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace oracle
