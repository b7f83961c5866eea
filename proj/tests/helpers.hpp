// Shared builders and random generators for the test suites.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "lynx/bayes.hpp"
#include "lynx/format.hpp"
#include "lynx/logic.hpp"
#include "lynx/rng.hpp"

namespace testutil {

using namespace lynx;

inline Pattern P(const std::string& text) { return parse_pattern_text(text); }

inline Atom A(const std::string& text) {
    Pattern p = parse_pattern_text(text);
    return p.atoms.front();
}

// Dataset whose feature bits are controlled directly: sequence r carries
// symbol g<i> iff bits[r][i], and feature i is the pattern f(E, g<i>).
inline LabeledDataset dataset_from_bits(const std::vector<int>& labels,
                                        const std::vector<std::vector<int>>& bits,
                                        const std::vector<std::string>& classes) {
    LabeledDataset d;
    d.classes = classes;
    d.dimensions = 1;
    for (size_t r = 0; r < labels.size(); ++r) {
        RelationalSequence s;
        s.id = "s" + std::to_string(r);
        std::vector<std::string> events;
        int e = 0;
        for (size_t i = 0; i < bits[r].size(); ++i) {
            if (!bits[r][i]) continue;
            std::string ev = "e" + std::to_string(++e);
            events.push_back(ev);
            Atom a;
            a.predicate = "f";
            a.args = {Term::constant(ev), Term::constant("g" + std::to_string(i))};
            s.fluents.push_back(std::move(a));
        }
        s.orders[1] = std::move(events);
        d.items.push_back({std::move(s), classes[static_cast<size_t>(labels[r])]});
    }
    return d;
}

inline std::vector<MinedFeature> bit_features(size_t n) {
    std::vector<MinedFeature> fs;
    for (size_t i = 0; i < n; ++i) {
        MinedFeature f;
        f.pattern = P("f(E,g" + std::to_string(i) + ")");
        fs.push_back(std::move(f));
    }
    return fs;
}

// Builds a model through the serialized record so that the derived weights
// come from the library's own reconstruction of the closed forms.
inline BayesModel make_model(const std::vector<std::string>& classes,
                             const std::vector<double>& priors, const std::vector<double>& p,
                             double epsilon = 1.0) {
    std::string text = "classes " + std::to_string(classes.size());
    for (const auto& c : classes) text += " " + c;
    text += "\npriors";
    for (double v : priors) text += " " + format_double(v);
    text += "\nepsilon " + format_double(epsilon);
    size_t d = classes.empty() ? 0 : p.size() / classes.size();
    text += "\np " + std::to_string(d) + "\n";
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < classes.size(); ++j)
            text += (j ? " " : "") + format_double(p[i * classes.size() + j]);
        text += "\n";
    }
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    size_t pos = 0;
    return parse_model_record(lines, pos);
}

inline BayesModel random_model(Rng& rng, int d, int q) {
    std::vector<double> p(static_cast<size_t>(d * q));
    for (double& v : p) v = 0.02 + 0.96 * rng.uniform01();
    std::vector<double> priors(static_cast<size_t>(q));
    double total = 0.0;
    for (double& v : priors) {
        v = 0.05 + rng.uniform01();
        total += v;
    }
    for (double& v : priors) v /= total;
    std::vector<std::string> classes;
    for (int j = 0; j < q; ++j) classes.push_back("c" + std::to_string(j + 1));
    return make_model(classes, priors, p);
}

// Random sequence: up to max_events events on 1..2 dimensions, fluents
// f/2 over a small symbol alphabet plus occasional statics rel/1.
inline RelationalSequence random_sequence(Rng& rng, int max_events = 6, int max_fluents = 8) {
    RelationalSequence s;
    s.id = "r" + std::to_string(rng.next_u64() % 100000);
    int n_events = 1 + static_cast<int>(rng.uniform_index(static_cast<size_t>(max_events)));
    std::vector<std::string> events;
    for (int i = 0; i < n_events; ++i) events.push_back("e" + std::to_string(i + 1));

    int n_dims = 1 + static_cast<int>(rng.uniform_index(2));
    for (int d = 1; d <= n_dims; ++d) {
        std::vector<std::string> order = events;
        rng.shuffle(order);
        // Dimension 2 covers only a prefix subset of the events.
        if (d == 2) order.resize(1 + rng.uniform_index(order.size()));
        s.orders[d] = order;
    }

    const char* symbols[] = {"a", "b", "c"};
    int n_fluents = 1 + static_cast<int>(rng.uniform_index(static_cast<size_t>(max_fluents)));
    for (int i = 0; i < n_fluents; ++i) {
        Atom a;
        a.predicate = "f";
        a.args = {Term::constant(events[rng.uniform_index(events.size())]),
                  Term::constant(symbols[rng.uniform_index(3)])};
        bool dup = false;
        for (const Atom& x : s.fluents) dup = dup || x == a;
        if (!dup) s.fluents.push_back(std::move(a));
    }
    if (rng.uniform01() < 0.4) {
        Atom st;
        st.predicate = "rel";
        st.args = {Term::constant(symbols[rng.uniform_index(3)])};
        s.statics.push_back(std::move(st));
    }
    return s;
}

// Random pattern over the same vocabulary: about half the draws start from
// atoms actually present in the sequence (then variabilized), the rest are
// fully random, so both verdicts are well represented.
inline Pattern random_pattern(Rng& rng, const RelationalSequence& s, int max_atoms = 4,
                              int max_vars = 3) {
    Pattern p;
    const char* symbols[] = {"a", "b", "c"};
    std::vector<std::string> vars;
    for (int i = 0; i < max_vars; ++i) vars.push_back("X" + std::to_string(i));

    auto random_term = [&](bool event_slot) -> Term {
        double roll = rng.uniform01();
        if (roll < 0.55) return Term::variable(vars[rng.uniform_index(vars.size())]);
        if (event_slot) {
            // A concrete event, sometimes one that does not exist.
            if (rng.uniform01() < 0.8 && !s.orders.empty()) {
                const auto& evs = s.orders.begin()->second;
                if (!evs.empty()) return Term::constant(evs[rng.uniform_index(evs.size())]);
            }
            return Term::constant("e99");
        }
        return Term::constant(symbols[rng.uniform_index(3)]);
    };

    bool seeded = rng.uniform01() < 0.5 && !s.fluents.empty();
    int n_atoms = 1 + static_cast<int>(rng.uniform_index(static_cast<size_t>(max_atoms)));
    for (int i = 0; i < n_atoms; ++i) {
        Atom a;
        if (seeded && rng.uniform01() < 0.7) {
            a = s.fluents[rng.uniform_index(s.fluents.size())];
            // Variabilize the event slot most of the time.
            if (rng.uniform01() < 0.8)
                a.args[0] = Term::variable(vars[rng.uniform_index(vars.size())]);
            if (rng.uniform01() < 0.3)
                a.args[1] = Term::variable(vars[rng.uniform_index(vars.size())]);
        } else {
            a.predicate = rng.uniform01() < 0.9 ? "f" : "rel";
            if (a.predicate == "f")
                a.args = {random_term(true), random_term(false)};
            else
                a.args = {random_term(false)};
        }
        if (!p.contains(a)) p.atoms.push_back(std::move(a));
    }

    int n_dim_atoms = static_cast<int>(rng.uniform_index(3));  // 0..2
    int max_dim = s.orders.empty() ? 1 : s.orders.rbegin()->first;
    for (int i = 0; i < n_dim_atoms; ++i) {
        DimAtom d;
        double roll = rng.uniform01();
        d.op = roll < 0.4 ? DimOp::Next : (roll < 0.75 ? DimOp::After : DimOp::NStep);
        if (d.op == DimOp::NStep) d.steps = 1 + static_cast<int>(rng.uniform_index(3));
        d.dim = 1 + static_cast<int>(rng.uniform_index(static_cast<size_t>(max_dim)));
        d.from = random_term(true);
        d.to = random_term(true);
        if (d.from == d.to) continue;
        if (!p.contains(d)) p.dims.push_back(std::move(d));
    }
    return p;
}

}  // namespace testutil
