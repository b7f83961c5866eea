#include "lynx/logic.hpp"

#include <algorithm>
#include <set>

namespace lynx {

bool Pattern::contains(const Atom& a) const {
    return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
}

bool Pattern::contains(const DimAtom& d) const {
    return std::find(dims.begin(), dims.end(), d) != dims.end();
}

static Term subst_term(const Term& t, const Substitution& theta) {
    if (t.is_variable()) {
        auto it = theta.bindings.find(t.name);
        if (it != theta.bindings.end()) return it->second;
    }
    return t;
}

Atom apply_substitution(const Atom& a, const Substitution& theta) {
    Atom out;
    out.predicate = a.predicate;
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(subst_term(t, theta));
    return out;
}

DimAtom apply_substitution(const DimAtom& d, const Substitution& theta) {
    DimAtom out = d;
    out.from = subst_term(d.from, theta);
    out.to = subst_term(d.to, theta);
    return out;
}

Pattern apply_substitution(const Pattern& p, const Substitution& theta) {
    Pattern out;
    out.atoms.reserve(p.atoms.size());
    out.dims.reserve(p.dims.size());
    for (const Atom& a : p.atoms) out.atoms.push_back(apply_substitution(a, theta));
    for (const DimAtom& d : p.dims) out.dims.push_back(apply_substitution(d, theta));
    return out;
}

EventIndex build_event_index(const RelationalSequence& s, int declared_dims) {
    EventIndex idx;
    for (const auto& [dim, events] : s.orders) {
        if (dim < 1)
            throw data_error("sequence '" + s.id + "': dimension " + std::to_string(dim) +
                             " is not positive");
        EventIndex::DimIndex di;
        di.order = events;
        for (size_t i = 0; i < events.size(); ++i) {
            auto [it, inserted] = di.position.emplace(events[i], static_cast<int>(i));
            (void)it;
            if (!inserted)
                throw data_error("sequence '" + s.id + "': duplicate event '" + events[i] +
                                 "' on dimension " + std::to_string(dim));
            if (i + 1 < events.size()) di.successor[events[i]] = events[i + 1];
        }
        idx.dims.emplace(dim, std::move(di));
    }
    int max_dim = s.orders.empty() ? 0 : s.orders.rbegin()->first;
    idx.declared_dims = std::max(declared_dims, max_dim);
    return idx;
}

IndexedSequence index_sequence(const RelationalSequence& s, int declared_dims) {
    IndexedSequence is;
    is.seq = &s;
    is.index = build_event_index(s, declared_dims);
    for (const Atom& a : s.fluents) is.buckets[{a.predicate, a.args.size()}].push_back(&a);
    for (const Atom& a : s.statics) is.buckets[{a.predicate, a.args.size()}].push_back(&a);
    return is;
}

std::vector<std::string> pattern_variables(const Pattern& p) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto add = [&](const Term& t) {
        if (t.is_variable() && seen.insert(t.name).second) out.push_back(t.name);
    };
    for (const Atom& a : p.atoms)
        for (const Term& t : a.args) add(t);
    for (const DimAtom& d : p.dims) {
        add(d.from);
        add(d.to);
    }
    return out;
}

std::vector<std::string> pattern_constants(const Pattern& p) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto add = [&](const Term& t) {
        if (!t.is_variable() && seen.insert(t.name).second) out.push_back(t.name);
    };
    for (const Atom& a : p.atoms)
        for (const Term& t : a.args) add(t);
    for (const DimAtom& d : p.dims) {
        add(d.from);
        add(d.to);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pattern-over-sequence matching.
//
// Backtracking over the pattern's non-dimensional atoms, most-constrained
// first, with the OI injectivity check applied as variables are bound; the
// dimensional atoms are solved afterwards against the positional index,
// picking at each step the one with the most resolved endpoints.
// ---------------------------------------------------------------------------

namespace {

class SeqMatcher {
public:
    SeqMatcher(const Pattern& p, const IndexedSequence& is) : p_(p), is_(is) {
        for (const std::string& c : pattern_constants(p)) used_.insert(c);
    }

    bool run() {
        for (const DimAtom& d : p_.dims)
            if (d.dim < 1 || d.dim > is_.index.declared_dims)
                throw data_error("dimensional atom references undeclared dimension " +
                                 std::to_string(d.dim));

        // Order atoms by how many ground candidates they have.
        std::vector<size_t> order(p_.atoms.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<size_t> weight(order.size());
        for (size_t i = 0; i < order.size(); ++i) {
            const auto* b = bucket(p_.atoms[i]);
            weight[i] = b ? b->size() : 0;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return weight[a] < weight[b]; });
        atom_order_ = std::move(order);

        std::vector<const DimAtom*> pending;
        pending.reserve(p_.dims.size());
        for (const DimAtom& d : p_.dims) pending.push_back(&d);
        pending_dims_ = std::move(pending);

        return match_atom(0);
    }

private:
    const std::vector<const Atom*>* bucket(const Atom& a) const {
        auto it = is_.buckets.find({a.predicate, a.args.size()});
        return it == is_.buckets.end() ? nullptr : &it->second;
    }

    // Attempt to unify pattern atom `pa` with ground atom `ga`; appends the
    // variables bound here to `undo`.
    bool unify_atom(const Atom& pa, const Atom& ga, std::vector<std::string>& undo) {
        for (size_t i = 0; i < pa.args.size(); ++i) {
            const Term& t = pa.args[i];
            const std::string& g = ga.args[i].name;
            if (!t.is_variable()) {
                if (t.name != g) return false;
                continue;
            }
            auto it = bound_.find(t.name);
            if (it != bound_.end()) {
                if (it->second != g) return false;
                continue;
            }
            if (used_.count(g)) return false;  // OI: images must stay distinct
            bound_.emplace(t.name, g);
            used_.insert(g);
            undo.push_back(t.name);
        }
        return true;
    }

    void undo_bindings(const std::vector<std::string>& undo) {
        for (const std::string& v : undo) {
            auto it = bound_.find(v);
            used_.erase(it->second);
            bound_.erase(it);
        }
    }

    bool match_atom(size_t k) {
        if (k == atom_order_.size()) return match_dims();
        const Atom& pa = p_.atoms[atom_order_[k]];
        const auto* b = bucket(pa);
        if (!b) return false;
        for (const Atom* ga : *b) {
            std::vector<std::string> undo;
            if (unify_atom(pa, *ga, undo)) {
                if (match_atom(k + 1)) return true;
            }
            undo_bindings(undo);
        }
        return false;
    }

    // --- dimensional atoms ---

    const EventIndex::DimIndex* dim_index(int dim) const {
        auto it = is_.index.dims.find(dim);
        return it == is_.index.dims.end() ? nullptr : &it->second;
    }

    static bool positions_ok(const DimAtom& d, int pf, int pt) {
        switch (d.op) {
            case DimOp::Next: return pt - pf == 1;
            case DimOp::After: return pt > pf;
            case DimOp::NStep: return pt - pf == d.steps;
        }
        return false;
    }

    // Resolve a dim-atom endpoint to a ground name, if determined.
    const std::string* resolve(const Term& t) const {
        if (!t.is_variable()) return &t.name;
        auto it = bound_.find(t.name);
        return it == bound_.end() ? nullptr : &it->second;
    }

    bool try_bind_event(const Term& t, const std::string& ev,
                        std::vector<std::string>& undo) {
        if (!t.is_variable()) return t.name == ev;
        auto it = bound_.find(t.name);
        if (it != bound_.end()) return it->second == ev;
        if (used_.count(ev)) return false;
        bound_.emplace(t.name, ev);
        used_.insert(ev);
        undo.push_back(t.name);
        return true;
    }

    bool match_dims() {
        if (pending_dims_.empty()) return true;
        // Pick the pending dim atom with the most resolved endpoints.
        size_t best = 0;
        int best_score = -1;
        for (size_t i = 0; i < pending_dims_.size(); ++i) {
            int score = (resolve(pending_dims_[i]->from) ? 1 : 0) +
                        (resolve(pending_dims_[i]->to) ? 1 : 0);
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        const DimAtom* d = pending_dims_[best];
        pending_dims_.erase(pending_dims_.begin() + static_cast<long>(best));
        bool ok = solve_dim(*d);
        if (!ok) pending_dims_.insert(pending_dims_.begin() + static_cast<long>(best), d);
        return ok;
    }

    bool solve_dim(const DimAtom& d) {
        const EventIndex::DimIndex* di = dim_index(d.dim);
        if (!di) return false;  // sequence has no events on this dimension
        if (d.op == DimOp::NStep && d.steps < 1) return false;

        const std::string* from = resolve(d.from);
        const std::string* to = resolve(d.to);

        if (from && to) {
            auto pf = di->position.find(*from);
            auto pt = di->position.find(*to);
            if (pf == di->position.end() || pt == di->position.end()) return false;
            return positions_ok(d, pf->second, pt->second) && match_dims();
        }

        if (from) {
            auto pf = di->position.find(*from);
            if (pf == di->position.end()) return false;
            return enumerate_targets(d, *di, pf->second, /*bind_to=*/true);
        }
        if (to) {
            auto pt = di->position.find(*to);
            if (pt == di->position.end()) return false;
            return enumerate_targets(d, *di, pt->second, /*bind_to=*/false);
        }

        // Both endpoints open: enumerate source events.
        for (const std::string& ev : di->order) {
            std::vector<std::string> undo;
            if (try_bind_event(d.from, ev, undo)) {
                if (enumerate_targets(d, *di, di->position.at(ev), /*bind_to=*/true)) return true;
            }
            undo_bindings(undo);
        }
        return false;
    }

    // Enumerate candidates for the open endpoint given the fixed one's
    // position. bind_to=true fixes `from`, enumerating `to`; else reversed.
    bool enumerate_targets(const DimAtom& d, const EventIndex::DimIndex& di, int fixed_pos,
                           bool bind_to) {
        const int n = static_cast<int>(di.order.size());
        auto try_at = [&](int pos) {
            if (pos < 0 || pos >= n) return false;
            std::vector<std::string> undo;
            if (try_bind_event(bind_to ? d.to : d.from, di.order[static_cast<size_t>(pos)],
                               undo)) {
                if (match_dims()) return true;
            }
            undo_bindings(undo);
            return false;
        };
        switch (d.op) {
            case DimOp::Next: return try_at(bind_to ? fixed_pos + 1 : fixed_pos - 1);
            case DimOp::NStep:
                return try_at(bind_to ? fixed_pos + d.steps : fixed_pos - d.steps);
            case DimOp::After: {
                if (bind_to) {
                    for (int pos = fixed_pos + 1; pos < n; ++pos)
                        if (try_at(pos)) return true;
                } else {
                    for (int pos = 0; pos < fixed_pos; ++pos)
                        if (try_at(pos)) return true;
                }
                return false;
            }
        }
        return false;
    }

    const Pattern& p_;
    const IndexedSequence& is_;
    std::vector<size_t> atom_order_;
    std::vector<const DimAtom*> pending_dims_;
    std::map<std::string, std::string> bound_;
    std::set<std::string> used_;
};

}  // namespace

bool subsumes_sequence(const Pattern& p, const IndexedSequence& is) {
    SeqMatcher m(p, is);
    return m.run();
}

bool subsumes_sequence(const Pattern& p, const RelationalSequence& s, const EventIndex& idx) {
    IndexedSequence is;
    is.seq = &s;
    is.index = idx;
    for (const Atom& a : s.fluents) is.buckets[{a.predicate, a.args.size()}].push_back(&a);
    for (const Atom& a : s.statics) is.buckets[{a.predicate, a.args.size()}].push_back(&a);
    SeqMatcher m(p, is);
    return m.run();
}

// ---------------------------------------------------------------------------
// θ_OI-subsumption between patterns.
// ---------------------------------------------------------------------------

namespace {

class PatMatcher {
public:
    PatMatcher(const Pattern& p, const Pattern& q) : p_(p), q_(q) {
        for (const std::string& c : pattern_constants(p))
            used_.insert(Term::constant(c));
        for (const Atom& a : q.atoms) abuckets_[{a.predicate, a.args.size()}].push_back(&a);
        for (const DimAtom& d : q.dims) dbuckets_[{d.op, d.dim, d.steps}].push_back(&d);
    }

    bool run() {
        std::vector<size_t> order(p_.atoms.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return bucket_size(p_.atoms[a]) < bucket_size(p_.atoms[b]);
        });
        atom_order_ = std::move(order);
        return match_atom(0);
    }

private:
    size_t bucket_size(const Atom& a) const {
        auto it = abuckets_.find({a.predicate, a.args.size()});
        return it == abuckets_.end() ? 0 : it->second.size();
    }

    bool unify(const Term& pt, const Term& qt, std::vector<std::string>& undo) {
        if (!pt.is_variable()) return pt == qt;
        auto it = bound_.find(pt.name);
        if (it != bound_.end()) return it->second == qt;
        if (used_.count(qt)) return false;
        bound_.emplace(pt.name, qt);
        used_.insert(qt);
        undo.push_back(pt.name);
        return true;
    }

    void undo_bindings(const std::vector<std::string>& undo) {
        for (const std::string& v : undo) {
            auto it = bound_.find(v);
            used_.erase(it->second);
            bound_.erase(it);
        }
    }

    bool match_atom(size_t k) {
        if (k == atom_order_.size()) return match_dim(0);
        const Atom& pa = p_.atoms[atom_order_[k]];
        auto it = abuckets_.find({pa.predicate, pa.args.size()});
        if (it == abuckets_.end()) return false;
        for (const Atom* qa : it->second) {
            std::vector<std::string> undo;
            bool ok = true;
            for (size_t i = 0; i < pa.args.size() && ok; ++i)
                ok = unify(pa.args[i], qa->args[i], undo);
            if (ok && match_atom(k + 1)) return true;
            undo_bindings(undo);
        }
        return false;
    }

    bool match_dim(size_t k) {
        if (k == p_.dims.size()) return true;
        const DimAtom& pd = p_.dims[k];
        auto it = dbuckets_.find({pd.op, pd.dim, pd.steps});
        if (it == dbuckets_.end()) return false;
        for (const DimAtom* qd : it->second) {
            std::vector<std::string> undo;
            if (unify(pd.from, qd->from, undo) && unify(pd.to, qd->to, undo)) {
                if (match_dim(k + 1)) return true;
            }
            undo_bindings(undo);
        }
        return false;
    }

    const Pattern& p_;
    const Pattern& q_;
    std::map<std::pair<std::string, size_t>, std::vector<const Atom*>> abuckets_;
    std::map<std::tuple<DimOp, int, int>, std::vector<const DimAtom*>> dbuckets_;
    std::vector<size_t> atom_order_;
    std::map<std::string, Term> bound_;
    std::set<Term> used_;
};

}  // namespace

bool oi_subsumes_pattern(const Pattern& p, const Pattern& q) {
    if (p.atoms.size() > q.atoms.size() || p.dims.size() > q.dims.size()) return false;
    PatMatcher m(p, q);
    return m.run();
}

bool oi_equivalent(const Pattern& p, const Pattern& q) {
    // Under OI distinct atoms never collapse, so equivalent patterns have
    // identical shapes; cheap size filters first.
    if (p.atoms.size() != q.atoms.size() || p.dims.size() != q.dims.size()) return false;
    return oi_subsumes_pattern(p, q) && oi_subsumes_pattern(q, p);
}

}  // namespace lynx
