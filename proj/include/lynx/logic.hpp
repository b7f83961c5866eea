#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lynx/errors.hpp"

namespace lynx {

enum class TermKind : uint8_t { Constant, Variable };

/// A Datalog term: a constant or a variable. No function symbols.
/// Lexical convention: uppercase-initial (or '_'-initial) names are variables.
struct Term {
    TermKind kind = TermKind::Constant;
    std::string name;

    static Term constant(std::string n) { return {TermKind::Constant, std::move(n)}; }
    static Term variable(std::string n) { return {TermKind::Variable, std::move(n)}; }

    bool is_variable() const { return kind == TermKind::Variable; }
    friend auto operator<=>(const Term&, const Term&) = default;
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

enum class DimOp : uint8_t { Next, After, NStep };

/// Dimensional operator atom:
///   next(d,X,Y)     Y is the direct successor of X on dimension d
///   after(d,X,Y)    Y occurs strictly later than X on dimension d
///   nstep(d,n,X,Y)  Y is exactly n steps after X on dimension d
struct DimAtom {
    DimOp op = DimOp::Next;
    int dim = 1;
    int steps = 0;  // meaningful for NStep only; 0 otherwise
    Term from;
    Term to;

    friend auto operator<=>(const DimAtom&, const DimAtom&) = default;
};

/// A conjunctive pattern: non-dimensional atoms plus dimensional atoms,
/// both in insertion order. atoms.front() is the seed literal, which the
/// key() constraint inspects. length() counts non-dimensional atoms only.
struct Pattern {
    std::vector<Atom> atoms;
    std::vector<DimAtom> dims;

    int length() const { return static_cast<int>(atoms.size()); }
    bool is_empty() const { return atoms.empty() && dims.empty(); }
    bool contains(const Atom& a) const;
    bool contains(const DimAtom& d) const;

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Variable bindings. OI-admissible substitutions are injective: no two
/// variables share an image and no variable takes the name of a distinct
/// term of the expression it is applied to. The matchers enforce this
/// incrementally; apply_substitution itself just replaces.
struct Substitution {
    std::map<std::string, Term> bindings;
};

/// One labeled example: ground fluents (first argument is the event
/// constant), ground event-free statics, and one event ordering per
/// dimension.
struct RelationalSequence {
    std::string id;
    std::vector<Atom> fluents;
    std::vector<Atom> statics;
    std::map<int, std::vector<std::string>> orders;

    friend bool operator==(const RelationalSequence&, const RelationalSequence&) = default;
};

/// Positional view of a sequence's orders; answers next/after/nstep
/// queries in O(log n) lookups.
struct EventIndex {
    struct DimIndex {
        std::vector<std::string> order;
        std::map<std::string, int> position;           // 0-based
        std::map<std::string, std::string> successor;  // absent for the last event
    };
    std::map<int, DimIndex> dims;
    int declared_dims = 0;  // dimension count the dataset declares
};

Atom apply_substitution(const Atom& a, const Substitution& theta);
DimAtom apply_substitution(const DimAtom& d, const Substitution& theta);
Pattern apply_substitution(const Pattern& p, const Substitution& theta);

/// Throws data_error if an order list repeats an event or uses a
/// non-positive dimension. declared_dims widens the valid dimension range
/// beyond the dimensions this particular sequence populates.
EventIndex build_event_index(const RelationalSequence& s, int declared_dims = 0);

/// Prebuilt per-sequence matching context (event index plus ground atoms
/// bucketed by predicate). Holds a pointer into the sequence, which must
/// outlive it.
struct IndexedSequence {
    const RelationalSequence* seq = nullptr;
    EventIndex index;
    std::map<std::pair<std::string, size_t>, std::vector<const Atom*>> buckets;
};

IndexedSequence index_sequence(const RelationalSequence& s, int declared_dims = 0);

/// True iff an injective (Object Identity) substitution grounds p such
/// that every non-dimensional atom lands in s.fluents ∪ s.statics and
/// every dimensional atom holds positionally. Throws data_error when a
/// dimensional atom references a dimension outside [1, declared_dims].
bool subsumes_sequence(const Pattern& p, const RelationalSequence& s, const EventIndex& idx);
bool subsumes_sequence(const Pattern& p, const IndexedSequence& is);

/// θ_OI-subsumption between patterns: exists injective θ with pθ ⊆ q.
bool oi_subsumes_pattern(const Pattern& p, const Pattern& q);

/// Mutual θ_OI-subsumption; the equivalence the miner prunes with.
bool oi_equivalent(const Pattern& p, const Pattern& q);

/// Distinct variable names in first-occurrence order (atoms, then dims).
std::vector<std::string> pattern_variables(const Pattern& p);

/// Distinct constant names occurring anywhere in the pattern.
std::vector<std::string> pattern_constants(const Pattern& p);

}  // namespace lynx
