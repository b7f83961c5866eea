#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lynx/feature.hpp"
#include "lynx/logic.hpp"

namespace lynx {

/// A parsed dataset: sequences with class labels, the label set in
/// first-appearance order, and the number of ordering dimensions.
struct LabeledDataset {
    struct Item {
        RelationalSequence seq;
        std::string label;

        friend bool operator==(const Item&, const Item&) = default;
    };
    std::vector<Item> items;
    std::vector<std::string> classes;
    int dimensions = 0;

    size_t size() const { return items.size(); }
    int class_index(const std::string& label) const;
    std::vector<long> class_counts() const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// The background declarations steering the miner. The reserved type name
/// "event" marks a predicate's first argument as the event slot (making
/// the predicate a fluent); it is only legal in the first position.
struct LanguageBias {
    int maxsize = 5;
    double minfreq = 0.1;
    bool minfreq_absolute = false;  // interpret minfreq as an absolute count
    std::map<std::string, std::vector<std::string>> types;
    std::map<std::string, std::vector<char>> modes;  // '+' input, '-' output, '#' constant
    std::vector<Pattern> negconstraints;
    std::vector<Pattern> posconstraints;
    std::vector<std::vector<std::string>> atmostone_groups;
    std::optional<std::vector<std::string>> key_predicates;

    bool is_fluent(const std::string& predicate) const;
};

LabeledDataset parse_dataset(std::istream& in);
LabeledDataset parse_dataset(const std::string& text);
LabeledDataset parse_dataset_file(const std::string& path);

LanguageBias parse_background(std::istream& in);
LanguageBias parse_background(const std::string& text);
LanguageBias parse_background_file(const std::string& path);

std::string serialize_dataset(const LabeledDataset& d);
std::string serialize_background(const LanguageBias& b);

/// One record per feature: the pattern as a comma-joined atom list with
/// dimensional atoms rendered next(d,X,Y), after(d,X,Y), nstep(d,n,X,Y),
/// then freq= / supp_<class>= / conf_<class>= fields.
std::string serialize_patterns(const std::vector<MinedFeature>& features);
std::vector<MinedFeature> parse_patterns(std::istream& in);
std::vector<MinedFeature> parse_patterns(const std::string& text);
std::vector<MinedFeature> parse_patterns_file(const std::string& path);

std::string serialize_pattern(const Pattern& p);
/// Parses a comma-joined atom list ("true" denotes the empty pattern).
Pattern parse_pattern_text(const std::string& text);

/// Shortest-round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace lynx
