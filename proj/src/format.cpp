#include "lynx/format.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace lynx {

int LabeledDataset::class_index(const std::string& label) const {
    for (size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == label) return static_cast<int>(i);
    return -1;
}

std::vector<long> LabeledDataset::class_counts() const {
    std::vector<long> n(classes.size(), 0);
    for (const Item& it : items) {
        int c = class_index(it.label);
        if (c >= 0) ++n[static_cast<size_t>(c)];
    }
    return n;
}

bool LanguageBias::is_fluent(const std::string& predicate) const {
    auto it = types.find(predicate);
    return it != types.end() && !it->second.empty() && it->second.front() == "event";
}

std::string format_double(double v) {
    char buf[48];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

namespace {

struct Tok {
    enum Kind { Ident, Number, Punct, End } kind = End;
    std::string text;
    int col = 0;
};

class Lexer {
public:
    Lexer(const std::string& s, int line) : s_(s), line_(line) {}

    Tok peek() {
        size_t save = pos_;
        Tok t = next();
        pos_ = save;
        return t;
    }

    Tok next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        Tok t;
        t.col = static_cast<int>(pos_) + 1;
        if (pos_ >= s_.size()) return t;
        char c = s_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t b = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            t.kind = Tok::Ident;
            t.text = s_.substr(b, pos_ - b);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t b = pos_;
            while (pos_ < s_.size()) {
                char d = s_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    ++pos_;
                } else if (d == '.' && pos_ + 1 < s_.size() &&
                           std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
                    ++pos_;
                } else {
                    break;
                }
            }
            t.kind = Tok::Number;
            t.text = s_.substr(b, pos_ - b);
            return t;
        }
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
        ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& msg, int col) const {
        throw parse_error(msg, line_, col);
    }

    Tok expect_punct(const std::string& p) {
        Tok t = next();
        if (t.kind != Tok::Punct || t.text != p)
            fail("expected '" + p + "', got '" + t.text + "'", t.col);
        return t;
    }

    Tok expect_ident() {
        Tok t = next();
        if (t.kind != Tok::Ident) fail("expected identifier, got '" + t.text + "'", t.col);
        return t;
    }

    Tok expect_symbol() {  // identifier or number
        Tok t = next();
        if (t.kind != Tok::Ident && t.kind != Tok::Number)
            fail("expected symbol, got '" + t.text + "'", t.col);
        return t;
    }

    bool at_end() { return peek().kind == Tok::End; }
    int line() const { return line_; }

private:
    const std::string& s_;
    int line_;
    size_t pos_ = 0;
};

bool is_variable_name(const std::string& n) {
    return !n.empty() && (std::isupper(static_cast<unsigned char>(n[0])) || n[0] == '_');
}

Term term_from_token(const Tok& t) {
    if (t.kind == Tok::Ident && is_variable_name(t.text)) return Term::variable(t.text);
    return Term::constant(t.text);
}

int parse_int_tok(Lexer& lx, const char* what) {
    Tok t = lx.next();
    if (t.kind != Tok::Number || t.text.find('.') != std::string::npos)
        lx.fail(std::string("expected ") + what + ", got '" + t.text + "'", t.col);
    return std::atoi(t.text.c_str());
}

const char* kDimNames[] = {"next", "after", "nstep"};

bool is_dim_predicate(const std::string& name) {
    return name == "next" || name == "after" || name == "nstep";
}

// Parses one atom (regular or dimensional) starting at the predicate name.
void parse_one_atom(Lexer& lx, Pattern& out) {
    Tok name = lx.expect_ident();
    if (is_dim_predicate(name.text)) {
        DimAtom d;
        d.op = name.text == "next" ? DimOp::Next
                                   : (name.text == "after" ? DimOp::After : DimOp::NStep);
        lx.expect_punct("(");
        d.dim = parse_int_tok(lx, "dimension");
        if (d.dim < 1) lx.fail("dimension must be positive", name.col);
        lx.expect_punct(",");
        if (d.op == DimOp::NStep) {
            d.steps = parse_int_tok(lx, "step count");
            if (d.steps < 1) lx.fail("step count must be positive", name.col);
            lx.expect_punct(",");
        }
        d.from = term_from_token(lx.expect_symbol());
        lx.expect_punct(",");
        d.to = term_from_token(lx.expect_symbol());
        lx.expect_punct(")");
        out.dims.push_back(std::move(d));
        return;
    }
    Atom a;
    a.predicate = name.text;
    lx.expect_punct("(");
    while (true) {
        a.args.push_back(term_from_token(lx.expect_symbol()));
        Tok t = lx.next();
        if (t.kind == Tok::Punct && t.text == ",") continue;
        if (t.kind == Tok::Punct && t.text == ")") break;
        lx.fail("expected ',' or ')' in atom argument list, got '" + t.text + "'", t.col);
    }
    out.atoms.push_back(std::move(a));
}

// Comma-separated atom list; "true" stands for the empty conjunction.
Pattern parse_atom_list(Lexer& lx) {
    Pattern p;
    Tok first = lx.peek();
    if (first.kind == Tok::Ident && first.text == "true") {
        lx.next();
        return p;
    }
    while (true) {
        parse_one_atom(lx, p);
        Tok t = lx.peek();
        if (t.kind == Tok::Punct && t.text == ",") {
            lx.next();
            continue;
        }
        break;
    }
    return p;
}

std::vector<std::string> split_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t cut = line.find('%');
        if (cut != std::string::npos) line.erase(cut);
        lines.push_back(line);
    }
    return lines;
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset parsing
// ---------------------------------------------------------------------------

namespace {

struct PendingSeq {
    std::string id;
    std::string label;
    int line = 0;
    std::map<int, std::vector<std::string>> orders;
    std::map<int, int> order_lines;
    std::vector<std::pair<Atom, int>> atoms;  // atom + line of occurrence
};

struct PredicateInfo {
    size_t arity = 0;
    bool fluent = false;
};

void flush_sequence(PendingSeq& ps, LabeledDataset& ds,
                    std::map<std::string, PredicateInfo>& registry,
                    std::set<std::string>& seen_ids) {
    if (!seen_ids.insert(ps.id).second)
        throw parse_error("duplicate sequence id '" + ps.id + "'", ps.line, 1);

    std::set<std::string> events;
    for (const auto& [dim, evs] : ps.orders) {
        std::set<std::string> per_dim;
        for (const std::string& e : evs) {
            if (!per_dim.insert(e).second)
                throw parse_error("duplicate event '" + e + "' in order for dimension " +
                                      std::to_string(dim),
                                  ps.order_lines[dim], 1);
            events.insert(e);
        }
    }

    RelationalSequence seq;
    seq.id = ps.id;
    seq.orders = ps.orders;

    for (auto& [atom, line] : ps.atoms) {
        for (const Term& t : atom.args)
            if (t.is_variable())
                throw parse_error("variable '" + t.name + "' in dataset atom", line, 1);

        bool first_is_event = !atom.args.empty() && events.count(atom.args.front().name) > 0;
        // Events may only appear as the first argument of a fluent.
        for (size_t i = first_is_event ? 1 : 0; i < atom.args.size(); ++i)
            if (events.count(atom.args[i].name))
                throw parse_error("event constant '" + atom.args[i].name +
                                      "' may only appear as the first argument of a fluent",
                                  line, 1);

        auto it = registry.find(atom.predicate);
        if (it == registry.end()) {
            registry[atom.predicate] = {atom.args.size(), first_is_event};
        } else {
            if (it->second.arity != atom.args.size())
                throw parse_error("predicate '" + atom.predicate + "' used with arity " +
                                      std::to_string(atom.args.size()) + " after arity " +
                                      std::to_string(it->second.arity),
                                  line, 1);
            if (it->second.fluent && !first_is_event) {
                std::string arg = atom.args.empty() ? "?" : atom.args.front().name;
                throw parse_error("unknown event '" + arg + "' in fluent atom of predicate '" +
                                      atom.predicate + "'",
                                  line, 1);
            }
            if (!it->second.fluent && first_is_event)
                throw parse_error("predicate '" + atom.predicate +
                                      "' used as both static and fluent",
                                  line, 1);
        }

        if (first_is_event)
            seq.fluents.push_back(std::move(atom));
        else
            seq.statics.push_back(std::move(atom));
    }

    if (!ps.orders.empty()) ds.dimensions = std::max(ds.dimensions, ps.orders.rbegin()->first);
    if (ds.class_index(ps.label) < 0) ds.classes.push_back(ps.label);
    ds.items.push_back({std::move(seq), ps.label});
}

}  // namespace

LabeledDataset parse_dataset(std::istream& in) {
    LabeledDataset ds;
    std::map<std::string, PredicateInfo> registry;
    std::set<std::string> seen_ids;
    PendingSeq cur;
    bool open = false;

    std::vector<std::string> lines = split_lines(in);
    for (size_t li = 0; li < lines.size(); ++li) {
        const std::string& raw = lines[li];
        if (blank(raw)) continue;
        int line_no = static_cast<int>(li) + 1;
        Lexer lx(raw, line_no);
        Tok head = lx.peek();

        if (head.kind == Tok::Ident && head.text == "sequence") {
            lx.next();
            if (open) flush_sequence(cur, ds, registry, seen_ids);
            cur = PendingSeq{};
            cur.line = line_no;
            cur.id = lx.expect_symbol().text;
            Tok kw = lx.expect_ident();
            if (kw.text != "class") lx.fail("expected 'class', got '" + kw.text + "'", kw.col);
            cur.label = lx.expect_symbol().text;
            if (!lx.at_end()) lx.fail("trailing input after sequence header", lx.peek().col);
            open = true;
            continue;
        }

        if (head.kind == Tok::Ident && head.text == "order") {
            if (!open) lx.fail("'order' outside a sequence block", head.col);
            lx.next();
            int dim = parse_int_tok(lx, "dimension");
            if (dim < 1) lx.fail("dimension must be positive", head.col);
            lx.expect_punct(":");
            std::vector<std::string> evs;
            while (!lx.at_end()) evs.push_back(lx.expect_symbol().text);
            if (cur.orders.count(dim))
                lx.fail("duplicate order declaration for dimension " + std::to_string(dim),
                        head.col);
            cur.orders[dim] = std::move(evs);
            cur.order_lines[dim] = line_no;
            continue;
        }

        // A line of '.'-terminated ground atoms.
        if (!open) lx.fail("atom outside a sequence block", head.col);
        while (!lx.at_end()) {
            Pattern tmp;
            parse_one_atom(lx, tmp);
            if (!tmp.dims.empty())
                lx.fail("dimensional atoms are derived from order declarations", head.col);
            lx.expect_punct(".");
            cur.atoms.emplace_back(std::move(tmp.atoms.front()), line_no);
        }
    }
    if (open) flush_sequence(cur, ds, registry, seen_ids);
    return ds;
}

LabeledDataset parse_dataset(const std::string& text) {
    std::istringstream in(text);
    return parse_dataset(in);
}

LabeledDataset parse_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open dataset file: " + path);
    return parse_dataset(in);
}

// ---------------------------------------------------------------------------
// Background parsing
// ---------------------------------------------------------------------------

LanguageBias parse_background(std::istream& in) {
    LanguageBias bias;
    std::map<std::string, int> type_lines, mode_lines;

    std::vector<std::string> lines = split_lines(in);
    for (size_t li = 0; li < lines.size(); ++li) {
        const std::string& raw = lines[li];
        if (blank(raw)) continue;
        int line_no = static_cast<int>(li) + 1;
        Lexer lx(raw, line_no);
        while (!lx.at_end()) {
            Tok head = lx.expect_ident();
            lx.expect_punct("(");

            if (head.text == "maxsize") {
                bias.maxsize = parse_int_tok(lx, "maxsize value");
                if (bias.maxsize < 1) lx.fail("maxsize must be positive", head.col);
            } else if (head.text == "minfreq") {
                Tok t = lx.next();
                if (t.kind != Tok::Number) lx.fail("expected minfreq value", t.col);
                bias.minfreq = std::strtod(t.text.c_str(), nullptr);
                if (bias.minfreq <= 0) lx.fail("minfreq must be positive", t.col);
            } else if (head.text == "type") {
                Tok pred = lx.expect_ident();
                if (is_dim_predicate(pred.text))
                    lx.fail("'" + pred.text + "' is a reserved dimensional operator", pred.col);
                lx.expect_punct("(");
                std::vector<std::string> ts;
                while (true) {
                    ts.push_back(lx.expect_ident().text);
                    Tok t = lx.next();
                    if (t.kind == Tok::Punct && t.text == ",") continue;
                    if (t.kind == Tok::Punct && t.text == ")") break;
                    lx.fail("expected ',' or ')' in type declaration", t.col);
                }
                for (size_t i = 1; i < ts.size(); ++i)
                    if (ts[i] == "event")
                        lx.fail("type 'event' is only legal in the first argument position",
                                head.col);
                auto it = bias.types.find(pred.text);
                if (it != bias.types.end() && it->second != ts)
                    lx.fail("conflicting type redeclaration for predicate '" + pred.text + "'",
                            pred.col);
                bias.types[pred.text] = std::move(ts);
                type_lines[pred.text] = line_no;
            } else if (head.text == "mode") {
                Tok pred = lx.expect_ident();
                lx.expect_punct("(");
                std::vector<char> ms;
                while (true) {
                    Tok t = lx.next();
                    if (t.kind != Tok::Punct ||
                        (t.text != "+" && t.text != "-" && t.text != "#"))
                        lx.fail("mode symbols are '+', '-' and '#'", t.col);
                    ms.push_back(t.text[0]);
                    Tok sep = lx.next();
                    if (sep.kind == Tok::Punct && sep.text == ",") continue;
                    if (sep.kind == Tok::Punct && sep.text == ")") break;
                    lx.fail("expected ',' or ')' in mode declaration", sep.col);
                }
                auto it = bias.modes.find(pred.text);
                if (it != bias.modes.end() && it->second != ms)
                    lx.fail("conflicting mode redeclaration for predicate '" + pred.text + "'",
                            pred.col);
                bias.modes[pred.text] = std::move(ms);
                mode_lines[pred.text] = line_no;
            } else if (head.text == "negconstraint" || head.text == "posconstraint") {
                lx.expect_punct("[");
                Pattern p = parse_atom_list(lx);
                lx.expect_punct("]");
                if (head.text == "negconstraint")
                    bias.negconstraints.push_back(std::move(p));
                else
                    bias.posconstraints.push_back(std::move(p));
            } else if (head.text == "atmostone" || head.text == "key") {
                lx.expect_punct("[");
                std::vector<std::string> preds;
                while (true) {
                    preds.push_back(lx.expect_ident().text);
                    Tok t = lx.next();
                    if (t.kind == Tok::Punct && t.text == ",") continue;
                    if (t.kind == Tok::Punct && t.text == "]") break;
                    lx.fail("expected ',' or ']' in predicate list", t.col);
                }
                if (head.text == "atmostone")
                    bias.atmostone_groups.push_back(std::move(preds));
                else
                    bias.key_predicates = std::move(preds);
            } else {
                lx.fail("unknown directive '" + head.text + "'", head.col);
            }

            lx.expect_punct(")");
            lx.expect_punct(".");
        }
    }

    for (const auto& [pred, ms] : bias.modes) {
        auto it = bias.types.find(pred);
        if (it == bias.types.end())
            throw parse_error("mode declared for '" + pred + "' without a type declaration",
                              mode_lines[pred], 1);
        if (it->second.size() != ms.size())
            throw parse_error("arity mismatch between type and mode declarations for '" +
                                  pred + "'",
                              mode_lines[pred], 1);
    }
    return bias;
}

LanguageBias parse_background(const std::string& text) {
    std::istringstream in(text);
    return parse_background(in);
}

LanguageBias parse_background_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open background file: " + path);
    return parse_background(in);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

static void append_atom(std::string& out, const Atom& a) {
    out += a.predicate;
    out += '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        out += a.args[i].name;
    }
    out += ')';
}

static void append_dim(std::string& out, const DimAtom& d) {
    out += kDimNames[static_cast<int>(d.op)];
    out += '(';
    out += std::to_string(d.dim);
    out += ',';
    if (d.op == DimOp::NStep) {
        out += std::to_string(d.steps);
        out += ',';
    }
    out += d.from.name;
    out += ',';
    out += d.to.name;
    out += ')';
}

std::string serialize_pattern(const Pattern& p) {
    if (p.is_empty()) return "true";
    std::string out;
    bool first = true;
    for (const Atom& a : p.atoms) {
        if (!first) out += ", ";
        append_atom(out, a);
        first = false;
    }
    for (const DimAtom& d : p.dims) {
        if (!first) out += ", ";
        append_dim(out, d);
        first = false;
    }
    return out;
}

Pattern parse_pattern_text(const std::string& text) {
    Lexer lx(text, 1);
    Pattern p = parse_atom_list(lx);
    if (!lx.at_end()) lx.fail("trailing input after pattern", lx.peek().col);
    return p;
}

std::string serialize_dataset(const LabeledDataset& d) {
    std::string out;
    for (const auto& item : d.items) {
        out += "sequence " + item.seq.id + " class " + item.label + "\n";
        for (const auto& [dim, evs] : item.seq.orders) {
            out += "order " + std::to_string(dim) + ":";
            for (const std::string& e : evs) out += " " + e;
            out += "\n";
        }
        for (const Atom& a : item.seq.fluents) {
            append_atom(out, a);
            out += ".\n";
        }
        for (const Atom& a : item.seq.statics) {
            append_atom(out, a);
            out += ".\n";
        }
        out += "\n";
    }
    return out;
}

std::string serialize_background(const LanguageBias& b) {
    std::string out;
    out += "maxsize(" + std::to_string(b.maxsize) + ").\n";
    out += "minfreq(" + format_double(b.minfreq) + ").\n";
    for (const auto& [pred, ts] : b.types) {
        out += "type(" + pred + "(";
        for (size_t i = 0; i < ts.size(); ++i) out += std::string(i ? "," : "") + ts[i];
        out += ")).\n";
    }
    for (const auto& [pred, ms] : b.modes) {
        out += "mode(" + pred + "(";
        for (size_t i = 0; i < ms.size(); ++i)
            out += std::string(i ? "," : "") + std::string(1, ms[i]);
        out += ")).\n";
    }
    for (const Pattern& p : b.negconstraints)
        out += "negconstraint([" + serialize_pattern(p) + "]).\n";
    for (const Pattern& p : b.posconstraints)
        out += "posconstraint([" + serialize_pattern(p) + "]).\n";
    for (const auto& g : b.atmostone_groups) {
        out += "atmostone([";
        for (size_t i = 0; i < g.size(); ++i) out += std::string(i ? "," : "") + g[i];
        out += "]).\n";
    }
    if (b.key_predicates) {
        out += "key([";
        for (size_t i = 0; i < b.key_predicates->size(); ++i)
            out += std::string(i ? "," : "") + (*b.key_predicates)[i];
        out += "]).\n";
    }
    return out;
}

std::string serialize_patterns(const std::vector<MinedFeature>& features) {
    std::string out;
    for (const MinedFeature& f : features) {
        out += serialize_pattern(f.pattern);
        out += " | freq=" + std::to_string(f.freq);
        for (size_t c = 0; c < f.classes.size(); ++c)
            out += " supp_" + f.classes[c] + "=" + std::to_string(f.supports[c]);
        for (size_t c = 0; c < f.classes.size(); ++c)
            out += " conf_" + f.classes[c] + "=" + format_double(f.confidences[c]);
        out += "\n";
    }
    return out;
}

std::vector<MinedFeature> parse_patterns(std::istream& in) {
    std::vector<MinedFeature> out;
    std::vector<std::string> lines = split_lines(in);
    for (size_t li = 0; li < lines.size(); ++li) {
        const std::string& raw = lines[li];
        if (blank(raw)) continue;
        int line_no = static_cast<int>(li) + 1;
        size_t bar = raw.find('|');
        if (bar == std::string::npos)
            throw parse_error("missing '|' between pattern and statistics", line_no, 1);

        MinedFeature f;
        const std::string pattern_part = raw.substr(0, bar);
        {
            Lexer lx(pattern_part, line_no);
            f.pattern = parse_atom_list(lx);
            if (!lx.at_end()) lx.fail("trailing input after pattern", lx.peek().col);
        }

        std::istringstream fields(raw.substr(bar + 1));
        std::string kv;
        bool have_freq = false;
        std::map<std::string, long> supp;
        std::map<std::string, double> conf;
        std::vector<std::string> class_order;
        while (fields >> kv) {
            size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw parse_error("malformed field '" + kv + "'", line_no, 1);
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "freq") {
                f.freq = std::strtol(val.c_str(), nullptr, 10);
                have_freq = true;
            } else if (key.rfind("supp_", 0) == 0) {
                std::string cls = key.substr(5);
                if (!supp.count(cls) && !conf.count(cls)) class_order.push_back(cls);
                supp[cls] = std::strtol(val.c_str(), nullptr, 10);
            } else if (key.rfind("conf_", 0) == 0) {
                std::string cls = key.substr(5);
                if (!supp.count(cls) && !conf.count(cls)) class_order.push_back(cls);
                conf[cls] = std::strtod(val.c_str(), nullptr);
            } else {
                throw parse_error("unknown field '" + key + "'", line_no, 1);
            }
        }
        if (!have_freq) throw parse_error("missing freq= field", line_no, 1);
        for (const std::string& cls : class_order) {
            f.classes.push_back(cls);
            f.supports.push_back(supp.count(cls) ? supp[cls] : 0);
            f.confidences.push_back(conf.count(cls) ? conf[cls] : 0.0);
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<MinedFeature> parse_patterns(const std::string& text) {
    std::istringstream in(text);
    return parse_patterns(in);
}

std::vector<MinedFeature> parse_patterns_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open pattern file: " + path);
    return parse_patterns(in);
}

}  // namespace lynx
