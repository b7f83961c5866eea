#include "lynx/bayes.hpp"

#include <cmath>
#include <sstream>

#include "lynx/parallel.hpp"

namespace lynx {

BinaryVector vectorize(const RelationalSequence& s, const std::vector<MinedFeature>& features,
                       int declared_dims) {
    IndexedSequence is = index_sequence(s, declared_dims);
    BinaryVector x(features.size(), 0);
    for (size_t i = 0; i < features.size(); ++i)
        x[i] = subsumes_sequence(features[i].pattern, is) ? 1 : 0;
    return x;
}

namespace {

void vectorize_serial(const LabeledDataset& d, const std::vector<MinedFeature>& features,
                      FeatureMatrix& m) {
    for (size_t r = 0; r < d.items.size(); ++r) {
        IndexedSequence is = index_sequence(d.items[r].seq, d.dimensions);
        for (size_t c = 0; c < features.size(); ++c)
            m.bits[r * m.cols + c] = subsumes_sequence(features[c].pattern, is) ? 1 : 0;
    }
}

void vectorize_parallel(const LabeledDataset& d, const std::vector<MinedFeature>& features,
                        FeatureMatrix& m, int threads) {
    const long n = static_cast<long>(d.items.size());
#pragma omp parallel for schedule(dynamic, 2) num_threads(threads)
    for (long r = 0; r < n; ++r) {
        IndexedSequence is = index_sequence(d.items[static_cast<size_t>(r)].seq, d.dimensions);
        for (size_t c = 0; c < features.size(); ++c)
            m.bits[static_cast<size_t>(r) * m.cols + c] =
                subsumes_sequence(features[c].pattern, is) ? 1 : 0;
    }
}

}  // namespace

FeatureMatrix vectorize_dataset(const LabeledDataset& d,
                                const std::vector<MinedFeature>& features, int threads) {
    FeatureMatrix m;
    m.rows = d.items.size();
    m.cols = features.size();
    m.bits.assign(m.rows * m.cols, 0);
    int t = effective_threads(threads);
    if (t == 1)
        vectorize_serial(d, features, m);
    else
        vectorize_parallel(d, features, m, t);
    return m;
}

BayesModel fit_from_matrix(const std::vector<int>& labels,
                           const std::vector<std::string>& classes, const FeatureMatrix& m,
                           const std::vector<int>& columns, double epsilon) {
    if (labels.empty()) throw data_error("cannot fit a model on an empty training set");
    if (epsilon <= 0.0) throw data_error("smoothing epsilon must be positive");

    const size_t q = classes.size();
    const size_t d = columns.size();
    std::vector<long> n(q, 0);
    for (int lbl : labels) {
        if (lbl < 0 || static_cast<size_t>(lbl) >= q)
            throw data_error("label index out of range");
        ++n[static_cast<size_t>(lbl)];
    }
    for (size_t j = 0; j < q; ++j)
        if (n[j] == 0) throw data_error("class '" + classes[j] + "' has no training sequences");

    std::vector<long> support(d * q, 0);
    for (size_t r = 0; r < labels.size(); ++r) {
        size_t j = static_cast<size_t>(labels[r]);
        for (size_t i = 0; i < d; ++i)
            if (m.at(r, static_cast<size_t>(columns[i]))) ++support[i * q + j];
    }

    BayesModel model;
    model.classes = classes;
    model.epsilon = epsilon;
    model.priors.resize(q);
    model.p.resize(d * q);
    model.alpha.resize(d * q);
    model.beta0.assign(q, 0.0);

    const double total = static_cast<double>(labels.size());
    for (size_t j = 0; j < q; ++j)
        model.priors[j] = static_cast<double>(n[j]) / total;

    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < q; ++j) {
            double pij = (static_cast<double>(support[i * q + j]) + epsilon) /
                         (static_cast<double>(n[j]) + 2.0 * epsilon);
            model.p[i * q + j] = pij;
            model.alpha[i * q + j] = std::log(pij / (1.0 - pij));
        }
    }
    for (size_t j = 0; j < q; ++j) {
        double acc = 0.0;
        for (size_t i = 0; i < d; ++i) acc += std::log(1.0 - model.p[i * q + j]);
        model.beta0[j] = acc + std::log(model.priors[j]);
    }
    return model;
}

BayesModel fit(const LabeledDataset& d, const std::vector<MinedFeature>& features,
               double epsilon, int threads) {
    FeatureMatrix m = vectorize_dataset(d, features, threads);
    std::vector<int> labels;
    labels.reserve(d.items.size());
    for (const auto& item : d.items) labels.push_back(d.class_index(item.label));
    std::vector<int> columns(features.size());
    for (size_t i = 0; i < columns.size(); ++i) columns[i] = static_cast<int>(i);
    return fit_from_matrix(labels, d.classes, m, columns, epsilon);
}

double discriminant(const BayesModel& model, const BinaryVector& x, int class_index) {
    if (static_cast<int>(x.size()) != model.d())
        throw data_error("feature vector length does not match the model dimension");
    if (class_index < 0 || class_index >= model.q())
        throw data_error("class index out of range");
    const size_t q = model.classes.size();
    double g = model.beta0[static_cast<size_t>(class_index)];
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i]) g += model.alpha[i * q + static_cast<size_t>(class_index)];
    return g;
}

namespace {

// Shared tie rule: larger discriminant, then larger prior, then class order.
int argmax_with_ties(const std::vector<double>& g, const std::vector<double>& priors) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(g.size()); ++j) {
        if (g[static_cast<size_t>(j)] > g[static_cast<size_t>(best)] ||
            (g[static_cast<size_t>(j)] == g[static_cast<size_t>(best)] &&
             priors[static_cast<size_t>(j)] > priors[static_cast<size_t>(best)]))
            best = j;
    }
    return best;
}

}  // namespace

int predict_index(const BayesModel& model, const BinaryVector& x) {
    std::vector<double> g(static_cast<size_t>(model.q()));
    for (int j = 0; j < model.q(); ++j) g[static_cast<size_t>(j)] = discriminant(model, x, j);
    return argmax_with_ties(g, model.priors);
}

std::string predict(const BayesModel& model, const BinaryVector& x) {
    return model.classes[static_cast<size_t>(predict_index(model, x))];
}

long error_count_from_matrix(const std::vector<int>& labels,
                             const std::vector<std::string>& classes, const FeatureMatrix& m,
                             const std::vector<int>& columns, double epsilon) {
    BayesModel model = fit_from_matrix(labels, classes, m, columns, epsilon);
    const size_t q = classes.size();
    long errors = 0;
    std::vector<double> g(q);
    for (size_t r = 0; r < labels.size(); ++r) {
        for (size_t j = 0; j < q; ++j) g[j] = model.beta0[j];
        for (size_t i = 0; i < columns.size(); ++i) {
            if (m.at(r, static_cast<size_t>(columns[i])))
                for (size_t j = 0; j < q; ++j) g[j] += model.alpha[i * q + j];
        }
        if (argmax_with_ties(g, model.priors) != labels[r]) ++errors;
    }
    return errors;
}

long error_count(const LabeledDataset& d, const std::vector<MinedFeature>& subset,
                 double epsilon, int threads) {
    if (d.items.empty()) throw data_error("cannot evaluate on an empty dataset");
    FeatureMatrix m = vectorize_dataset(d, subset, threads);
    std::vector<int> labels;
    labels.reserve(d.items.size());
    for (const auto& item : d.items) labels.push_back(d.class_index(item.label));
    std::vector<int> columns(subset.size());
    for (size_t i = 0; i < columns.size(); ++i) columns[i] = static_cast<int>(i);
    return error_count_from_matrix(labels, d.classes, m, columns, epsilon);
}

// ---------------------------------------------------------------------------
// Model record
// ---------------------------------------------------------------------------

std::string serialize_model(const BayesModel& model) {
    std::string out;
    out += "classes " + std::to_string(model.q());
    for (const std::string& c : model.classes) out += " " + c;
    out += "\npriors";
    for (double v : model.priors) out += " " + format_double(v);
    out += "\nepsilon " + format_double(model.epsilon);
    out += "\np " + std::to_string(model.d()) + "\n";
    const size_t q = model.classes.size();
    for (int i = 0; i < model.d(); ++i) {
        for (size_t j = 0; j < q; ++j)
            out += (j ? " " : "") + format_double(model.p[static_cast<size_t>(i) * q + j]);
        out += "\n";
    }
    return out;
}

BayesModel parse_model_record(const std::vector<std::string>& lines, size_t& pos) {
    auto next_line = [&]() -> std::istringstream {
        while (pos < lines.size()) {
            const std::string& l = lines[pos];
            bool empty = l.find_first_not_of(" \t\r") == std::string::npos;
            if (!empty) return std::istringstream(lines[pos++]);
            ++pos;
        }
        throw data_error("truncated model record");
    };

    BayesModel model;
    std::string kw;
    {
        auto in = next_line();
        int q = 0;
        in >> kw >> q;
        if (kw != "classes" || q < 1) throw data_error("malformed model record: " + kw);
        model.classes.resize(static_cast<size_t>(q));
        for (auto& c : model.classes)
            if (!(in >> c)) throw data_error("malformed class list in model record");
    }
    {
        auto in = next_line();
        in >> kw;
        if (kw != "priors") throw data_error("malformed model record: expected priors");
        model.priors.resize(model.classes.size());
        for (double& v : model.priors)
            if (!(in >> v)) throw data_error("malformed priors in model record");
    }
    {
        auto in = next_line();
        in >> kw >> model.epsilon;
        if (kw != "epsilon") throw data_error("malformed model record: expected epsilon");
    }
    int d = 0;
    {
        auto in = next_line();
        in >> kw >> d;
        if (kw != "p" || d < 0) throw data_error("malformed model record: expected p matrix");
    }
    const size_t q = model.classes.size();
    model.p.resize(static_cast<size_t>(d) * q);
    for (int i = 0; i < d; ++i) {
        auto in = next_line();
        for (size_t j = 0; j < q; ++j)
            if (!(in >> model.p[static_cast<size_t>(i) * q + j]))
                throw data_error("malformed p matrix row in model record");
    }

    // Rebuild the derived weights from the stored values.
    model.alpha.resize(model.p.size());
    for (size_t k = 0; k < model.p.size(); ++k)
        model.alpha[k] = std::log(model.p[k] / (1.0 - model.p[k]));
    model.beta0.assign(q, 0.0);
    for (size_t j = 0; j < q; ++j) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += std::log(1.0 - model.p[static_cast<size_t>(i) * q + j]);
        model.beta0[j] = acc + std::log(model.priors[j]);
    }
    return model;
}

}  // namespace lynx
