#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lynx/feature.hpp"
#include "lynx/format.hpp"

namespace lynx {

/// x_i = 1 iff pattern i subsumes the sequence.
using BinaryVector = std::vector<uint8_t>;

/// Naive Bayes over binary pattern features, kept in log space.
/// p[i*q() + j] = Prob(x_i = 1 | class j), strictly inside (0, 1) thanks to
/// add-epsilon smoothing. alpha/beta0 are the derived linear weights:
/// alpha_ij = ln(p_ij / (1 - p_ij)), beta0_j = sum_i ln(1 - p_ij) + ln prior_j.
struct BayesModel {
    std::vector<std::string> classes;
    std::vector<double> priors;
    double epsilon = 1.0;
    std::vector<double> p;      // d x Q, row-major
    std::vector<double> alpha;  // d x Q, row-major
    std::vector<double> beta0;  // Q

    int q() const { return static_cast<int>(classes.size()); }
    int d() const { return classes.empty() ? 0 : static_cast<int>(p.size() / classes.size()); }
    double p_at(int i, int j) const { return p[static_cast<size_t>(i) * classes.size() +
                                               static_cast<size_t>(j)]; }
};

/// Row-major m x d bit matrix of per-sequence feature indicators.
struct FeatureMatrix {
    size_t rows = 0, cols = 0;
    std::vector<uint8_t> bits;

    uint8_t at(size_t r, size_t c) const { return bits[r * cols + c]; }
};

BinaryVector vectorize(const RelationalSequence& s, const std::vector<MinedFeature>& features,
                       int declared_dims = 0);

/// Vectorize every sequence. threads == 1 is the serial reference path.
FeatureMatrix vectorize_dataset(const LabeledDataset& d,
                                const std::vector<MinedFeature>& features, int threads = 1);

/// p_ij = (support_ij + eps) / (n_j + 2 eps), priors n_j / m. Throws
/// data_error when a class has no training sequences.
BayesModel fit(const LabeledDataset& d, const std::vector<MinedFeature>& features,
               double epsilon = 1.0, int threads = 1);

/// Same estimator, computed from a prebuilt bit matrix restricted to
/// `columns` (the selected features, in order).
BayesModel fit_from_matrix(const std::vector<int>& labels,
                           const std::vector<std::string>& classes, const FeatureMatrix& m,
                           const std::vector<int>& columns, double epsilon);

/// Linear-form discriminant g_j(x) = beta0_j + sum_i x_i alpha_ij.
double discriminant(const BayesModel& model, const BinaryVector& x, int class_index);

/// Argmax over discriminants; ties go to the larger prior, then to class
/// declaration order.
int predict_index(const BayesModel& model, const BinaryVector& x);
std::string predict(const BayesModel& model, const BinaryVector& x);

/// Resubstitution error: fit on d restricted to `subset`, count training
/// misclassifications.
long error_count(const LabeledDataset& d, const std::vector<MinedFeature>& subset,
                 double epsilon = 1.0, int threads = 1);

long error_count_from_matrix(const std::vector<int>& labels,
                             const std::vector<std::string>& classes, const FeatureMatrix& m,
                             const std::vector<int>& columns, double epsilon);

/// Text record of classes, priors, epsilon and the p matrix, to full
/// precision; reloading reproduces identical predictions.
std::string serialize_model(const BayesModel& model);
BayesModel parse_model_record(const std::vector<std::string>& lines, size_t& pos);

}  // namespace lynx
