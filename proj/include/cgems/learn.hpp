#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgems/dataset.hpp"
#include "cgems/errors.hpp"

namespace cgems::learn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-column z-score parameters (population std). Zero-variance columns map to 0.
struct Standardization {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<bool> zero_variance;

    Vector apply(const Vector& raw) const;
    Matrix apply(const Matrix& raw) const;
    /// Parameters restricted to `names`, in that order.
    Standardization subset(const std::vector<std::string>& names) const;
};

struct FeatureMatrix {
    std::vector<std::string> columns;
    Matrix rows;  // n x d
    std::vector<int> labels;
    std::vector<bool> active;
    std::optional<Standardization> standardization;

    std::size_t n() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(rows.cols()); }
    std::vector<std::size_t> active_indices() const;
    std::vector<std::string> active_columns() const;

    /// Throws DomainError on shape mismatches, non-finite cells or labels outside {0, 1}.
    void validate() const;

    /// Columns by name, in the given order; all of them active.
    FeatureMatrix select(const std::vector<std::string>& names) const;
    FeatureMatrix subset_rows(const std::vector<std::size_t>& indices) const;
    std::size_t column_index(const std::string& name) const;
};

/// The 30 model features of labelled records. Throws DomainError on an unlabelled record.
FeatureMatrix from_records(const std::vector<data::FeatureRecord>& records);

/// Requires n >= 2. The result carries its parameters in `standardization`.
FeatureMatrix standardize(const FeatureMatrix& m);

double pearson(std::span<const double> a, std::span<const double> b);

struct PrunedFeature {
    std::string name;
    std::string reason;
};

struct FeatureScore {
    std::string name;
    double f = 0;
    double p = 1;
};

struct SelectionReport {
    std::vector<std::string> columns;  // every column considered, canonical order
    Matrix correlations;               // Pearson r between those columns
    double threshold = 0.8;
    std::vector<std::string> kept;
    std::vector<PrunedFeature> pruned;
    std::vector<FeatureScore> scores;    // ANOVA over `kept`
    std::vector<std::string> selected;   // top-k of `scores`
};

/// Walks the active columns in order and drops any column whose |r| with an already kept
/// column reaches the threshold. Constant columns are dropped as well.
SelectionReport correlation_prune(const FeatureMatrix& m, double threshold = 0.8);

struct AnovaResult {
    double f = 0;
    double p = 1;
};

/// One-way ANOVA over arbitrary groups. MSW = 0 gives the largest finite F and p = 0
/// (or F = 0, p = 1 when the groups are also indistinguishable).
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

/// Survival function of the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

/// ANOVA F/p of each active column against the two label groups. Both classes must be present.
std::vector<FeatureScore> anova_f(const FeatureMatrix& m);

/// Top k by F (descending), ties by input order. k larger than the list is a DomainError.
std::vector<std::string> select_k_best(const std::vector<FeatureScore>& scores, std::size_t k);

/// Appends (majority - minority) synthetic minority rows, each on the segment between a
/// minority row and one of its k nearest minority neighbours.
FeatureMatrix smote(const FeatureMatrix& m, int k_neighbors, std::uint64_t seed);

struct Split {
    FeatureMatrix train;
    FeatureMatrix test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Stratified split with exactly `train_n` training rows.
Split split(const FeatureMatrix& m, std::size_t train_n, std::uint64_t seed);

struct EvalReport {
    int tp = 0, fp = 0, fn = 0, tn = 0;
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::vector<int> predicted;
    std::vector<int> actual;

    int misclassified() const { return fp + fn; }
};

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& actual);

}  // namespace cgems::learn
