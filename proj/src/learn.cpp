#include "cgems/learn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>

#include "cgems/rng.hpp"

namespace cgems::learn {

// ---- FeatureMatrix --------------------------------------------------------

std::vector<std::size_t> FeatureMatrix::active_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < d(); ++j)
        if (active.empty() || active[j])
            out.push_back(j);
    return out;
}

std::vector<std::string> FeatureMatrix::active_columns() const {
    std::vector<std::string> out;
    for (auto j : active_indices())
        out.push_back(columns[j]);
    return out;
}

void FeatureMatrix::validate() const {
    if (columns.size() != d())
        throw DomainError("column names do not match matrix width");
    if (labels.size() != n())
        throw DomainError("label count does not match row count");
    if (!active.empty() && active.size() != d())
        throw DomainError("active mask does not match matrix width");
    if (!rows.allFinite())
        throw DomainError("feature matrix contains NaN or Inf");
    for (int y : labels)
        if (y != 0 && y != 1)
            throw DomainError("labels must be 0 or 1");
}

std::size_t FeatureMatrix::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw DomainError("unknown feature '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& names) const {
    FeatureMatrix out;
    out.columns = names;
    out.rows.resize(rows.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k)
        out.rows.col(static_cast<Eigen::Index>(k)) = rows.col(static_cast<Eigen::Index>(column_index(names[k])));
    out.labels = labels;
    out.active.assign(names.size(), true);
    if (standardization)
        out.standardization = standardization->subset(names);
    return out;
}

FeatureMatrix FeatureMatrix::subset_rows(const std::vector<std::size_t>& indices) const {
    FeatureMatrix out;
    out.columns = columns;
    out.active = active;
    out.standardization = standardization;
    out.rows.resize(static_cast<Eigen::Index>(indices.size()), rows.cols());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out.rows.row(static_cast<Eigen::Index>(k)) = rows.row(static_cast<Eigen::Index>(indices[k]));
        out.labels.push_back(labels[indices[k]]);
    }
    return out;
}

FeatureMatrix from_records(const std::vector<data::FeatureRecord>& records) {
    FeatureMatrix m;
    m.columns.assign(data::feature_names().begin(), data::feature_names().end());
    m.rows.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(data::kFeatureCount));
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].label)
            throw DomainError("record '" + records[i].program + "' has no label");
        for (std::size_t j = 0; j < data::kFeatureCount; ++j)
            m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = records[i].features[j];
        m.labels.push_back(*records[i].label);
    }
    m.active.assign(data::kFeatureCount, true);
    m.validate();
    return m;
}

// ---- standardization ------------------------------------------------------

Vector Standardization::apply(const Vector& raw) const {
    if (static_cast<std::size_t>(raw.size()) != mean.size())
        throw DomainError("row width " + std::to_string(raw.size()) + " does not match " +
                          std::to_string(mean.size()) + " standardized columns");
    Vector out(raw.size());
    for (Eigen::Index j = 0; j < raw.size(); ++j) {
        auto k = static_cast<std::size_t>(j);
        out(j) = zero_variance[k] ? 0.0 : (raw(j) - mean[k]) / std[k];
    }
    return out;
}

Matrix Standardization::apply(const Matrix& raw) const {
    Matrix out(raw.rows(), raw.cols());
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        out.row(i) = apply(Vector(raw.row(i).transpose())).transpose();
    return out;
}

Standardization Standardization::subset(const std::vector<std::string>& names) const {
    Standardization s;
    for (const auto& name : names) {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end())
            throw DomainError("no standardization parameters for '" + name + "'");
        auto k = static_cast<std::size_t>(it - columns.begin());
        s.columns.push_back(name);
        s.mean.push_back(mean[k]);
        s.std.push_back(std[k]);
        s.zero_variance.push_back(zero_variance[k]);
    }
    return s;
}

FeatureMatrix standardize(const FeatureMatrix& m) {
    if (m.n() < 2)
        throw DomainError("standardization needs at least two rows");
    Standardization s;
    s.columns = m.columns;
    const double n = static_cast<double>(m.n());
    for (Eigen::Index j = 0; j < m.rows.cols(); ++j) {
        double mu = m.rows.col(j).sum() / n;
        double var = (m.rows.col(j).array() - mu).square().sum() / n;
        double sd = std::sqrt(var);
        bool zero = !(sd > 1e-12 * std::max(1.0, std::abs(mu)));
        s.mean.push_back(mu);
        s.std.push_back(zero ? 0.0 : sd);
        s.zero_variance.push_back(zero);
    }
    FeatureMatrix out = m;
    out.rows = s.apply(m.rows);
    out.standardization = std::move(s);
    return out;
}

// ---- correlation pruning --------------------------------------------------

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size() || n == 0)
        throw DomainError("pearson needs two equal-length non-empty series");
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0 || sbb <= 0)
        return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

std::vector<double> column(const FeatureMatrix& m, std::size_t j) {
    std::vector<double> out(m.n());
    for (std::size_t i = 0; i < m.n(); ++i)
        out[i] = m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

bool constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

std::string fixed(double v, int digits) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

}  // namespace

SelectionReport correlation_prune(const FeatureMatrix& m, double threshold) {
    SelectionReport rep;
    rep.threshold = threshold;
    const auto idx = m.active_indices();
    std::vector<std::vector<double>> cols;
    for (auto j : idx) {
        rep.columns.push_back(m.columns[j]);
        cols.push_back(column(m, j));
    }
    const auto d = static_cast<Eigen::Index>(idx.size());
    rep.correlations = Matrix::Identity(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = a + 1; b < d; ++b) {
            double r = pearson(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
            rep.correlations(a, b) = r;
            rep.correlations(b, a) = r;
        }

    std::vector<std::size_t> kept;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (constant(cols[a])) {
            rep.pruned.push_back({rep.columns[a], "zero variance"});
            continue;
        }
        std::optional<std::size_t> clash;
        for (auto k : kept)
            if (std::abs(rep.correlations(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k))) >= threshold) {
                clash = k;
                break;
            }
        if (clash) {
            double r = rep.correlations(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(*clash));
            rep.pruned.push_back({rep.columns[a], "|r| = " + fixed(std::abs(r), 4) + " with " + rep.columns[*clash]});
        } else {
            kept.push_back(a);
            rep.kept.push_back(rep.columns[a]);
        }
    }
    return rep;
}

// ---- ANOVA ----------------------------------------------------------------

double f_survival(double f, double d1, double d2) {
    if (!(f > 0))
        return 1.0;
    if (!std::isfinite(f) || f >= std::numeric_limits<double>::max())
        return 0.0;
    boost::math::fisher_f_distribution<double> dist(d1, d2);
    return std::clamp(boost::math::cdf(boost::math::complement(dist, f)), 0.0, 1.0);
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    std::size_t n = 0;
    double total = 0;
    for (const auto& g : groups) {
        if (g.empty())
            throw DomainError("ANOVA group is empty");
        n += g.size();
        total += std::accumulate(g.begin(), g.end(), 0.0);
    }
    const std::size_t k = groups.size();
    if (k < 2 || n <= k)
        throw DomainError("ANOVA needs at least two groups and more samples than groups");
    const double grand = total / static_cast<double>(n);
    double ssb = 0, ssw = 0;
    for (const auto& g : groups) {
        double mg = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (mg - grand) * (mg - grand);
        for (double x : g)
            ssw += (x - mg) * (x - mg);
    }
    const double dfb = static_cast<double>(k - 1);
    const double dfw = static_cast<double>(n - k);
    const double msb = ssb / dfb;
    const double msw = ssw / dfw;
    AnovaResult r;
    if (msw <= 0) {
        if (msb <= 0)
            return {0.0, 1.0};
        return {std::numeric_limits<double>::max(), 0.0};
    }
    r.f = msb / msw;
    r.p = f_survival(r.f, dfb, dfw);
    return r;
}

std::vector<FeatureScore> anova_f(const FeatureMatrix& m) {
    std::vector<FeatureScore> out;
    for (auto j : m.active_indices()) {
        std::vector<std::vector<double>> groups(2);
        for (std::size_t i = 0; i < m.n(); ++i)
            groups[static_cast<std::size_t>(m.labels[i])].push_back(
                m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        if (groups[0].empty() || groups[1].empty())
            throw DomainError("ANOVA needs both classes present");
        auto r = anova_oneway(groups);
        out.push_back({m.columns[j], r.f, r.p});
    }
    return out;
}

std::vector<std::string> select_k_best(const std::vector<FeatureScore>& scores, std::size_t k) {
    if (k > scores.size())
        throw DomainError("k = " + std::to_string(k) + " exceeds the " + std::to_string(scores.size()) +
                          " available features");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a].f > scores[b].f; });
    order.resize(k);
    std::sort(order.begin(), order.end());  // keep canonical column order in the output
    std::vector<std::string> out;
    for (auto i : order)
        out.push_back(scores[i].name);
    return out;
}

// ---- SMOTE ----------------------------------------------------------------

FeatureMatrix smote(const FeatureMatrix& m, int k_neighbors, std::uint64_t seed) {
    m.validate();
    if (k_neighbors < 1)
        throw DomainError("k_neighbors must be positive");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < m.n(); ++i)
        by_class[m.labels[i]].push_back(i);
    if (by_class[0].size() == by_class[1].size())
        return m;
    const int minority_label = by_class[0].size() < by_class[1].size() ? 0 : 1;
    const auto& minority = by_class[minority_label];
    const auto& majority = by_class[1 - minority_label];
    if (minority.size() < 2)
        throw DomainError("SMOTE needs at least two minority samples");
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_neighbors), minority.size() - 1);

    std::vector<std::vector<std::size_t>> neighbors(minority.size());
    for (std::size_t a = 0; a < minority.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t b = 0; b < minority.size(); ++b) {
            if (a == b)
                continue;
            double d2 = (m.rows.row(static_cast<Eigen::Index>(minority[a])) -
                         m.rows.row(static_cast<Eigen::Index>(minority[b])))
                            .squaredNorm();
            dist.emplace_back(d2, b);
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t t = 0; t < k; ++t)
            neighbors[a].push_back(minority[dist[t].second]);
    }

    const std::size_t needed = majority.size() - minority.size();
    FeatureMatrix out = m;
    out.rows.conservativeResize(static_cast<Eigen::Index>(m.n() + needed), Eigen::NoChange);
    Rng rng(seed);
    for (std::size_t s = 0; s < needed; ++s) {
        std::size_t a = rng.below(minority.size());
        std::size_t nb = neighbors[a][rng.below(k)];
        double u = rng.uniform();
        auto x = m.rows.row(static_cast<Eigen::Index>(minority[a]));
        auto y = m.rows.row(static_cast<Eigen::Index>(nb));
        out.rows.row(static_cast<Eigen::Index>(m.n() + s)) = x + u * (y - x);
        out.labels.push_back(minority_label);
    }
    return out;
}

// ---- split ----------------------------------------------------------------

Split split(const FeatureMatrix& m, std::size_t train_n, std::uint64_t seed) {
    const std::size_t n = m.n();
    if (train_n == 0 || train_n >= n)
        throw DomainError("train_n must be between 1 and n - 1 (n = " + std::to_string(n) + ")");
    Rng rng(seed);
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i)
        by_class[m.labels[i]].push_back(i);
    for (auto& idx : by_class)
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.below(i)]);

    // Largest-remainder apportionment of train_n over the classes.
    std::size_t quota[2];
    double frac[2];
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
        double exact = static_cast<double>(train_n) * static_cast<double>(by_class[c].size()) / static_cast<double>(n);
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        frac[c] = exact - std::floor(exact);
        assigned += quota[c];
    }
    while (assigned < train_n) {
        int c = frac[0] >= frac[1] ? 0 : 1;
        if (quota[c] >= by_class[c].size())
            c = 1 - c;
        ++quota[c];
        frac[c] = -1;
        ++assigned;
    }
    // Keep every class with two or more rows on both sides when the sizes allow it.
    for (int c = 0; c < 2; ++c) {
        int o = 1 - c;
        if (by_class[c].size() >= 2 && quota[c] == 0 && quota[o] > 1) {
            ++quota[c];
            --quota[o];
        }
        if (by_class[c].size() >= 2 && quota[c] == by_class[c].size() && quota[o] < by_class[o].size()) {
            --quota[c];
            ++quota[o];
        }
    }

    Split s;
    for (int c = 0; c < 2; ++c) {
        s.train_indices.insert(s.train_indices.end(), by_class[c].begin(),
                               by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
        s.test_indices.insert(s.test_indices.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]),
                              by_class[c].end());
    }
    std::sort(s.train_indices.begin(), s.train_indices.end());
    std::sort(s.test_indices.begin(), s.test_indices.end());
    s.train = m.subset_rows(s.train_indices);
    s.test = m.subset_rows(s.test_indices);
    return s;
}

// ---- evaluation -----------------------------------------------------------

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.size() != actual.size())
        throw DomainError("predicted and actual label lists differ in length");
    EvalReport r;
    r.predicted = predicted;
    r.actual = actual;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        int p = predicted[i], a = actual[i];
        if ((p != 0 && p != 1) || (a != 0 && a != 1))
            throw DomainError("labels must be 0 or 1");
        if (p == 1 && a == 1) ++r.tp;
        else if (p == 1 && a == 0) ++r.fp;
        else if (p == 0 && a == 1) ++r.fn;
        else ++r.tn;
    }
    const double n = static_cast<double>(predicted.size());
    r.accuracy = n > 0 ? (r.tp + r.tn) / n : 0.0;
    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

}  // namespace cgems::learn
