#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgems/mlp.hpp"

namespace cgems::explain {

using learn::Matrix;
using learn::Vector;

struct FeatureWeight {
    std::string name;
    double weight = 0;
};

struct Explanation {
    std::string instance_id;
    std::vector<FeatureWeight> weights;  // model feature order
    double intercept = 0;                // surrogate value at x
    double r2 = 0;                       // weighted, on the perturbation sample
    double probability = 0;              // model output at x
    std::size_t n_samples = 0;
    double kernel_width = 0;
    std::uint64_t seed = 0;
    bool ridge_fallback = false;

    /// Largest |weight| first; ties keep feature order.
    std::vector<FeatureWeight> ranked() const;
};

struct LimeOptions {
    std::size_t n_samples = 5000;
    std::optional<double> kernel_width;  // default 0.75 * sqrt(d)
    std::uint64_t seed = 0;
    std::string instance_id;
};

/// Maps a batch of rows (n x d) to the explained output, one value per row.
using BatchFunction = std::function<Vector(const Matrix&)>;

double default_kernel_width(std::size_t d);

/// Gaussian perturbations around x, exponential proximity kernel, weighted least squares.
Explanation lime_explain(const BatchFunction& f, const Vector& x, const std::vector<std::string>& names,
                         const LimeOptions& options);

/// Explains the class-1 probability of `model`; x must already be standardized.
Explanation lime_explain(const learn::MlpModel& model, const Vector& x, const LimeOptions& options);

/// Weighted linear fit with intercept. Falls back to a 1e-6 ridge when the normal equations are
/// singular. Exposed for testing.
struct WeightedFit {
    double intercept = 0;
    Vector coefficients;
    double r2 = 0;
    bool ridge = false;
};
WeightedFit weighted_least_squares(const Matrix& z, const Vector& y, const Vector& w);

nlohmann::ordered_json to_json(const Explanation& e);
void write_bar_chart_svg(std::ostream& out, const Explanation& e);

}  // namespace cgems::explain
