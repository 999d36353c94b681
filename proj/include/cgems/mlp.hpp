#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cgems/learn.hpp"

namespace cgems::learn {

struct MlpConfig {
    std::vector<int> hidden{14, 12};
    int classes = 2;
    double learning_rate = 1e-3;
    int epochs = 1000;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    /// Throws DomainError on non-positive sizes, epochs < 0 or learning rate <= 0.
    void validate() const;
    nlohmann::ordered_json to_json() const;
    static MlpConfig from_json(const nlohmann::json& j);
};

/// Dense layer computing a = act(in * W^T + b); W is out x in.
struct Layer {
    Matrix weights;
    Vector bias;
};

struct Prediction {
    int label = 0;
    Vector probabilities;
};

struct TrainTrace {
    std::vector<double> loss;      // per epoch, before that epoch's update
    std::vector<double> accuracy;
};

class MlpModel {
public:
    MlpModel() = default;
    /// He-uniform hidden layers, Glorot-uniform output layer, zero biases.
    MlpModel(int inputs, const MlpConfig& config, std::uint64_t seed);

    std::vector<int> layer_sizes() const;
    int input_width() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }

    /// Softmax probabilities, n x classes. Rows must already be standardized.
    Matrix forward(const Matrix& x) const;
    Prediction predict(const Vector& x) const;
    std::vector<int> predict_labels(const Matrix& x) const;
    /// Applies the stored standardization before predicting.
    Prediction predict_raw(const Vector& raw) const;

    /// Mean sparse categorical cross-entropy.
    double loss(const Matrix& x, const std::vector<int>& labels) const;
    /// d(loss)/d(parameters), same shapes as `layers`.
    std::vector<Layer> gradients(const Matrix& x, const std::vector<int>& labels) const;

    std::size_t parameter_count() const;
    /// Flattened in layer order: W row-major, then b.
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& flat);

    nlohmann::ordered_json to_json() const;
    static MlpModel from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static MlpModel load(const std::filesystem::path& path);

    std::vector<Layer> layers;
    MlpConfig config;
    std::uint64_t seed = 0;
    std::vector<std::string> features;
    std::optional<Standardization> standardization;
    nlohmann::ordered_json pipeline = nlohmann::ordered_json::object();  // knobs that produced the model

private:
    void check_width(Eigen::Index cols) const;
};

struct TrainResult {
    MlpModel model;
    TrainTrace trace;
};

/// Full-batch Adam. Deterministic in (x, labels, config, seed). Throws TrainingError on a
/// non-finite loss.
TrainResult train_mlp(const Matrix& x, const std::vector<int>& labels, const MlpConfig& config, std::uint64_t seed);

/// Numerically stable row-wise softmax.
Matrix softmax(const Matrix& logits);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

inline constexpr const char* kModelSchema = "cgems.model/1";

}  // namespace cgems::learn
