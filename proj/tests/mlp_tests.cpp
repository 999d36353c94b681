#include <gtest/gtest.h>

#include <cmath>

#include "cgems/mlp.hpp"
#include "cgems/rng.hpp"
#include "support.hpp"

using namespace cgems;
using namespace cgems::learn;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            x(i, j) = rng.normal();
    return x;
}

std::vector<int> alternating(std::size_t n) {
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = static_cast<int>(i % 2);
    return y;
}

}  // namespace

TEST(mlp, layer_sizes_follow_config) {
    MlpConfig cfg;
    EXPECT_EQ(MlpModel(15, cfg, 1).layer_sizes(), (std::vector<int>{15, 14, 12, 2}));
    EXPECT_EQ(MlpModel(8, cfg, 1).layer_sizes(), (std::vector<int>{8, 14, 12, 2}));
    EXPECT_EQ(MlpModel(15, cfg, 1).parameter_count(), 15u * 14 + 14 + 14 * 12 + 12 + 12 * 2 + 2);
}

TEST(mlp, initialisation_ranges) {
    MlpModel m(15, MlpConfig{}, 7);
    const double he = std::sqrt(6.0 / 15), he2 = std::sqrt(6.0 / 14), glorot = std::sqrt(6.0 / (12 + 2));
    EXPECT_LE(m.layers[0].weights.cwiseAbs().maxCoeff(), he);
    EXPECT_LE(m.layers[1].weights.cwiseAbs().maxCoeff(), he2);
    EXPECT_LE(m.layers[2].weights.cwiseAbs().maxCoeff(), glorot);
    for (const auto& l : m.layers)
        EXPECT_EQ(l.bias.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(MlpModel(15, MlpConfig{}, 7).parameters(), m.parameters());
    EXPECT_NE(MlpModel(15, MlpConfig{}, 8).parameters(), m.parameters());
}

TEST(mlp, softmax_rows_sum_to_one) {
    Matrix logits(3, 2);
    logits << 1000, -1000, 0, 0, -3.5, 2.25;
    Matrix p = softmax(logits);
    for (Eigen::Index i = 0; i < 3; ++i)
        EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(p(1, 0), 0.5);
    EXPECT_TRUE(p.allFinite());

    MlpModel m(6, MlpConfig{}, 3);
    Matrix probs = m.forward(gaussian(50, 6, 4) * 20.0);
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        EXPECT_NEAR(probs.row(i).sum(), 1.0, 1e-9);
}

TEST(mlp, gradient_matches_central_differences) {
    MlpModel m(15, MlpConfig{}, 11);
    Matrix x = gaussian(5, 15, 12);
    auto y = std::vector<int>{0, 1, 1, 0, 1};
    auto grads = m.gradients(x, y);
    std::vector<double> analytic;
    for (const auto& g : grads) {
        for (Eigen::Index r = 0; r < g.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < g.weights.cols(); ++c)
                analytic.push_back(g.weights(r, c));
        for (Eigen::Index r = 0; r < g.bias.size(); ++r)
            analytic.push_back(g.bias(r));
    }
    auto theta = m.parameters();
    ASSERT_EQ(analytic.size(), theta.size());
    const double h = 1e-6;
    double worst = 0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        auto plus = theta, minus = theta;
        plus[i] += h;
        minus[i] -= h;
        MlpModel a = m, b = m;
        a.set_parameters(plus);
        b.set_parameters(minus);
        double numeric = (a.loss(x, y) - b.loss(x, y)) / (2 * h);
        double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
    }
    EXPECT_LT(worst, 1e-5);
}

TEST(mlp, training_reduces_loss_and_is_deterministic) {
    Matrix x = gaussian(60, 5, 21);
    std::vector<int> y(60);
    for (Eigen::Index i = 0; i < 60; ++i)
        y[static_cast<std::size_t>(i)] = x(i, 0) + 0.5 * x(i, 1) > 0 ? 1 : 0;
    MlpConfig cfg;
    cfg.epochs = 300;
    cfg.learning_rate = 1e-2;
    auto r = train_mlp(x, y, cfg, 5);
    ASSERT_EQ(r.trace.loss.size(), 300u);
    EXPECT_LT(r.trace.loss.back(), r.trace.loss.front() * 0.5);
    EXPECT_NEAR(r.trace.loss.front(), MlpModel(5, cfg, 5).loss(x, y), 1e-12);
    auto again = train_mlp(x, y, cfg, 5);
    EXPECT_EQ(r.model.parameters(), again.model.parameters());
    EXPECT_EQ(r.trace.loss, again.trace.loss);
}

TEST(mlp, separable_data_reaches_high_accuracy) {
    Matrix x = gaussian(84, 15, 31);
    std::vector<int> y(84);
    for (Eigen::Index i = 0; i < 84; ++i) {
        y[static_cast<std::size_t>(i)] = i < 42 ? 1 : 0;
        x(i, 3) += i < 42 ? 2.5 : -2.5;
    }
    auto r = train_mlp(x, y, MlpConfig{}, 1);
    auto pred = r.model.predict_labels(x);
    int correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        correct += pred[i] == y[i];
    EXPECT_GE(correct, 80);  // >= 95%
}

TEST(mlp, width_mismatch_and_bad_labels) {
    MlpModel m(4, MlpConfig{}, 1);
    EXPECT_THROW(m.predict(Vector::Zero(5)), DomainError);
    EXPECT_THROW(m.loss(Matrix::Zero(2, 4), {0, 2}), DomainError);
    MlpConfig bad;
    bad.hidden = {0};
    EXPECT_THROW(MlpModel(4, bad, 1), DomainError);
}

TEST(mlp, non_finite_loss_reports_epoch) {
    // One Adam step moves every weight by about the learning rate, so the second forward
    // pass overflows.
    Matrix x = gaussian(10, 3, 2);
    MlpConfig cfg;
    cfg.learning_rate = 1e300;
    cfg.epochs = 50;
    try {
        train_mlp(x, alternating(10), cfg, 1);
        FAIL() << "expected TrainingError";
    } catch (const TrainingError& e) {
        EXPECT_GE(e.epoch(), 1);
        EXPECT_LE(e.epoch(), 50);
    }
}

TEST(mlp, json_round_trip_preserves_predictions_and_hash) {
    MlpConfig cfg;
    cfg.epochs = 20;
    Matrix x = gaussian(20, 4, 5);
    auto r = train_mlp(x, alternating(20), cfg, 9);
    r.model.features = {"a", "b", "c", "d"};
    Standardization s;
    s.columns = r.model.features;
    s.mean = {1, 2, 3, 4};
    s.std = {1, 2, 0.5, 1};
    s.zero_variance = {false, false, false, true};
    r.model.standardization = s;
    r.model.pipeline = {{"threshold", 0.8}, {"k", 8}};

    cgems_test::TempDir d;
    r.model.save(d / "m.json");
    auto back = MlpModel::load(d / "m.json");
    EXPECT_EQ(back.parameters(), r.model.parameters());
    // Key order inside `pipeline` is not preserved by a reload; the content and the hash are.
    EXPECT_EQ(nlohmann::json(back.to_json()), nlohmann::json(r.model.to_json()));
    EXPECT_EQ(back.to_json()["config_hash"], r.model.to_json()["config_hash"]);
    EXPECT_EQ(back.to_json()["schema"], kModelSchema);
    Vector raw(4);
    raw << 0.3, -1, 2, 9;
    EXPECT_EQ(back.predict_raw(raw).probabilities, r.model.predict_raw(raw).probabilities);
}

TEST(mlp, load_rejects_bad_files) {
    cgems_test::TempDir d;
    cgems_test::write_file(d / "x.json", "{not json");
    EXPECT_THROW(MlpModel::load(d / "x.json"), DomainError);
    auto j = MlpModel(3, MlpConfig{}, 1).to_json();
    j["schema"] = "cgems.model/99";
    cgems_test::write_file(d / "y.json", j.dump());
    EXPECT_THROW(MlpModel::load(d / "y.json"), DomainError);
    EXPECT_THROW(MlpModel::load(d / "missing.json"), DomainError);
}

TEST(fnv1a, reference_values) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}
