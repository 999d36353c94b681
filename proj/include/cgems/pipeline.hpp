#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgems/dataset.hpp"
#include "cgems/explain.hpp"
#include "cgems/learn.hpp"
#include "cgems/mlp.hpp"

namespace cgems::pipeline {

std::string version();

struct TrainOptions {
    std::optional<std::size_t> features = 8;  // nullopt keeps every feature, no pruning
    std::vector<std::string> exclude;          // features never offered to selection
    double threshold = 0.8;
    int smote_neighbors = 5;
    bool smote_after_split = false;
    std::optional<std::size_t> train_n;  // default: 71/84 of the rows being split
    learn::MlpConfig mlp;
    std::uint64_t seed = 42;

    nlohmann::ordered_json to_json() const;
    /// Keys present in `j` override `base`; unknown keys are a DomainError.
    static TrainOptions from_json(const nlohmann::json& j, TrainOptions base);
};

/// 71 of 84 scaled to n and rounded, clamped to [1, n - 1].
std::size_t default_train_n(std::size_t n);

/// `m` without the named columns; an unknown name is a DomainError.
learn::FeatureMatrix without(const learn::FeatureMatrix& m, const std::vector<std::string>& exclude);

struct Selection {
    learn::SelectionReport report;
    std::vector<std::string> selected;
    bool pruned = true;
};

/// Correlation pruning followed by ANOVA top-k on a standardized matrix. With `k` empty the
/// report keeps every column and only the ANOVA scores are filled in.
Selection select_features(const learn::FeatureMatrix& standardized, std::optional<std::size_t> k,
                          double threshold);

struct TrainOutcome {
    learn::MlpModel model;
    Selection selection;
    learn::TrainTrace trace;
    learn::EvalReport train_eval;
    learn::EvalReport test_eval;
    std::size_t labelled = 0;
    std::size_t unlabelled_skipped = 0;
    std::size_t synthetic = 0;
    std::vector<std::string> train_programs;
    std::vector<std::string> test_programs;  // synthetic rows are named "smote-<i>"
};

/// prune -> ANOVA select-k -> SMOTE -> stratified split -> MLP -> evaluate. Deterministic in
/// (records, options).
TrainOutcome train(const std::vector<data::FeatureRecord>& records, const TrainOptions& options);

/// Model input in raw feature units, looked up by the model's feature names.
learn::Vector model_row(const learn::MlpModel& model, const data::FeatureRecord& record);

nlohmann::ordered_json selection_json(const Selection& s);
nlohmann::ordered_json eval_json(const learn::EvalReport& e);
nlohmann::ordered_json train_report_json(const TrainOutcome& t, const TrainOptions& options);

/// Seed, config hash and tool versions for a command invocation.
nlohmann::ordered_json run_info(const std::string& command, std::uint64_t seed, const std::string& config_hash,
                                const std::vector<std::string>& argv);

/// FNV-1a of the canonical (key-sorted) dump.
std::string json_hash(const nlohmann::json& j);

}  // namespace cgems::pipeline
