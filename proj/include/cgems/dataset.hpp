#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cgems/dynamic_runner.hpp"
#include "cgems/similarity.hpp"
#include "cgems/source_model.hpp"
#include "cgems/static_metrics.hpp"

namespace cgems::data {

inline constexpr std::size_t kFeatureCount = 30;

// Model features in canonical column order.
enum class Feature : std::size_t {
    code_coverage,
    maintainability_index,
    compiling,
    functionality,
    edits,
    sequence_ratio,
    cc_number,
    loc,
    rouge1_precision,
    rouge1_recall,
    rouge1_f1,
    rouge2_precision,
    rouge2_recall,
    rouge2_f1,
    rougeL_precision,
    rougeL_recall,
    rougeL_f1,
    lloc,
    sloc,
    comments,
    c_pct_l,
    c_pct_s,
    cm_pct_l,
    difficulty,
    effort,
    bugs,
    execution_time,
    cosine,
    soft_cosine,
    bleu,
};

const std::array<std::string, kFeatureCount>& feature_names();
std::string_view feature_name(Feature f);

/// Columns after the features; none of them is a model input.
const std::vector<std::string>& metadata_columns();

/// Full CSV header: "Program", the 30 features, then the metadata columns.
std::vector<std::string> csv_header();

struct CorpusEntry {
    std::string id;
    std::filesystem::path generated_path;
    std::optional<std::filesystem::path> reference_path;
    std::optional<std::filesystem::path> corrected_path;
    int functionality = 0;  // 2 yes, 1 partial, 0 no
    std::optional<bool> comments_valid;
    std::optional<int> corrected_functionality;  // defaults to 2 for a corrected version
    std::optional<bool> corrected_comments_valid;
    std::optional<std::filesystem::path> stdin_path;
    std::string nl_description;
};

/// Paths in the manifest resolve against `base_dir`. Throws ParseError / DomainError.
std::vector<CorpusEntry> parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
std::vector<CorpusEntry> load_manifest(const std::filesystem::path& path);

struct FeatureRecord {
    std::string program;
    std::array<double, kFeatureCount> features{};
    std::array<bool, kFeatureCount> incomplete{};  // cell was imputed as 0
    char cc_grade = 'A';
    double programming_time = 0;
    int compilation_errors = 0;
    bool cc_module_level = false;
    bool canned_stdin = false;
    std::optional<int> label;

    double& operator[](Feature f) { return features[static_cast<std::size_t>(f)]; }
    double operator[](Feature f) const { return features[static_cast<std::size_t>(f)]; }
    void mark_incomplete(Feature f) {
        features[static_cast<std::size_t>(f)] = 0;
        incomplete[static_cast<std::size_t>(f)] = true;
    }
    bool operator==(const FeatureRecord&) const = default;
};

struct VersionStatus {
    bool compiling = false;
    int functionality = 0;
    bool comments_valid = false;
};

struct LabelInputs {
    VersionStatus generated;
    int edits = 0;
    std::optional<VersionStatus> corrected;
};

/// Class 1 iff the generated code compiles, is at least partially functional and has valid
/// comments, or it is at most 3 edits away from a corrected version that meets all three.
int assign_label(const LabelInputs& in);

struct EntryError {
    std::string id;
    std::string message;
};

struct CollectResult {
    std::vector<FeatureRecord> records;  // manifest order, failed entries omitted
    std::vector<EntryError> errors;
};

struct CollectOptions {
    source::LanguageProfile profile = source::default_profile();
    std::optional<runner::RunnerConfig> runner;  // absent: dynamic features marked incomplete
    unsigned jobs = 1;
};

CollectResult collect(const std::vector<CorpusEntry>& manifest, const CollectOptions& options);

/// One entry, throws on unreadable generated source.
FeatureRecord collect_entry(const CorpusEntry& entry, const CollectOptions& options);

void write_csv(std::ostream& out, const std::vector<FeatureRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<FeatureRecord>& records);
/// Throws ParseError naming the row and column on malformed input.
std::vector<FeatureRecord> read_csv(std::istream& in);
std::vector<FeatureRecord> read_csv(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_number(double v);

nlohmann::ordered_json static_report_json(const metrics::StaticReport& report);
nlohmann::ordered_json similarity_report_json(const sim::SimilarityReport& report);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cgems::data
