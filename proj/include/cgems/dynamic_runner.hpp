#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cgems/errors.hpp"

namespace cgems::runner {

enum class Mode { check, run, coverage };

std::string_view to_string(Mode mode);

inline constexpr std::string_view kSourcePlaceholder = "{source}";
inline constexpr std::string_view kConfigDirPlaceholder = "{config_dir}";

struct RunnerConfig {
    // argv templates; each contains kSourcePlaceholder exactly once
    std::vector<std::string> check;
    std::vector<std::string> run;
    std::vector<std::string> coverage;
    std::filesystem::path working_directory;  // empty: fresh temp directory per invocation
    std::chrono::milliseconds timeout{10000};
    std::size_t max_output_bytes = 1 << 20;
    std::vector<std::string> env_allowlist{"PATH", "LANG", "LC_ALL", "HOME", "TMPDIR", "PYTHONHASHSEED"};
    std::filesystem::path stdin_file;  // empty: empty stdin

    const std::vector<std::string>& command(Mode mode) const;
    /// Throws RunnerError when a template or limit is malformed.
    void validate() const;
};

/// Reference configuration for the bundled python runner script found in `runner_dir`.
RunnerConfig python_runner_config(const std::filesystem::path& runner_dir);

/// Relative script paths in templates resolve against {config_dir}, the file's directory.
RunnerConfig load_runner_config(const std::filesystem::path& path);

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::int64_t wall_time_us = 0;
    std::string stdout_text;  // truncated at max_output_bytes
    std::string stderr_text;
    bool stdout_truncated = false;
};

/// Spawns argv with a restricted environment and a timeout; never goes through a shell.
/// Throws RunnerError if the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const RunnerConfig& cfg);

struct RunOutcome {
    Mode mode;
    bool ok = false;
    int error_count = 0;
    std::int64_t wall_time_us = 0;
    std::set<int> executed_lines;
    std::set<int> executable_lines;
    std::string diagnostics;
};

struct CompileStatus {
    int compiling = 0;
    int error_count = 0;
    std::string diagnostics;
};

CompileStatus check_compiles(const std::filesystem::path& unit, const RunnerConfig& cfg);

/// Median wall time of three runs, microseconds. Throws ExecutionError / TimeoutError.
std::int64_t measure_execution(const std::filesystem::path& unit, const RunnerConfig& cfg);

/// Statement coverage percentage; 100 when nothing is executable.
double measure_coverage(const std::filesystem::path& unit, const RunnerConfig& cfg);

/// Executed/executable line sets from the coverage protocol's JSON stdout.
RunOutcome parse_coverage_output(const std::string& stdout_text);

double coverage_percent(const RunOutcome& outcome);

}  // namespace cgems::runner
