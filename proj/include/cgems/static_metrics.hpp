#pragma once

#include <string>
#include <vector>

#include "cgems/source_model.hpp"

namespace cgems::metrics {

// Every physical line lands in exactly one of sloc / blank / single_comments / multi.
struct RawMetrics {
    int loc = 0;
    int lloc = 0;
    int sloc = 0;
    int comments = 0;         // comment tokens, inline ones included
    int single_comments = 0;  // comment-only lines and one-line lone strings
    int multi = 0;            // lines of lone multi-line strings (docstrings)
    int blank = 0;
    double c_pct_l = 0;
    double c_pct_s = 0;
    double cm_pct_l = 0;
};

RawMetrics raw_metrics(const source::TokenStream& stream,
                       const source::LanguageProfile& profile = source::default_profile());

struct BlockComplexity {
    std::string name;
    source::BlockRole role;
    int start_line;
    int cc;
};

struct CyclomaticResult {
    std::vector<BlockComplexity> blocks;
    int module_cc = 1;            // 1 + decisions outside every block
    double aggregate = 1;         // mean over blocks, or module_cc when there are none
    bool module_level = false;    // aggregate fell back to module_cc
    int total = 0;                // sum of block cc plus module-level decision points
    char grade = 'A';
};

CyclomaticResult cyclomatic(const source::TokenStream& stream, const source::BlockTree& blocks,
                            const source::LanguageProfile& profile = source::default_profile());

/// 1-5 A, 6-10 B, 11-20 C, 21-30 D, 31-40 E, above 40 F. Fractional means use the same bands.
char grade(double cc);

struct HalsteadMetrics {
    int n1 = 0;  // distinct operators
    int n2 = 0;  // distinct operands
    int N1 = 0;  // total operators
    int N2 = 0;  // total operands
    int vocabulary = 0;
    int length = 0;
    double volume = 0;
    double difficulty = 0;
    double effort = 0;
    double time = 0;  // seconds
    double bugs = 0;
};

HalsteadMetrics halstead(const source::TokenStream& stream,
                         const source::LanguageProfile& profile = source::default_profile());

/// Fills the derived fields from the four base counts.
HalsteadMetrics halstead_from_counts(int n1, int n2, int N1, int N2);

double maintainability_index(const RawMetrics& raw, const HalsteadMetrics& hal, const CyclomaticResult& cc);

struct StaticReport {
    RawMetrics raw;
    CyclomaticResult cyclomatic;
    HalsteadMetrics halstead;
    double mi = 100;
    std::string lexical_error;    // empty when the source tokenized cleanly
    std::string structure_error;  // cc falls back to module level when set
};

/// Runs the whole static suite on one source text.
StaticReport analyze_source(std::string_view text,
                            const source::LanguageProfile& profile = source::default_profile());

}  // namespace cgems::metrics
