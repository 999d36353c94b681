#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cgems::sim {

/// Whitespace split, as str.split() with no argument.
std::vector<std::string> split_words(std::string_view text);

/// Physical lines without their terminators, as str.splitlines().
std::vector<std::string> split_lines(std::string_view text);

/// UTF-8 text to code points; invalid bytes map to U+FFFD.
std::u32string decode_utf8(std::string_view text);

/// 2M/T over characters. Both empty gives 1.
double sequence_ratio(std::string_view a, std::string_view b);

/// Line-level diff; insert n = n edits, delete m = m, replace m->n = max(m, n).
int edit_count(std::string_view generated, std::string_view corrected);

/// Sentence BLEU x100: uniform weights up to order min(4, |hyp|, |ref|), brevity penalty, no smoothing.
double bleu(std::string_view hypothesis, std::string_view reference);

struct RougeScore {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    bool operator==(const RougeScore&) const = default;
};

enum class RougeVariant { unigram, bigram, lcs };

RougeScore rouge(std::string_view hypothesis, std::string_view reference, RougeVariant variant);

/// Token-level longest common subsequence length.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct DocVectors {
    std::vector<std::string> vocabulary;  // first-appearance order over a then b
    std::vector<double> a;
    std::vector<double> b;
};

DocVectors doc_vectors(std::string_view a, std::string_view b);

/// Angle between the word-count vectors, degrees in [0, 90]; an all-zero vector gives 90.
double cosine_angle(std::string_view a, std::string_view b);

int levenshtein(std::u32string_view a, std::u32string_view b);

/// s_ij = max(0, 1 - lev/maxlen)^2, entries below 0.5 zeroed, unit diagonal.
double token_similarity(std::string_view a, std::string_view b);

/// Row-major |V| x |V| similarity matrix for a vocabulary.
std::vector<double> similarity_matrix(const std::vector<std::string>& vocabulary);

/// Soft-cosine similarity value (before arccos) for explicit vectors and matrix; 0 for zero vectors.
double soft_cosine(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& s);

double soft_cosine_angle(std::string_view a, std::string_view b);

/// Converts a similarity value to degrees after clamping it to [0, 1].
double similarity_to_degrees(double k);

struct SimilarityReport {
    double sequence_ratio = 1;
    int edits = 0;
    bool has_edits = false;
    double bleu = 0;
    RougeScore rouge1, rouge2, rougeL;
    double cosine_deg = 90;
    double soft_cosine_deg = 90;
};

/// Similarity features of generated code against a reference. Sequence ratio and edits
/// compare against `corrected` when given; otherwise they take the no-correction values (1, 0).
SimilarityReport compare(std::string_view generated, std::string_view reference, const std::string* corrected);

}  // namespace cgems::sim
