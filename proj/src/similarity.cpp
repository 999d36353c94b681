#include "cgems/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

#include "cgems/sequence_matcher.hpp"

namespace cgems::sim {

namespace {

bool is_py_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || (c >= 0x1c && c <= 0x1f); }

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& words, std::size_t n) {
    std::map<std::vector<std::string>, int> out;
    if (words.size() < n)
        return out;
    for (std::size_t i = 0; i + n <= words.size(); ++i)
        ++out[std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                       words.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return out;
}

int clipped_overlap(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, std::size_t n) {
    auto h = ngram_counts(hyp, n);
    auto r = ngram_counts(ref, n);
    int overlap = 0;
    for (const auto& [gram, count] : h) {
        auto it = r.find(gram);
        if (it != r.end())
            overlap += std::min(count, it->second);
    }
    return overlap;
}

RougeScore make_score(double overlap, double hyp_units, double ref_units) {
    RougeScore s;
    s.precision = hyp_units > 0 ? 100.0 * overlap / hyp_units : 0.0;
    s.recall = ref_units > 0 ? 100.0 * overlap / ref_units : 0.0;
    s.f1 = (s.precision + s.recall) > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_py_space(static_cast<unsigned char>(text[i])))
            ++i;
        std::size_t start = i;
        while (i < text.size() && !is_py_space(static_cast<unsigned char>(text[i])))
            ++i;
        if (i > start)
            out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n' || text[i] == '\r') {
            out.emplace_back(text.substr(start, i - start));
            if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            start = i + 1;
        }
    }
    if (start < text.size())
        out.emplace_back(text.substr(start));
    return out;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        bool ok = len > 0 && i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k)
            ok = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
        for (std::size_t k = 1; k < len; ++k)
            cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
        out.push_back(cp);
        i += len;
    }
    return out;
}

double sequence_ratio(std::string_view a, std::string_view b) {
    auto ua = decode_utf8(a);
    auto ub = decode_utf8(b);
    SequenceMatcher<char32_t> m(std::vector<char32_t>(ua.begin(), ua.end()),
                                std::vector<char32_t>(ub.begin(), ub.end()));
    return m.ratio();
}

int edit_count(std::string_view generated, std::string_view corrected) {
    SequenceMatcher<std::string> m(split_lines(generated), split_lines(corrected));
    int edits = 0;
    for (const auto& op : m.opcodes()) {
        auto la = static_cast<int>(op.a_end - op.a_begin);
        auto lb = static_cast<int>(op.b_end - op.b_begin);
        switch (op.tag) {
        case OpTag::equal: break;
        case OpTag::insert: edits += lb; break;
        case OpTag::remove: edits += la; break;
        case OpTag::replace: edits += std::max(la, lb); break;
        }
    }
    return edits;
}

double bleu(std::string_view hypothesis, std::string_view reference) {
    auto hyp = split_words(hypothesis);
    auto ref = split_words(reference);
    if (hyp.empty() || ref.empty())
        return 0.0;
    const std::size_t order = std::min<std::size_t>({4, hyp.size(), ref.size()});
    double log_sum = 0;
    for (std::size_t n = 1; n <= order; ++n) {
        int overlap = clipped_overlap(hyp, ref, n);
        if (overlap == 0)
            return 0.0;
        double total = static_cast<double>(hyp.size() - n + 1);
        log_sum += std::log(overlap / total) / static_cast<double>(order);
    }
    double c = static_cast<double>(hyp.size());
    double r = static_cast<double>(ref.size());
    double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return std::clamp(100.0 * bp * std::exp(log_sum), 0.0, 100.0);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = up;
        }
    }
    return row[b.size()];
}

RougeScore rouge(std::string_view hypothesis, std::string_view reference, RougeVariant variant) {
    auto hyp = split_words(hypothesis);
    auto ref = split_words(reference);
    if (variant == RougeVariant::lcs)
        return make_score(static_cast<double>(lcs_length(hyp, ref)), static_cast<double>(hyp.size()),
                          static_cast<double>(ref.size()));
    std::size_t n = variant == RougeVariant::unigram ? 1 : 2;
    auto units = [n](const std::vector<std::string>& w) { return w.size() >= n ? static_cast<double>(w.size() - n + 1) : 0.0; };
    return make_score(clipped_overlap(hyp, ref, n), units(hyp), units(ref));
}

DocVectors doc_vectors(std::string_view a, std::string_view b) {
    DocVectors v;
    std::unordered_map<std::string, std::size_t> index;
    auto add = [&](const std::vector<std::string>& words, bool first) {
        for (const auto& w : words) {
            auto [it, inserted] = index.emplace(w, v.vocabulary.size());
            if (inserted) {
                v.vocabulary.push_back(w);
                v.a.push_back(0);
                v.b.push_back(0);
            }
            (first ? v.a : v.b)[it->second] += 1;
        }
    };
    add(split_words(a), true);
    add(split_words(b), false);
    return v;
}

double similarity_to_degrees(double k) {
    if (std::isnan(k))
        return 90.0;
    // acos is ill-conditioned at 1; a few ulps of rounding would otherwise show up as ~1e-6 degrees.
    if (k >= 1.0 - 8 * std::numeric_limits<double>::epsilon())
        return 0.0;
    return std::acos(std::clamp(k, 0.0, 1.0)) * 180.0 / std::numbers::pi;
}

double cosine_angle(std::string_view a, std::string_view b) {
    auto v = doc_vectors(a, b);
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < v.vocabulary.size(); ++i) {
        dot += v.a[i] * v.b[i];
        na += v.a[i] * v.a[i];
        nb += v.b[i] * v.b[i];
    }
    if (na == 0 || nb == 0)
        return 90.0;
    return similarity_to_degrees(dot / (std::sqrt(na) * std::sqrt(nb)));
}

int levenshtein(std::u32string_view a, std::u32string_view b) {
    std::vector<int> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        int diag = row[0];
        row[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            int up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double token_similarity(std::string_view a, std::string_view b) {
    if (a == b)
        return 1.0;
    auto ua = decode_utf8(a);
    auto ub = decode_utf8(b);
    std::size_t longest = std::max(ua.size(), ub.size());
    if (longest == 0)
        return 1.0;
    double s = std::max(0.0, 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest));
    s *= s;
    return s < 0.5 ? 0.0 : s;
}

std::vector<double> similarity_matrix(const std::vector<std::string>& vocabulary) {
    const std::size_t n = vocabulary.size();
    std::vector<double> s(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = token_similarity(vocabulary[i], vocabulary[j]);
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    return s;
}

double soft_cosine(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& s) {
    const std::size_t n = a.size();
    auto form = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == 0)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                acc += x[i] * s[i * n + j] * y[j];
        }
        return acc;
    };
    double aa = form(a, a);
    double bb = form(b, b);
    if (aa <= 0 || bb <= 0)
        return 0.0;
    return form(a, b) / (std::sqrt(aa) * std::sqrt(bb));
}

double soft_cosine_angle(std::string_view a, std::string_view b) {
    auto v = doc_vectors(a, b);
    bool a_zero = std::all_of(v.a.begin(), v.a.end(), [](double x) { return x == 0; });
    bool b_zero = std::all_of(v.b.begin(), v.b.end(), [](double x) { return x == 0; });
    if (a_zero || b_zero)
        return 90.0;
    return similarity_to_degrees(soft_cosine(v.a, v.b, similarity_matrix(v.vocabulary)));
}

SimilarityReport compare(std::string_view generated, std::string_view reference, const std::string* corrected) {
    SimilarityReport r;
    if (corrected) {
        r.sequence_ratio = sequence_ratio(generated, *corrected);
        r.edits = edit_count(generated, *corrected);
        r.has_edits = true;
    }
    r.bleu = bleu(generated, reference);
    r.rouge1 = rouge(generated, reference, RougeVariant::unigram);
    r.rouge2 = rouge(generated, reference, RougeVariant::bigram);
    r.rougeL = rouge(generated, reference, RougeVariant::lcs);
    r.cosine_deg = cosine_angle(generated, reference);
    r.soft_cosine_deg = soft_cosine_angle(generated, reference);
    return r;
}

}  // namespace cgems::sim
