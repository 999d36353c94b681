#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cgems/sequence_matcher.hpp"
#include "cgems/similarity.hpp"
#include "support.hpp"

using namespace cgems::sim;

TEST(sequence_ratio, examples) {
    EXPECT_DOUBLE_EQ(sequence_ratio("abcd", "abcd"), 1.0);
    EXPECT_DOUBLE_EQ(sequence_ratio("abcd", "bcde"), 0.75);
    EXPECT_DOUBLE_EQ(sequence_ratio("abc", "xyz"), 0.0);
    EXPECT_DOUBLE_EQ(sequence_ratio("", ""), 1.0);
    EXPECT_DOUBLE_EQ(sequence_ratio("", "abc"), 0.0);
}

TEST(sequence_ratio, popular_element_heuristic_matches_difflib) {
    // Both inputs exceed 200 elements, so difflib's autojunk pass applies.
    std::string a = std::string(150, ' ') + "x = 1\n" + std::string(100, ' ') + "y";
    std::string b = std::string(120, ' ') + "x = 2\n" + std::string(130, ' ') + "y";
    EXPECT_NEAR(sequence_ratio(a, b), 0.8793774319066148, 1e-15);
    std::string c, d;
    for (int i = 0; i < 100; ++i) {
        c += "abc";
        d += "abd";
    }
    EXPECT_NEAR(sequence_ratio(c, d), 0.006666666666666667, 1e-15);
}

TEST(sequence_ratio, counts_code_points_not_bytes) {
    EXPECT_DOUBLE_EQ(sequence_ratio("\xc3\xa9t\xc3\xa9", "\xc3\xa9t\xc3\xa9"), 1.0);
    // "été" vs "ete": only the middle character matches, T = 6.
    EXPECT_NEAR(sequence_ratio("\xc3\xa9t\xc3\xa9", "ete"), 2.0 / 6.0, 1e-15);
}

TEST(sequence_matcher, opcodes_cover_both_sequences) {
    std::string a = "qabxcd", b = "abycdf";
    SequenceMatcher<char> sm(std::vector<char>(a.begin(), a.end()), std::vector<char>(b.begin(), b.end()));
    std::size_t ia = 0, ib = 0;
    for (const auto& op : sm.opcodes()) {
        EXPECT_EQ(op.a_begin, ia);
        EXPECT_EQ(op.b_begin, ib);
        ia = op.a_end;
        ib = op.b_end;
    }
    EXPECT_EQ(ia, a.size());
    EXPECT_EQ(ib, b.size());
    EXPECT_EQ(sm.matches(), 4u);
}

TEST(edit_count, examples) {
    EXPECT_EQ(edit_count("a\nb\nc\n", "a\nb\nc\n"), 0);
    EXPECT_EQ(edit_count("a\nb\nc\n", "a\nB\nc\nd\n"), 2);
    EXPECT_EQ(edit_count("a\nb\n", "a\nb\nx\ny\nz\n"), 3);
    EXPECT_EQ(edit_count("a\nb\nc\nd\n", "a\nd\n"), 2);
    EXPECT_EQ(edit_count("a\nb\n", "x\ny\nz\n"), 3);
}

TEST(bleu, examples) {
    EXPECT_DOUBLE_EQ(bleu("def f ( x ) : return x", "def f ( x ) : return x"), 100.0);
    EXPECT_EQ(bleu("", "anything here"), 0.0);
    EXPECT_EQ(bleu("a b", ""), 0.0);
    // nltk sentence_bleu with weights (1/3, 1/3, 1/3).
    EXPECT_NEAR(bleu("the cat sat", "the cat sat down"), 71.65313105737893, 1e-9);
    EXPECT_EQ(bleu("a b c d", "e f g h"), 0.0);
}

TEST(rouge, examples) {
    auto r1 = rouge("the cat", "the cat sat", RougeVariant::unigram);
    EXPECT_NEAR(r1.precision, 100.0, 1e-9);
    EXPECT_NEAR(r1.recall, 66.6667, 1e-3);
    EXPECT_NEAR(r1.f1, 80.0, 1e-9);
    auto r2 = rouge("the cat", "the cat sat", RougeVariant::bigram);
    EXPECT_NEAR(r2.precision, 100.0, 1e-9);
    EXPECT_NEAR(r2.recall, 50.0, 1e-9);
    EXPECT_NEAR(r2.f1, 66.6667, 1e-3);
    for (auto v : {RougeVariant::unigram, RougeVariant::bigram, RougeVariant::lcs}) {
        auto same = rouge("x = f ( y )", "x = f ( y )", v);
        EXPECT_DOUBLE_EQ(same.precision, 100);
        EXPECT_DOUBLE_EQ(same.recall, 100);
        EXPECT_DOUBLE_EQ(same.f1, 100);
        auto empty = rouge("", "", v);
        EXPECT_EQ(empty, RougeScore{});
    }
}

TEST(rouge, clipped_counts) {
    auto r = rouge("the the the", "the cat", RougeVariant::unigram);
    EXPECT_NEAR(r.precision, 100.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.recall, 50.0, 1e-9);
}

TEST(rouge, lcs_matches_exhaustive_subsequence_search) {
    std::mt19937 gen(7);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
    auto is_subsequence = [](const std::vector<std::string>& s, const std::vector<std::string>& of) {
        std::size_t k = 0;
        for (const auto& w : of)
            if (k < s.size() && s[k] == w)
                ++k;
        return k == s.size();
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> a(gen() % 13), b(gen() % 13);
        for (auto& w : a) w = alphabet[gen() % alphabet.size()];
        for (auto& w : b) w = alphabet[gen() % alphabet.size()];
        std::size_t best = 0;
        for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
            std::vector<std::string> sub;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (mask & (1u << i))
                    sub.push_back(a[i]);
            if (sub.size() > best && is_subsequence(sub, b))
                best = sub.size();
        }
        ASSERT_EQ(lcs_length(a, b), best);
    }
}

TEST(rouge, f1_bounded_by_components) {
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"a b c d", "a c e"}, {"x y", "y x y"}, {"p", "q"}, {"one two three", "three two one"}};
    for (const auto& [h, r] : pairs)
        for (auto v : {RougeVariant::unigram, RougeVariant::bigram, RougeVariant::lcs}) {
            auto s = rouge(h, r, v);
            EXPECT_LE(s.f1, std::max(s.precision, s.recall) + 1e-12);
            EXPECT_GE(s.f1, 0);
        }
}

TEST(cosine, examples) {
    EXPECT_NEAR(cosine_angle("a b", "a"), 45.0, 1e-9);
    EXPECT_NEAR(cosine_angle("x y z", "x y z"), 0.0, 1e-6);
    EXPECT_DOUBLE_EQ(cosine_angle("a b", "c d"), 90.0);
    EXPECT_DOUBLE_EQ(cosine_angle("", "a"), 90.0);
}

TEST(cosine, symmetric) {
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"a b b c", "b c d"}, {"num1 * num2", "a * b"}, {"x = 1", "x = x + 1"}};
    for (const auto& [a, b] : pairs) {
        EXPECT_DOUBLE_EQ(cosine_angle(a, b), cosine_angle(b, a));
        EXPECT_NEAR(soft_cosine_angle(a, b), soft_cosine_angle(b, a), 1e-12);
    }
}

TEST(soft_cosine, identical_texts) {
    EXPECT_NEAR(soft_cosine_angle("total = price * qty", "total = price * qty"), 0.0, 1e-6);
}

TEST(soft_cosine, identity_matrix_reduces_to_cosine) {
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"a b", "a"}, {"num1 * num2", "num_1 * num_2"}, {"x x y", "y z"}};
    for (const auto& [a, b] : pairs) {
        auto v = doc_vectors(a, b);
        const std::size_t n = v.vocabulary.size();
        std::vector<double> identity(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            identity[i * n + i] = 1.0;
        EXPECT_NEAR(similarity_to_degrees(soft_cosine(v.a, v.b, identity)), cosine_angle(a, b), 1e-9);
    }
}

TEST(soft_cosine, near_identical_identifiers_reduce_the_angle) {
    // num1/num_1 and num2/num_2 are one edit apart, so the soft angle
    // drops well below the plain cosine angle, which sees only '*' in common.
    const double soft = soft_cosine_angle("num1 * num2", "num_1 * num_2");
    const double plain = cosine_angle("num1 * num2", "num_1 * num_2");
    EXPECT_NEAR(plain, std::acos(1.0 / 3.0) * 180 / M_PI, 1e-9);
    EXPECT_LT(soft, plain);
    // Hand computation over the vocabulary [num1, *, num2, num_1, num_2]:
    // S(num1, num2) = (3/4)^2, S(num1, num_1) = S(num2, num_2) = S(num_1, num_2) = (4/5)^2,
    // the remaining off-diagonal pairs fall below 0.5 and are zeroed.
    const double s_short = 0.5625, s_long = 0.64;
    const double ab = 2 * s_long + 1;
    const double aa = 3 + 2 * s_short;
    const double bb = 3 + 2 * s_long;
    EXPECT_NEAR(soft, std::acos(ab / std::sqrt(aa * bb)) * 180 / M_PI, 1e-9);
}

TEST(soft_cosine, dissimilar_identifiers_can_raise_the_angle) {
    // With no linked identifiers the self-similarity of num1/num2 inflates the norm of the
    // first vector only, so the soft angle ends above the plain one.
    EXPECT_GT(soft_cosine_angle("num1 * num2", "a * b"), cosine_angle("num1 * num2", "a * b"));
}

TEST(soft_cosine, token_similarity_matrix) {
    EXPECT_DOUBLE_EQ(token_similarity("abc", "abc"), 1.0);
    EXPECT_DOUBLE_EQ(token_similarity("abcd", "abcx"), 0.5625);
    EXPECT_DOUBLE_EQ(token_similarity("ab", "xy"), 0.0);
    EXPECT_DOUBLE_EQ(token_similarity("abc", "abx"), 0.0);  // (2/3)^2 < 0.5 is zeroed
    auto s = similarity_matrix({"count", "counts", "x"});
    ASSERT_EQ(s.size(), 9u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(s[i * 3 + i], 1.0);
        for (int j = 0; j < 3; ++j)
            EXPECT_DOUBLE_EQ(s[i * 3 + j], s[j * 3 + i]);
    }
    EXPECT_NEAR(s[1], std::pow(5.0 / 6.0, 2), 1e-15);
}

TEST(levenshtein, basics) {
    EXPECT_EQ(levenshtein(U"kitten", U"sitting"), 3);
    EXPECT_EQ(levenshtein(U"", U"abc"), 3);
    EXPECT_EQ(levenshtein(U"abc", U"abc"), 0);
}

TEST(compare, without_correction) {
    auto r = compare("x = 1\n", "x = 1\n", nullptr);
    EXPECT_DOUBLE_EQ(r.sequence_ratio, 1.0);
    EXPECT_EQ(r.edits, 0);
    EXPECT_FALSE(r.has_edits);
    EXPECT_NEAR(r.cosine_deg, 0.0, 1e-6);
    EXPECT_NEAR(r.soft_cosine_deg, 0.0, 1e-6);
}

TEST(compare, with_correction) {
    std::string corrected = "x = 1\nprint(x)\n";
    auto r = compare("x = 1\n", "y = 2\n", &corrected);
    EXPECT_TRUE(r.has_edits);
    EXPECT_EQ(r.edits, 1);
    EXPECT_NEAR(r.sequence_ratio, 2.0 * 6 / (6 + 15), 1e-12);
}

class SimilarityParity : public ::testing::TestWithParam<int> {};

TEST_P(SimilarityParity, matches_oracles) {
    static const auto doc = cgems_test::load_json(cgems_test::fixture("metric_oracles.json"));
    const auto& f = doc["fixtures"][static_cast<std::size_t>(GetParam())];
    const std::string name = f["name"];
    const std::string gen = f["generated"], ref = f["reference"];
    auto rel = [](double v) { return 1e-6 * std::max(1.0, std::abs(v)); };
    double seq = f["sequence_ratio"];
    EXPECT_NEAR(sequence_ratio(gen, ref), seq, rel(seq)) << name;
    EXPECT_EQ(edit_count(gen, ref), f["edits"].get<int>()) << name;
    double b = f["bleu"];
    EXPECT_NEAR(bleu(gen, ref), b, rel(b)) << name;
    const std::pair<const char*, RougeVariant> variants[] = {
        {"rouge1", RougeVariant::unigram}, {"rouge2", RougeVariant::bigram}, {"rougeL", RougeVariant::lcs}};
    for (const auto& [key, v] : variants) {
        auto s = rouge(gen, ref, v);
        const auto& o = f["rouge"][key];
        EXPECT_NEAR(s.precision, o["precision"].get<double>(), rel(o["precision"])) << name << " " << key;
        EXPECT_NEAR(s.recall, o["recall"].get<double>(), rel(o["recall"])) << name << " " << key;
        EXPECT_NEAR(s.f1, o["f1"].get<double>(), rel(o["f1"])) << name << " " << key;
    }
    // The oracle's plain acos carries ~1e-6 degrees of rounding noise for identical texts.
    double c = f["cosine_deg"];
    EXPECT_NEAR(cosine_angle(gen, ref), c, 1e-5) << name;
}

INSTANTIATE_TEST_SUITE_P(fixtures, SimilarityParity, ::testing::Range(0, 20));
