#include "cgems/static_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cgems::metrics {

using source::BlockNode;
using source::Token;
using source::TokenKind;

namespace {

double pct(double num, double den) { return den > 0 ? std::min(100.0, 100.0 * num / den) : 0.0; }

bool is_decision(const Token& t, const source::LanguageProfile& p) {
    if (t.kind == TokenKind::keyword)
        return p.branch_keywords.contains(t.lexeme) || p.boolean_operators.contains(t.lexeme) ||
               p.inline_conditionals.contains(t.lexeme);
    if (t.kind == TokenKind::op)
        return p.boolean_operators.contains(t.lexeme) || p.inline_conditionals.contains(t.lexeme);
    return false;
}

int count_decisions(const std::vector<Token>& tokens, const BlockNode& node, const source::LanguageProfile& p) {
    int count = 0;
    std::size_t i = node.first_token;
    auto child = node.children.begin();
    while (i < node.end_token && i < tokens.size()) {
        if (child != node.children.end() && i == child->first_token) {
            i = child->end_token;
            ++child;
            continue;
        }
        if (is_decision(tokens[i], p))
            ++count;
        ++i;
    }
    return count;
}

bool is_closing(const std::string& s) { return s == ")" || s == "]" || s == "}"; }

}  // namespace

RawMetrics raw_metrics(const source::TokenStream& stream, const source::LanguageProfile& profile) {
    RawMetrics r;
    const int lines = stream.line_count;
    std::vector<bool> covered(static_cast<std::size_t>(lines), false);

    auto mark = [&](int first, int last, auto&& on_line) {
        for (int l = std::max(1, first); l <= std::min(last, lines); ++l) {
            auto idx = static_cast<std::size_t>(l - 1);
            if (covered[idx])
                continue;
            covered[idx] = true;
            on_line(stream.blank_lines[idx]);
        }
    };

    std::vector<const Token*> group;
    auto close = [&](int last_line) {
        if (group.empty())
            return;
        std::vector<const Token*> content;
        for (const Token* t : group) {
            if (t->kind == TokenKind::comment)
                ++r.comments;
            else
                content.push_back(t);
        }
        const int first = group.front()->line;
        if (content.size() == 1 && group.size() == 1 &&
            (content[0]->kind == TokenKind::string || content[0]->kind == TokenKind::multiline_string)) {
            if (content[0]->line == content[0]->end_line) {
                ++r.single_comments;
                mark(first, last_line, [](bool) {});
            } else {
                mark(first, last_line, [&](bool blank) { ++(blank ? r.blank : r.multi); });
            }
        } else {
            mark(first, last_line, [&](bool blank) { ++(blank ? r.blank : r.sloc); });
        }
        group.clear();
    };

    for (const Token& t : stream.tokens) {
        if (t.kind == TokenKind::indent || t.kind == TokenKind::dedent)
            continue;
        if (t.kind == TokenKind::newline) {
            close(t.line);
            continue;
        }
        if (t.kind == TokenKind::comment && group.empty()) {
            ++r.comments;
            ++r.single_comments;
            mark(t.line, t.line, [](bool) {});
            continue;
        }
        group.push_back(&t);
    }
    if (!group.empty()) {
        int last = 0;
        for (const Token* t : group)
            last = std::max(last, t->end_line);
        close(last);
    }
    // Whatever the tokens did not reach (lines after a lexical error).
    mark(1, lines, [&](bool blank) { ++(blank ? r.blank : r.sloc); });

    r.loc = lines;
    r.lloc = source::logical_lines(stream, profile).lloc;
    r.c_pct_l = pct(r.comments, r.loc);
    r.c_pct_s = pct(r.comments, r.sloc);
    r.cm_pct_l = pct(r.comments + r.multi, r.loc);
    return r;
}

char grade(double cc) {
    if (!(cc >= 1))
        throw DomainError("cyclomatic complexity must be >= 1");
    if (cc <= 5) return 'A';
    if (cc <= 10) return 'B';
    if (cc <= 20) return 'C';
    if (cc <= 30) return 'D';
    if (cc <= 40) return 'E';
    return 'F';
}

CyclomaticResult cyclomatic(const source::TokenStream& stream, const source::BlockTree& tree,
                            const source::LanguageProfile& profile) {
    CyclomaticResult out;
    int block_sum = 0;
    for (const BlockNode* node : tree.blocks()) {
        int cc = 1 + count_decisions(stream.tokens, *node, profile);
        out.blocks.push_back({node->name, node->role, node->start_line, cc});
        block_sum += cc;
    }
    int module_decisions = count_decisions(stream.tokens, tree.root, profile);
    out.module_cc = 1 + module_decisions;
    out.total = block_sum + module_decisions;
    if (out.blocks.empty()) {
        out.aggregate = out.module_cc;
        out.module_level = true;
    } else {
        out.aggregate = static_cast<double>(block_sum) / static_cast<double>(out.blocks.size());
    }
    out.grade = grade(out.aggregate);
    return out;
}

HalsteadMetrics halstead_from_counts(int n1, int n2, int N1, int N2) {
    HalsteadMetrics h;
    h.n1 = n1;
    h.n2 = n2;
    h.N1 = N1;
    h.N2 = N2;
    h.vocabulary = n1 + n2;
    h.length = N1 + N2;
    h.volume = h.vocabulary > 0 ? h.length * std::log2(static_cast<double>(h.vocabulary)) : 0.0;
    h.difficulty = n2 > 0 ? (n1 / 2.0) * (static_cast<double>(N2) / n2) : 0.0;
    h.effort = h.difficulty * h.volume;
    h.time = h.effort / 18.0;
    h.bugs = h.volume / 3000.0;
    return h;
}

HalsteadMetrics halstead(const source::TokenStream& stream, const source::LanguageProfile& profile) {
    std::map<std::string, int> operators;
    std::map<std::string, int> operands;
    const auto& tokens = stream.tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        switch (t.kind) {
        case TokenKind::op:
            // A bracket pair is one operator occurrence.
            if (!is_closing(t.lexeme))
                ++operators[t.lexeme];
            break;
        case TokenKind::keyword:
        case TokenKind::separator:
            ++operators[t.lexeme];
            break;
        case TokenKind::identifier: {
            bool declared = i > 0 && tokens[i - 1].kind == TokenKind::keyword &&
                            (profile.function_openers.contains(tokens[i - 1].lexeme) ||
                             profile.class_openers.contains(tokens[i - 1].lexeme));
            if (!declared)
                ++operands[t.lexeme];
            break;
        }
        case TokenKind::number:
        case TokenKind::string:
        case TokenKind::multiline_string:
            ++operands[t.lexeme];
            break;
        default:
            break;
        }
    }
    auto total = [](const std::map<std::string, int>& m) {
        return std::accumulate(m.begin(), m.end(), 0, [](int acc, const auto& kv) { return acc + kv.second; });
    };
    return halstead_from_counts(static_cast<int>(operators.size()), static_cast<int>(operands.size()),
                                total(operators), total(operands));
}

double maintainability_index(const RawMetrics& raw, const HalsteadMetrics& hal, const CyclomaticResult& cc) {
    double ratio = raw.loc > 0 ? static_cast<double>(raw.comments + raw.multi) / raw.loc : 0.0;
    ratio = std::clamp(ratio, 0.0, 1.0);
    double v = std::max(hal.volume, 1.0);
    double sloc = std::max(raw.sloc, 1);
    double mi = 171.0 - 5.2 * std::log(v) - 0.23 * cc.total - 16.2 * std::log(sloc) +
                50.0 * std::sin(std::sqrt(2.4 * ratio));
    return std::clamp(100.0 * mi / 171.0, 0.0, 100.0);
}

StaticReport analyze_source(std::string_view text, const source::LanguageProfile& profile) {
    StaticReport rep;
    auto stream = source::tokenize(text, profile);
    if (stream.error)
        rep.lexical_error = stream.error->what();
    rep.raw = raw_metrics(stream, profile);
    source::BlockTree tree;
    try {
        tree = source::block_structure(stream, profile);
    } catch (const StructureError& e) {
        rep.structure_error = e.what();
        tree = source::BlockTree{};
        tree.root.end_token = stream.tokens.size();
    }
    rep.cyclomatic = cyclomatic(stream, tree, profile);
    rep.halstead = halstead(stream, profile);
    rep.mi = maintainability_index(rep.raw, rep.halstead, rep.cyclomatic);
    return rep;
}

}  // namespace cgems::metrics
