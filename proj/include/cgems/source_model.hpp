#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cgems/errors.hpp"

namespace cgems::source {

// Everything the lexer and the metrics need to know about the analyzed language.
struct LanguageProfile {
    std::string name;
    std::set<std::string> keywords;
    std::set<std::string> branch_keywords;     // decision points
    std::set<std::string> boolean_operators;   // each occurrence adds a path
    std::set<std::string> inline_conditionals; // e.g. "?" in C-like languages
    std::vector<std::string> operators;        // all operator / punctuation lexemes
    std::string comment_prefix;
    std::vector<std::string> string_delimiters;
    std::vector<std::string> multiline_string_delimiters;
    std::vector<std::string> string_prefixes;  // case-insensitive, e.g. r, b, f, rb
    std::string statement_separator;
    std::set<std::string> function_openers;
    std::set<std::string> class_openers;
    std::set<std::string> inline_function_keywords;  // lambda: its ':' is not a suite marker
    std::string suite_marker;                          // ':' for indentation languages
    std::string line_continuation;
    bool indentation_blocks = true;
    int tab_size = 8;

    /// Throws DomainError when an invariant does not hold.
    void validate() const;
};

/// Built-in profile for the corpus language (indentation blocks, `#` comments,
/// triple-quoted multiline strings, `;` separator, def/class openers).
const LanguageProfile& default_profile();

LanguageProfile profile_from_json(std::string_view json_text);
LanguageProfile load_profile(const std::filesystem::path& path);
std::string profile_to_json(const LanguageProfile& profile);

enum class TokenKind {
    identifier,
    keyword,
    op,
    number,
    string,
    multiline_string,
    comment,
    newline,
    indent,
    dedent,
    separator,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string lexeme;
    int line = 0;      // 1-based
    int column = 0;    // 0-based; for indent/dedent: the indentation width after the change
    int end_line = 0;  // last physical line covered (differs from line for multiline strings)

    bool synthetic() const noexcept {
        return kind == TokenKind::newline || kind == TokenKind::indent || kind == TokenKind::dedent;
    }
    bool operator==(const Token&) const = default;
};

struct TokenStream {
    std::vector<Token> tokens;
    int line_count = 0;                     // physical lines in the input
    std::vector<bool> blank_lines;          // per physical line, whitespace only
    std::optional<LexicalError> error;      // tokens hold everything before the error

    bool ok() const noexcept { return !error.has_value(); }
};

/// Never throws on bad input; lexical problems are reported in TokenStream::error.
TokenStream tokenize(std::string_view text, const LanguageProfile& profile = default_profile());

struct LogicalLines {
    int lloc = 0;
    std::vector<int> per_line;  // index i holds the count attributed to physical line i + 1
};

LogicalLines logical_lines(const TokenStream& stream, const LanguageProfile& profile = default_profile());

enum class BlockRole { module, function, class_, method };

std::string_view to_string(BlockRole role);

struct BlockNode {
    BlockRole role = BlockRole::module;
    std::string name;
    int start_line = 1;
    int end_line = 1;
    std::size_t first_token = 0;  // token index range [first_token, end_token)
    std::size_t end_token = 0;
    std::vector<BlockNode> children;

    bool operator==(const BlockNode&) const = default;
};

struct BlockTree {
    BlockNode root;

    /// Pre-order list of every non-root node.
    std::vector<const BlockNode*> blocks() const;
    bool operator==(const BlockTree&) const = default;
};

/// Throws StructureError on an inconsistent dedent.
BlockTree block_structure(const TokenStream& stream, const LanguageProfile& profile = default_profile());

}  // namespace cgems::source
