#include "cgems/source_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cgems::source {

namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_open_bracket(std::string_view s) { return s == "(" || s == "[" || s == "{"; }
bool is_close_bracket(std::string_view s) { return s == ")" || s == "]" || s == "}"; }

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Offset of the first byte that does not start a well-formed UTF-8 sequence, or npos.
std::size_t first_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size())
            return i;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80)
                return i;
        i += len;
    }
    return std::string_view::npos;
}

std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

class Lexer {
public:
    Lexer(std::string_view src, std::size_t limit, const LanguageProfile& profile)
        : src_(src.substr(0, limit)), p_(profile), ops_(profile.operators) {
        std::stable_sort(ops_.begin(), ops_.end(),
                         [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
        for (const auto& d : p_.multiline_string_delimiters)
            delims_.push_back({d, true});
        for (const auto& d : p_.string_delimiters)
            delims_.push_back({d, false});
        std::stable_sort(delims_.begin(), delims_.end(),
                         [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    }

    void run(TokenStream& out) {
        out_ = &out;
        try {
            while (pos_ < src_.size()) {
                if (at_line_start_) {
                    start_line();
                    continue;
                }
                step();
            }
            finish();
        } catch (const LexicalError& e) {
            out.error = e;
        }
    }

private:
    bool starts_with(std::string_view s) const {
        return !s.empty() && src_.substr(pos_, s.size()) == s;
    }

    void emit(TokenKind kind, std::string lexeme, int line, int column, int end_line) {
        out_->tokens.push_back(Token{kind, std::move(lexeme), line, column, end_line});
        if (kind != TokenKind::comment && kind != TokenKind::indent && kind != TokenKind::dedent &&
            kind != TokenKind::newline)
            line_has_code_ = true;
    }

    int column() const { return static_cast<int>(pos_ - line_start_); }

    void start_line() {
        at_line_start_ = false;
        bool measure = p_.indentation_blocks && depth_ == 0 && !continuation_;
        continuation_ = false;
        int width = 0;
        bool tabs = false, spaces = false;
        std::size_t p = pos_;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
            if (src_[p] == '\t') {
                tabs = true;
                width = (width / p_.tab_size + 1) * p_.tab_size;
            } else if (src_[p] == ' ') {
                spaces = true;
                ++width;
            } else {
                width = 0;
            }
            ++p;
        }
        pos_ = p;
        if (!measure)
            return;
        if (p >= src_.size() || src_[p] == '\n')
            return;
        if (!p_.comment_prefix.empty() && src_.substr(p, p_.comment_prefix.size()) == p_.comment_prefix)
            return;
        if (tabs && spaces)
            throw LexicalError("mixed tabs and spaces in indentation", line_);
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenKind::indent, "", line_, width, line_);
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                emit(TokenKind::dedent, "", line_, width, line_);
            }
        }
    }

    void newline_char() {
        if (depth_ == 0 && line_has_code_) {
            emit(TokenKind::newline, "", line_, column(), line_);
            line_has_code_ = false;
        }
        ++pos_;
        ++line_;
        line_start_ = pos_;
        at_line_start_ = true;
    }

    void step() {
        char c = src_[pos_];
        if (c == ' ' || c == '\t' || c == '\f') {
            ++pos_;
            return;
        }
        if (c == '\n') {
            newline_char();
            return;
        }
        if (starts_with(p_.comment_prefix)) {
            std::size_t end = src_.find('\n', pos_);
            if (end == std::string_view::npos)
                end = src_.size();
            emit(TokenKind::comment, std::string(src_.substr(pos_, end - pos_)), line_, column(), line_);
            pos_ = end;
            return;
        }
        if (starts_with(p_.line_continuation)) {
            std::size_t after = pos_ + p_.line_continuation.size();
            if (after < src_.size() && src_[after] == '\n') {
                pos_ = after + 1;
                ++line_;
                line_start_ = pos_;
                at_line_start_ = true;
                continuation_ = true;
                return;
            }
            if (after >= src_.size()) {
                pos_ = after;
                return;
            }
        }
        auto uc = static_cast<unsigned char>(c);
        if (is_ident_start(uc)) {
            std::size_t end = pos_;
            while (end < src_.size() && is_ident_char(static_cast<unsigned char>(src_[end])))
                ++end;
            std::string word(src_.substr(pos_, end - pos_));
            if (end < src_.size() && is_string_prefix(word) && delimiter_at(end)) {
                read_string(end - pos_);
                return;
            }
            int col = column();
            pos_ = end;
            TokenKind kind = p_.keywords.contains(word) ? TokenKind::keyword : TokenKind::identifier;
            emit(kind, std::move(word), line_, col, line_);
            return;
        }
        if (delimiter_at(pos_)) {
            read_string(0);
            return;
        }
        if (std::isdigit(uc) ||
            (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            read_number();
            return;
        }
        if (starts_with(p_.statement_separator)) {
            emit(TokenKind::separator, p_.statement_separator, line_, column(), line_);
            pos_ += p_.statement_separator.size();
            return;
        }
        for (const auto& op : ops_) {
            if (starts_with(op)) {
                if (is_open_bracket(op))
                    ++depth_;
                else if (is_close_bracket(op) && depth_ > 0)
                    --depth_;
                emit(TokenKind::op, op, line_, column(), line_);
                pos_ += op.size();
                return;
            }
        }
        throw LexicalError(std::string("unexpected character '") + c + "'", line_);
    }

    bool is_string_prefix(const std::string& word) const {
        auto lower = to_lower(word);
        return std::any_of(p_.string_prefixes.begin(), p_.string_prefixes.end(),
                           [&](const std::string& pre) { return to_lower(pre) == lower; });
    }

    const std::pair<std::string, bool>* delimiter_at(std::size_t at) const {
        for (const auto& d : delims_)
            if (src_.substr(at, d.first.size()) == d.first)
                return &d;
        return nullptr;
    }

    void read_string(std::size_t prefix_len) {
        const auto* delim = delimiter_at(pos_ + prefix_len);
        const std::string& quote = delim->first;
        const bool multiline = delim->second;
        const int start_line = line_;
        const int start_col = column();
        const std::size_t start = pos_;
        std::size_t p = pos_ + prefix_len + quote.size();
        int line = line_;
        std::size_t line_start = line_start_;
        for (;;) {
            if (p >= src_.size())
                throw LexicalError("unterminated string literal", start_line);
            char ch = src_[p];
            if (ch == '\\') {
                if (p + 1 < src_.size() && src_[p + 1] == '\n') {
                    ++line;
                    line_start = p + 2;
                }
                p += 2;
                continue;
            }
            if (src_.substr(p, quote.size()) == quote) {
                p += quote.size();
                break;
            }
            if (ch == '\n') {
                if (!multiline)
                    throw LexicalError("unterminated string literal", start_line);
                ++line;
                line_start = p + 1;
            }
            ++p;
        }
        pos_ = p;
        line_ = line;
        line_start_ = line_start;
        emit(multiline ? TokenKind::multiline_string : TokenKind::string, std::string(src_.substr(start, p - start)),
             start_line, start_col, line_);
    }

    void read_number() {
        std::size_t p = pos_;
        auto digit_run = [&](auto pred) {
            while (p < src_.size() && (pred(static_cast<unsigned char>(src_[p])) || src_[p] == '_'))
                ++p;
        };
        auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
        if (src_[p] == '0' && p + 1 < src_.size() && std::strchr("xXoObB", src_[p + 1]) && src_[p + 1] != '\0') {
            p += 2;
            digit_run([](unsigned char ch) { return std::isxdigit(ch) != 0; });
        } else {
            digit_run(is_dec);
            if (p < src_.size() && src_[p] == '.') {
                ++p;
                digit_run(is_dec);
            }
            if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
                std::size_t q = p + 1;
                if (q < src_.size() && (src_[q] == '+' || src_[q] == '-'))
                    ++q;
                if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                    p = q;
                    digit_run(is_dec);
                }
            }
            if (p < src_.size() && (src_[p] == 'j' || src_[p] == 'J'))
                ++p;
        }
        emit(TokenKind::number, std::string(src_.substr(pos_, p - pos_)), line_, column(), line_);
        pos_ = p;
    }

    void finish() {
        if (line_has_code_) {
            emit(TokenKind::newline, "", line_, column(), line_);
            line_has_code_ = false;
        }
        int last = std::max(1, line_ - (at_line_start_ ? 1 : 0));
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenKind::dedent, "", last, 0, last);
        }
    }

    std::string_view src_;
    const LanguageProfile& p_;
    std::vector<std::string> ops_;
    std::vector<std::pair<std::string, bool>> delims_;
    TokenStream* out_ = nullptr;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
    int depth_ = 0;
    bool at_line_start_ = true;
    bool continuation_ = false;
    bool line_has_code_ = false;
    std::vector<int> indents_{0};
};

template <class T>
std::set<std::string> set_from(const nlohmann::json& j, const char* key) {
    std::set<std::string> out;
    if (j.contains(key))
        for (const auto& v : j.at(key))
            out.insert(v.get<std::string>());
    return out;
}

std::vector<std::string> list_from(const nlohmann::json& j, const char* key) {
    std::vector<std::string> out;
    if (j.contains(key))
        for (const auto& v : j.at(key))
            out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

void LanguageProfile::validate() const {
    for (const auto& b : branch_keywords)
        if (!keywords.contains(b))
            throw DomainError("branch keyword '" + b + "' is not in the keyword set");
    if (comment_prefix.empty())
        throw DomainError("comment prefix must be non-empty");
    for (const auto& op : operators)
        if (op.compare(0, comment_prefix.size(), comment_prefix) == 0)
            throw DomainError("comment prefix '" + comment_prefix + "' is a prefix of operator '" + op + "'");
    if (string_delimiters.empty() && multiline_string_delimiters.empty())
        throw DomainError("profile defines no string delimiters");
    if (tab_size <= 0)
        throw DomainError("tab size must be positive");
}

const LanguageProfile& default_profile() {
    static const LanguageProfile profile = [] {
        LanguageProfile p;
        p.name = "python";
        p.keywords = {"and",    "as",   "assert", "async", "await",  "break",    "class",  "continue",
                      "def",    "del",  "elif",   "else",  "except", "finally",  "for",    "from",
                      "global", "if",   "import", "in",    "is",     "lambda",   "nonlocal", "not",
                      "or",     "pass", "raise",  "return", "try",   "while",    "with",   "yield"};
        p.branch_keywords = {"if", "elif", "for", "while", "except", "assert"};
        p.boolean_operators = {"and", "or"};
        p.operators = {"**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
                       ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "@=", "&=", "|=", "^=",
                       "+",   "-",   "*",   "/",   "%",   "@",  "&",  "|",  "^",  "~",  "<",  ">",
                       "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ".",  "="};
        p.comment_prefix = "#";
        p.string_delimiters = {"'", "\""};
        p.multiline_string_delimiters = {"'''", "\"\"\""};
        p.string_prefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
        p.statement_separator = ";";
        p.function_openers = {"def"};
        p.class_openers = {"class"};
        p.inline_function_keywords = {"lambda"};
        p.suite_marker = ":";
        p.line_continuation = "\\";
        p.indentation_blocks = true;
        p.tab_size = 8;
        p.validate();
        return p;
    }();
    return profile;
}

LanguageProfile profile_from_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("invalid profile JSON: ") + e.what());
    }
    LanguageProfile p;
    try {
        p.name = j.value("name", "custom");
        p.keywords = set_from<std::string>(j, "keywords");
        p.branch_keywords = set_from<std::string>(j, "branch_keywords");
        p.boolean_operators = set_from<std::string>(j, "boolean_operators");
        p.inline_conditionals = set_from<std::string>(j, "inline_conditionals");
        p.operators = list_from(j, "operators");
        p.comment_prefix = j.value("comment_prefix", "");
        p.string_delimiters = list_from(j, "string_delimiters");
        p.multiline_string_delimiters = list_from(j, "multiline_string_delimiters");
        p.string_prefixes = list_from(j, "string_prefixes");
        p.statement_separator = j.value("statement_separator", "");
        p.function_openers = set_from<std::string>(j, "function_openers");
        p.class_openers = set_from<std::string>(j, "class_openers");
        p.inline_function_keywords = set_from<std::string>(j, "inline_function_keywords");
        p.suite_marker = j.value("suite_marker", "");
        p.line_continuation = j.value("line_continuation", "");
        p.indentation_blocks = j.value("indentation_blocks", true);
        p.tab_size = j.value("tab_size", 8);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed profile: ") + e.what());
    }
    p.validate();
    return p;
}

LanguageProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open profile " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_json(ss.str());
}

std::string profile_to_json(const LanguageProfile& p) {
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["keywords"] = p.keywords;
    j["branch_keywords"] = p.branch_keywords;
    j["boolean_operators"] = p.boolean_operators;
    j["inline_conditionals"] = p.inline_conditionals;
    j["operators"] = p.operators;
    j["comment_prefix"] = p.comment_prefix;
    j["string_delimiters"] = p.string_delimiters;
    j["multiline_string_delimiters"] = p.multiline_string_delimiters;
    j["string_prefixes"] = p.string_prefixes;
    j["statement_separator"] = p.statement_separator;
    j["function_openers"] = p.function_openers;
    j["class_openers"] = p.class_openers;
    j["inline_function_keywords"] = p.inline_function_keywords;
    j["suite_marker"] = p.suite_marker;
    j["line_continuation"] = p.line_continuation;
    j["indentation_blocks"] = p.indentation_blocks;
    j["tab_size"] = p.tab_size;
    return j.dump(2);
}

std::string_view to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::keyword: return "keyword";
    case TokenKind::op: return "operator";
    case TokenKind::number: return "number";
    case TokenKind::string: return "string";
    case TokenKind::multiline_string: return "multiline-string";
    case TokenKind::comment: return "comment";
    case TokenKind::newline: return "newline";
    case TokenKind::indent: return "indent";
    case TokenKind::dedent: return "dedent";
    case TokenKind::separator: return "separator";
    }
    return "?";
}

std::string_view to_string(BlockRole role) {
    switch (role) {
    case BlockRole::module: return "module";
    case BlockRole::function: return "function";
    case BlockRole::class_: return "class";
    case BlockRole::method: return "method";
    }
    return "?";
}

TokenStream tokenize(std::string_view raw, const LanguageProfile& profile) {
    TokenStream out;
    const std::string text = normalize_newlines(raw);

    // Physical lines follow str.splitlines(): a trailing newline does not open a new line.
    std::size_t begin = 0;
    while (begin < text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos)
            end = text.size();
        auto line = std::string_view(text).substr(begin, end - begin);
        out.blank_lines.push_back(line.find_first_not_of(" \t\f") == std::string_view::npos);
        begin = end + 1;
    }
    out.line_count = static_cast<int>(out.blank_lines.size());

    std::size_t limit = text.size();
    std::optional<LexicalError> utf8_error;
    if (auto bad = first_invalid_utf8(text); bad != std::string_view::npos) {
        int bad_line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + bad, '\n'));
        limit = text.rfind('\n', bad == 0 ? 0 : bad - 1);
        limit = (limit == std::string::npos || bad == 0) ? 0 : limit + 1;
        utf8_error = LexicalError("invalid UTF-8", bad_line);
    }

    Lexer(text, limit, profile).run(out);
    if (!out.error && utf8_error)
        out.error = utf8_error;
    return out;
}

LogicalLines logical_lines(const TokenStream& stream, const LanguageProfile& profile) {
    LogicalLines out;
    out.per_line.assign(static_cast<std::size_t>(stream.line_count), 0);

    std::vector<const Token*> part;
    // Same rule as radon: the first suite marker anywhere in the part makes it two logical
    // lines unless it is the part's last token. Slice, dict and lambda colons count too.
    auto count_part = [&]() -> int {
        if (part.empty())
            return 0;
        if (profile.suite_marker.empty())
            return 1;
        for (std::size_t i = 0; i < part.size(); ++i)
            if (part[i]->kind == TokenKind::op && part[i]->lexeme == profile.suite_marker)
                return i + 1 < part.size() ? 2 : 1;
        return 1;
    };
    auto flush = [&] {
        int n = count_part();
        if (n > 0) {
            out.lloc += n;
            int line = part.front()->line;
            if (line >= 1 && line <= stream.line_count)
                out.per_line[static_cast<std::size_t>(line - 1)] += n;
        }
        part.clear();
    };

    for (const Token& t : stream.tokens) {
        switch (t.kind) {
        case TokenKind::comment:
        case TokenKind::indent:
        case TokenKind::dedent:
            break;
        case TokenKind::newline:
        case TokenKind::separator:
            flush();
            break;
        default:
            part.push_back(&t);
        }
    }
    flush();
    return out;
}

std::vector<const BlockNode*> BlockTree::blocks() const {
    std::vector<const BlockNode*> out;
    std::vector<const BlockNode*> stack;
    for (auto it = root.children.rbegin(); it != root.children.rend(); ++it)
        stack.push_back(&*it);
    while (!stack.empty()) {
        const BlockNode* n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
            stack.push_back(&*it);
    }
    return out;
}

namespace {

void check_dedents(const std::vector<Token>& tokens) {
    std::vector<int> widths{0};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind == TokenKind::indent) {
            widths.push_back(t.column);
        } else if (t.kind == TokenKind::dedent) {
            if (widths.size() > 1)
                widths.pop_back();
            bool last_of_run = i + 1 >= tokens.size() || tokens[i + 1].kind != TokenKind::dedent;
            if (last_of_run && widths.back() != t.column)
                throw StructureError("unindent does not match any outer indentation level", t.line);
        }
    }
}

struct Extent {
    BlockRole role;
    std::string name;
    std::size_t first;
    std::size_t end;
};

int last_code_line(const std::vector<Token>& tokens, std::size_t first, std::size_t end) {
    int line = tokens[first].line;
    for (std::size_t i = first; i < end; ++i) {
        const Token& t = tokens[i];
        if (!t.synthetic() && t.kind != TokenKind::comment)
            line = std::max(line, t.end_line);
    }
    return line;
}

std::vector<Extent> indentation_extents(const std::vector<Token>& tokens, const LanguageProfile& profile) {
    std::vector<Extent> out;
    bool line_start = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.synthetic()) {
            line_start = true;
            continue;
        }
        if (t.kind == TokenKind::comment)
            continue;
        if (t.kind == TokenKind::separator) {
            line_start = true;
            continue;
        }
        if (!line_start)
            continue;
        line_start = false;

        std::size_t opener = i;
        if (t.kind == TokenKind::keyword && !profile.function_openers.contains(t.lexeme) &&
            !profile.class_openers.contains(t.lexeme) && i + 1 < tokens.size() &&
            tokens[i + 1].kind == TokenKind::keyword)
            opener = i + 1;  // e.g. `async def`
        const Token& o = tokens[opener];
        if (o.kind != TokenKind::keyword)
            continue;
        bool is_fn = profile.function_openers.contains(o.lexeme);
        bool is_cls = profile.class_openers.contains(o.lexeme);
        if (!is_fn && !is_cls)
            continue;

        std::string name;
        if (opener + 1 < tokens.size() && tokens[opener + 1].kind == TokenKind::identifier)
            name = tokens[opener + 1].lexeme;

        std::size_t nl = opener;
        while (nl < tokens.size() && tokens[nl].kind != TokenKind::newline)
            ++nl;
        std::size_t end = std::min(nl + 1, tokens.size());
        std::size_t k = nl + 1;
        while (k < tokens.size() && tokens[k].kind == TokenKind::comment)
            ++k;
        if (k < tokens.size() && tokens[k].kind == TokenKind::indent) {
            int depth = 0;
            for (; k < tokens.size(); ++k) {
                if (tokens[k].kind == TokenKind::indent)
                    ++depth;
                else if (tokens[k].kind == TokenKind::dedent && --depth == 0)
                    break;
            }
            end = std::min(k, tokens.size());
        }
        out.push_back({is_cls ? BlockRole::class_ : BlockRole::function, std::move(name), i, end});
    }
    return out;
}

std::vector<Extent> brace_extents(const std::vector<Token>& tokens, const LanguageProfile& profile) {
    std::vector<Extent> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind != TokenKind::keyword)
            continue;
        bool is_fn = profile.function_openers.contains(t.lexeme);
        bool is_cls = profile.class_openers.contains(t.lexeme);
        if (!is_fn && !is_cls)
            continue;
        std::string name;
        if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::identifier)
            name = tokens[i + 1].lexeme;
        std::size_t k = i + 1;
        while (k < tokens.size() && tokens[k].kind != TokenKind::separator &&
               !(tokens[k].kind == TokenKind::op && tokens[k].lexeme == "{"))
            ++k;
        if (k >= tokens.size() || tokens[k].kind == TokenKind::separator)
            continue;  // declaration without a body
        int depth = 0;
        for (; k < tokens.size(); ++k) {
            if (tokens[k].kind != TokenKind::op)
                continue;
            if (tokens[k].lexeme == "{")
                ++depth;
            else if (tokens[k].lexeme == "}" && --depth == 0)
                break;
        }
        if (k >= tokens.size())
            throw StructureError("unbalanced braces in block", t.line);
        out.push_back({is_cls ? BlockRole::class_ : BlockRole::function, std::move(name), i, k + 1});
    }
    return out;
}

}  // namespace

BlockTree block_structure(const TokenStream& stream, const LanguageProfile& profile) {
    const auto& tokens = stream.tokens;
    if (profile.indentation_blocks)
        check_dedents(tokens);

    std::vector<Extent> extents =
        profile.indentation_blocks ? indentation_extents(tokens, profile) : brace_extents(tokens, profile);

    BlockTree tree;
    tree.root.role = BlockRole::module;
    tree.root.name = "<module>";
    tree.root.start_line = 1;
    tree.root.end_line = std::max(1, stream.line_count);
    tree.root.first_token = 0;
    tree.root.end_token = tokens.size();

    // Extents arrive sorted by start; a stack of open parents gives the nesting.
    std::vector<BlockNode*> open{&tree.root};
    for (auto& e : extents) {
        while (open.size() > 1 && e.first >= open.back()->end_token)
            open.pop_back();
        BlockNode* parent = open.back();
        BlockNode node;
        node.role = e.role;
        if (e.role == BlockRole::function && parent->role == BlockRole::class_)
            node.role = BlockRole::method;
        node.name = std::move(e.name);
        node.first_token = e.first;
        node.end_token = std::min(e.end, parent->end_token);
        node.start_line = tokens[e.first].line;
        node.end_line = last_code_line(tokens, e.first, node.end_token);
        parent->children.push_back(std::move(node));
        open.push_back(&parent->children.back());
    }
    return tree;
}

}  // namespace cgems::source
