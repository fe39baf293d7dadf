#include "intentforge/java_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace intentforge::java {

namespace {

bool ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

constexpr std::array<std::string_view, 13> kModifiers = {
    "public", "protected", "private",  "static",   "final",  "abstract",  "native",
    "synchronized", "transient", "volatile", "strictfp", "default", "sealed"};

constexpr std::array<std::string_view, 16> kNonCallKeywords = {
    "if",     "while",  "for",   "switch", "catch", "synchronized", "return", "throw",
    "assert", "else",   "try",   "do",     "case",  "yield",        "instanceof", "when"};

bool is_modifier(std::string_view t) {
    return std::find(kModifiers.begin(), kModifiers.end(), t) != kModifiers.end();
}

bool is_non_call_keyword(std::string_view t) {
    return std::find(kNonCallKeywords.begin(), kNonCallKeywords.end(), t) != kNonCallKeywords.end();
}

// Joins source lines of a declaration into one line; spacing within a line is
// kept as written.
std::string single_line(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n' || c == '\r') {
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            std::size_t j = i;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (!out.empty() && j < text.size()) out += ' ';
            i = j;
            continue;
        }
        out += c;
        ++i;
    }
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    return out;
}

// Renders a token range of a type as canonical text.
std::string render_type(const std::vector<Token>& toks, std::size_t b, std::size_t e) {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        const auto& t = toks[i];
        if (t.is(",")) {
            out += ", ";
        } else if (t.is("extends") || t.is("super") || t.is("&")) {
            out += " ";
            out += t.text;
            out += " ";
        } else if (t.is("@")) {
            // Type annotations are dropped from the canonical form.
            ++i;
            while (i + 2 < e && toks[i + 1].is(".")) i += 2;
            continue;
        } else {
            out += t.text;
        }
    }
    return out;
}

class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

    ParsedFile run() {
        ParsedFile file;
        while (!at_end()) {
            if (peek().is("package")) {
                auto start = pos_;
                std::string name;
                ++pos_;
                while (!at_end() && !peek().is(";")) name += std::string(toks_[pos_++].text);
                expect(";");
                file.package_name = name;
                file.package_line = text_of(start, pos_);
                continue;
            }
            if (peek().is("import")) {
                auto start = pos_;
                while (!at_end() && !peek().is(";")) ++pos_;
                expect(";");
                file.imports.push_back(single_line(text_of(start, pos_)));
                continue;
            }
            if (peek().is(";")) {
                ++pos_;
                continue;
            }
            auto before = pos_;
            if (auto type = try_type_declaration("")) {
                file.types.push_back(std::move(*type));
            } else if (pos_ == before) {
                ++pos_;  // unrecognised top-level token
            }
        }
        return file;
    }

private:
    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& peek(std::size_t ahead = 0) const {
        static const Token eof{TokenKind::Punct, "", 0, 0, 0};
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof;
    }
    void expect(std::string_view t) {
        if (!at_end() && peek().is(t)) ++pos_;
    }

    // Source text covering tokens [b, e).
    std::string text_of(std::size_t b, std::size_t e) const {
        if (b >= e || b >= toks_.size()) return {};
        return std::string(src_.substr(toks_[b].begin, toks_[e - 1].end - toks_[b].begin));
    }

    // Like text_of, with continuation lines shifted left by the indentation of
    // the first token's line so the block reads as if declared at column 0.
    std::string dedented_text_of(std::size_t b, std::size_t e) const {
        auto text = text_of(b, e);
        if (text.empty()) return text;
        auto line_start = src_.rfind('\n', toks_[b].begin);
        line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
        auto lead = src_.substr(line_start, toks_[b].begin - line_start);
        if (lead.find_first_not_of(" \t") != std::string_view::npos) return text;
        std::string out;
        std::size_t i = 0;
        while (i < text.size()) {
            auto nl = text.find('\n', i);
            auto line = std::string_view(text).substr(i, nl == std::string::npos ? std::string::npos : nl - i);
            if (i > 0) {
                std::size_t k = 0;
                while (k < lead.size() && k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
                line.remove_prefix(k);
            }
            out += line;
            if (nl == std::string::npos) break;
            out += '\n';
            i = nl + 1;
        }
        return out;
    }

    // Skips a balanced group starting at an opening token; returns index past
    // the closing token.
    std::size_t skip_balanced(std::size_t i, std::string_view open, std::string_view close) const {
        int depth = 0;
        for (; i < toks_.size(); ++i) {
            if (toks_[i].is(open)) ++depth;
            else if (toks_[i].is(close) && --depth == 0) return i + 1;
        }
        return toks_.size();
    }

    // Annotation at pos_: `@Name(.Name)* [( ... )]`. Returns the name.
    std::string annotation() {
        ++pos_;  // '@'
        std::string name;
        if (!at_end() && peek().ident()) name = std::string(toks_[pos_++].text);
        while (peek().is(".") && peek(1).ident()) {
            name += ".";
            name += toks_[pos_ + 1].text;
            pos_ += 2;
        }
        if (peek().is("(")) pos_ = skip_balanced(pos_, "(", ")");
        return name;
    }

    // Modifiers and annotations. Stops at `@interface`.
    std::vector<std::string> modifiers() {
        std::vector<std::string> annotations;
        while (!at_end()) {
            if (peek().is("@") && !peek(1).is("interface")) {
                annotations.push_back(annotation());
            } else if (peek().ident() && is_modifier(peek().text)) {
                ++pos_;
            } else if (peek().is("non") && peek(1).is("-") && peek(2).is("sealed")) {
                pos_ += 3;
            } else {
                break;
            }
        }
        return annotations;
    }

    bool at_type_keyword() const {
        const auto& t = peek();
        if (t.is("class") || t.is("interface") || t.is("enum")) return true;
        if (t.is("@") && peek(1).is("interface")) return true;
        return t.is("record") && peek(1).ident() && (peek(2).is("(") || peek(2).is("<"));
    }

    // Type text at pos_: qualified name, generic arguments, array dims,
    // varargs. Returns the rendered type or empty when no type is present.
    std::string parse_type_text() {
        auto start = pos_;
        while (peek().is("@")) annotation();
        if (!peek().ident()) {
            pos_ = start;
            return {};
        }
        auto b = pos_;
        ++pos_;
        while (true) {
            if (peek().is("<")) {
                pos_ = skip_balanced(pos_, "<", ">");
            } else if (peek().is(".") && peek(1).ident()) {
                pos_ += 2;
            } else if (peek().is("[") && peek(1).is("]")) {
                pos_ += 2;
            } else if (peek().is("...")) {
                ++pos_;
                break;
            } else if (peek().is("@")) {
                annotation();
            } else {
                break;
            }
        }
        return render_type(toks_, b, pos_);
    }

    std::vector<std::string> type_list() {
        std::vector<std::string> types;
        while (!at_end()) {
            auto t = parse_type_text();
            if (t.empty()) break;
            types.push_back(t);
            if (!peek().is(",")) break;
            ++pos_;
        }
        return types;
    }

    std::optional<ParsedType> try_type_declaration(const std::string& outer_path) {
        auto start = pos_;
        auto annotations = modifiers();
        if (!at_type_keyword()) {
            pos_ = start;
            return std::nullopt;
        }
        ParsedType type;
        type.annotations = std::move(annotations);
        bool is_record = false;
        if (peek().is("@")) {
            pos_ += 2;
            type.kind = NodeKind::Interface;
            type.keyword = "@interface";
        } else {
            auto kw = peek().text;
            type.keyword = std::string(kw);
            ++pos_;
            type.kind = kw == "interface" ? NodeKind::Interface : NodeKind::Class;
            type.is_enum = kw == "enum";
            is_record = kw == "record";
        }
        if (!peek().ident()) return std::nullopt;
        type.name = std::string(toks_[pos_++].text);
        type.path = outer_path.empty() ? type.name : outer_path + "." + type.name;
        if (peek().is("<")) pos_ = skip_balanced(pos_, "<", ">");

        std::vector<std::pair<std::string, std::string>> record_components;
        if (is_record && peek().is("(")) {
            ++pos_;
            while (!at_end() && !peek().is(")")) {
                modifiers();
                auto t = parse_type_text();
                std::string name = peek().ident() ? std::string(toks_[pos_++].text) : "";
                if (!t.empty() && !name.empty()) record_components.emplace_back(t, name);
                if (peek().is(",")) ++pos_;
                else if (!peek().is(")")) ++pos_;
            }
            expect(")");
        }
        while (!at_end() && !peek().is("{")) {
            if (peek().is("extends")) {
                ++pos_;
                type.extends = type_list();
            } else if (peek().is("implements")) {
                ++pos_;
                type.implements = type_list();
            } else if (peek().is("permits")) {
                ++pos_;
                type_list();
            } else {
                ++pos_;
            }
        }
        if (at_end()) return std::nullopt;
        type.header = single_line(text_of(start, pos_));
        type.span.start_line = toks_[start].line;

        for (const auto& [t, name] : record_components) {
            ParsedMember field;
            field.kind = ParsedMember::Kind::Field;
            field.name = name;
            field.signature = t + " " + name;
            field.span = {toks_[start].line, toks_[start].line};
            field.return_type = t;
            type.members.push_back(std::move(field));
        }

        ++pos_;  // '{'
        if (type.is_enum) enum_constants(type);
        type_body(type);
        type.span.end_line = pos_ > 0 ? toks_[std::min(pos_, toks_.size()) - 1].line
                                      : type.span.start_line;
        type.span.end_line = std::max(type.span.end_line, type.span.start_line);
        return type;
    }

    void enum_constants(ParsedType& type) {
        ParsedMember constants;
        constants.kind = ParsedMember::Kind::EnumConstants;
        while (!at_end() && !peek().is(";") && !peek().is("}")) {
            auto start = pos_;
            modifiers();
            if (!peek().ident()) {
                ++pos_;
                continue;
            }
            const auto& name_tok = toks_[pos_++];
            if (peek().is("(")) pos_ = skip_balanced(pos_, "(", ")");
            if (peek().is("{")) pos_ = skip_balanced(pos_, "{", "}");
            constants.constant_names.emplace_back(name_tok.text);
            constants.constant_spans.push_back({toks_[start].line, toks_[pos_ - 1].line});
            if (peek().is(",")) ++pos_;
        }
        if (peek().is(";")) ++pos_;
        if (constants.constant_names.empty()) return;
        for (std::size_t i = 0; i < constants.constant_names.size(); ++i)
            constants.decl_text += (i ? ", " : "") + constants.constant_names[i];
        constants.decl_text += ";";
        constants.span = {constants.constant_spans.front().start_line,
                          constants.constant_spans.back().end_line};
        type.members.push_back(std::move(constants));
    }

    void type_body(ParsedType& type) {
        while (!at_end() && !peek().is("}")) {
            if (peek().is(";")) {
                ++pos_;
                continue;
            }
            if (peek().is("{")) {
                pos_ = skip_balanced(pos_, "{", "}");
                continue;
            }
            if (peek().is("static") && peek(1).is("{")) {
                pos_ = skip_balanced(pos_ + 1, "{", "}");
                continue;
            }
            auto before = pos_;
            member(type);
            if (pos_ == before) ++pos_;
        }
        expect("}");
    }

    void member(ParsedType& type) {
        auto start = pos_;
        {
            auto probe = pos_;
            modifiers();
            bool nested = at_type_keyword();
            pos_ = probe;
            if (nested) {
                if (auto inner = try_type_declaration(type.path)) {
                    ParsedMember m;
                    m.kind = ParsedMember::Kind::Type;
                    m.name = inner->name;
                    m.span = inner->span;
                    m.nested.push_back(std::move(*inner));
                    type.members.push_back(std::move(m));
                }
                return;
            }
        }
        auto annotations = modifiers();
        if (peek().is("<")) pos_ = skip_balanced(pos_, "<", ">");

        // Constructor (including a compact record constructor).
        if (peek().ident() && peek().text == type.name && (peek(1).is("(") || peek(1).is("{"))) {
            ParsedMember m;
            m.kind = ParsedMember::Kind::Constructor;
            m.name = type.name;
            m.annotations = std::move(annotations);
            ++pos_;
            if (peek().is("(")) m.param_types = parameters();
            callable_tail(m, start);
            m.signature = m.name + "(" + join(m.param_types) + ")";
            type.members.push_back(std::move(m));
            return;
        }

        auto type_text = parse_type_text();
        if (type_text.empty() || !peek().ident()) {
            skip_to_member_end();
            return;
        }
        std::string name(toks_[pos_++].text);
        if (peek().is("(")) {
            ParsedMember m;
            m.kind = ParsedMember::Kind::Method;
            m.name = name;
            m.annotations = std::move(annotations);
            m.return_type = type_text;
            m.param_types = parameters();
            callable_tail(m, start);
            m.signature = type_text + " " + name + "(" + join(m.param_types) + ")";
            type.members.push_back(std::move(m));
            return;
        }

        // Field declarators: name [dims] [= init] {, name [dims] [= init]} ;
        std::vector<std::pair<std::string, int>> names{{name, toks_[pos_ - 1].line}};
        while (!at_end() && !peek().is(";")) {
            if (peek().is("=")) {
                ++pos_;
                skip_initializer();
            } else if (peek().is(",") && peek(1).ident()) {
                names.emplace_back(std::string(toks_[pos_ + 1].text), toks_[pos_ + 1].line);
                pos_ += 2;
            } else if (peek().is("}")) {
                break;
            } else {
                ++pos_;
            }
        }
        expect(";");
        auto decl = single_line(text_of(start, pos_));
        for (const auto& [field_name, line] : names) {
            ParsedMember m;
            m.kind = ParsedMember::Kind::Field;
            m.name = field_name;
            m.annotations = annotations;
            m.return_type = type_text;
            m.signature = type_text + " " + field_name;
            m.decl_text = decl;
            m.span = {toks_[start].line, toks_[pos_ - 1].line};
            type.members.push_back(std::move(m));
        }
    }

    void skip_initializer() {
        while (!at_end() && !peek().is(",") && !peek().is(";") && !peek().is("}")) {
            if (peek().is("(")) pos_ = skip_balanced(pos_, "(", ")");
            else if (peek().is("{")) pos_ = skip_balanced(pos_, "{", "}");
            else if (peek().is("[")) pos_ = skip_balanced(pos_, "[", "]");
            else ++pos_;
        }
    }

    void skip_to_member_end() {
        while (!at_end() && !peek().is(";") && !peek().is("}")) {
            if (peek().is("{")) {
                pos_ = skip_balanced(pos_, "{", "}");
                return;
            }
            if (peek().is("(")) pos_ = skip_balanced(pos_, "(", ")");
            else ++pos_;
        }
        expect(";");
    }

    static std::string join(const std::vector<std::string>& parts) {
        std::string out;
        for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
        return out;
    }

    std::vector<std::string> parameters() {
        std::vector<std::string> types;
        auto close = skip_balanced(pos_, "(", ")");
        ++pos_;
        while (pos_ < close - 1) {
            modifiers();
            auto t = parse_type_text();
            if (t.empty()) {
                ++pos_;
                continue;
            }
            if (peek().ident()) {
                bool receiver = peek().is("this");
                ++pos_;
                while (peek().is("[") && peek(1).is("]")) {
                    t += "[]";
                    pos_ += 2;
                }
                if (!receiver) types.push_back(t);
            }
            while (pos_ < close - 1 && !peek().is(",")) ++pos_;
            if (peek().is(",")) ++pos_;
        }
        pos_ = close;
        return types;
    }

    // After the parameter list: dims, throws, then a body, `;` or a default
    // value. Fills span, header, body and calls.
    void callable_tail(ParsedMember& m, std::size_t start) {
        while (!at_end() && !peek().is("{") && !peek().is(";")) {
            if (peek().is("(")) pos_ = skip_balanced(pos_, "(", ")");
            else ++pos_;
        }
        m.header = single_line(text_of(start, pos_));
        if (peek().is("{")) {
            auto open = pos_;
            pos_ = skip_balanced(pos_, "{", "}");
            m.has_body = true;
            m.body_text = dedented_text_of(start, pos_);
            auto body = std::string_view(src_).substr(toks_[open].begin,
                                                      toks_[pos_ - 1].end - toks_[open].begin);
            m.calls = scan_calls(body);
        } else {
            expect(";");
        }
        m.span = {toks_[start].line, toks_[pos_ - 1].line};
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> toks;
    std::size_t i = 0;
    int line = 1;
    auto push = [&](TokenKind kind, std::size_t b, std::size_t e, int at_line) {
        toks.push_back({kind, s.substr(b, e - b), at_line, b, e});
    };
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
            i += 2;
            while (i + 1 < s.size() && !(s[i] == '*' && s[i + 1] == '/')) {
                if (s[i] == '\n') ++line;
                ++i;
            }
            i = std::min(s.size(), i + 2);
            continue;
        }
        auto b = i;
        int start_line = line;
        if (ident_start(c)) {
            while (i < s.size() && ident_part(static_cast<unsigned char>(s[i]))) ++i;
            push(TokenKind::Identifier, b, i, start_line);
            continue;
        }
        if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            ++i;
            while (i < s.size()) {
                unsigned char d = static_cast<unsigned char>(s[i]);
                if (std::isalnum(d) || d == '_' || d == '.') {
                    ++i;
                } else if ((d == '+' || d == '-') &&
                           (s[i - 1] == 'e' || s[i - 1] == 'E' || s[i - 1] == 'p' || s[i - 1] == 'P')) {
                    ++i;
                } else {
                    break;
                }
            }
            push(TokenKind::Literal, b, i, start_line);
            continue;
        }
        if (c == '"' && s.substr(i, 3) == "\"\"\"") {
            i += 3;
            while (i < s.size() && s.substr(i, 3) != "\"\"\"") {
                if (s[i] == '\\') ++i;
                else if (s[i] == '\n') ++line;
                ++i;
            }
            i = std::min(s.size(), i + 3);
            push(TokenKind::Literal, b, i, start_line);
            continue;
        }
        if (c == '"' || c == '\'') {
            ++i;
            while (i < s.size() && s[i] != static_cast<char>(c) && s[i] != '\n') {
                if (s[i] == '\\') ++i;
                ++i;
            }
            if (i < s.size() && s[i] == static_cast<char>(c)) ++i;
            push(TokenKind::Literal, b, i, start_line);
            continue;
        }
        if (s.substr(i, 3) == "...") {
            i += 3;
        } else if (s.substr(i, 2) == "::" || s.substr(i, 2) == "->") {
            i += 2;
        } else {
            ++i;
        }
        push(TokenKind::Punct, b, i, start_line);
    }
    return toks;
}

std::vector<CallSite> scan_calls(std::string_view code) {
    auto toks = lex(code);
    std::vector<CallSite> calls;
    const std::size_t n = toks.size();

    auto close_of = [&](std::size_t open) {
        int depth = 0;
        for (std::size_t i = open; i < n; ++i) {
            if (toks[i].is("(")) ++depth;
            else if (toks[i].is(")") && --depth == 0) return i;
        }
        return n;
    };
    auto skip_angles = [&](std::size_t i) {
        int depth = 0;
        for (; i < n; ++i) {
            if (toks[i].is("<")) ++depth;
            else if (toks[i].is(">") && --depth == 0) return i + 1;
            else if (toks[i].is(";") || toks[i].is("{") || toks[i].is("(")) return i;
        }
        return n;
    };
    // Number of arguments between parens at `open` and `close`.
    auto arity = [&](std::size_t open, std::size_t close) {
        if (close <= open + 1) return 0;
        int count = 1, depth = 0;
        for (std::size_t i = open + 1; i < close; ++i) {
            const auto& t = toks[i];
            if (t.is("(") || t.is("[") || t.is("{")) ++depth;
            else if (t.is(")") || t.is("]") || t.is("}")) --depth;
            else if (depth == 0 && t.is("new")) {
                // Skip the created type so generic commas are not counted.
                std::size_t j = i + 1;
                while (j < close && (toks[j].ident() || toks[j].is("."))) {
                    ++j;
                    if (j < close && toks[j].is("<")) j = skip_angles(j);
                }
                i = j - 1;
            } else if (depth == 0 && t.is("<") && i > open + 1 && toks[i - 1].is(".")) {
                i = skip_angles(i) - 1;
            } else if (depth == 0 && t.is(",")) {
                ++count;
            }
        }
        return count;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = toks[i];
        if (t.is("new")) {
            std::size_t j = i + 1;
            while (j < n && toks[j].is("@")) j += 2;
            std::string_view name;
            std::size_t name_pos = 0;
            while (j < n && toks[j].ident()) {
                name = toks[j].text;
                name_pos = toks[j].begin;
                ++j;
                if (j < n && toks[j].is("<")) j = skip_angles(j);
                if (j < n && toks[j].is(".") && j + 1 < n && toks[j + 1].ident()) ++j;
                else break;
            }
            if (!name.empty() && j < n && toks[j].is("(")) {
                auto close = close_of(j);
                calls.push_back({std::string(name), arity(j, close), CallSite::Form::New, name_pos});
            }
            i = j - 1;
            continue;
        }
        if (!t.ident() || i + 1 >= n || !toks[i + 1].is("(")) continue;
        if (i > 0 && (toks[i - 1].is("@") || toks[i - 1].is("::"))) continue;
        if (is_non_call_keyword(t.text) || t.is("new")) continue;
        auto close = close_of(i + 1);
        // `void run() {` / `void run() throws X {` declare, they do not call.
        if (close + 1 < n && (toks[close + 1].is("{") || toks[close + 1].is("throws")) &&
            i > 0 && (toks[i - 1].ident() || toks[i - 1].is(">") || toks[i - 1].is("]")) &&
            !toks[i - 1].is("return") && !toks[i - 1].is("new"))
            continue;
        CallSite::Form form = CallSite::Form::Plain;
        if (t.is("this") && !(i > 0 && toks[i - 1].is("."))) form = CallSite::Form::This;
        else if (t.is("super") && !(i > 0 && toks[i - 1].is("."))) form = CallSite::Form::Super;
        else if (t.is("this") || t.is("super")) continue;
        calls.push_back({std::string(t.text), arity(i + 1, close), form, t.begin});
    }
    return calls;
}

ParsedFile parse(std::string_view source) { return Parser(source, lex(source)).run(); }

std::vector<std::string> type_identifiers(std::string_view type_text) {
    static constexpr std::array<std::string_view, 10> kSkip = {
        "extends", "super", "int", "long", "short", "byte", "char", "boolean", "double", "float"};
    std::vector<std::string> out;
    std::string current;
    std::string qualified;
    auto flush = [&] {
        if (!current.empty() &&
            std::find(kSkip.begin(), kSkip.end(), current) == kSkip.end() && current != "void" &&
            current != "?")
            out.push_back(current);
        current.clear();
    };
    for (char c : type_text) {
        if (ident_part(static_cast<unsigned char>(c))) {
            current += c;
        } else if (c == '.') {
            current.clear();  // keep only the last segment of a qualified name
        } else {
            flush();
        }
    }
    flush();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string raw_type_name(std::string_view type_text) {
    auto cut = type_text.find_first_of("<[.");
    while (cut != std::string_view::npos && type_text[cut] == '.') {
        if (type_text.substr(cut, 3) == "...") break;
        type_text = type_text.substr(cut + 1);
        cut = type_text.find_first_of("<[.");
    }
    return std::string(type_text.substr(0, cut));
}

}  // namespace intentforge::java
