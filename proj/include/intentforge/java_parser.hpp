#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "intentforge/model.hpp"

// A tolerant front end for the declaration-level subset of Java: types,
// members, annotations, imports, inheritance clauses and call expressions.
// Generics are kept as text; nothing is type-checked.
namespace intentforge::java {

enum class TokenKind { Identifier, Literal, Punct };

struct Token {
    TokenKind kind = TokenKind::Punct;
    std::string_view text;
    int line = 1;
    std::size_t begin = 0;  // byte offset into the source
    std::size_t end = 0;

    bool is(std::string_view t) const { return text == t; }
    bool ident() const { return kind == TokenKind::Identifier; }
};

// Comments and whitespace are dropped. `>` is always a single token so that
// nested generics close correctly.
std::vector<Token> lex(std::string_view source);

struct CallSite {
    std::string name;  // callee simple name; the class name for `new`
    int arity = 0;
    enum class Form { Plain, New, This, Super } form = Form::Plain;
    std::size_t position = 0;  // byte offset of the name in the scanned text
};

// Call expressions in source order. Declarations nested in the code
// (anonymous/local class methods) are not reported as calls.
std::vector<CallSite> scan_calls(std::string_view code);

struct ParsedMember;

struct ParsedType {
    NodeKind kind = NodeKind::Class;
    std::string keyword;  // class, interface, enum, record, @interface
    std::string name;
    std::string path;    // dotted path of enclosing types, e.g. `Outer.Inner`
    std::string header;  // declaration text before `{`, single line
    Span span;
    std::vector<std::string> annotations;
    std::vector<std::string> extends;  // raw type texts
    std::vector<std::string> implements;
    bool is_enum = false;
    std::vector<ParsedMember> members;  // source order
};

struct ParsedMember {
    enum class Kind { Field, Method, Constructor, Type, EnumConstants };
    Kind kind = Kind::Field;
    std::string name;
    std::string signature;
    std::string header;      // callables: text before the body (or `;`)
    std::string decl_text;   // fields: full declaration; enum constants: `A, B;`
    std::string body_text;   // callables with a body: full declaration text
    Span span;
    std::vector<std::string> annotations;
    std::vector<std::string> param_types;
    std::string return_type;
    bool has_body = false;
    std::vector<CallSite> calls;
    std::vector<std::string> constant_names;  // EnumConstants only
    std::vector<Span> constant_spans;
    std::vector<ParsedType> nested;  // exactly one element when kind == Type
};

struct ParsedFile {
    std::string package_name;
    std::string package_line;          // `package a.b;` verbatim, or empty
    std::vector<std::string> imports;  // verbatim import declarations
    std::vector<ParsedType> types;
};

ParsedFile parse(std::string_view source);

// Simple names of every identifier in a type text that could denote a type,
// e.g. `Map<String, List<Route>>` -> Map, String, List, Route.
std::vector<std::string> type_identifiers(std::string_view type_text);

// Erased simple name: `java.util.List<String>[]` -> `List`.
std::string raw_type_name(std::string_view type_text);

}  // namespace intentforge::java
