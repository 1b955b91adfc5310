#pragma once

// Token stream for MVDLite source.  Newlines terminate statements, but the
// lexer suppresses them inside brackets and after trailing binder tokens
// (->, :, comparators, |, connectives, as, extends) so long chains can be
// wrapped.  Comments are collected as trivia, not tokens.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mvd/lang/ast.hpp"

namespace mvd::lang {

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string& message)
        : std::runtime_error(render(pos, message)), pos(pos), message(message) {}
    SourcePos pos;
    std::string message;

private:
    static std::string render(SourcePos pos, const std::string& message) {
        return "line " + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
               message;
    }
};

enum class Tok : std::uint8_t {
    End,
    Newline,
    Arrow,     // ->
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Pipe,      // |
    Compare,   // = != > < >= <=
    Ident,
    String,
    Int,
    Real,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;        // Ident spelling / decoded String
    std::int64_t ival = 0;
    double rval = 0.0;
    Cmp cmp = Cmp::Eq;
    SourcePos pos;
};

struct LexResult {
    std::vector<Token> tokens;        // ends with Tok::End
    std::vector<CommentInfo> comments;
};

LexResult lex(std::string_view source);

bool is_connective_word(std::string_view word);  // AND/OR/XOR/NOT, case-insensitive
bool iequals(std::string_view a, std::string_view b);

}  // namespace mvd::lang
