#ifndef SAGA_TOKENIZER_HPP
#define SAGA_TOKENIZER_HPP

#include <string>
#include <vector>

namespace saga {

enum class TokenKind {
    Name,
    Number,     // text = source slice, e.g. "0o77"
    String,     // text = decoded content
    FString,    // text = raw body between the quotes
    Op,
    Newline,    // end of a logical line
    Indent,
    Dedent,
    EndOfFile,
};

struct Token {
    TokenKind kind;
    std::string text;
    int line = 0;
    int col = 0;

    bool is(TokenKind k) const { return kind == k; }
    bool isOp(const char* s) const { return kind == TokenKind::Op && text == s; }
    bool isName(const char* s) const {
        return kind == TokenKind::Name && text == s;
    }
};

// Indentation-aware tokenizer for Python-like text. Emits Indent/Dedent
// tokens, joins lines inside brackets and after backslash, strips comments,
// and ends with Newline Dedent* EndOfFile.
std::vector<Token> tokenize(const std::string& text);

}  // namespace saga

#endif
