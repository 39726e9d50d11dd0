#include "saga/tokenizer.hpp"

#include <cctype>
#include <cstring>

#include "saga/errors.hpp"

namespace saga {

namespace {

bool isIdentStart(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool isIdentCont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

// Longest-match operator table.
const char* const kOperators[] = {
    "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=",
    "+=",  "-=",  "*=",  "/=",  "%=",  "@=", "&=", "|=", "^=", "**", "//",
    ">>",  "<<",  "+",   "-",   "*",   "/",  "%",  "@",  "&",  "|",  "^",
    "~",   "<",   ">",   "(",   ")",   "[",  "]",  "{",  "}",  ",",  ":",
    ".",   ";",   "=",
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        while (pos_ < text_.size()) {
            if (atLineStart_ && depth_ == 0) {
                handleIndentation();
                if (pos_ >= text_.size()) break;
            }
            lexOne();
        }
        if (lineHasTokens_) emit(TokenKind::Newline, "");
        while (indents_.back() > 0) {
            indents_.pop_back();
            emit(TokenKind::Dedent, "");
        }
        emit(TokenKind::EndOfFile, "");
        return std::move(tokens_);
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int depth_ = 0;  // bracket nesting
    bool atLineStart_ = true;
    bool lineHasTokens_ = false;
    std::vector<int> indents_;
    std::vector<Token> tokens_;

    char peek(size_t off = 0) const {
        return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void emit(TokenKind kind, std::string text, int line = -1, int col = -1) {
        tokens_.push_back(Token{kind, std::move(text),
                                line < 0 ? line_ : line,
                                col < 0 ? col_ : col});
    }

    void handleIndentation() {
        // Measure leading whitespace of the next logical line; skip blank
        // and comment-only lines entirely.
        while (pos_ < text_.size()) {
            size_t scan = pos_;
            int width = 0;
            while (scan < text_.size() &&
                   (text_[scan] == ' ' || text_[scan] == '\t')) {
                width = text_[scan] == '\t' ? (width / 8 + 1) * 8 : width + 1;
                ++scan;
            }
            if (scan >= text_.size()) {
                while (pos_ < scan) advance();
                return;
            }
            char c = text_[scan];
            if (c == '\n' || c == '\r' || c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                if (pos_ < text_.size()) advance();  // consume newline
                continue;
            }
            while (pos_ < scan) advance();
            applyIndent(width);
            atLineStart_ = false;
            return;
        }
    }

    void applyIndent(int width) {
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenKind::Indent, "");
            return;
        }
        while (width < indents_.back()) {
            indents_.pop_back();
            emit(TokenKind::Dedent, "");
        }
        if (width != indents_.back())
            throw SyntaxError("inconsistent indentation", line_, col_);
    }

    void lexOne() {
        char c = peek();
        if (c == '\r') {
            advance();
            return;
        }
        if (c == '\n') {
            advance();
            if (depth_ == 0) {
                if (lineHasTokens_) {
                    emit(TokenKind::Newline, "", line_ - 1, col_);
                    lineHasTokens_ = false;
                }
                atLineStart_ = true;
            }
            return;
        }
        if (c == ' ' || c == '\t') {
            advance();
            return;
        }
        if (c == '#') {
            while (pos_ < text_.size() && peek() != '\n') advance();
            return;
        }
        if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
            advance();
            if (peek() == '\r') advance();
            advance();  // the newline: joined line, no Newline token
            return;
        }

        lineHasTokens_ = true;
        int startLine = line_, startCol = col_;

        if (isIdentStart(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   isIdentCont(static_cast<unsigned char>(peek())))
                advance();
            std::string word = text_.substr(start, pos_ - start);
            // String prefix? (r, b, u, f and combinations, any case)
            if (word.size() <= 2 && (peek() == '\'' || peek() == '"')) {
                bool prefix = true;
                bool fstr = false, raw = false;
                for (char p : word) {
                    switch (std::tolower(static_cast<unsigned char>(p))) {
                        case 'f': fstr = true; break;
                        case 'r': raw = true; break;
                        case 'b':
                        case 'u': break;
                        default: prefix = false;
                    }
                }
                if (prefix) {
                    lexString(fstr, raw, startLine, startCol);
                    return;
                }
            }
            emit(TokenKind::Name, std::move(word), startLine, startCol);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lexNumber(startLine, startCol);
            return;
        }
        if (c == '\'' || c == '"') {
            lexString(false, false, startLine, startCol);
            return;
        }
        for (const char* op : kOperators) {
            size_t n = std::strlen(op);
            if (text_.compare(pos_, n, op) == 0) {
                if (op[0] == '(' || op[0] == '[' || op[0] == '{') ++depth_;
                if (op[0] == ')' || op[0] == ']' || op[0] == '}')
                    depth_ = depth_ > 0 ? depth_ - 1 : 0;
                for (size_t i = 0; i < n; ++i) advance();
                emit(TokenKind::Op, op, startLine, startCol);
                return;
            }
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'",
                          line_, col_);
    }

    void lexNumber(int startLine, int startCol) {
        size_t start = pos_;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' ||
                              peek(1) == 'o' || peek(1) == 'O' ||
                              peek(1) == 'b' || peek(1) == 'B')) {
            advance();
            advance();
            while (std::isalnum(static_cast<unsigned char>(peek())) ||
                   peek() == '_')
                advance();
        } else {
            bool seenExp = false;
            while (true) {
                char c = peek();
                if (std::isdigit(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '.') {
                    advance();
                } else if ((c == 'e' || c == 'E') && !seenExp &&
                           (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                            ((peek(1) == '+' || peek(1) == '-') &&
                             std::isdigit(static_cast<unsigned char>(peek(2)))))) {
                    seenExp = true;
                    advance();
                    if (peek() == '+' || peek() == '-') advance();
                } else if (c == 'j' || c == 'J') {
                    advance();
                    break;
                } else {
                    break;
                }
            }
        }
        emit(TokenKind::Number, text_.substr(start, pos_ - start), startLine,
             startCol);
    }

    void lexString(bool fstr, bool raw, int startLine, int startCol) {
        char quote = peek();
        bool triple = peek(1) == quote && peek(2) == quote;
        advance();
        if (triple) {
            advance();
            advance();
        }
        std::string value;
        while (true) {
            if (pos_ >= text_.size())
                throw SyntaxError("unterminated string literal", startLine,
                                  startCol);
            char c = peek();
            if (c == '\\' && pos_ + 1 < text_.size()) {
                char next = peek(1);
                advance();
                advance();
                if (raw) {
                    value += '\\';
                    value += next;
                } else {
                    value += decodeEscape(next);
                }
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    advance();
                    break;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    advance();
                    advance();
                    advance();
                    break;
                }
                value += c;
                advance();
                continue;
            }
            if (c == '\n' && !triple)
                throw SyntaxError("unterminated string literal", startLine,
                                  startCol);
            value += c;
            advance();
        }
        emit(fstr ? TokenKind::FString : TokenKind::String, std::move(value),
             startLine, startCol);
    }

    static std::string decodeEscape(char c) {
        switch (c) {
            case 'n': return "\n";
            case 't': return "\t";
            case 'r': return "\r";
            case '0': return std::string(1, '\0');
            case 'a': return "\a";
            case 'b': return "\b";
            case 'f': return "\f";
            case 'v': return "\v";
            case '\n': return "";  // escaped newline inside a string
            case '\\': return "\\";
            case '\'': return "'";
            case '"': return "\"";
            default: return std::string("\\") + c;  // \x.. etc. kept verbatim
        }
    }
};

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
    return Lexer(text).run();
}

}  // namespace saga
