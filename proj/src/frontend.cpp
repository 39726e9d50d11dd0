#include "saga/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "saga/errors.hpp"
#include "saga/tokenizer.hpp"

namespace saga {

namespace {

// Parse tree kept before program points are assigned. Nested function and
// class definitions stay structured here so qualifier lookup can descend
// into them; they collapse to opaque statements during IR conversion.
struct PStmt {
    StatementLabel label = StatementLabel::Pass;
    int line = 0;
    int lastLine = 0;
    std::vector<ExprUsage> exprs;

    std::vector<PStmt> body;
    std::vector<PStmt> elseBranch;
    std::vector<PStmt> handlers;
    std::vector<PStmt> elseStmt;
    std::vector<PStmt> finallyStmt;
    std::vector<PStmt> cases;

    bool isDef = false;
    bool isClass = false;
    std::string defName;
    std::set<std::string> params;
    std::vector<std::string> bases;
    ExprUsage headerUsage;  // decorators, defaults, annotations, bases
};

const std::set<std::string>& reservedNonAtoms() {
    static const std::set<std::string> words = {
        "and",   "or",     "not",   "if",     "else",    "elif",  "for",
        "while", "in",     "is",    "as",     "def",     "class", "return",
        "raise", "pass",   "break", "continue", "import", "from",  "with",
        "try",   "except", "finally", "global", "nonlocal", "del", "assert",
    };
    return words;
}

bool isAugOp(const Token& t) {
    static const std::set<std::string> ops = {
        "+=", "-=", "*=", "/=", "//=", "**=", "%=",
        "@=", "&=", "|=", "^=", ">>=", "<<=",
    };
    return t.kind == TokenKind::Op && ops.count(t.text) > 0;
}

void normalizeUsage(ExprUsage& u) {
    for (const auto& d : u.defs) u.uses.erase(d);
}

std::string joinPath(const std::vector<std::string>& parts) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '.';
        out += parts[i];
    }
    return out;
}

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens)
        : tokens_(std::move(tokens)) {}

    const Token& peek(size_t off = 0) const {
        size_t i = pos_ + off;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    const Token& next() {
        const Token& t = peek();
        if (pos_ < tokens_.size()) ++pos_;
        switch (t.kind) {
            case TokenKind::Name:
            case TokenKind::Number:
            case TokenKind::String:
            case TokenKind::FString:
            case TokenKind::Op:
                lastLine_ = t.line;
                break;
            default:
                break;
        }
        return t;
    }

    bool at(TokenKind k) const { return peek().kind == k; }
    bool atOp(const char* s) const { return peek().isOp(s); }
    bool atName(const char* s) const { return peek().isName(s); }

    bool eat(TokenKind k) {
        if (!at(k)) return false;
        next();
        return true;
    }
    bool eatOp(const char* s) {
        if (!atOp(s)) return false;
        next();
        return true;
    }
    bool eatName(const char* s) {
        if (!atName(s)) return false;
        next();
        return true;
    }

    void expectOp(const char* s) {
        if (!eatOp(s)) fail(std::string("expected '") + s + "'");
    }
    std::string expectName() {
        if (!at(TokenKind::Name)) fail("expected a name");
        return next().text;
    }
    void expectNewline() {
        if (!eat(TokenKind::Newline)) fail("expected end of line");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, peek().line, peek().col);
    }

    size_t save() const { return pos_; }
    void restore(size_t p) { pos_ = p; }
    int lastLine() const { return lastLine_; }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
    int lastLine_ = 1;
};

enum class Ctx { Load, Store, Del };

// Outcome of a postfix chain: a (possibly dotted) name path until some
// trailer makes it opaque.
struct PathInfo {
    std::vector<std::string> path;
    bool rooted = false;      // path starts at a plain name
    bool subscripted = false; // last trailer was [..]
    std::vector<std::string> subscriptBase;
    bool subscriptRooted = false;

    void clear() {
        path.clear();
        rooted = false;
        subscripted = false;
        subscriptBase.clear();
        subscriptRooted = false;
    }
};

class Parser {
public:
    explicit Parser(const std::string& text) : ts_(tokenize(text)) {}

    std::vector<PStmt> parseModule() {
        std::vector<PStmt> stmts;
        while (!ts_.at(TokenKind::EndOfFile)) {
            if (ts_.at(TokenKind::Indent)) ts_.fail("unexpected indent");
            if (ts_.eat(TokenKind::Newline) || ts_.eat(TokenKind::Dedent))
                continue;
            parseStatement(stmts);
        }
        return stmts;
    }

private:
    TokenStream ts_;

    // ---- statements ----

    void parseStatement(std::vector<PStmt>& out) {
        const Token& t = ts_.peek();
        if (t.kind == TokenKind::Name) {
            const std::string& w = t.text;
            if (w == "if") return out.push_back(parseIf());
            if (w == "while") return out.push_back(parseWhile());
            if (w == "for") return out.push_back(parseFor());
            if (w == "with") return out.push_back(parseWith());
            if (w == "try") return out.push_back(parseTry());
            if (w == "def") return out.push_back(parseDef(false));
            if (w == "class") return out.push_back(parseClass());
            if (w == "async") return parseAsync(out);
            if (w == "match") {
                size_t save = ts_.save();
                PStmt m;
                if (tryParseMatch(m)) return out.push_back(std::move(m));
                ts_.restore(save);
            }
            if (w == "type" && ts_.peek(1).kind == TokenKind::Name &&
                (ts_.peek(2).isOp("=") || ts_.peek(2).isOp("[")))
                throw UnsupportedError(
                    "type alias statements are not supported (line " +
                    std::to_string(t.line) + ")");
        }
        if (t.isOp("@")) return out.push_back(parseDecorated());
        parseSimpleLine(out);
    }

    void parseAsync(std::vector<PStmt>& out) {
        ts_.next();  // async; the statement analyzes like its plain form
        if (ts_.atName("def")) return out.push_back(parseDef(false));
        if (ts_.atName("for")) return out.push_back(parseFor());
        if (ts_.atName("with")) return out.push_back(parseWith());
        ts_.fail("expected def, for or with after async");
    }

    PStmt parseDecorated() {
        ExprUsage deco;
        int firstLine = ts_.peek().line;
        while (ts_.eatOp("@")) {
            parseTest(deco, Ctx::Load);
            ts_.expectNewline();
        }
        ts_.eatName("async");
        PStmt node;
        if (ts_.atName("def"))
            node = parseDef(false);
        else if (ts_.atName("class"))
            node = parseClass();
        else
            ts_.fail("expected def or class after decorators");
        node.headerUsage.uses.insert(deco.uses.begin(), deco.uses.end());
        node.headerUsage.calls.insert(deco.calls.begin(), deco.calls.end());
        node.line = firstLine;
        return node;
    }

    std::vector<PStmt> parseSuite() {
        ts_.expectOp(":");
        std::vector<PStmt> body;
        if (ts_.eat(TokenKind::Newline)) {
            if (!ts_.eat(TokenKind::Indent)) ts_.fail("expected an indented block");
            while (!ts_.at(TokenKind::Dedent) && !ts_.at(TokenKind::EndOfFile))
                parseStatement(body);
            ts_.eat(TokenKind::Dedent);
        } else {
            parseSimpleLine(body);
        }
        if (body.empty()) ts_.fail("empty block");
        return body;
    }

    static int lastLineOf(const std::vector<PStmt>& stmts, int fallback) {
        int line = fallback;
        for (const auto& s : stmts) line = std::max(line, s.lastLine);
        return line;
    }

    void finishCompound(PStmt& node) {
        int line = node.line;
        for (const auto* seq :
             {&node.body, &node.elseBranch, &node.handlers, &node.elseStmt,
              &node.finallyStmt, &node.cases})
            line = lastLineOf(*seq, line);
        node.lastLine = line;
    }

    PStmt parseIf() {
        PStmt node;
        node.label = StatementLabel::If;
        node.line = ts_.peek().line;
        ts_.next();  // if / elif
        ExprUsage cond;
        parseTest(cond, Ctx::Load);
        normalizeUsage(cond);
        node.exprs.push_back(std::move(cond));
        node.body = parseSuite();
        if (ts_.atName("elif")) {
            node.elseBranch.push_back(parseIf());
        } else if (ts_.eatName("else")) {
            node.elseBranch = parseSuite();
        }
        finishCompound(node);
        return node;
    }

    PStmt parseWhile() {
        PStmt node;
        node.label = StatementLabel::While;
        node.line = ts_.next().line;
        ExprUsage cond;
        parseTest(cond, Ctx::Load);
        normalizeUsage(cond);
        node.exprs.push_back(std::move(cond));
        node.body = parseSuite();
        parseLoopElse(node);
        finishCompound(node);
        return node;
    }

    void parseLoopElse(PStmt& node) {
        if (!ts_.atName("else")) return;
        PStmt els;
        els.label = StatementLabel::Else;
        els.line = ts_.next().line;
        els.body = parseSuite();
        els.lastLine = lastLineOf(els.body, els.line);
        node.elseStmt.push_back(std::move(els));
    }

    PStmt parseFor() {
        PStmt node;
        node.label = StatementLabel::For;
        node.line = ts_.next().line;
        ExprUsage index, bound;
        parseTargetList(index, "in");
        normalizeUsage(index);
        if (!ts_.eatName("in")) ts_.fail("expected 'in'");
        parseTestlist(bound, Ctx::Load);
        normalizeUsage(bound);
        node.exprs.push_back(std::move(index));
        node.exprs.push_back(std::move(bound));
        node.body = parseSuite();
        parseLoopElse(node);
        finishCompound(node);
        return node;
    }

    PStmt parseWith() {
        PStmt node;
        node.label = StatementLabel::With;
        node.line = ts_.next().line;
        bool grouped = false;
        size_t save = ts_.save();
        if (ts_.eatOp("(")) {
            // Parenthesized item list (or a plain parenthesized expression;
            // fall back when the group does not close onto ':').
            std::vector<ExprUsage> items;
            try {
                do {
                    items.push_back(parseWithItem());
                } while (ts_.eatOp(","));
                if (ts_.eatOp(")") && ts_.atOp(":")) {
                    grouped = true;
                    node.exprs = std::move(items);
                }
            } catch (const SyntaxError&) {
            }
            if (!grouped) ts_.restore(save);
        }
        if (!grouped) {
            do {
                node.exprs.push_back(parseWithItem());
            } while (ts_.eatOp(","));
        }
        node.body = parseSuite();
        finishCompound(node);
        return node;
    }

    ExprUsage parseWithItem() {
        ExprUsage u;
        parseTest(u, Ctx::Load);
        if (ts_.eatName("as")) parseTarget(u);
        normalizeUsage(u);
        return u;
    }

    PStmt parseTry() {
        PStmt node;
        node.label = StatementLabel::Try;
        node.line = ts_.next().line;
        node.body = parseSuite();
        while (ts_.atName("except")) {
            PStmt handler;
            handler.label = StatementLabel::Except;
            handler.line = ts_.next().line;
            ts_.eatOp("*");  // except* groups analyze like plain except
            ExprUsage u;
            if (!ts_.atOp(":")) {
                parseTest(u, Ctx::Load);
                if (ts_.eatName("as")) u.defs.insert(ts_.expectName());
            }
            normalizeUsage(u);
            handler.exprs.push_back(std::move(u));
            handler.body = parseSuite();
            handler.lastLine = lastLineOf(handler.body, handler.line);
            node.handlers.push_back(std::move(handler));
        }
        if (ts_.atName("else")) {
            PStmt els;
            els.label = StatementLabel::Else;
            els.line = ts_.next().line;
            els.body = parseSuite();
            els.lastLine = lastLineOf(els.body, els.line);
            node.elseStmt.push_back(std::move(els));
        }
        if (ts_.atName("finally")) {
            PStmt fin;
            fin.label = StatementLabel::Finally;
            fin.line = ts_.next().line;
            fin.body = parseSuite();
            fin.lastLine = lastLineOf(fin.body, fin.line);
            node.finallyStmt.push_back(std::move(fin));
        }
        if (node.handlers.empty() && node.finallyStmt.empty())
            ts_.fail("try statement needs except or finally");
        finishCompound(node);
        return node;
    }

    bool tryParseMatch(PStmt& node) {
        node.label = StatementLabel::Match;
        node.line = ts_.peek().line;
        size_t save = ts_.save();
        ts_.next();  // match
        ExprUsage subject;
        try {
            parseTestlist(subject, Ctx::Load);
            if (!ts_.atOp(":")) {
                ts_.restore(save);
                return false;
            }
            ts_.next();
            if (!ts_.eat(TokenKind::Newline) || !ts_.eat(TokenKind::Indent)) {
                ts_.restore(save);
                return false;
            }
        } catch (const SyntaxError&) {
            ts_.restore(save);
            return false;
        }
        normalizeUsage(subject);
        node.exprs.push_back(std::move(subject));
        while (ts_.atName("case")) {
            PStmt kase;
            kase.label = StatementLabel::Case;
            kase.line = ts_.next().line;
            ExprUsage u = parsePattern();
            normalizeUsage(u);
            kase.exprs.push_back(std::move(u));
            kase.body = parseSuite();
            kase.lastLine = lastLineOf(kase.body, kase.line);
            node.cases.push_back(std::move(kase));
        }
        if (node.cases.empty()) ts_.fail("match statement without case clauses");
        ts_.eat(TokenKind::Dedent);
        finishCompound(node);
        return true;
    }

    // Patterns are scanned approximately: capture names define, value
    // patterns and literals use. The guard is a normal expression.
    ExprUsage parsePattern() {
        ExprUsage u;
        int depth = 0;
        while (true) {
            const Token& t = ts_.peek();
            if (t.kind == TokenKind::EndOfFile) ts_.fail("unterminated case pattern");
            if (depth == 0 && t.isOp(":")) break;
            if (depth == 0 && t.isName("if")) {
                ts_.next();
                parseTest(u, Ctx::Load);
                break;
            }
            if (t.kind == TokenKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                ts_.next();
                continue;
            }
            if (t.kind == TokenKind::Number) {
                u.uses.insert(ts_.next().text);
                continue;
            }
            if (t.kind == TokenKind::String || t.kind == TokenKind::FString) {
                u.uses.insert(ts_.next().text);
                continue;
            }
            // Name
            std::string name = ts_.next().text;
            if (name == "as") {
                if (ts_.at(TokenKind::Name)) u.defs.insert(ts_.next().text);
                continue;
            }
            if (name == "_" || name == "None" || name == "True" ||
                name == "False") {
                if (name != "_") u.uses.insert(name);
                continue;
            }
            if (ts_.atOp(".")) {
                std::vector<std::string> path = {name};
                while (ts_.eatOp(".")) path.push_back(ts_.expectName());
                u.uses.insert(joinPath(path));
                u.uses.insert(path.front());
                continue;
            }
            if (ts_.atOp("(") || ts_.atOp("{")) {
                u.uses.insert(name);  // class or mapping pattern head
                continue;
            }
            if (ts_.atOp("=")) {
                ts_.next();  // keyword pattern attribute, not a symbol
                continue;
            }
            u.defs.insert(name);  // capture
        }
        return u;
    }

    PStmt parseDef(bool /*unused*/) {
        PStmt node;
        node.isDef = true;
        node.label = StatementLabel::Exp;  // opaque unless it is the target
        node.line = ts_.next().line;       // def
        node.defName = ts_.expectName();
        ts_.expectOp("(");
        parseParams(node.params, node.headerUsage);
        ts_.expectOp(")");
        if (ts_.eatOp("->")) parseTest(node.headerUsage, Ctx::Load);
        node.body = parseSuite();
        finishCompound(node);
        return node;
    }

    void parseParams(std::set<std::string>& names, ExprUsage& defaults) {
        while (!ts_.atOp(")") && !ts_.at(TokenKind::EndOfFile)) {
            if (ts_.eatOp("/") || ts_.eatOp(",")) continue;
            if (ts_.eatOp("*")) {
                if (ts_.at(TokenKind::Name)) names.insert(ts_.next().text);
                continue;
            }
            if (ts_.eatOp("**")) {
                names.insert(ts_.expectName());
                continue;
            }
            names.insert(ts_.expectName());
            if (ts_.eatOp(":")) parseTest(defaults, Ctx::Load);
            if (ts_.eatOp("=")) parseTest(defaults, Ctx::Load);
        }
    }

    PStmt parseClass() {
        PStmt node;
        node.isClass = true;
        node.label = StatementLabel::Exp;
        node.line = ts_.next().line;  // class
        node.defName = ts_.expectName();
        if (ts_.eatOp("(")) {
            while (!ts_.atOp(")") && !ts_.at(TokenKind::EndOfFile)) {
                if (ts_.eatOp(",")) continue;
                if (ts_.at(TokenKind::Name) &&
                    ts_.peek(1).isOp("=")) {  // metaclass=... keyword
                    ts_.next();
                    ts_.next();
                    parseTest(node.headerUsage, Ctx::Load);
                    continue;
                }
                if (ts_.eatOp("*") || ts_.eatOp("**")) {
                    parseTest(node.headerUsage, Ctx::Load);
                    continue;
                }
                std::vector<std::string> path = {ts_.expectName()};
                while (ts_.eatOp(".")) path.push_back(ts_.expectName());
                node.bases.push_back(joinPath(path));
                node.headerUsage.uses.insert(joinPath(path));
                if (path.size() > 1) node.headerUsage.uses.insert(path.front());
            }
            ts_.expectOp(")");
        }
        node.body = parseSuite();
        finishCompound(node);
        return node;
    }

    void parseSimpleLine(std::vector<PStmt>& out) {
        while (true) {
            out.push_back(parseSmallStmt());
            if (ts_.eatOp(";")) {
                if (ts_.eat(TokenKind::Newline)) return;  // trailing ;
                continue;
            }
            if (ts_.eat(TokenKind::Newline)) return;
            if (ts_.at(TokenKind::EndOfFile) || ts_.at(TokenKind::Dedent))
                return;
            ts_.fail("expected end of statement");
        }
    }

    PStmt parseSmallStmt() {
        PStmt node;
        node.line = ts_.peek().line;
        const Token& t = ts_.peek();

        if (t.kind == TokenKind::Name) {
            const std::string& w = t.text;
            if (w == "pass") {
                ts_.next();
                node.label = StatementLabel::Pass;
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "break") {
                ts_.next();
                node.label = StatementLabel::Break;
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "continue") {
                ts_.next();
                node.label = StatementLabel::Continue;
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "return") {
                ts_.next();
                node.label = StatementLabel::Return;
                ExprUsage u;
                if (!atStatementEnd()) parseTestlist(u, Ctx::Load);
                normalizeUsage(u);
                node.exprs.push_back(std::move(u));
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "raise") {
                ts_.next();
                node.label = StatementLabel::Raise;
                ExprUsage u;
                if (!atStatementEnd()) {
                    parseTest(u, Ctx::Load);
                    if (ts_.eatName("from")) parseTest(u, Ctx::Load);
                }
                normalizeUsage(u);
                node.exprs.push_back(std::move(u));
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "import") return parseImport();
            if (w == "from") return parseFromImport();
            if (w == "global" || w == "nonlocal") {
                ts_.next();
                node.label = StatementLabel::Pass;  // scope-only declaration
                ts_.expectName();
                while (ts_.eatOp(",")) ts_.expectName();
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "del") {
                ts_.next();
                node.label = StatementLabel::Exp;
                ExprUsage u;
                u.calls.insert("del");
                do {
                    parsePostfix(u, Ctx::Del);
                } while (ts_.eatOp(","));
                normalizeUsage(u);
                node.exprs.push_back(std::move(u));
                node.lastLine = ts_.lastLine();
                return node;
            }
            if (w == "assert") {
                ts_.next();
                node.label = StatementLabel::Exp;
                ExprUsage u;
                parseTest(u, Ctx::Load);
                if (ts_.eatOp(",")) parseTest(u, Ctx::Load);
                normalizeUsage(u);
                node.exprs.push_back(std::move(u));
                node.lastLine = ts_.lastLine();
                return node;
            }
        }

        return parseExprOrAssign();
    }

    bool atStatementEnd() const {
        return ts_.at(TokenKind::Newline) || ts_.atOp(";") ||
               ts_.at(TokenKind::EndOfFile) || ts_.at(TokenKind::Dedent);
    }

    PStmt parseImport() {
        PStmt node;
        node.line = ts_.next().line;  // import
        node.label = StatementLabel::Import;
        ExprUsage u;
        do {
            std::vector<std::string> path = {ts_.expectName()};
            while (ts_.eatOp(".")) path.push_back(ts_.expectName());
            if (ts_.eatName("as"))
                u.defs.insert(ts_.expectName());
            else
                u.defs.insert(path.front());
        } while (ts_.eatOp(","));
        normalizeUsage(u);
        node.exprs.push_back(std::move(u));
        node.lastLine = ts_.lastLine();
        return node;
    }

    PStmt parseFromImport() {
        PStmt node;
        node.line = ts_.next().line;  // from
        node.label = StatementLabel::Import;
        ExprUsage u;
        while (ts_.eatOp(".")) {  // relative import dots
        }
        if (ts_.at(TokenKind::Name)) {
            std::vector<std::string> path = {ts_.expectName()};
            while (ts_.eatOp(".")) path.push_back(ts_.expectName());
            u.uses.insert(joinPath(path));
        }
        if (!ts_.eatName("import")) ts_.fail("expected 'import'");
        if (ts_.eatOp("*")) {
            normalizeUsage(u);
            node.exprs.push_back(std::move(u));
            node.lastLine = ts_.lastLine();
            return node;
        }
        bool parens = ts_.eatOp("(");
        do {
            if (parens && ts_.atOp(")")) break;
            std::string name = ts_.expectName();
            if (ts_.eatName("as")) name = ts_.expectName();
            u.defs.insert(name);
        } while (ts_.eatOp(","));
        if (parens) ts_.expectOp(")");
        normalizeUsage(u);
        node.exprs.push_back(std::move(u));
        node.lastLine = ts_.lastLine();
        return node;
    }

    // Classifies the rest of the logical statement: counts '=' groups and
    // detects augmented or annotated assignment at bracket depth zero.
    struct StmtShape {
        int eqCount = 0;
        bool aug = false;
        bool annotated = false;
    };

    StmtShape classify() const {
        StmtShape shape;
        int depth = 0;
        size_t off = 0;
        bool sawColon = false;
        while (true) {
            const Token& t = ts_.peek(off++);
            if (t.kind == TokenKind::Newline || t.kind == TokenKind::EndOfFile ||
                t.kind == TokenKind::Dedent)
                break;
            if (t.kind == TokenKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                else if (depth == 0) {
                    if (t.text == ";") break;
                    if (t.text == "=" && !sawColon) ++shape.eqCount;
                    if (t.text == "=" && sawColon) ++shape.eqCount;
                    if (t.text == ":") {
                        shape.annotated = true;
                        sawColon = true;
                    }
                    if (isAugOp(t)) {
                        shape.aug = true;
                        break;
                    }
                }
            }
            if (t.kind == TokenKind::Name && t.text == "lambda" && depth == 0)
                break;
        }
        return shape;
    }

    PStmt parseExprOrAssign() {
        PStmt node;
        node.line = ts_.peek().line;
        StmtShape shape = classify();

        if (shape.aug) {
            node.label = StatementLabel::Assign;
            ExprUsage lhs, rhs;
            parseTarget(lhs);
            if (!isAugOp(ts_.peek())) ts_.fail("expected augmented assignment");
            ts_.next();
            // The target is read as well as written.
            rhs.uses.insert(lhs.defs.begin(), lhs.defs.end());
            parseTestlist(rhs, Ctx::Load);
            normalizeUsage(lhs);
            normalizeUsage(rhs);
            node.exprs.push_back(std::move(lhs));
            node.exprs.push_back(std::move(rhs));
            node.lastLine = ts_.lastLine();
            return node;
        }

        if (shape.annotated) {
            node.label = StatementLabel::Assign;
            ExprUsage lhs, rhs;
            parseTarget(lhs);
            ts_.expectOp(":");
            parseTest(rhs, Ctx::Load);  // the annotation
            if (ts_.eatOp("=")) parseTestlist(rhs, Ctx::Load);
            normalizeUsage(lhs);
            normalizeUsage(rhs);
            node.exprs.push_back(std::move(lhs));
            node.exprs.push_back(std::move(rhs));
            node.lastLine = ts_.lastLine();
            return node;
        }

        if (shape.eqCount > 0) {
            node.label = StatementLabel::Assign;
            ExprUsage lhs, rhs;
            for (int i = 0; i < shape.eqCount; ++i) {
                parseTargetList(lhs, "=");
                ts_.expectOp("=");
            }
            parseTestlist(rhs, Ctx::Load);
            normalizeUsage(lhs);
            normalizeUsage(rhs);
            node.exprs.push_back(std::move(lhs));
            node.exprs.push_back(std::move(rhs));
            node.lastLine = ts_.lastLine();
            return node;
        }

        node.label = StatementLabel::Exp;
        ExprUsage u;
        parseTestlist(u, Ctx::Load);
        normalizeUsage(u);
        node.exprs.push_back(std::move(u));
        node.lastLine = ts_.lastLine();
        return node;
    }

    // ---- targets ----

    void parseTargetList(ExprUsage& u, const char* stopWord) {
        do {
            if (ts_.atName(stopWord) || atStatementEnd() || atExprEnd()) break;
            parseTarget(u);
        } while (ts_.eatOp(","));
    }

    void parseTarget(ExprUsage& u) {
        if (ts_.eatOp("*")) return parseTarget(u);
        if (ts_.eatOp("(") || ts_.eatOp("[")) {
            const char* close = ts_.peek().isOp("]") ? "]" : nullptr;
            do {
                if (ts_.atOp(")") || ts_.atOp("]")) break;
                parseTarget(u);
            } while (ts_.eatOp(","));
            if (!ts_.eatOp(")") && !ts_.eatOp("]"))
                ts_.fail("unterminated target list");
            (void)close;
            return;
        }
        parsePostfix(u, Ctx::Store);
    }

    // ---- expressions ----

    void parseTestlist(ExprUsage& u, Ctx ctx) {
        parseTest(u, ctx);
        while (ts_.atOp(",")) {
            ts_.next();
            if (atExprEnd()) break;  // trailing comma
            parseTest(u, ctx);
        }
    }

    bool atExprEnd() const {
        return ts_.at(TokenKind::Newline) || ts_.at(TokenKind::EndOfFile) ||
               ts_.at(TokenKind::Dedent) || ts_.atOp(")") || ts_.atOp("]") ||
               ts_.atOp("}") || ts_.atOp(":") || ts_.atOp(";") ||
               ts_.atOp("=");
    }

    void parseTest(ExprUsage& u, Ctx ctx) {
        if (ts_.atName("lambda")) return parseLambda(u);
        if (ts_.atName("yield")) {
            ts_.next();
            ts_.eatName("from");
            if (!atExprEnd() && !ts_.atOp(",")) parseTestlist(u, Ctx::Load);
            return;
        }
        if (ts_.at(TokenKind::Name) && ts_.peek(1).isOp(":=") &&
            !reservedNonAtoms().count(ts_.peek().text)) {
            u.defs.insert(ts_.next().text);
            ts_.next();  // :=
            parseTest(u, Ctx::Load);
            return;
        }
        parseOr(u, ctx);
        if (ts_.eatName("if")) {  // conditional expression
            parseOr(u, Ctx::Load);
            if (!ts_.eatName("else")) ts_.fail("expected 'else'");
            parseTest(u, Ctx::Load);
        }
    }

    void parseLambda(ExprUsage& u) {
        ts_.next();  // lambda
        // Parameter names are local to the lambda and not recorded.
        std::set<std::string> params;
        while (!ts_.atOp(":") && !ts_.at(TokenKind::EndOfFile)) {
            if (ts_.eatOp(",") || ts_.eatOp("*") || ts_.eatOp("**") ||
                ts_.eatOp("/"))
                continue;
            ts_.expectName();
            if (ts_.eatOp("=")) parseOr(u, Ctx::Load);
        }
        ts_.expectOp(":");
        parseTest(u, Ctx::Load);
    }

    void parseOr(ExprUsage& u, Ctx ctx) {
        parseAnd(u, ctx);
        while (ts_.eatName("or")) parseAnd(u, Ctx::Load);
    }

    void parseAnd(ExprUsage& u, Ctx ctx) {
        parseNot(u, ctx);
        while (ts_.eatName("and")) parseNot(u, Ctx::Load);
    }

    void parseNot(ExprUsage& u, Ctx ctx) {
        if (ts_.eatName("not")) return parseNot(u, Ctx::Load);
        parseComparison(u, ctx);
    }

    bool eatComparisonOp() {
        if (ts_.eatOp("<") || ts_.eatOp(">") || ts_.eatOp("<=") ||
            ts_.eatOp(">=") || ts_.eatOp("==") || ts_.eatOp("!="))
            return true;
        if (ts_.eatName("in")) return true;
        if (ts_.atName("not") && ts_.peek(1).isName("in")) {
            ts_.next();
            ts_.next();
            return true;
        }
        if (ts_.eatName("is")) {
            ts_.eatName("not");
            return true;
        }
        return false;
    }

    void parseComparison(ExprUsage& u, Ctx ctx) {
        parseBitOr(u, ctx);
        while (eatComparisonOp()) parseBitOr(u, Ctx::Load);
    }

    void parseBitOr(ExprUsage& u, Ctx ctx) {
        parseBitXor(u, ctx);
        while (ts_.eatOp("|")) parseBitXor(u, Ctx::Load);
    }

    void parseBitXor(ExprUsage& u, Ctx ctx) {
        parseBitAnd(u, ctx);
        while (ts_.eatOp("^")) parseBitAnd(u, Ctx::Load);
    }

    void parseBitAnd(ExprUsage& u, Ctx ctx) {
        parseShift(u, ctx);
        while (ts_.eatOp("&")) parseShift(u, Ctx::Load);
    }

    void parseShift(ExprUsage& u, Ctx ctx) {
        parseArith(u, ctx);
        while (ts_.eatOp("<<") || ts_.eatOp(">>")) parseArith(u, Ctx::Load);
    }

    void parseArith(ExprUsage& u, Ctx ctx) {
        parseTerm(u, ctx);
        while (ts_.eatOp("+") || ts_.eatOp("-")) parseTerm(u, Ctx::Load);
    }

    void parseTerm(ExprUsage& u, Ctx ctx) {
        parseFactor(u, ctx);
        while (ts_.eatOp("*") || ts_.eatOp("/") || ts_.eatOp("//") ||
               ts_.eatOp("%") || ts_.eatOp("@"))
            parseFactor(u, Ctx::Load);
    }

    void parseFactor(ExprUsage& u, Ctx ctx) {
        if (ts_.eatOp("+") || ts_.eatOp("-") || ts_.eatOp("~"))
            return parseFactor(u, Ctx::Load);
        parsePower(u, ctx);
    }

    void parsePower(ExprUsage& u, Ctx ctx) {
        if (ts_.eatName("await")) return parsePower(u, ctx);
        parsePostfix(u, ctx);
        if (ts_.eatOp("**")) parseFactor(u, Ctx::Load);
    }

    void parsePostfix(ExprUsage& u, Ctx ctx) {
        PathInfo info = parseAtom(u, ctx);
        while (true) {
            if (ts_.eatOp(".")) {
                std::string attr = ts_.expectName();
                if (info.subscripted) info.clear();
                info.path.push_back(attr);
                info.subscripted = false;
                continue;
            }
            if (ts_.atOp("(")) {
                emitCall(u, info);
                ts_.next();
                parseCallArgs(u);
                info.clear();
                continue;
            }
            if (ts_.atOp("[")) {
                // The base is read; remember it for subscript stores.
                std::vector<std::string> base = info.path;
                bool rooted = info.rooted;
                flushLoad(u, info);
                ts_.next();
                parseSubscript(u);
                ts_.expectOp("]");
                info.clear();
                info.subscripted = true;
                info.subscriptBase = std::move(base);
                info.subscriptRooted = rooted;
                continue;
            }
            break;
        }
        applyContext(u, info, ctx);
    }

    void flushLoad(ExprUsage& u, const PathInfo& info) {
        if (info.path.empty() || !info.rooted) return;
        u.uses.insert(joinPath(info.path));
        if (info.path.size() > 1) u.uses.insert(info.path.front());
    }

    void applyContext(ExprUsage& u, const PathInfo& info, Ctx ctx) {
        if (info.subscripted) {
            // a[i] as a store or delete target writes into a.
            if (ctx == Ctx::Store && info.subscriptRooted &&
                !info.subscriptBase.empty()) {
                u.defs.insert(joinPath(info.subscriptBase));
                if (info.subscriptBase.size() > 1)
                    u.defs.insert(info.subscriptBase.front());
            }
            return;
        }
        if (info.path.empty() || !info.rooted) return;
        std::string dotted = joinPath(info.path);
        switch (ctx) {
            case Ctx::Load:
                u.uses.insert(dotted);
                if (info.path.size() > 1) u.uses.insert(info.path.front());
                break;
            case Ctx::Store:
                u.defs.insert(dotted);
                if (info.path.size() > 1) u.defs.insert(info.path.front());
                break;
            case Ctx::Del:
                u.uses.insert(dotted);
                if (info.path.size() > 1) u.uses.insert(info.path.front());
                break;
        }
    }

    void emitCall(ExprUsage& u, const PathInfo& info) {
        if (info.path.empty()) return;  // call on an opaque value
        if (info.rooted) {
            std::string dotted = joinPath(info.path);
            u.calls.insert(dotted);
            if (info.path.size() > 1) {
                u.calls.insert("." + info.path.back());
                u.calls.insert(info.path.back());
                u.uses.insert(info.path.front());  // receiver is read
            }
        } else {
            u.calls.insert("." + info.path.back());
            u.calls.insert(info.path.back());
        }
    }

    void parseCallArgs(ExprUsage& u) {
        bool first = true;
        while (!ts_.atOp(")") && !ts_.at(TokenKind::EndOfFile)) {
            if (ts_.eatOp(",")) continue;
            if (ts_.eatOp("*") || ts_.eatOp("**")) {
                parseTest(u, Ctx::Load);
                continue;
            }
            if (ts_.at(TokenKind::Name) && ts_.peek(1).isOp("=") &&
                !reservedNonAtoms().count(ts_.peek().text)) {
                ts_.next();  // keyword name, not a symbol
                ts_.next();
                parseTest(u, Ctx::Load);
                continue;
            }
            parseTest(u, Ctx::Load);
            if (first && (ts_.atName("for") || ts_.atName("async")))
                parseCompClauses(u);
            first = false;
        }
        ts_.expectOp(")");
    }

    void parseSubscript(ExprUsage& u) {
        while (!ts_.atOp("]") && !ts_.at(TokenKind::EndOfFile)) {
            if (ts_.eatOp(",") || ts_.eatOp(":")) continue;
            parseTest(u, Ctx::Load);
        }
    }

    void parseCompClauses(ExprUsage& u) {
        while (true) {
            if (ts_.atName("async") && ts_.peek(1).isName("for")) ts_.next();
            if (!ts_.eatName("for")) break;
            // Comprehension targets are collected conservatively as uses.
            ExprUsage scratch;
            parseTargetList(scratch, "in");
            u.uses.insert(scratch.defs.begin(), scratch.defs.end());
            u.uses.insert(scratch.uses.begin(), scratch.uses.end());
            if (!ts_.eatName("in")) ts_.fail("expected 'in'");
            parseOr(u, Ctx::Load);
            while (ts_.eatName("if")) parseOr(u, Ctx::Load);
        }
    }

    PathInfo parseAtom(ExprUsage& u, Ctx ctx) {
        PathInfo info;
        const Token& t = ts_.peek();

        if (t.kind == TokenKind::Name) {
            if (t.text == "not") {  // allows `in`-chains to re-enter
                ts_.next();
                parseNot(u, Ctx::Load);
                return info;
            }
            if (reservedNonAtoms().count(t.text))
                ts_.fail("unexpected keyword '" + t.text + "'");
            info.path.push_back(ts_.next().text);
            info.rooted = true;
            return info;
        }
        if (t.kind == TokenKind::Number) {
            u.uses.insert(ts_.next().text);
            return info;
        }
        if (t.kind == TokenKind::String || t.kind == TokenKind::FString) {
            while (ts_.at(TokenKind::String) || ts_.at(TokenKind::FString)) {
                const Token& s = ts_.next();
                if (s.kind == TokenKind::String)
                    u.uses.insert(s.text);
                else
                    scanFStringNames(s.text, u);
            }
            return info;
        }
        if (t.isOp("(")) {
            ts_.next();
            if (!ts_.atOp(")")) {
                parseTest(u, ctx == Ctx::Store ? Ctx::Store : Ctx::Load);
                if (ts_.atName("for") || ts_.atName("async"))
                    parseCompClauses(u);
                while (ts_.eatOp(",")) {
                    if (ts_.atOp(")")) break;
                    parseTest(u, ctx == Ctx::Store ? Ctx::Store : Ctx::Load);
                }
            }
            ts_.expectOp(")");
            return info;
        }
        if (t.isOp("[")) {
            ts_.next();
            if (!ts_.atOp("]")) {
                parseTest(u, Ctx::Load);
                if (ts_.atName("for") || ts_.atName("async"))
                    parseCompClauses(u);
                while (ts_.eatOp(",")) {
                    if (ts_.atOp("]")) break;
                    parseTest(u, Ctx::Load);
                }
            }
            ts_.expectOp("]");
            return info;
        }
        if (t.isOp("{")) {
            ts_.next();
            bool first = true;
            while (!ts_.atOp("}") && !ts_.at(TokenKind::EndOfFile)) {
                if (ts_.eatOp(",")) continue;
                if (ts_.eatOp("**")) {
                    parseTest(u, Ctx::Load);
                    continue;
                }
                parseTest(u, Ctx::Load);
                if (ts_.eatOp(":")) parseTest(u, Ctx::Load);
                if (first && (ts_.atName("for") || ts_.atName("async")))
                    parseCompClauses(u);
                first = false;
            }
            ts_.expectOp("}");
            return info;
        }
        if (t.isOp("...")) {
            ts_.next();
            return info;
        }
        ts_.fail("unexpected token '" + t.text + "'");
    }

    // Best-effort extraction of names referenced inside f-string
    // interpolations.
    static void scanFStringNames(const std::string& body, ExprUsage& u) {
        size_t i = 0;
        while (i < body.size()) {
            if (body[i] == '{' && i + 1 < body.size() && body[i + 1] == '{') {
                i += 2;
                continue;
            }
            if (body[i] != '{') {
                ++i;
                continue;
            }
            ++i;
            int depth = 0;
            std::string region;
            while (i < body.size()) {
                char c = body[i];
                if (c == '[' || c == '(' || c == '{') ++depth;
                if (c == ']' || c == ')' || c == '}') {
                    if (c == '}' && depth == 0) break;
                    --depth;
                }
                if ((c == ':' || c == '!') && depth == 0) break;
                region += c;
                ++i;
            }
            while (i < body.size() && body[i] != '}') ++i;
            if (i < body.size()) ++i;
            // Pull dotted identifier chains out of the region.
            size_t j = 0;
            while (j < region.size()) {
                unsigned char c = region[j];
                if (!(std::isalpha(c) || c == '_')) {
                    ++j;
                    continue;
                }
                size_t start = j;
                while (j < region.size() &&
                       (std::isalnum(static_cast<unsigned char>(region[j])) ||
                        region[j] == '_' || region[j] == '.'))
                    ++j;
                std::string chain = region.substr(start, j - start);
                while (!chain.empty() && chain.back() == '.') chain.pop_back();
                if (chain.empty()) continue;
                u.uses.insert(chain);
                size_t dot = chain.find('.');
                if (dot != std::string::npos) u.uses.insert(chain.substr(0, dot));
            }
        }
    }
};

// ---- qualifier lookup and IR conversion ----

const PStmt* findDefinition(const std::vector<PStmt>& stmts,
                            const std::string& name) {
    for (const auto& s : stmts) {
        if ((s.isDef || s.isClass) && s.defName == name) return &s;
    }
    for (const auto& s : stmts) {
        for (const auto* seq : {&s.body, &s.elseBranch, &s.handlers,
                                &s.elseStmt, &s.finallyStmt, &s.cases}) {
            if (const PStmt* found = findDefinition(*seq, name)) return found;
        }
    }
    return nullptr;
}

void collectAggregate(const PStmt& stmt, ExprUsage& agg) {
    for (const auto& e : stmt.exprs) {
        agg.uses.insert(e.uses.begin(), e.uses.end());
        agg.uses.insert(e.defs.begin(), e.defs.end());
        agg.calls.insert(e.calls.begin(), e.calls.end());
    }
    agg.uses.insert(stmt.headerUsage.uses.begin(), stmt.headerUsage.uses.end());
    agg.calls.insert(stmt.headerUsage.calls.begin(),
                     stmt.headerUsage.calls.end());
    for (const auto* seq : {&stmt.body, &stmt.elseBranch, &stmt.handlers,
                            &stmt.elseStmt, &stmt.finallyStmt, &stmt.cases})
        for (const auto& child : *seq) collectAggregate(child, agg);
}

StatementIR convertStmt(const PStmt& stmt, int& nextPoint);

std::vector<StatementIR> convertSeq(const std::vector<PStmt>& stmts,
                                    int& nextPoint) {
    std::vector<StatementIR> out;
    out.reserve(stmts.size());
    for (const auto& s : stmts) out.push_back(convertStmt(s, nextPoint));
    return out;
}

StatementIR convertStmt(const PStmt& stmt, int& nextPoint) {
    StatementIR ir;
    ir.point = nextPoint++;
    ir.loc = stmt.line;
    ir.label = stmt.label;

    if (stmt.isDef || stmt.isClass) {
        // Opaque nested definition: aggregate every mentioned name.
        ir.label = StatementLabel::Exp;
        ExprUsage agg;
        collectAggregate(stmt, agg);
        agg.defs.insert(stmt.defName);
        normalizeUsage(agg);
        ir.exprs.push_back(std::move(agg));
        return ir;
    }

    ir.exprs = stmt.exprs;
    if (isBranchLabel(ir.label)) ir.endLoc = stmt.lastLine;

    ir.body = convertSeq(stmt.body, nextPoint);
    ir.elseBranch = convertSeq(stmt.elseBranch, nextPoint);
    ir.handlers = convertSeq(stmt.handlers, nextPoint);
    ir.elseStmt = convertSeq(stmt.elseStmt, nextPoint);
    ir.finallyStmt = convertSeq(stmt.finallyStmt, nextPoint);
    ir.cases = convertSeq(stmt.cases, nextPoint);
    return ir;
}

}  // namespace

ProcedureIR parseProcedure(const std::string& sourceText,
                           const std::string& qualifier) {
    size_t colon = qualifier.rfind(':');
    if (colon == std::string::npos || colon + 1 >= qualifier.size())
        throw LookupError("qualifier must have the form <path>:<name>: " +
                          qualifier);
    std::string name = qualifier.substr(colon + 1);

    Parser parser(sourceText);
    std::vector<PStmt> module = parser.parseModule();

    // Dotted names descend into nested definitions.
    std::vector<std::string> segments;
    size_t start = 0;
    while (true) {
        size_t dot = name.find('.', start);
        segments.push_back(name.substr(start, dot == std::string::npos
                                                  ? std::string::npos
                                                  : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }

    const PStmt* target = findDefinition(module, segments.front());
    for (size_t i = 1; target && i < segments.size(); ++i)
        target = findDefinition(target->body, segments[i]);
    if (!target)
        throw LookupError("no procedure or class named '" + name +
                          "' in " + qualifier.substr(0, colon));

    ProcedureIR proc;
    proc.qualifier = qualifier;
    proc.name = name;
    proc.container = target->isClass;
    proc.inputs = target->params;
    proc.bases = target->bases;
    proc.lineStart = target->line;
    proc.lineEnd = target->lastLine;
    int nextPoint = 1;
    proc.statements = convertSeq(target->body, nextPoint);
    proc.pointCount = nextPoint - 1;
    return proc;
}

std::vector<ExprUsage> statementExpressions(const StatementIR& stmt) {
    switch (stmt.label) {
        case StatementLabel::Pass:
        case StatementLabel::Break:
        case StatementLabel::Continue:
        case StatementLabel::Try:
        case StatementLabel::Finally:
        case StatementLabel::Else:
            return {};
        case StatementLabel::Assign:
        case StatementLabel::For:
        case StatementLabel::Exp:
        case StatementLabel::Return:
        case StatementLabel::Raise:
        case StatementLabel::If:
        case StatementLabel::While:
        case StatementLabel::With:
        case StatementLabel::Except:
        case StatementLabel::Match:
        case StatementLabel::Case:
        case StatementLabel::Import:
            return stmt.exprs;
        default:
            throw UnsupportedError("no statement expressions for label " +
                                   toString(stmt.label));
    }
}

}  // namespace saga
