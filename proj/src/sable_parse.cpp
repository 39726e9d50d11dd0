#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "saga/errors.hpp"
#include "saga/sable.hpp"
#include "saga/tokenizer.hpp"

namespace saga {

// ---- small AST helpers ----

const std::string& toString(AspectType t) {
    static const std::string names[] = {"bool", "int",  "string",
                                        "set",  "list", "map"};
    return names[static_cast<int>(t)];
}

std::optional<AspectType> aspectTypeFromString(const std::string& name) {
    static const std::map<std::string, AspectType> types = {
        {"bool", AspectType::Bool}, {"int", AspectType::Int},
        {"string", AspectType::Str}, {"set", AspectType::Set},
        {"list", AspectType::List}, {"map", AspectType::Map},
    };
    auto it = types.find(name);
    if (it == types.end()) return std::nullopt;
    return it->second;
}

bool valueMatchesType(const AspectValue& v, AspectType t) {
    switch (t) {
        case AspectType::Bool: return v.kind() == AspectValue::Kind::Bool;
        case AspectType::Int: return v.kind() == AspectValue::Kind::Int;
        case AspectType::Str: return v.kind() == AspectValue::Kind::Str;
        case AspectType::Set: return v.kind() == AspectValue::Kind::Set;
        case AspectType::List: return v.kind() == AspectValue::Kind::List;
        case AspectType::Map: return v.kind() == AspectValue::Kind::Map;
    }
    return false;
}

const PointcutDef* TraversalDef::pointcutFor(StatementLabel label) const {
    for (const auto& pc : pointcuts)
        if (pc.label == label) return &pc;
    return nullptr;
}

bool TraversalDef::declaresAspect(const std::string& aspect) const {
    for (const auto& a : aspects)
        if (a.name == aspect) return true;
    return false;
}

bool TraversalDef::importsAspect(const std::string& aspect) const {
    for (const auto& imp : imports)
        for (const auto& a : imp.aspects)
            if (a == aspect) return true;
    return false;
}

const TraversalDef* SableProgram::find(const std::string& name) const {
    for (const auto& t : traversals)
        if (t.name == name) return &t;
    return nullptr;
}

namespace {

using adv::Expr;
using adv::ExprPtr;
using adv::Stmt;
using adv::StmtPtr;

ExprPtr cloneExpr(const Expr& e) {
    auto out = std::make_unique<Expr>();
    out->kind = e.kind;
    out->line = e.line;
    out->name = e.name;
    out->boolVal = e.boolVal;
    out->intVal = e.intVal;
    out->strVal = e.strVal;
    for (const auto& el : e.elements) out->elements.push_back(cloneExpr(*el));
    for (const auto& [k, v] : e.items)
        out->items.emplace_back(cloneExpr(*k), cloneExpr(*v));
    out->op = e.op;
    if (e.lhs) out->lhs = cloneExpr(*e.lhs);
    if (e.rhs) out->rhs = cloneExpr(*e.rhs);
    out->callee = e.callee;
    if (e.receiver) out->receiver = cloneExpr(*e.receiver);
    out->method = e.method;
    for (const auto& a : e.args) out->args.push_back(cloneExpr(*a));
    if (e.object) out->object = cloneExpr(*e.object);
    if (e.index) out->index = cloneExpr(*e.index);
    return out;
}

class SableParser {
public:
    explicit SableParser(const std::string& text) : tokens_(tokenize(text)) {}

    SableProgram parse() {
        SableProgram program;
        while (!at(TokenKind::EndOfFile)) {
            if (eat(TokenKind::Newline) || eat(TokenKind::Dedent)) continue;
            program.traversals.push_back(parseTraversal());
        }
        return program;
    }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;

    // ---- token plumbing ----

    const Token& peek(size_t off = 0) const {
        size_t i = pos_ + off;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < tokens_.size()) ++pos_;
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
    void expectKeyword(const char* s) {
        if (!eatName(s)) fail(std::string("expected '") + s + "'");
    }
    void expectNewline() {
        if (!eat(TokenKind::Newline)) fail("expected end of line");
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, peek().line, peek().col);
    }
    size_t save() const { return pos_; }
    void restore(size_t p) { pos_ = p; }

    // ---- traversal structure ----

    TraversalDef parseTraversal() {
        TraversalDef trav;
        trav.line = peek().line;
        expectKeyword("traversal");
        trav.name = expectName();
        expectOp(":");
        expectNewline();
        if (!eat(TokenKind::Indent)) fail("expected an indented traversal body");
        while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) {
            if (eat(TokenKind::Newline)) continue;
            parseTraversalItem(trav);
        }
        eat(TokenKind::Dedent);
        return trav;
    }

    void parseTraversalItem(TraversalDef& trav) {
        if (atName("utility")) return parseUtilitySection(trav);
        if (atName("fromTraversal")) return parseImport(trav);
        if (atName("sourceAnnotation")) {
            next();
            std::string var = expectName();
            if (trav.annotationVar)
                fail("sourceAnnotation declared twice in traversal " +
                     trav.name);
            trav.annotationVar = var;
            expectNewline();
            return;
        }
        if (atName("aspect")) return parseAspect(trav);
        if (atName("triggerFrom")) return parseTrigger(trav);
        if (atName("pointcut")) return parsePointcut(trav);
        if (atName("mergeAspects")) return parseMerge(trav);
        fail("unexpected declaration '" + peek().text + "' in traversal " +
             trav.name);
    }

    void parseUtilitySection(TraversalDef& trav) {
        next();  // utility
        expectOp(":");
        expectNewline();
        if (!eat(TokenKind::Indent)) fail("expected indented utility block");
        while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) {
            if (eat(TokenKind::Newline)) continue;
            // The Python import forms are recognized so validation can
            // reject them with a dedicated message.
            if (atName("import") || atName("from")) {
                UtilityDef marker;
                marker.line = peek().line;
                marker.name = "import";
                while (!eat(TokenKind::Newline) && !at(TokenKind::EndOfFile))
                    next();
                trav.utilities.push_back(std::move(marker));
                continue;
            }
            trav.utilities.push_back(parseUtilityDef());
        }
        eat(TokenKind::Dedent);
    }

    UtilityDef parseUtilityDef() {
        UtilityDef util;
        util.line = peek().line;
        expectKeyword("def");
        util.name = expectName();
        expectOp("(");
        while (!atOp(")")) {
            util.params.push_back(expectName());
            if (!eatOp(",")) break;
        }
        expectOp(")");
        expectOp(":");
        util.body = parseBlock();
        return util;
    }

    void parseImport(TraversalDef& trav) {
        ImportDecl imp;
        imp.line = next().line;  // fromTraversal
        imp.fromTraversal = expectName();
        expectKeyword("importAspect");
        imp.aspects.push_back(expectName());
        while (eatOp(",")) imp.aspects.push_back(expectName());
        expectNewline();
        trav.imports.push_back(std::move(imp));
    }

    void parseAspect(TraversalDef& trav) {
        AspectDecl decl;
        decl.line = next().line;  // aspect
        decl.name = expectName();
        expectKeyword("aspectType");
        std::string typeName = expectName();
        auto type = aspectTypeFromString(typeName);
        if (!type)
            fail("unknown aspect type '" + typeName +
                 "' (expected bool, int, string, set, list or map)");
        decl.type = *type;
        expectNewline();
        trav.aspects.push_back(std::move(decl));
    }

    void parseTrigger(TraversalDef& trav) {
        TriggerDecl trig;
        trig.line = next().line;  // triggerFrom
        trig.aspect = expectName();
        expectKeyword("atValue");
        trig.value = parseLiteral();
        expectNewline();
        trav.triggers.push_back(std::move(trig));
    }

    AspectValue parseLiteral() {
        if (eatName("True")) return AspectValue::boolean(true);
        if (eatName("False")) return AspectValue::boolean(false);
        if (eatName("None")) return AspectValue::none();
        bool negative = eatOp("-");
        if (at(TokenKind::Number)) return AspectValue::integer(parseInt(negative));
        if (negative) fail("expected a number after '-'");
        if (at(TokenKind::String)) return AspectValue::str(next().text);
        fail("expected a literal value");
    }

    std::int64_t parseInt(bool negative) {
        const Token& t = next();
        for (char c : t.text)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw SyntaxError("only decimal integers are supported",
                                  t.line, t.col);
        std::int64_t v = std::stoll(t.text);
        return negative ? -v : v;
    }

    void parsePointcut(TraversalDef& trav) {
        PointcutDef pc;
        pc.line = next().line;  // pointcut
        expectOp("(");
        std::string labelName = expectName();
        auto label = labelFromString(labelName);
        if (!label) fail("unknown statement label '" + labelName + "'");
        pc.label = *label;
        while (eatOp(",")) pc.params.push_back(expectName());
        expectOp(")");
        expectOp(":");
        pc.advice = parseBlock();
        trav.pointcuts.push_back(std::move(pc));
    }

    void parseMerge(TraversalDef& trav) {
        MergeDef merge;
        merge.line = next().line;  // mergeAspects
        expectOp("(");
        merge.leftParam = expectName();
        expectOp(",");
        merge.rightParam = expectName();
        expectOp(")");
        expectOp(":");
        merge.body = parseBlock();
        if (trav.merge)
            fail("mergeAspects declared twice in traversal " + trav.name);
        trav.merge = std::move(merge);
    }

    // ---- advice statements ----

    adv::Block parseBlock() {
        adv::Block block;
        if (eat(TokenKind::Newline)) {
            if (!eat(TokenKind::Indent)) fail("expected an indented block");
            while (!at(TokenKind::Dedent) && !at(TokenKind::EndOfFile)) {
                if (eat(TokenKind::Newline)) continue;
                block.push_back(parseStmt());
            }
            eat(TokenKind::Dedent);
        } else {
            block.push_back(parseSimpleStmt());
            expectNewline();
        }
        if (block.empty()) fail("empty block");
        return block;
    }

    StmtPtr parseStmt() {
        if (atName("if")) return parseIf();
        if (atName("for")) return parseFor();
        StmtPtr s = parseSimpleStmt();
        expectNewline();
        return s;
    }

    StmtPtr parseIf() {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::If;
        s->line = next().line;  // if
        ExprPtr cond = parseExpr();
        expectOp(":");
        s->arms.emplace_back(std::move(cond), parseBlock());
        while (atName("elif")) {
            next();
            ExprPtr c = parseExpr();
            expectOp(":");
            s->arms.emplace_back(std::move(c), parseBlock());
        }
        if (eatName("else")) {
            expectOp(":");
            s->elseBody = parseBlock();
        }
        return s;
    }

    StmtPtr parseFor() {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::For;
        s->line = next().line;  // for
        s->loopVar = expectName();
        expectKeyword("in");
        s->iterable = parseExpr();
        expectOp(":");
        s->body = parseBlock();
        return s;
    }

    StmtPtr parseSimpleStmt() {
        auto s = std::make_unique<Stmt>();
        s->line = peek().line;
        if (eatName("return")) {
            s->kind = Stmt::Kind::Return;
            if (!at(TokenKind::Newline) && !at(TokenKind::EndOfFile) &&
                !at(TokenKind::Dedent))
                s->value = parseExpr();
            return s;
        }

        // Assignment targets are a name or name[index]; everything else is
        // an expression statement.
        size_t mark = save();
        if (at(TokenKind::Name) && !reserved(peek().text)) {
            std::string name = next().text;
            ExprPtr index;
            bool ok = true;
            if (eatOp("[")) {
                try {
                    index = parseExpr();
                } catch (const SyntaxError&) {
                    ok = false;
                }
                if (ok && !eatOp("]")) ok = false;
            }
            if (ok && (atOp("=") || atOp("|=") || atOp("-=") || atOp("&="))) {
                std::string op = next().text;
                s->kind = op == "=" ? Stmt::Kind::Assign : Stmt::Kind::AugAssign;
                s->targetName = name;
                s->targetIndex = std::move(index);
                if (op != "=") s->op = op;
                s->value = parseExpr();
                return s;
            }
        }
        restore(mark);
        s->kind = Stmt::Kind::ExprStmt;
        s->value = parseExpr();
        return s;
    }

    static bool reserved(const std::string& w) {
        static const std::set<std::string> words = {
            "if",  "elif", "else", "for", "in",   "return", "and",
            "or",  "not",  "True", "False", "None",
        };
        return words.count(w) > 0;
    }

    // ---- advice expressions ----

    ExprPtr parseExpr() { return parseOr(); }

    ExprPtr parseOr() {
        ExprPtr left = parseAnd();
        while (atName("or")) {
            int line = next().line;
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::BoolOp;
            node->op = "or";
            node->line = line;
            node->lhs = std::move(left);
            node->rhs = parseAnd();
            left = std::move(node);
        }
        return left;
    }

    ExprPtr parseAnd() {
        ExprPtr left = parseNot();
        while (atName("and")) {
            int line = next().line;
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::BoolOp;
            node->op = "and";
            node->line = line;
            node->lhs = std::move(left);
            node->rhs = parseNot();
            left = std::move(node);
        }
        return left;
    }

    ExprPtr parseNot() {
        if (atName("not")) {
            int line = next().line;
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::Unary;
            node->op = "not";
            node->line = line;
            node->lhs = parseNot();
            return node;
        }
        return parseComparison();
    }

    bool atComparisonOp(std::string& op) {
        for (const char* c : {"<=", ">=", "==", "!=", "<", ">"}) {
            if (atOp(c)) {
                op = c;
                return true;
            }
        }
        if (atName("in")) {
            op = "in";
            return true;
        }
        if (atName("not") && peek(1).isName("in")) {
            op = "not in";
            return true;
        }
        return false;
    }

    void eatComparisonOp(const std::string& op) {
        next();
        if (op == "not in") next();
    }

    // Chained comparisons desugar to and-joined pairs.
    ExprPtr parseComparison() {
        ExprPtr left = parseBitOr();
        std::string op;
        if (!atComparisonOp(op)) return left;

        ExprPtr chain;
        while (atComparisonOp(op)) {
            int line = peek().line;
            eatComparisonOp(op);
            ExprPtr right = parseBitOr();
            auto cmp = std::make_unique<Expr>();
            cmp->kind = Expr::Kind::Compare;
            cmp->op = op;
            cmp->line = line;
            cmp->lhs = std::move(left);
            cmp->rhs = cloneExpr(*right);
            left = std::move(right);
            if (!chain) {
                chain = std::move(cmp);
            } else {
                auto conj = std::make_unique<Expr>();
                conj->kind = Expr::Kind::BoolOp;
                conj->op = "and";
                conj->line = line;
                conj->lhs = std::move(chain);
                conj->rhs = std::move(cmp);
                chain = std::move(conj);
            }
        }
        return chain;
    }

    ExprPtr parseBitOr() {
        ExprPtr left = parseBitAnd();
        while (atOp("|")) {
            int line = next().line;
            left = binary("|", std::move(left), parseBitAnd(), line);
        }
        return left;
    }

    ExprPtr parseBitAnd() {
        ExprPtr left = parseArith();
        while (atOp("&")) {
            int line = next().line;
            left = binary("&", std::move(left), parseArith(), line);
        }
        return left;
    }

    ExprPtr parseArith() {
        ExprPtr left = parseTerm();
        while (atOp("+") || atOp("-")) {
            std::string op = peek().text;
            int line = next().line;
            left = binary(op, std::move(left), parseTerm(), line);
        }
        return left;
    }

    ExprPtr parseTerm() {
        ExprPtr left = parseUnary();
        while (atOp("*") || atOp("/") || atOp("%")) {
            std::string op = peek().text;
            int line = next().line;
            left = binary(op, std::move(left), parseUnary(), line);
        }
        return left;
    }

    ExprPtr binary(const std::string& op, ExprPtr lhs, ExprPtr rhs, int line) {
        auto node = std::make_unique<Expr>();
        node->kind = Expr::Kind::Binary;
        node->op = op;
        node->line = line;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        return node;
    }

    ExprPtr parseUnary() {
        if (atOp("-")) {
            int line = next().line;
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::Unary;
            node->op = "-";
            node->line = line;
            node->lhs = parseUnary();
            return node;
        }
        return parsePostfix();
    }

    ExprPtr parsePostfix() {
        ExprPtr base = parseAtom();
        while (true) {
            if (atOp(".")) {
                int line = next().line;
                std::string method = expectName();
                expectOp("(");
                auto node = std::make_unique<Expr>();
                node->kind = Expr::Kind::Method;
                node->line = line;
                node->receiver = std::move(base);
                node->method = method;
                node->args = parseArgs();
                base = std::move(node);
                continue;
            }
            if (atOp("(")) {
                if (base->kind != Expr::Kind::Name)
                    fail("only names and methods can be called");
                int line = next().line;
                auto node = std::make_unique<Expr>();
                node->kind = Expr::Kind::Call;
                node->line = line;
                node->callee = base->name;
                node->args = parseArgs();
                base = std::move(node);
                continue;
            }
            if (atOp("[")) {
                int line = next().line;
                auto node = std::make_unique<Expr>();
                node->kind = Expr::Kind::Subscript;
                node->line = line;
                node->object = std::move(base);
                node->index = parseExpr();
                expectOp("]");
                base = std::move(node);
                continue;
            }
            return base;
        }
    }

    std::vector<ExprPtr> parseArgs() {
        std::vector<ExprPtr> args;
        while (!atOp(")")) {
            args.push_back(parseExpr());
            if (!eatOp(",")) break;
        }
        expectOp(")");
        return args;
    }

    ExprPtr parseAtom() {
        auto node = std::make_unique<Expr>();
        node->line = peek().line;
        if (at(TokenKind::Name)) {
            const std::string& w = peek().text;
            if (w == "True" || w == "False") {
                node->kind = Expr::Kind::BoolLit;
                node->boolVal = next().text == "True";
                return node;
            }
            if (w == "None") {
                next();
                node->kind = Expr::Kind::NoneLit;
                return node;
            }
            if (reserved(w)) fail("unexpected keyword '" + w + "'");
            node->kind = Expr::Kind::Name;
            node->name = next().text;
            return node;
        }
        if (at(TokenKind::Number)) {
            node->kind = Expr::Kind::IntLit;
            node->intVal = parseInt(false);
            return node;
        }
        if (at(TokenKind::String)) {
            node->kind = Expr::Kind::StrLit;
            node->strVal = next().text;
            return node;
        }
        if (eatOp("(")) {
            ExprPtr inner = parseExpr();
            expectOp(")");
            return inner;
        }
        if (eatOp("[")) {
            node->kind = Expr::Kind::ListDisplay;
            while (!atOp("]")) {
                node->elements.push_back(parseExpr());
                if (!eatOp(",")) break;
            }
            expectOp("]");
            return node;
        }
        if (eatOp("{")) {
            if (eatOp("}")) {  // {} is an empty map, as in Python
                node->kind = Expr::Kind::MapDisplay;
                return node;
            }
            ExprPtr first = parseExpr();
            if (eatOp(":")) {
                node->kind = Expr::Kind::MapDisplay;
                node->items.emplace_back(std::move(first), parseExpr());
                while (eatOp(",")) {
                    if (atOp("}")) break;
                    ExprPtr k = parseExpr();
                    expectOp(":");
                    node->items.emplace_back(std::move(k), parseExpr());
                }
            } else {
                node->kind = Expr::Kind::SetDisplay;
                node->elements.push_back(std::move(first));
                while (eatOp(",")) {
                    if (atOp("}")) break;
                    node->elements.push_back(parseExpr());
                }
            }
            expectOp("}");
            return node;
        }
        fail("unexpected token '" + peek().text + "'");
    }
};

}  // namespace

SableProgram parseSable(const std::string& text) {
    SableParser parser(text);
    SableProgram program = parser.parse();
    validateSable(program);
    return program;
}

SableProgram mergePrograms(std::vector<SableProgram> programs) {
    SableProgram merged;
    for (auto& p : programs)
        for (auto& t : p.traversals) {
            if (merged.find(t.name))
                throw ValidationError("traversal '" + t.name +
                                      "' is defined more than once");
            merged.traversals.push_back(std::move(t));
        }
    validateSable(merged);
    return merged;
}

std::set<std::string> traversalDependencies(const TraversalDef& traversal) {
    std::set<std::string> deps;
    for (const auto& imp : traversal.imports) deps.insert(imp.fromTraversal);
    deps.erase(traversal.name);  // self-imports read this traversal's results
    return deps;
}

}  // namespace saga
