#ifndef SAGA_SABLE_AST_HPP
#define SAGA_SABLE_AST_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saga/aspect_value.hpp"
#include "saga/statement_label.hpp"

namespace saga {
namespace adv {

// AST of the advice mini-language (a closed Python subset executed by the
// interpreter in advice.cpp). Fat nodes tagged by kind; only the fields
// relevant to a kind are populated.
struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind {
        Name,
        BoolLit,
        IntLit,
        StrLit,
        NoneLit,
        SetDisplay,
        ListDisplay,
        MapDisplay,
        Unary,    // op = "not" | "-"
        Binary,   // op = "|" "&" "-" "+" "*" "/" "%"
        Compare,  // op = "<" "<=" ">" ">=" "==" "!=" "in" "not in"
        BoolOp,   // op = "and" | "or", short-circuit
        Call,     // callee(args...): utility, builtin or primitive
        Method,   // receiver.method(args...)
        Subscript,
    };

    Kind kind;
    int line = 0;

    std::string name;
    bool boolVal = false;
    std::int64_t intVal = 0;
    std::string strVal;

    std::vector<ExprPtr> elements;
    std::vector<std::pair<ExprPtr, ExprPtr>> items;

    std::string op;
    ExprPtr lhs;
    ExprPtr rhs;

    std::string callee;
    ExprPtr receiver;
    std::string method;
    std::vector<ExprPtr> args;

    ExprPtr object;
    ExprPtr index;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    enum class Kind { Assign, AugAssign, If, For, Return, ExprStmt };

    Kind kind;
    int line = 0;

    // Assign / AugAssign. Target is a name or name[index].
    std::string targetName;
    ExprPtr targetIndex;  // non-null for subscript targets
    std::string op;       // "|=", "-=", "&=" for AugAssign
    ExprPtr value;        // also the Return operand and the ExprStmt payload

    // If: arms pair each condition with its block; elseBody may be empty.
    std::vector<std::pair<ExprPtr, std::vector<StmtPtr>>> arms;
    std::vector<StmtPtr> elseBody;

    // For-each.
    std::string loopVar;
    ExprPtr iterable;
    std::vector<StmtPtr> body;
};

using Block = std::vector<StmtPtr>;

}  // namespace adv

enum class AspectType { Bool, Int, Str, Set, List, Map };

const std::string& toString(AspectType t);
std::optional<AspectType> aspectTypeFromString(const std::string& name);
bool valueMatchesType(const AspectValue& v, AspectType t);

struct UtilityDef {
    std::string name;
    std::vector<std::string> params;
    adv::Block body;
    int line = 0;
};

struct ImportDecl {
    std::string fromTraversal;
    std::vector<std::string> aspects;
    int line = 0;
};

struct AspectDecl {
    std::string name;
    AspectType type = AspectType::Bool;
    int line = 0;
};

struct TriggerDecl {
    std::string aspect;
    AspectValue value;
    int line = 0;
};

struct PointcutDef {
    StatementLabel label = StatementLabel::Exp;
    std::vector<std::string> params;
    adv::Block advice;
    int line = 0;
};

struct MergeDef {
    std::string leftParam;
    std::string rightParam;
    adv::Block body;
    int line = 0;
};

struct TraversalDef {
    std::string name;
    int line = 0;
    std::vector<UtilityDef> utilities;
    std::vector<ImportDecl> imports;
    std::optional<std::string> annotationVar;
    std::vector<AspectDecl> aspects;
    std::vector<TriggerDecl> triggers;
    std::vector<PointcutDef> pointcuts;
    std::optional<MergeDef> merge;

    const PointcutDef* pointcutFor(StatementLabel label) const;
    bool declaresAspect(const std::string& name) const;
    bool importsAspect(const std::string& name) const;
};

struct SableProgram {
    std::vector<TraversalDef> traversals;

    const TraversalDef* find(const std::string& name) const;
};

}  // namespace saga

#endif
