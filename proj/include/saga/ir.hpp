#ifndef SAGA_IR_HPP
#define SAGA_IR_HPP

#include <set>
#include <string>
#include <vector>

#include "saga/expr_usage.hpp"
#include "saga/statement_label.hpp"

namespace saga {

// One analyzed statement. Compound statements carry their nested sequences;
// which vectors are populated depends on the label:
//   If            body = then branch; elseBranch = else branch (if present)
//   While, For    body = loop body; elseStmt = trailing Else statement
//   With          body
//   Try           body; handlers = Except statements; elseStmt; finallyStmt
//   Match         cases = Case statements
//   Else, Except, Finally, Case   body
struct StatementIR {
    int point = 0;
    int loc = 0;
    // Populated for branch labels only: last line of the statement's scope.
    int endLoc = 0;
    StatementLabel label = StatementLabel::Pass;
    std::vector<ExprUsage> exprs;

    std::vector<StatementIR> body;
    std::vector<StatementIR> elseBranch;
    std::vector<StatementIR> handlers;
    std::vector<StatementIR> elseStmt;    // zero or one element
    std::vector<StatementIR> finallyStmt; // zero or one element
    std::vector<StatementIR> cases;
};

struct ProcedureIR {
    std::string qualifier;       // "<path>:<name>" as requested
    std::string name;
    std::set<std::string> inputs;
    std::vector<std::string> bases;  // base classes when container
    bool container = false;
    int lineStart = 0;
    int lineEnd = 0;
    int pointCount = 0;          // total statements, nested included
    std::vector<StatementIR> statements;
};

}  // namespace saga

#endif
