#ifndef SAGA_FRONTEND_HPP
#define SAGA_FRONTEND_HPP

#include <string>
#include <vector>

#include "saga/ir.hpp"

namespace saga {

// Parses Python source and extracts the procedure or class named by
// `qualifier` ("<path>:<name>", name may be dotted for nested definitions).
// Program points are assigned in statement order starting at 1; nested
// function and class definitions inside the target become opaque Exp
// statements whose usage aggregates every name they mention.
ProcedureIR parseProcedure(const std::string& sourceText,
                           const std::string& qualifier);

// Statement expressions for a statement of the given label, as they appear
// on symbolic states: two for Assign (targets, value) and For (index,
// bound), one each for Return/Raise/Exp/While/If/Except/Match/Case/Import,
// one per context manager for With, none for Pass/Break/Continue/Try/
// Finally/Else.
std::vector<ExprUsage> statementExpressions(const StatementIR& stmt);

}  // namespace saga

#endif
