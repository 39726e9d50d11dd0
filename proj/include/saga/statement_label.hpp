#ifndef SAGA_STATEMENT_LABEL_HPP
#define SAGA_STATEMENT_LABEL_HPP

#include <optional>
#include <string>

namespace saga {

enum class StatementLabel {
    EnterProcedure,
    ExitProcedure,
    EnterContainer,
    ExitContainer,
    Assign,
    Exp,
    If,
    Else,
    While,
    For,
    With,
    Try,
    Except,
    Finally,
    Match,
    Case,
    Return,
    Raise,
    Pass,
    Break,
    Continue,
    Import,
    EndIf,
    EndElse,
    EndWhile,
    EndFor,
    EndWith,
    EndTry,
    EndMatch,
};

const std::string& toString(StatementLabel label);
std::optional<StatementLabel> labelFromString(const std::string& name);

// Statements that open a lexical scope and therefore own an ending state.
bool isBranchLabel(StatementLabel label);
bool isLoopLabel(StatementLabel label);
bool isEndingLabel(StatementLabel label);

// EndIf for If, EndFor for For, ... Only valid for branch labels.
StatementLabel endingLabelFor(StatementLabel label);

}  // namespace saga

#endif
