#include "saga/statement_label.hpp"

#include <array>
#include <map>

#include "saga/errors.hpp"

namespace saga {

namespace {

const std::array<std::string, 29> kNames = {
    "EnterProcedure", "ExitProcedure", "EnterContainer", "ExitContainer",
    "Assign",         "Exp",           "If",             "Else",
    "While",          "For",           "With",           "Try",
    "Except",         "Finally",       "Match",          "Case",
    "Return",         "Raise",         "Pass",           "Break",
    "Continue",       "Import",        "EndIf",          "EndElse",
    "EndWhile",       "EndFor",        "EndWith",        "EndTry",
    "EndMatch",
};

}  // namespace

const std::string& toString(StatementLabel label) {
    return kNames[static_cast<size_t>(label)];
}

std::optional<StatementLabel> labelFromString(const std::string& name) {
    static const std::map<std::string, StatementLabel> index = [] {
        std::map<std::string, StatementLabel> m;
        for (size_t i = 0; i < kNames.size(); ++i)
            m[kNames[i]] = static_cast<StatementLabel>(i);
        return m;
    }();
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

bool isBranchLabel(StatementLabel label) {
    switch (label) {
        case StatementLabel::If:
        case StatementLabel::Try:
        case StatementLabel::Else:
        case StatementLabel::Match:
        case StatementLabel::With:
        case StatementLabel::While:
        case StatementLabel::For:
            return true;
        default:
            return false;
    }
}

bool isLoopLabel(StatementLabel label) {
    return label == StatementLabel::While || label == StatementLabel::For;
}

bool isEndingLabel(StatementLabel label) {
    switch (label) {
        case StatementLabel::EndIf:
        case StatementLabel::EndElse:
        case StatementLabel::EndWhile:
        case StatementLabel::EndFor:
        case StatementLabel::EndWith:
        case StatementLabel::EndTry:
        case StatementLabel::EndMatch:
            return true;
        default:
            return false;
    }
}

StatementLabel endingLabelFor(StatementLabel label) {
    switch (label) {
        case StatementLabel::If: return StatementLabel::EndIf;
        case StatementLabel::Else: return StatementLabel::EndElse;
        case StatementLabel::While: return StatementLabel::EndWhile;
        case StatementLabel::For: return StatementLabel::EndFor;
        case StatementLabel::With: return StatementLabel::EndWith;
        case StatementLabel::Try: return StatementLabel::EndTry;
        case StatementLabel::Match: return StatementLabel::EndMatch;
        default:
            throw ContractError("no ending label for " + toString(label));
    }
}

}  // namespace saga
