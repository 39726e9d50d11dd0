#include <optional>
#include <set>
#include <string>

#include "saga/errors.hpp"
#include "saga/sable.hpp"

namespace saga {

namespace {

using adv::Stmt;

const std::set<std::string>& builtinNames() {
    static const std::set<std::string> names = {
        "currentPoint", "getAspect", "getExprSymbs", "getDescrSymbs",
        "enterLoop",    "len",       "set",          "deepcopy",
        "type",
    };
    return names;
}

// Number of expressions a statement of the given label carries, where fixed.
// With statements carry one per context manager, so their pointcut arity is
// not checked statically.
std::optional<int> expectedArity(StatementLabel label) {
    switch (label) {
        case StatementLabel::Assign:
        case StatementLabel::For:
            return 2;
        case StatementLabel::If:
        case StatementLabel::While:
        case StatementLabel::Return:
        case StatementLabel::Raise:
        case StatementLabel::Exp:
        case StatementLabel::Except:
        case StatementLabel::Match:
        case StatementLabel::Case:
        case StatementLabel::Import:
        case StatementLabel::EnterProcedure:
        case StatementLabel::EnterContainer:
            return 1;
        case StatementLabel::With:
            return std::nullopt;
        default:
            return 0;  // Pass, Break, Continue, Try, Finally, Else, Exit*, End*
    }
}

struct AdviceChecker {
    const TraversalDef& trav;
    std::set<std::string> importedAspects;
    bool inPointcut = false;
    std::string where;

    [[noreturn]] void fail(const std::string& msg, int line) const {
        throw ValidationError("traversal " + trav.name + ", " + where +
                              " (line " + std::to_string(line) + "): " + msg);
    }

    void checkTarget(const std::string& name, int line) const {
        if (builtinNames().count(name))
            fail("cannot assign to builtin '" + name + "'", line);
        if (importedAspects.count(name))
            fail("cannot assign to imported aspect '" + name + "'", line);
        if (trav.annotationVar && name == *trav.annotationVar)
            fail("cannot assign to the source annotation '" + name + "'",
                 line);
    }

    void checkBlock(const adv::Block& block) const {
        for (const auto& s : block) checkStmt(*s);
    }

    void checkStmt(const Stmt& s) const {
        switch (s.kind) {
            case Stmt::Kind::Assign:
            case Stmt::Kind::AugAssign:
                checkTarget(s.targetName, s.line);
                break;
            case Stmt::Kind::Return:
                if (inPointcut)
                    fail("return is not allowed in pointcut advice", s.line);
                break;
            case Stmt::Kind::If:
                for (const auto& arm : s.arms) checkBlock(arm.second);
                checkBlock(s.elseBody);
                break;
            case Stmt::Kind::For:
                checkTarget(s.loopVar, s.line);
                checkBlock(s.body);
                break;
            case Stmt::Kind::ExprStmt:
                break;
        }
    }
};

void validateTraversal(const TraversalDef& trav) {
    auto fail = [&trav](const std::string& msg, int line) {
        throw ValidationError("traversal " + trav.name + " (line " +
                              std::to_string(line) + "): " + msg);
    };

    std::set<std::string> aspectNames;
    for (const auto& a : trav.aspects)
        if (!aspectNames.insert(a.name).second)
            fail("aspect '" + a.name + "' declared twice", a.line);

    std::set<std::string> importedAspects;
    for (const auto& imp : trav.imports) {
        for (const auto& a : imp.aspects) {
            if (!importedAspects.insert(a).second)
                fail("aspect '" + a + "' imported twice", imp.line);
            if (aspectNames.count(a))
                fail("imported aspect '" + a +
                         "' collides with a declared aspect",
                     imp.line);
        }
    }

    std::set<std::string> utilityNames;
    for (const auto& util : trav.utilities) {
        if (util.name == "import")
            fail("import statements are not allowed in utility blocks; "
                 "utilities may only call other utilities and builtins",
                 util.line);
        if (!utilityNames.insert(util.name).second)
            fail("utility '" + util.name + "' defined twice", util.line);
        if (builtinNames().count(util.name))
            fail("utility '" + util.name + "' shadows a builtin", util.line);
        std::set<std::string> params;
        for (const auto& p : util.params)
            if (!params.insert(p).second)
                fail("utility '" + util.name + "' repeats parameter '" + p +
                         "'",
                     util.line);
    }

    for (const auto& trig : trav.triggers) {
        const AspectDecl* decl = nullptr;
        for (const auto& a : trav.aspects)
            if (a.name == trig.aspect) decl = &a;
        if (!decl)
            fail("triggerFrom names unknown aspect '" + trig.aspect + "'",
                 trig.line);
        if (!valueMatchesType(trig.value, decl->type))
            fail("trigger value for '" + trig.aspect +
                     "' does not match its declared type " +
                     toString(decl->type),
                 trig.line);
    }

    std::set<StatementLabel> pointcutLabels;
    for (const auto& pc : trav.pointcuts) {
        if (!pointcutLabels.insert(pc.label).second)
            fail("more than one pointcut for label " + toString(pc.label),
                 pc.line);
        std::set<std::string> params;
        for (const auto& p : pc.params)
            if (!params.insert(p).second)
                fail("pointcut " + toString(pc.label) +
                         " repeats parameter '" + p + "'",
                     pc.line);
        auto arity = expectedArity(pc.label);
        if (arity && static_cast<int>(pc.params.size()) != *arity)
            fail("pointcut " + toString(pc.label) + " takes " +
                     std::to_string(*arity) + " parameter(s), got " +
                     std::to_string(pc.params.size()),
                 pc.line);
    }

    AdviceChecker checker{trav, importedAspects, false, ""};
    for (const auto& util : trav.utilities) {
        checker.inPointcut = false;
        checker.where = "utility " + util.name;
        checker.checkBlock(util.body);
    }
    for (const auto& pc : trav.pointcuts) {
        checker.inPointcut = true;
        checker.where = "pointcut " + toString(pc.label);
        checker.checkBlock(pc.advice);
    }
    if (trav.merge) {
        checker.inPointcut = false;
        checker.where = "mergeAspects";
        checker.checkBlock(trav.merge->body);
        if (trav.merge->leftParam == trav.merge->rightParam)
            fail("mergeAspects parameters must be distinct",
                 trav.merge->line);
    }
}

}  // namespace

void validateSable(const SableProgram& program) {
    std::set<std::string> names;
    for (const auto& trav : program.traversals) {
        if (!names.insert(trav.name).second)
            throw ValidationError("traversal '" + trav.name +
                                  "' is defined more than once");
        validateTraversal(trav);
    }
}

}  // namespace saga
