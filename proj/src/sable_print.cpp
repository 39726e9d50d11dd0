#include <sstream>
#include <string>

#include "saga/sable.hpp"

namespace saga {

namespace {

using adv::Expr;
using adv::Stmt;

// Precedence levels for minimal parenthesization; higher binds tighter.
int precedenceOf(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::BoolOp: return e.op == "or" ? 1 : 2;
        case Expr::Kind::Unary: return e.op == "not" ? 3 : 9;
        case Expr::Kind::Compare: return 4;
        case Expr::Kind::Binary:
            if (e.op == "|") return 5;
            if (e.op == "&") return 6;
            if (e.op == "+" || e.op == "-") return 7;
            return 8;  // * / %
        case Expr::Kind::Call:
        case Expr::Kind::Method:
        case Expr::Kind::Subscript: return 10;
        default: return 11;
    }
}

std::string renderExpr(const Expr& e, int parentPrec);

std::string renderArgs(const std::vector<adv::ExprPtr>& args) {
    std::string out = "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += renderExpr(*args[i], 0);
    }
    out += ")";
    return out;
}

std::string renderExpr(const Expr& e, int parentPrec) {
    int prec = precedenceOf(e);
    std::string out;
    switch (e.kind) {
        case Expr::Kind::Name: out = e.name; break;
        case Expr::Kind::BoolLit: out = e.boolVal ? "True" : "False"; break;
        case Expr::Kind::IntLit: out = std::to_string(e.intVal); break;
        case Expr::Kind::StrLit: {
            out = "'";
            for (char c : e.strVal) {
                if (c == '\\' || c == '\'') out += '\\';
                out += c;
            }
            out += "'";
            break;
        }
        case Expr::Kind::NoneLit: out = "None"; break;
        case Expr::Kind::SetDisplay: {
            out = "{";
            for (size_t i = 0; i < e.elements.size(); ++i) {
                if (i) out += ", ";
                out += renderExpr(*e.elements[i], 0);
            }
            out += "}";
            break;
        }
        case Expr::Kind::ListDisplay: {
            out = "[";
            for (size_t i = 0; i < e.elements.size(); ++i) {
                if (i) out += ", ";
                out += renderExpr(*e.elements[i], 0);
            }
            out += "]";
            break;
        }
        case Expr::Kind::MapDisplay: {
            out = "{";
            for (size_t i = 0; i < e.items.size(); ++i) {
                if (i) out += ", ";
                out += renderExpr(*e.items[i].first, 0) + ": " +
                       renderExpr(*e.items[i].second, 0);
            }
            out += "}";
            break;
        }
        case Expr::Kind::Unary:
            if (e.op == "not")
                out = "not " + renderExpr(*e.lhs, prec);
            else
                out = "-" + renderExpr(*e.lhs, prec);
            break;
        case Expr::Kind::Binary:
            out = renderExpr(*e.lhs, prec) + " " + e.op + " " +
                  renderExpr(*e.rhs, prec + 1);
            break;
        case Expr::Kind::Compare:
            out = renderExpr(*e.lhs, prec + 1) + " " + e.op + " " +
                  renderExpr(*e.rhs, prec + 1);
            break;
        case Expr::Kind::BoolOp:
            out = renderExpr(*e.lhs, prec) + " " + e.op + " " +
                  renderExpr(*e.rhs, prec + 1);
            break;
        case Expr::Kind::Call: out = e.callee + renderArgs(e.args); break;
        case Expr::Kind::Method:
            out = renderExpr(*e.receiver, 10) + "." + e.method +
                  renderArgs(e.args);
            break;
        case Expr::Kind::Subscript:
            out = renderExpr(*e.object, 10) + "[" + renderExpr(*e.index, 0) +
                  "]";
            break;
    }
    if (prec < parentPrec) return "(" + out + ")";
    return out;
}

void renderBlock(std::ostringstream& out, const adv::Block& block, int indent);

void renderStmt(std::ostringstream& out, const Stmt& s, int indent) {
    std::string pad(static_cast<size_t>(indent) * 4, ' ');
    switch (s.kind) {
        case Stmt::Kind::Assign:
        case Stmt::Kind::AugAssign:
            out << pad << s.targetName;
            if (s.targetIndex) out << "[" << renderExpr(*s.targetIndex, 0) << "]";
            out << " " << (s.kind == Stmt::Kind::Assign ? "=" : s.op) << " "
                << renderExpr(*s.value, 0) << "\n";
            break;
        case Stmt::Kind::Return:
            out << pad << "return";
            if (s.value) out << " " << renderExpr(*s.value, 0);
            out << "\n";
            break;
        case Stmt::Kind::ExprStmt:
            out << pad << renderExpr(*s.value, 0) << "\n";
            break;
        case Stmt::Kind::For:
            out << pad << "for " << s.loopVar << " in "
                << renderExpr(*s.iterable, 0) << ":\n";
            renderBlock(out, s.body, indent + 1);
            break;
        case Stmt::Kind::If:
            for (size_t i = 0; i < s.arms.size(); ++i) {
                out << pad << (i == 0 ? "if " : "elif ")
                    << renderExpr(*s.arms[i].first, 0) << ":\n";
                renderBlock(out, s.arms[i].second, indent + 1);
            }
            if (!s.elseBody.empty()) {
                out << pad << "else:\n";
                renderBlock(out, s.elseBody, indent + 1);
            }
            break;
    }
}

void renderBlock(std::ostringstream& out, const adv::Block& block, int indent) {
    for (const auto& s : block) renderStmt(out, *s, indent);
}

std::string renderLiteral(const AspectValue& v) {
    switch (v.kind()) {
        case AspectValue::Kind::Bool: return v.asBool() ? "True" : "False";
        case AspectValue::Kind::Int: return std::to_string(v.asInt());
        case AspectValue::Kind::Str: {
            std::string out = "'";
            for (char c : v.asStr()) {
                if (c == '\\' || c == '\'') out += '\\';
                out += c;
            }
            return out + "'";
        }
        default: return "None";
    }
}

}  // namespace

std::string printSable(const SableProgram& program) {
    std::ostringstream out;
    bool firstTraversal = true;
    for (const auto& trav : program.traversals) {
        if (!firstTraversal) out << "\n";
        firstTraversal = false;
        out << "traversal " << trav.name << ":\n";
        if (!trav.utilities.empty()) {
            out << "    utility:\n";
            for (const auto& util : trav.utilities) {
                if (util.name == "import") continue;
                out << "        def " << util.name << "(";
                for (size_t i = 0; i < util.params.size(); ++i) {
                    if (i) out << ", ";
                    out << util.params[i];
                }
                out << "):\n";
                renderBlock(out, util.body, 3);
            }
        }
        for (const auto& imp : trav.imports) {
            out << "    fromTraversal " << imp.fromTraversal
                << " importAspect ";
            for (size_t i = 0; i < imp.aspects.size(); ++i) {
                if (i) out << ", ";
                out << imp.aspects[i];
            }
            out << "\n";
        }
        if (trav.annotationVar)
            out << "    sourceAnnotation " << *trav.annotationVar << "\n";
        for (const auto& aspect : trav.aspects)
            out << "    aspect " << aspect.name << " aspectType "
                << toString(aspect.type) << "\n";
        for (const auto& trig : trav.triggers)
            out << "    triggerFrom " << trig.aspect << " atValue "
                << renderLiteral(trig.value) << "\n";
        for (const auto& pc : trav.pointcuts) {
            out << "    pointcut(" << toString(pc.label);
            for (const auto& p : pc.params) out << ", " << p;
            out << "):\n";
            renderBlock(out, pc.advice, 2);
        }
        if (trav.merge) {
            out << "    mergeAspects(" << trav.merge->leftParam << ", "
                << trav.merge->rightParam << "):\n";
            renderBlock(out, trav.merge->body, 2);
        }
    }
    return out.str();
}

}  // namespace saga
