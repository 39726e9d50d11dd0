#include "saga/advice.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "saga/errors.hpp"

namespace saga {

// ---- primitives ----

std::set<std::string> getExprSymbs(const std::string& label,
                                   const ExprUsage& expr) {
    if (label == "def") return expr.defs;
    if (label == "use") return expr.uses;
    if (label == "call") return expr.calls;
    if (label == "all") {
        std::set<std::string> all = expr.defs;
        all.insert(expr.uses.begin(), expr.uses.end());
        all.insert(expr.calls.begin(), expr.calls.end());
        return all;
    }
    throw EvalError("getExprSymbs label must be 'def', 'use', 'call' or "
                    "'all', got '" +
                    label + "'");
}

std::set<std::string> getDescrSymbs(const std::string& label,
                                    const LabeledSymbols& annotation) {
    auto it = annotation.find(label);
    if (it == annotation.end())
        throw EvalError("source annotation has no label '" + label + "'");
    return it->second;
}

AspectValue getAspect(const SymbolicState& state, const std::string& name) {
    auto it = state.annotation.find(name);
    if (it == state.annotation.end())
        throw EvalError("no aspect '" + name + "' annotated at point " +
                        std::to_string(state.point));
    return it->second.deepCopy();
}

bool enterLoop(const SymbolicState& state) { return state.enterLoop; }

AspectValue toValue(const LabeledSymbols& annotation) {
    AspectValue::MapRep rep;
    for (const auto& [label, symbols] : annotation)
        rep[AspectValue::str(label)] = symbolSet(symbols);
    return AspectValue::map(std::move(rep));
}

namespace {

using adv::Expr;
using adv::Stmt;

[[noreturn]] void evalFail(const std::string& msg, int line) {
    throw EvalError(msg + " (line " + std::to_string(line) + ")");
}

bool requireBool(const AspectValue& v, const char* what, int line) {
    if (v.kind() != AspectValue::Kind::Bool)
        evalFail(std::string(what) + " must be a bool, got " + v.typeName(),
                 line);
    return v.asBool();
}

void rejectNone(const AspectValue& v, const std::string& op, int line) {
    if (v.isNone())
        evalFail("None is not allowed as an operand of '" + op + "'", line);
}

AspectValue binaryOp(const std::string& op, const AspectValue& l,
                     const AspectValue& r, int line) {
    rejectNone(l, op, line);
    rejectNone(r, op, line);
    using K = AspectValue::Kind;

    if (op == "|" || op == "&") {
        if (l.kind() == K::Bool && r.kind() == K::Bool)
            return AspectValue::boolean(op == "|" ? (l.asBool() || r.asBool())
                                                  : (l.asBool() && r.asBool()));
        if (l.kind() == K::Int && r.kind() == K::Int)
            return AspectValue::integer(op == "|" ? (l.asInt() | r.asInt())
                                                  : (l.asInt() & r.asInt()));
        if (l.kind() == K::Set && r.kind() == K::Set) {
            AspectValue::SetRep out;
            if (op == "|") {
                for (const auto& e : l.asSet()) out.insert(e.deepCopy());
                for (const auto& e : r.asSet()) out.insert(e.deepCopy());
            } else {
                for (const auto& e : l.asSet())
                    if (r.asSet().count(e)) out.insert(e.deepCopy());
            }
            return AspectValue::set(std::move(out));
        }
        if (op == "|" && l.kind() == K::Map && r.kind() == K::Map) {
            AspectValue::MapRep out;
            for (const auto& [k, v] : l.asMap()) out[k.deepCopy()] = v.deepCopy();
            for (const auto& [k, v] : r.asMap()) out[k.deepCopy()] = v.deepCopy();
            return AspectValue::map(std::move(out));
        }
    } else if (op == "-") {
        if (l.kind() == K::Int && r.kind() == K::Int)
            return AspectValue::integer(l.asInt() - r.asInt());
        if (l.kind() == K::Set && r.kind() == K::Set) {
            AspectValue::SetRep out;
            for (const auto& e : l.asSet())
                if (!r.asSet().count(e)) out.insert(e.deepCopy());
            return AspectValue::set(std::move(out));
        }
    } else if (op == "+") {
        if (l.kind() == K::Int && r.kind() == K::Int)
            return AspectValue::integer(l.asInt() + r.asInt());
        if (l.kind() == K::Str && r.kind() == K::Str)
            return AspectValue::str(l.asStr() + r.asStr());
        if (l.kind() == K::List && r.kind() == K::List) {
            AspectValue::ListRep out;
            for (const auto& e : l.asList()) out.push_back(e.deepCopy());
            for (const auto& e : r.asList()) out.push_back(e.deepCopy());
            return AspectValue::list(std::move(out));
        }
    } else if (op == "*") {
        if (l.kind() == K::Int && r.kind() == K::Int)
            return AspectValue::integer(l.asInt() * r.asInt());
    } else if (op == "/" || op == "%") {
        if (l.kind() == K::Int && r.kind() == K::Int) {
            if (r.asInt() == 0)
                evalFail(op == "/" ? "division by zero" : "modulo by zero",
                         line);
            return AspectValue::integer(op == "/" ? l.asInt() / r.asInt()
                                                  : l.asInt() % r.asInt());
        }
    }
    evalFail("unsupported operand types for '" + op + "': " + l.typeName() +
                 " and " + r.typeName(),
             line);
}

bool membership(const AspectValue& item, const AspectValue& container,
                int line) {
    using K = AspectValue::Kind;
    switch (container.kind()) {
        case K::Set:
            if (!item.hashable())
                evalFail("unhashable type '" + item.typeName() +
                             "' in set membership",
                         line);
            return container.asSet().count(item) > 0;
        case K::List:
            for (const auto& e : container.asList())
                if (e == item) return true;
            return false;
        case K::Map:
            if (!item.hashable())
                evalFail("unhashable type '" + item.typeName() +
                             "' in map membership",
                         line);
            return container.asMap().count(item) > 0;
        case K::Str:
            if (item.kind() != K::Str)
                evalFail("'in <str>' needs a str operand, got " +
                             item.typeName(),
                         line);
            return container.asStr().find(item.asStr()) != std::string::npos;
        default:
            evalFail("'" + container.typeName() + "' is not a container",
                     line);
    }
}

AspectValue compareOp(const std::string& op, const AspectValue& l,
                      const AspectValue& r, int line) {
    rejectNone(l, op, line);
    rejectNone(r, op, line);
    using K = AspectValue::Kind;

    if (op == "==") return AspectValue::boolean(l == r);
    if (op == "!=") return AspectValue::boolean(l != r);
    if (op == "in") return AspectValue::boolean(membership(l, r, line));
    if (op == "not in") return AspectValue::boolean(!membership(l, r, line));

    // Ordering: ints and strings compare naturally; sets compare by
    // inclusion as in Python.
    if (l.kind() == K::Int && r.kind() == K::Int) {
        std::int64_t a = l.asInt(), b = r.asInt();
        if (op == "<") return AspectValue::boolean(a < b);
        if (op == "<=") return AspectValue::boolean(a <= b);
        if (op == ">") return AspectValue::boolean(a > b);
        return AspectValue::boolean(a >= b);
    }
    if (l.kind() == K::Str && r.kind() == K::Str) {
        int c = l.asStr().compare(r.asStr());
        if (op == "<") return AspectValue::boolean(c < 0);
        if (op == "<=") return AspectValue::boolean(c <= 0);
        if (op == ">") return AspectValue::boolean(c > 0);
        return AspectValue::boolean(c >= 0);
    }
    if (l.kind() == K::Set && r.kind() == K::Set) {
        auto subset = [](const AspectValue::SetRep& a,
                         const AspectValue::SetRep& b) {
            for (const auto& e : a)
                if (!b.count(e)) return false;
            return true;
        };
        const auto& a = l.asSet();
        const auto& b = r.asSet();
        if (op == "<=") return AspectValue::boolean(subset(a, b));
        if (op == ">=") return AspectValue::boolean(subset(b, a));
        if (op == "<")
            return AspectValue::boolean(subset(a, b) && a.size() != b.size());
        return AspectValue::boolean(subset(b, a) && a.size() != b.size());
    }
    evalFail("cannot order " + l.typeName() + " and " + r.typeName() +
                 " with '" + op + "'",
             line);
}

}  // namespace

// Execution context for one advice block or utility call: a single local
// scope over an optional aspect layer.
class AdviceFrame {
public:
    AdviceFrame(AdviceRuntime& rt, TravMap* aspects,
                const SymbolicState* currentPoint,
                std::map<std::string, AspectValue> params)
        : rt_(rt), aspects_(aspects), currentPoint_(currentPoint),
          locals_(std::move(params)) {}

    struct Flow {
        bool returned = false;
        AspectValue value;
    };

    // Locals share one scope for the whole frame, so a name assigned inside
    // an if arm stays visible after the arm (the shipped definitions return
    // values computed that way).
    Flow execBlock(const adv::Block& block) {
        Flow flow;
        for (const auto& s : block) {
            flow = execStmt(*s);
            if (flow.returned) break;
        }
        return flow;
    }

private:
    AdviceRuntime& rt_;
    TravMap* aspects_;
    const SymbolicState* currentPoint_;
    std::map<std::string, AspectValue> locals_;

    Flow execStmt(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Assign: {
                AspectValue v = eval(*s.value);
                if (s.targetIndex)
                    storeSubscript(s, v);
                else
                    storeName(s.targetName, std::move(v), s.line);
                return {};
            }
            case Stmt::Kind::AugAssign: {
                AspectValue rhs = eval(*s.value);
                std::string core = s.op.substr(0, 1);  // "|=" -> "|"
                if (s.targetIndex) {
                    AspectValue cur = loadSubscript(s);
                    storeSubscript(s, binaryOp(core, cur, rhs, s.line));
                } else {
                    AspectValue cur = loadName(s.targetName, s.line);
                    storeName(s.targetName, binaryOp(core, cur, rhs, s.line),
                              s.line);
                }
                return {};
            }
            case Stmt::Kind::ExprStmt:
                eval(*s.value);
                return {};
            case Stmt::Kind::Return: {
                Flow flow;
                flow.returned = true;
                if (s.value) flow.value = eval(*s.value);
                return flow;
            }
            case Stmt::Kind::If: {
                for (const auto& [cond, body] : s.arms) {
                    if (requireBool(eval(*cond), "if condition", s.line))
                        return execBlock(body);
                }
                if (!s.elseBody.empty()) return execBlock(s.elseBody);
                return {};
            }
            case Stmt::Kind::For: {
                std::vector<AspectValue> items = iterate(eval(*s.iterable),
                                                         s.line);
                for (const auto& item : items) {
                    storeName(s.loopVar, item, s.line);
                    Flow flow = execBlock(s.body);
                    if (flow.returned) return flow;
                }
                return {};
            }
        }
        return {};
    }

    static std::vector<AspectValue> iterate(const AspectValue& v, int line) {
        using K = AspectValue::Kind;
        std::vector<AspectValue> out;
        switch (v.kind()) {
            case K::Set:
                out.assign(v.asSet().begin(), v.asSet().end());
                return out;
            case K::List:
                out = v.asList();
                return out;
            case K::Map:
                for (const auto& [k, val] : v.asMap()) out.push_back(k);
                return out;
            default:
                evalFail("cannot iterate over " + v.typeName(), line);
        }
    }

    void storeSubscript(const Stmt& s, AspectValue v) {
        AspectValue target = loadName(s.targetName, s.line);
        AspectValue index = eval(*s.targetIndex);
        if (target.kind() == AspectValue::Kind::List) {
            if (index.kind() != AspectValue::Kind::Int)
                evalFail("list index must be an int", s.line);
            auto& rep = target.asList();
            std::int64_t i = index.asInt();
            if (i < 0) i += static_cast<std::int64_t>(rep.size());
            if (i < 0 || i >= static_cast<std::int64_t>(rep.size()))
                evalFail("list index out of range", s.line);
            rep[static_cast<size_t>(i)] = std::move(v);
            return;
        }
        if (target.kind() == AspectValue::Kind::Map) {
            if (!index.hashable())
                evalFail("unhashable map key '" + index.typeName() + "'",
                         s.line);
            target.asMap()[index] = std::move(v);
            return;
        }
        evalFail("'" + target.typeName() + "' does not support item "
                 "assignment",
                 s.line);
    }

    AspectValue loadSubscript(const Stmt& s) {
        AspectValue target = loadName(s.targetName, s.line);
        AspectValue index = eval(*s.targetIndex);
        return subscript(target, index, s.line);
    }

    static AspectValue subscript(const AspectValue& target,
                                 const AspectValue& index, int line) {
        if (target.kind() == AspectValue::Kind::List) {
            if (index.kind() != AspectValue::Kind::Int)
                evalFail("list index must be an int", line);
            const auto& rep = target.asList();
            std::int64_t i = index.asInt();
            if (i < 0) i += static_cast<std::int64_t>(rep.size());
            if (i < 0 || i >= static_cast<std::int64_t>(rep.size()))
                evalFail("list index out of range", line);
            return rep[static_cast<size_t>(i)];
        }
        if (target.kind() == AspectValue::Kind::Map) {
            if (!index.hashable())
                evalFail("unhashable map key '" + index.typeName() + "'", line);
            auto it = target.asMap().find(index);
            if (it == target.asMap().end())
                evalFail("map key " + index.repr() + " not found", line);
            return it->second;
        }
        evalFail("'" + target.typeName() + "' is not subscriptable", line);
    }

    void storeName(const std::string& name, AspectValue v, int line) {
        if (aspects_ && rt_.aspectNames_.count(name)) {
            (*aspects_)[name] = std::move(v);
            return;
        }
        (void)line;
        locals_[name] = std::move(v);
    }

    AspectValue loadName(const std::string& name, int line) {
        if (name == "currentPoint") {
            if (!currentPoint_)
                evalFail("currentPoint is only available in pointcut advice",
                         line);
            return AspectValue::state(currentPoint_);
        }
        auto found = locals_.find(name);
        if (found != locals_.end()) return found->second;
        if (aspects_) {
            if (rt_.aspectNames_.count(name)) return (*aspects_)[name];
            // Imported aspect names evaluate to their own name so they can
            // be passed to getAspect.
            if (rt_.importNames_.count(name)) return AspectValue::str(name);
            if (rt_.traversal_->annotationVar &&
                name == *rt_.traversal_->annotationVar)
                return rt_.annotationEntry_;
        }
        evalFail("name '" + name + "' is not defined", line);
    }

    AspectValue eval(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Name: return loadName(e.name, e.line);
            case Expr::Kind::BoolLit: return AspectValue::boolean(e.boolVal);
            case Expr::Kind::IntLit: return AspectValue::integer(e.intVal);
            case Expr::Kind::StrLit: return AspectValue::str(e.strVal);
            case Expr::Kind::NoneLit: return AspectValue::none();
            case Expr::Kind::SetDisplay: {
                AspectValue::SetRep rep;
                for (const auto& el : e.elements) {
                    AspectValue v = eval(*el);
                    if (!v.hashable())
                        evalFail("unhashable type '" + v.typeName() +
                                     "' in set display",
                                 e.line);
                    rep.insert(std::move(v));
                }
                return AspectValue::set(std::move(rep));
            }
            case Expr::Kind::ListDisplay: {
                AspectValue::ListRep rep;
                for (const auto& el : e.elements) rep.push_back(eval(*el));
                return AspectValue::list(std::move(rep));
            }
            case Expr::Kind::MapDisplay: {
                AspectValue::MapRep rep;
                for (const auto& [k, v] : e.items) {
                    AspectValue key = eval(*k);
                    if (!key.hashable())
                        evalFail("unhashable map key '" + key.typeName() + "'",
                                 e.line);
                    rep[std::move(key)] = eval(*v);
                }
                return AspectValue::map(std::move(rep));
            }
            case Expr::Kind::Unary: {
                AspectValue v = eval(*e.lhs);
                if (e.op == "not")
                    return AspectValue::boolean(
                        !requireBool(v, "operand of 'not'", e.line));
                rejectNone(v, "-", e.line);
                if (v.kind() != AspectValue::Kind::Int)
                    evalFail("unary '-' needs an int, got " + v.typeName(),
                             e.line);
                return AspectValue::integer(-v.asInt());
            }
            case Expr::Kind::Binary:
                return binaryOp(e.op, eval(*e.lhs), eval(*e.rhs), e.line);
            case Expr::Kind::Compare:
                return compareOp(e.op, eval(*e.lhs), eval(*e.rhs), e.line);
            case Expr::Kind::BoolOp: {
                bool left = requireBool(eval(*e.lhs),
                                        "operand of boolean operator", e.line);
                if (e.op == "and") {
                    if (!left) return AspectValue::boolean(false);
                } else if (left) {
                    return AspectValue::boolean(true);
                }
                return AspectValue::boolean(requireBool(
                    eval(*e.rhs), "operand of boolean operator", e.line));
            }
            case Expr::Kind::Call: {
                std::vector<AspectValue> args;
                args.reserve(e.args.size());
                for (const auto& a : e.args) args.push_back(eval(*a));
                return rt_.callFunctionAt(e.callee, std::move(args), e.line);
            }
            case Expr::Kind::Method: {
                AspectValue receiver = eval(*e.receiver);
                std::vector<AspectValue> args;
                for (const auto& a : e.args) args.push_back(eval(*a));
                return callMethod(receiver, e.method, std::move(args), e.line);
            }
            case Expr::Kind::Subscript:
                return subscript(eval(*e.object), eval(*e.index), e.line);
        }
        evalFail("unhandled expression", e.line);
    }

    static AspectValue callMethod(AspectValue& receiver,
                                  const std::string& method,
                                  std::vector<AspectValue> args, int line) {
        using K = AspectValue::Kind;
        if (method == "append") {
            if (receiver.kind() != K::List)
                evalFail("append() needs a list, got " + receiver.typeName(),
                         line);
            if (args.size() != 1) evalFail("append() takes one argument", line);
            receiver.asList().push_back(std::move(args[0]));
            return AspectValue::none();
        }
        if (method == "pop") {
            if (receiver.kind() == K::List) {
                auto& rep = receiver.asList();
                if (rep.empty()) evalFail("pop from empty list", line);
                std::int64_t index =
                    static_cast<std::int64_t>(rep.size()) - 1;
                if (args.size() == 1) {
                    if (args[0].kind() != K::Int)
                        evalFail("pop() index must be an integer", line);
                    index = args[0].asInt();
                    if (index < 0)
                        index += static_cast<std::int64_t>(rep.size());
                } else if (!args.empty()) {
                    evalFail("pop() takes at most one argument", line);
                }
                if (index < 0 ||
                    index >= static_cast<std::int64_t>(rep.size()))
                    evalFail("pop index out of range", line);
                AspectValue out = rep[static_cast<size_t>(index)];
                rep.erase(rep.begin() + static_cast<std::ptrdiff_t>(index));
                return out;
            }
            if (receiver.kind() == K::Map) {
                if (args.size() != 1)
                    evalFail("pop() on a map takes the key", line);
                auto& rep = receiver.asMap();
                auto it = rep.find(args[0]);
                if (it == rep.end())
                    evalFail("map key " + args[0].repr() + " not found", line);
                AspectValue out = it->second;
                rep.erase(it);
                return out;
            }
            evalFail("pop() needs a list or map, got " + receiver.typeName(),
                     line);
        }
        if (method == "keys") {
            if (receiver.kind() != K::Map)
                evalFail("keys() needs a map, got " + receiver.typeName(),
                         line);
            AspectValue::SetRep keys;
            for (const auto& [k, v] : receiver.asMap()) keys.insert(k.deepCopy());
            return AspectValue::set(std::move(keys));
        }
        evalFail("unknown method '" + method + "'", line);
    }

    friend class AdviceRuntime;
};

// ---- runtime ----

AdviceRuntime::AdviceRuntime(const TraversalDef& traversal,
                             AspectValue annotationEntry, AdviceOptions options)
    : traversal_(&traversal),
      annotationEntry_(std::move(annotationEntry)),
      options_(options) {
    for (const auto& util : traversal.utilities)
        utilities_[util.name] = &util;
    for (const auto& a : traversal.aspects) aspectNames_.insert(a.name);
    for (const auto& imp : traversal.imports)
        for (const auto& a : imp.aspects) importNames_.insert(a);
}

void AdviceRuntime::runPointcut(const PointcutDef& pointcut,
                                const SymbolicState& state, TravMap& travMap) {
    if (pointcut.params.size() != state.exprs.size())
        throw EvalError(
            "pointcut " + toString(pointcut.label) + " of traversal " +
            traversal_->name + " takes " +
            std::to_string(pointcut.params.size()) +
            " expression(s), statement at line " + std::to_string(state.loc) +
            " carries " + std::to_string(state.exprs.size()));
    std::map<std::string, AspectValue> params;
    for (size_t i = 0; i < pointcut.params.size(); ++i)
        params[pointcut.params[i]] = AspectValue::expr(&state.exprs[i]);
    execAdvice(pointcut.advice, travMap, params, &state);
    typeCheck(travMap);
}

TravMap AdviceRuntime::runMerge(const TravMap& left, const TravMap& right) {
    if (!traversal_->merge)
        throw ContractError("traversal " + traversal_->name +
                            " has no mergeAspects declaration");
    auto toMapValue = [](const TravMap& m) {
        AspectValue::MapRep rep;
        for (const auto& [k, v] : m) rep[AspectValue::str(k)] = v.deepCopy();
        return AspectValue::map(std::move(rep));
    };
    std::map<std::string, AspectValue> params;
    params[traversal_->merge->leftParam] = toMapValue(left);
    params[traversal_->merge->rightParam] = toMapValue(right);

    AdviceFrame frame(*this, nullptr, nullptr, std::move(params));
    AdviceFrame::Flow flow = frame.execBlock(traversal_->merge->body);
    if (!flow.returned)
        throw EvalError("mergeAspects of traversal " + traversal_->name +
                        " did not return a value");
    if (flow.value.kind() != AspectValue::Kind::Map)
        throw EvalError("mergeAspects of traversal " + traversal_->name +
                        " must return a map, got " + flow.value.typeName());
    TravMap out;
    for (const auto& [k, v] : flow.value.asMap()) {
        if (k.kind() != AspectValue::Kind::Str)
            throw EvalError("mergeAspects of traversal " + traversal_->name +
                            " returned a non-string key " + k.repr());
        out[k.asStr()] = v.deepCopy();
    }
    return out;
}

void AdviceRuntime::execAdvice(const adv::Block& block, TravMap& travMap,
                               const std::map<std::string, AspectValue>& params,
                               const SymbolicState* currentPoint) {
    AdviceFrame frame(*this, &travMap, currentPoint, params);
    AdviceFrame::Flow flow = frame.execBlock(block);
    (void)flow;  // validation rejects return in pointcut advice
}

AspectValue AdviceRuntime::callFunction(const std::string& name,
                                        std::vector<AspectValue> args) {
    return callFunctionAt(name, std::move(args), 0);
}

AspectValue AdviceRuntime::callFunctionAt(const std::string& name,
                                          std::vector<AspectValue> args,
                                          int line) {
    auto wantArgs = [&](size_t n) {
        if (args.size() != n)
            evalFail(name + "() takes " + std::to_string(n) +
                         " argument(s), got " + std::to_string(args.size()),
                     line);
    };

    auto util = utilities_.find(name);
    if (util != utilities_.end()) {
        const UtilityDef& def = *util->second;
        wantArgs(def.params.size());
        if (++callDepth_ > options_.callDepthCap) {
            --callDepth_;
            throw EvalError("utility call depth exceeded " +
                            std::to_string(options_.callDepthCap) +
                            " in traversal " + traversal_->name);
        }
        std::map<std::string, AspectValue> params;
        for (size_t i = 0; i < def.params.size(); ++i)
            params[def.params[i]] = std::move(args[i]);
        AdviceFrame frame(*this, nullptr, nullptr, std::move(params));
        AdviceFrame::Flow flow;
        try {
            flow = frame.execBlock(def.body);
        } catch (...) {
            --callDepth_;
            throw;
        }
        --callDepth_;
        return flow.returned ? flow.value : AspectValue::none();
    }

    if (name == "len") {
        wantArgs(1);
        const AspectValue& v = args[0];
        switch (v.kind()) {
            case AspectValue::Kind::Set:
                return AspectValue::integer(
                    static_cast<std::int64_t>(v.asSet().size()));
            case AspectValue::Kind::List:
                return AspectValue::integer(
                    static_cast<std::int64_t>(v.asList().size()));
            case AspectValue::Kind::Map:
                return AspectValue::integer(
                    static_cast<std::int64_t>(v.asMap().size()));
            case AspectValue::Kind::Str:
                return AspectValue::integer(
                    static_cast<std::int64_t>(v.asStr().size()));
            default:
                evalFail("len() of " + v.typeName(), line);
        }
    }
    if (name == "set") {
        if (args.empty()) return AspectValue::set();
        wantArgs(1);
        const AspectValue& v = args[0];
        AspectValue::SetRep rep;
        switch (v.kind()) {
            case AspectValue::Kind::Set:
                for (const auto& e : v.asSet()) rep.insert(e.deepCopy());
                break;
            case AspectValue::Kind::List:
                for (const auto& e : v.asList()) {
                    if (!e.hashable())
                        evalFail("unhashable type '" + e.typeName() +
                                     "' in set()",
                                 line);
                    rep.insert(e.deepCopy());
                }
                break;
            case AspectValue::Kind::Map:
                for (const auto& [k, val] : v.asMap()) rep.insert(k.deepCopy());
                break;
            default:
                evalFail("set() of " + v.typeName(), line);
        }
        return AspectValue::set(std::move(rep));
    }
    if (name == "deepcopy") {
        wantArgs(1);
        return args[0].deepCopy();
    }
    if (name == "type") {
        wantArgs(1);
        return AspectValue::str(args[0].typeName());
    }
    if (name == "enterLoop") {
        wantArgs(1);
        if (args[0].kind() != AspectValue::Kind::State)
            evalFail("enterLoop() needs a state", line);
        return AspectValue::boolean(enterLoop(*args[0].asState()));
    }
    if (name == "getAspect") {
        wantArgs(2);
        if (args[0].kind() != AspectValue::Kind::State)
            evalFail("getAspect() needs a state and an aspect name", line);
        if (args[1].kind() != AspectValue::Kind::Str)
            evalFail("getAspect() aspect name must be a string", line);
        return getAspect(*args[0].asState(), args[1].asStr());
    }
    if (name == "getExprSymbs") {
        wantArgs(2);
        if (args[0].kind() != AspectValue::Kind::Str)
            evalFail("getExprSymbs() label must be a string", line);
        if (args[1].kind() != AspectValue::Kind::Expr)
            evalFail("getExprSymbs() needs a statement expression", line);
        return symbolSet(getExprSymbs(args[0].asStr(), *args[1].asExpr()));
    }
    if (name == "getDescrSymbs") {
        wantArgs(2);
        if (args[0].kind() != AspectValue::Kind::Str)
            evalFail("getDescrSymbs() label must be a string", line);
        if (args[1].kind() != AspectValue::Kind::Map)
            evalFail("getDescrSymbs() needs the source annotation map", line);
        auto it = args[1].asMap().find(args[0]);
        if (it == args[1].asMap().end())
            evalFail("source annotation has no label '" + args[0].asStr() +
                         "'",
                     line);
        return it->second.deepCopy();
    }
    evalFail("unknown function '" + name + "'", line);
}

void AdviceRuntime::typeCheck(const TravMap& travMap) const {
    for (const auto& decl : traversal_->aspects) {
        auto it = travMap.find(decl.name);
        if (it == travMap.end()) continue;
        if (it->second.isNone()) continue;  // not yet initialized
        if (!valueMatchesType(it->second, decl.type))
            throw EvalError("aspect '" + decl.name + "' of traversal " +
                            traversal_->name + " holds " +
                            it->second.typeName() + ", declared aspectType " +
                            toString(decl.type));
    }
}

}  // namespace saga
