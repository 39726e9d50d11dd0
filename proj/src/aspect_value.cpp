#include "saga/aspect_value.hpp"

#include <sstream>

#include "saga/errors.hpp"
#include "saga/expr_usage.hpp"
#include "saga/scfg.hpp"

namespace saga {

AspectValue::AspectValue() = default;

AspectValue AspectValue::none() { return AspectValue(); }

AspectValue AspectValue::boolean(bool v) {
    AspectValue a;
    a.kind_ = Kind::Bool;
    a.b_ = v;
    return a;
}

AspectValue AspectValue::integer(std::int64_t v) {
    AspectValue a;
    a.kind_ = Kind::Int;
    a.i_ = v;
    return a;
}

AspectValue AspectValue::str(std::string v) {
    AspectValue a;
    a.kind_ = Kind::Str;
    a.s_ = std::make_shared<std::string>(std::move(v));
    return a;
}

AspectValue AspectValue::set(SetRep v) {
    AspectValue a;
    a.kind_ = Kind::Set;
    a.set_ = std::make_shared<SetRep>(std::move(v));
    return a;
}

AspectValue AspectValue::list(ListRep v) {
    AspectValue a;
    a.kind_ = Kind::List;
    a.list_ = std::make_shared<ListRep>(std::move(v));
    return a;
}

AspectValue AspectValue::map(MapRep v) {
    AspectValue a;
    a.kind_ = Kind::Map;
    a.map_ = std::make_shared<MapRep>(std::move(v));
    return a;
}

AspectValue AspectValue::expr(const ExprUsage* e) {
    AspectValue a;
    a.kind_ = Kind::Expr;
    a.expr_ = e;
    return a;
}

AspectValue AspectValue::state(const SymbolicState* s) {
    AspectValue a;
    a.kind_ = Kind::State;
    a.state_ = s;
    return a;
}

bool AspectValue::asBool() const {
    if (kind_ != Kind::Bool) throw EvalError("expected bool, got " + typeName());
    return b_;
}

std::int64_t AspectValue::asInt() const {
    if (kind_ != Kind::Int) throw EvalError("expected int, got " + typeName());
    return i_;
}

const std::string& AspectValue::asStr() const {
    if (kind_ != Kind::Str) throw EvalError("expected str, got " + typeName());
    return *s_;
}

const AspectValue::SetRep& AspectValue::asSet() const {
    if (kind_ != Kind::Set) throw EvalError("expected set, got " + typeName());
    return *set_;
}

AspectValue::SetRep& AspectValue::asSet() {
    if (kind_ != Kind::Set) throw EvalError("expected set, got " + typeName());
    return *set_;
}

const AspectValue::ListRep& AspectValue::asList() const {
    if (kind_ != Kind::List) throw EvalError("expected list, got " + typeName());
    return *list_;
}

AspectValue::ListRep& AspectValue::asList() {
    if (kind_ != Kind::List) throw EvalError("expected list, got " + typeName());
    return *list_;
}

const AspectValue::MapRep& AspectValue::asMap() const {
    if (kind_ != Kind::Map) throw EvalError("expected dict, got " + typeName());
    return *map_;
}

AspectValue::MapRep& AspectValue::asMap() {
    if (kind_ != Kind::Map) throw EvalError("expected dict, got " + typeName());
    return *map_;
}

const ExprUsage* AspectValue::asExpr() const {
    if (kind_ != Kind::Expr)
        throw EvalError("expected statement expression, got " + typeName());
    return expr_;
}

const SymbolicState* AspectValue::asState() const {
    if (kind_ != Kind::State)
        throw EvalError("expected symbolic state, got " + typeName());
    return state_;
}

int AspectValue::compare(const AspectValue& other) const {
    if (kind_ != other.kind_)
        return static_cast<int>(kind_) < static_cast<int>(other.kind_) ? -1 : 1;
    switch (kind_) {
        case Kind::None:
            return 0;
        case Kind::Bool:
            return b_ == other.b_ ? 0 : (b_ < other.b_ ? -1 : 1);
        case Kind::Int:
            return i_ == other.i_ ? 0 : (i_ < other.i_ ? -1 : 1);
        case Kind::Str:
            return s_->compare(*other.s_) < 0   ? -1
                   : s_->compare(*other.s_) > 0 ? 1
                                                : 0;
        case Kind::Set: {
            auto it = set_->begin();
            auto jt = other.set_->begin();
            for (; it != set_->end() && jt != other.set_->end(); ++it, ++jt) {
                int c = it->compare(*jt);
                if (c != 0) return c;
            }
            if (it != set_->end()) return 1;
            if (jt != other.set_->end()) return -1;
            return 0;
        }
        case Kind::List: {
            size_t n = std::min(list_->size(), other.list_->size());
            for (size_t i = 0; i < n; ++i) {
                int c = (*list_)[i].compare((*other.list_)[i]);
                if (c != 0) return c;
            }
            if (list_->size() == other.list_->size()) return 0;
            return list_->size() < other.list_->size() ? -1 : 1;
        }
        case Kind::Map: {
            auto it = map_->begin();
            auto jt = other.map_->begin();
            for (; it != map_->end() && jt != other.map_->end(); ++it, ++jt) {
                int c = it->first.compare(jt->first);
                if (c != 0) return c;
                c = it->second.compare(jt->second);
                if (c != 0) return c;
            }
            if (it != map_->end()) return 1;
            if (jt != other.map_->end()) return -1;
            return 0;
        }
        case Kind::Expr:
            return expr_ == other.expr_ ? 0 : (expr_ < other.expr_ ? -1 : 1);
        case Kind::State:
            return state_ == other.state_ ? 0 : (state_ < other.state_ ? -1 : 1);
    }
    return 0;
}

AspectValue AspectValue::deepCopy() const {
    switch (kind_) {
        case Kind::Str:
            return str(*s_);
        case Kind::Set: {
            SetRep copy;
            for (const auto& e : *set_) copy.insert(e.deepCopy());
            return set(std::move(copy));
        }
        case Kind::List: {
            ListRep copy;
            copy.reserve(list_->size());
            for (const auto& e : *list_) copy.push_back(e.deepCopy());
            return list(std::move(copy));
        }
        case Kind::Map: {
            MapRep copy;
            for (const auto& [k, v] : *map_)
                copy.emplace(k.deepCopy(), v.deepCopy());
            return map(std::move(copy));
        }
        default:
            return *this;  // scalars and handles have no owned structure
    }
}

std::string AspectValue::repr() const {
    std::ostringstream out;
    switch (kind_) {
        case Kind::None:
            out << "None";
            break;
        case Kind::Bool:
            out << (b_ ? "True" : "False");
            break;
        case Kind::Int:
            out << i_;
            break;
        case Kind::Str:
            out << '\'' << *s_ << '\'';
            break;
        case Kind::Set: {
            if (set_->empty()) {
                out << "set()";
                break;
            }
            out << '{';
            bool first = true;
            for (const auto& e : *set_) {
                if (!first) out << ", ";
                first = false;
                out << e.repr();
            }
            out << '}';
            break;
        }
        case Kind::List: {
            out << '[';
            for (size_t i = 0; i < list_->size(); ++i) {
                if (i) out << ", ";
                out << (*list_)[i].repr();
            }
            out << ']';
            break;
        }
        case Kind::Map: {
            out << '{';
            bool first = true;
            for (const auto& [k, v] : *map_) {
                if (!first) out << ", ";
                first = false;
                out << k.repr() << ": " << v.repr();
            }
            out << '}';
            break;
        }
        case Kind::Expr:
            out << "<expr>";
            break;
        case Kind::State:
            out << "<state " << (state_ ? state_->point : -1) << '>';
            break;
    }
    return out.str();
}

std::string AspectValue::typeName() const {
    switch (kind_) {
        case Kind::None: return "NoneType";
        case Kind::Bool: return "bool";
        case Kind::Int: return "int";
        case Kind::Str: return "str";
        case Kind::Set: return "set";
        case Kind::List: return "list";
        case Kind::Map: return "dict";
        case Kind::Expr: return "expr";
        case Kind::State: return "state";
    }
    return "unknown";
}

bool AspectValue::hashable() const {
    switch (kind_) {
        case Kind::Set:
        case Kind::List:
        case Kind::Map:
            return false;
        default:
            return true;
    }
}

AspectValue symbolSet(const std::set<std::string>& symbols) {
    AspectValue::SetRep rep;
    for (const auto& s : symbols) rep.insert(AspectValue::str(s));
    return AspectValue::set(std::move(rep));
}

}  // namespace saga
