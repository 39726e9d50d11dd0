#ifndef SAGA_ASPECT_VALUE_HPP
#define SAGA_ASPECT_VALUE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace saga {

struct SymbolicState;
struct ExprUsage;

// Dynamic value manipulated by advice code. Mirrors the Python object model
// closely enough for the aspect definitions: None, bool, int, str, set,
// list and dict, plus two read-only handle kinds that advice can pass
// around but not store into aspects (statement expressions and symbolic
// states). Lists and dicts have reference semantics: copies share the
// underlying object, mutation is visible through every handle. deepCopy()
// severs all sharing. Comparison is by value, deep.
class AspectValue {
public:
    enum class Kind { None, Bool, Int, Str, Set, List, Map, Expr, State };

    struct DeepLess {
        bool operator()(const AspectValue& a, const AspectValue& b) const {
            return a.compare(b) < 0;
        }
    };

    using SetRep = std::set<AspectValue, DeepLess>;
    using ListRep = std::vector<AspectValue>;
    using MapRep = std::map<AspectValue, AspectValue, DeepLess>;

    AspectValue();  // None
    static AspectValue none();
    static AspectValue boolean(bool v);
    static AspectValue integer(std::int64_t v);
    static AspectValue str(std::string v);
    static AspectValue set(SetRep v = {});
    static AspectValue list(ListRep v = {});
    static AspectValue map(MapRep v = {});
    static AspectValue expr(const ExprUsage* e);
    static AspectValue state(const SymbolicState* s);

    Kind kind() const { return kind_; }
    bool isNone() const { return kind_ == Kind::None; }

    bool asBool() const;
    std::int64_t asInt() const;
    const std::string& asStr() const;
    const SetRep& asSet() const;
    SetRep& asSet();
    const ListRep& asList() const;
    ListRep& asList();
    const MapRep& asMap() const;
    MapRep& asMap();
    const ExprUsage* asExpr() const;
    const SymbolicState* asState() const;

    // Deep value comparison; defines a total order across kinds.
    int compare(const AspectValue& other) const;
    bool operator==(const AspectValue& other) const { return compare(other) == 0; }
    bool operator!=(const AspectValue& other) const { return compare(other) != 0; }

    AspectValue deepCopy() const;

    // Python-style rendering: True, 'text', {1, 2}, [..], {k: v}.
    std::string repr() const;

    // Type name as reported by the advice builtin type(): "bool", "set", ...
    std::string typeName() const;

    // Set/map elements must be hashable in the Python sense.
    bool hashable() const;

private:
    Kind kind_ = Kind::None;
    bool b_ = false;
    std::int64_t i_ = 0;
    std::shared_ptr<std::string> s_;
    std::shared_ptr<SetRep> set_;
    std::shared_ptr<ListRep> list_;
    std::shared_ptr<MapRep> map_;
    const ExprUsage* expr_ = nullptr;
    const SymbolicState* state_ = nullptr;
};

// Convenience: build a set value from a set of strings (symbol sets).
AspectValue symbolSet(const std::set<std::string>& symbols);

}  // namespace saga

#endif
