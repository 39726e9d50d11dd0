#ifndef SAGA_SCFG_HPP
#define SAGA_SCFG_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "saga/aspect_value.hpp"
#include "saga/ir.hpp"

namespace saga {

using AnnotationMap = std::map<std::string, AspectValue>;
using StateId = int;

struct SymbolicState {
    int point = 0;
    int loc = 0;
    int endLoc = 0;  // set for branch statements; 0 otherwise
    StatementLabel label = StatementLabel::Pass;
    bool ending = false;  // EndIf, EndFor, ... companion state
    std::vector<ExprUsage> exprs;

    // Mutable traversal data.
    bool enterLoop = false;
    AnnotationMap annotation;
};

// Symbolic control-flow graph of one procedure: one vertex per reachable
// statement plus start/end and ending states for scope-opening statements.
// The end state is the only vertex without successors.
class Scfg {
public:
    std::string qualifier;
    bool container = false;
    int lineStart = 0;
    int lineEnd = 0;
    StateId start = 0;
    StateId end = 0;

    StateId addState(SymbolicState s);
    void addEdge(StateId from, StateId to);

    const SymbolicState& state(StateId id) const;
    SymbolicState& state(StateId id);
    int stateCount() const { return static_cast<int>(states_.size()); }

    // Successors in ascending (point, ending-last) order.
    const std::vector<StateId>& children(StateId id) const;

    // EndIf for an If state and so on; throws ContractError for states
    // without an ending companion.
    StateId endingState(StateId id) const;
    bool hasEndingState(StateId id) const;
    void setEndingState(StateId branch, StateId ending);

    const std::set<std::pair<StateId, StateId>>& edges() const { return edges_; }

    // Drops vertices unreachable from start, keeps ids stable.
    void prune();

    // All live states: non-ending states in point order, then ending states
    // in point order.
    std::vector<StateId> statesInOrder() const;
    bool live(StateId id) const { return live_[id]; }

    // Deterministic text dump: one "state" line per vertex, one "edge" line
    // per edge.
    std::string dump() const;
    // Graphviz rendering of the same graph.
    std::string dumpDot() const;

private:
    std::vector<SymbolicState> states_;
    std::vector<char> live_;
    std::set<std::pair<StateId, StateId>> edges_;
    std::map<StateId, std::vector<StateId>> children_;
    std::map<StateId, StateId> endingOf_;

    void sortChildren();
    friend Scfg buildScfg(const ProcedureIR& proc);
};

Scfg buildScfg(const ProcedureIR& proc);

}  // namespace saga

#endif
