#include "saga/scfg.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>

#include "saga/errors.hpp"

namespace saga {

StateId Scfg::addState(SymbolicState s) {
    states_.push_back(std::move(s));
    live_.push_back(1);
    return static_cast<StateId>(states_.size()) - 1;
}

void Scfg::addEdge(StateId from, StateId to) {
    if (edges_.insert({from, to}).second) children_[from].push_back(to);
}

const SymbolicState& Scfg::state(StateId id) const {
    if (id < 0 || id >= stateCount())
        throw ContractError("state id out of range: " + std::to_string(id));
    return states_[id];
}

SymbolicState& Scfg::state(StateId id) {
    if (id < 0 || id >= stateCount())
        throw ContractError("state id out of range: " + std::to_string(id));
    return states_[id];
}

const std::vector<StateId>& Scfg::children(StateId id) const {
    static const std::vector<StateId> empty;
    auto it = children_.find(id);
    return it == children_.end() ? empty : it->second;
}

StateId Scfg::endingState(StateId id) const {
    auto it = endingOf_.find(id);
    if (it == endingOf_.end())
        throw ContractError("state " + std::to_string(id) + " (" +
                            toString(state(id).label) +
                            ") has no ending state");
    return it->second;
}

bool Scfg::hasEndingState(StateId id) const {
    return endingOf_.count(id) > 0;
}

void Scfg::setEndingState(StateId branch, StateId ending) {
    endingOf_[branch] = ending;
}

void Scfg::sortChildren() {
    for (auto& [id, kids] : children_) {
        std::sort(kids.begin(), kids.end(), [this](StateId a, StateId b) {
            const SymbolicState& sa = states_[a];
            const SymbolicState& sb = states_[b];
            if (sa.point != sb.point) return sa.point < sb.point;
            if (sa.ending != sb.ending) return !sa.ending;
            return a < b;
        });
    }
}

void Scfg::prune() {
    std::vector<char> reach(states_.size(), 0);
    std::deque<StateId> queue = {start};
    reach[start] = 1;
    while (!queue.empty()) {
        StateId id = queue.front();
        queue.pop_front();
        for (StateId child : children(id)) {
            if (!reach[child]) {
                reach[child] = 1;
                queue.push_back(child);
            }
        }
    }
    live_ = reach;

    std::set<std::pair<StateId, StateId>> keptEdges;
    std::map<StateId, std::vector<StateId>> keptChildren;
    for (const auto& [from, to] : edges_) {
        if (live_[from] && live_[to]) {
            keptEdges.insert({from, to});
            keptChildren[from].push_back(to);
        }
    }
    edges_ = std::move(keptEdges);
    children_ = std::move(keptChildren);
    sortChildren();

    for (StateId id = 0; id < stateCount(); ++id) {
        if (!live_[id] || id == end) continue;
        if (children(id).empty())
            throw ContractError("state " + std::to_string(id) + " (" +
                                toString(states_[id].label) +
                                ") has no successors but is not the end state");
    }
}

std::vector<StateId> Scfg::statesInOrder() const {
    std::vector<StateId> ids;
    for (StateId id = 0; id < stateCount(); ++id)
        if (live_[id]) ids.push_back(id);
    std::sort(ids.begin(), ids.end(), [this](StateId a, StateId b) {
        const SymbolicState& sa = states_[a];
        const SymbolicState& sb = states_[b];
        if (sa.ending != sb.ending) return !sa.ending;
        if (sa.point != sb.point) return sa.point < sb.point;
        return a < b;
    });
    return ids;
}

namespace {

std::string renderSymbols(const std::set<std::string>& symbols) {
    std::string out = "{";
    bool first = true;
    for (const auto& s : symbols) {
        if (!first) out += ",";
        out += s;
        first = false;
    }
    out += "}";
    return out;
}

std::string renderUsage(const ExprUsage& u) {
    return renderSymbols(u.defs) + "/" + renderSymbols(u.uses) + "/" +
           renderSymbols(u.calls);
}

std::string stateTag(const SymbolicState& s) {
    return std::to_string(s.point) + "|" + toString(s.label);
}

}  // namespace

std::string Scfg::dump() const {
    std::ostringstream out;
    out << "scfg " << qualifier << "\n";
    std::vector<StateId> order = statesInOrder();
    std::map<StateId, size_t> rank;
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    for (StateId id : order) {
        const SymbolicState& s = states_[id];
        out << "state " << stateTag(s) << "|" << s.loc;
        if (!s.ending && isBranchLabel(s.label)) out << "-" << s.endLoc;
        out << "|";
        for (size_t i = 0; i < s.exprs.size(); ++i) {
            if (i) out << " ; ";
            out << renderUsage(s.exprs[i]);
        }
        out << "\n";
    }

    std::vector<std::pair<StateId, StateId>> sorted(edges_.begin(),
                                                    edges_.end());
    std::sort(sorted.begin(), sorted.end(),
              [&rank](const auto& a, const auto& b) {
                  if (rank.at(a.first) != rank.at(b.first))
                      return rank.at(a.first) < rank.at(b.first);
                  return rank.at(a.second) < rank.at(b.second);
              });
    for (const auto& [from, to] : sorted)
        out << "edge " << stateTag(states_[from]) << " -> "
            << stateTag(states_[to]) << "\n";
    return out.str();
}

std::string Scfg::dumpDot() const {
    std::ostringstream out;
    out << "digraph scfg {\n";
    out << "  rankdir=TB;\n";
    for (StateId id : statesInOrder()) {
        const SymbolicState& s = states_[id];
        out << "  n" << id << " [label=\"" << stateTag(s) << "\\nline "
            << s.loc << "\"";
        if (s.ending) out << " shape=box";
        out << "];\n";
    }
    for (const auto& [from, to] : edges_)
        out << "  n" << from << " -> n" << to << ";\n";
    out << "}\n";
    return out.str();
}

namespace {

// Walks statement sequences adding edges per the construction rules. Return
// and raise statements inside a try with an enclosing finally are redirected
// to the innermost Finally state; the owning EndTry then chains onward to the
// next outer Finally state or the end state.
class EdgeBuilder {
public:
    EdgeBuilder(Scfg& g, std::map<int, StateId> byPoint, StateId endId)
        : g_(g), byPoint_(std::move(byPoint)), endId_(endId) {}

    void run(const std::vector<StatementIR>& statements) {
        g_.addEdge(g_.start, id(statements.front()));
        std::vector<const StatementIR*> seq = pointers(statements);
        sequence(seq, endId_, std::nullopt);
    }

private:
    struct FinallyCtx {
        StateId finallyState;
    };

    Scfg& g_;
    std::map<int, StateId> byPoint_;
    StateId endId_;
    std::vector<FinallyCtx> finallies_;
    std::set<StateId> redirected_;  // Finally states reached by a redirect

    static std::vector<const StatementIR*> pointers(
        const std::vector<StatementIR>& stmts) {
        std::vector<const StatementIR*> out;
        out.reserve(stmts.size());
        for (const auto& s : stmts) out.push_back(&s);
        return out;
    }

    StateId id(const StatementIR& s) const { return byPoint_.at(s.point); }

    StateId ensureEnding(StateId opener) {
        if (g_.hasEndingState(opener)) return g_.endingState(opener);
        const SymbolicState& open = g_.state(opener);
        SymbolicState ending;
        ending.point = open.point;
        ending.loc = open.endLoc > 0 ? open.endLoc : open.loc;
        ending.endLoc = ending.loc;
        ending.label = endingLabelFor(open.label);
        ending.ending = true;
        StateId endingId = g_.addState(std::move(ending));
        g_.setEndingState(opener, endingId);
        return endingId;
    }

    void sequence(const std::vector<const StatementIR*>& stmts, StateId next,
                  std::optional<StateId> loop) {
        for (size_t i = 0; i < stmts.size(); ++i) {
            StateId after = i + 1 < stmts.size() ? id(*stmts[i + 1]) : next;
            statementEdges(*stmts[i], after, loop);
        }
    }

    void blockEdges(const std::vector<StatementIR>& body, StateId next,
                    std::optional<StateId> loop) {
        sequence(pointers(body), next, loop);
    }

    void statementEdges(const StatementIR& s, StateId next,
                        std::optional<StateId> loop) {
        StateId self = id(s);
        switch (s.label) {
            case StatementLabel::If: {
                StateId ending = ensureEnding(self);
                g_.addEdge(self, id(s.body.front()));
                blockEdges(s.body, ending, loop);
                if (s.elseBranch.empty()) {
                    g_.addEdge(self, ending);  // condition-false skip
                } else {
                    g_.addEdge(self, id(s.elseBranch.front()));
                    blockEdges(s.elseBranch, ending, loop);
                }
                g_.addEdge(ending, next);
                return;
            }
            case StatementLabel::Else: {  // trailing else of a loop or try
                StateId ending = ensureEnding(self);
                g_.addEdge(self, id(s.body.front()));
                blockEdges(s.body, ending, loop);
                g_.addEdge(self, ending);
                g_.addEdge(ending, next);
                return;
            }
            case StatementLabel::With: {
                StateId ending = ensureEnding(self);
                g_.addEdge(self, id(s.body.front()));
                blockEdges(s.body, ending, loop);
                g_.addEdge(ending, next);
                return;
            }
            case StatementLabel::Match: {
                StateId ending = ensureEnding(self);
                for (const auto& kase : s.cases) {
                    g_.addEdge(self, id(kase));
                    g_.addEdge(id(kase), id(kase.body.front()));
                    blockEdges(kase.body, ending, loop);
                }
                g_.addEdge(self, ending);  // no case matches
                g_.addEdge(ending, next);
                return;
            }
            case StatementLabel::Try: {
                StateId ending = ensureEnding(self);
                StateId endExcept = ending;
                StateId finallyState = -1;
                if (!s.finallyStmt.empty()) {
                    const StatementIR& fin = s.finallyStmt.front();
                    finallyState = id(fin);
                    endExcept = finallyState;
                    g_.addEdge(finallyState, id(fin.body.front()));
                    blockEdges(fin.body, ending, loop);
                    finallies_.push_back({finallyState});
                }
                // Body and a trailing else run in sequence.
                std::vector<const StatementIR*> bodySeq = pointers(s.body);
                for (const auto& els : s.elseStmt) bodySeq.push_back(&els);
                g_.addEdge(self, id(s.body.front()));
                sequence(bodySeq, endExcept, loop);
                for (const auto& handler : s.handlers) {
                    g_.addEdge(self, id(handler));
                    g_.addEdge(id(handler), id(handler.body.front()));
                    blockEdges(handler.body, endExcept, loop);
                }
                if (finallyState >= 0) {
                    finallies_.pop_back();
                    if (redirected_.count(finallyState)) {
                        StateId chain = finallies_.empty()
                                            ? endId_
                                            : finallies_.back().finallyState;
                        g_.addEdge(ending, chain);
                        if (chain != endId_) redirected_.insert(chain);
                    }
                }
                g_.addEdge(ending, next);
                return;
            }
            case StatementLabel::While:
            case StatementLabel::For: {
                StateId ending = ensureEnding(self);
                g_.addEdge(self, id(s.body.front()));
                blockEdges(s.body, self, self);  // back edge to the loop head
                g_.addEdge(self, ending);
                if (!s.elseStmt.empty()) {
                    const StatementIR& els = s.elseStmt.front();
                    g_.addEdge(ending, id(els));
                    statementEdges(els, next, loop);
                } else {
                    g_.addEdge(ending, next);
                }
                return;
            }
            case StatementLabel::Continue:
                if (!loop)
                    throw ConstructionError(
                        "continue outside a loop at line " +
                        std::to_string(s.loc));
                g_.addEdge(self, *loop);
                return;
            case StatementLabel::Break:
                if (!loop)
                    throw ConstructionError("break outside a loop at line " +
                                            std::to_string(s.loc));
                g_.addEdge(self, ensureEnding(*loop));
                return;
            case StatementLabel::Return:
            case StatementLabel::Raise:
                if (!finallies_.empty()) {
                    g_.addEdge(self, finallies_.back().finallyState);
                    redirected_.insert(finallies_.back().finallyState);
                } else {
                    g_.addEdge(self, endId_);
                }
                return;
            default:
                g_.addEdge(self, next);
                return;
        }
    }
};

void materialize(Scfg& g, const StatementIR& s, std::map<int, StateId>& byPoint) {
    SymbolicState state;
    state.point = s.point;
    state.loc = s.loc;
    state.endLoc = s.endLoc > 0 ? s.endLoc : s.loc;
    state.label = s.label;
    state.exprs = s.exprs;
    byPoint[s.point] = g.addState(std::move(state));
    for (const auto* seq : {&s.body, &s.elseBranch, &s.handlers, &s.elseStmt,
                            &s.finallyStmt, &s.cases})
        for (const auto& child : *seq) materialize(g, child, byPoint);
}

}  // namespace

Scfg buildScfg(const ProcedureIR& proc) {
    if (proc.statements.empty())
        throw ConstructionError("procedure '" + proc.name + "' has no body");

    Scfg g;
    g.qualifier = proc.qualifier;
    g.container = proc.container;
    g.lineStart = proc.lineStart;
    g.lineEnd = proc.lineEnd;

    SymbolicState enter;
    enter.point = 0;
    enter.loc = proc.lineStart;
    enter.endLoc = proc.lineStart;
    enter.label = proc.container ? StatementLabel::EnterContainer
                                 : StatementLabel::EnterProcedure;
    ExprUsage header;
    if (proc.container)
        header.uses.insert(proc.bases.begin(), proc.bases.end());
    else
        header.defs = proc.inputs;
    enter.exprs.push_back(std::move(header));
    g.start = g.addState(std::move(enter));

    std::map<int, StateId> byPoint;
    for (const auto& s : proc.statements) materialize(g, s, byPoint);

    SymbolicState exit;
    exit.point = proc.pointCount + 1;
    exit.loc = proc.lineEnd;
    exit.endLoc = proc.lineEnd;
    exit.label = proc.container ? StatementLabel::ExitContainer
                                : StatementLabel::ExitProcedure;
    g.end = g.addState(std::move(exit));

    EdgeBuilder builder(g, byPoint, g.end);
    builder.run(proc.statements);
    g.prune();
    return g;
}

}  // namespace saga
