#include "saga/engine.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "saga/errors.hpp"

namespace saga {

std::vector<const TraversalDef*> orderTraversals(const SableProgram& program) {
    for (const auto& trav : program.traversals) {
        for (const auto& imp : trav.imports) {
            const TraversalDef* source = program.find(imp.fromTraversal);
            if (!source)
                throw ValidationError("traversal " + trav.name +
                                      " imports from unknown traversal '" +
                                      imp.fromTraversal + "'");
            for (const auto& aspect : imp.aspects)
                if (!source->declaresAspect(aspect))
                    throw ValidationError(
                        "traversal " + trav.name + " imports aspect '" +
                        aspect + "' which " + imp.fromTraversal +
                        " does not declare");
        }
    }

    std::vector<const TraversalDef*> ordered;
    std::set<std::string> placed;
    while (ordered.size() < program.traversals.size()) {
        bool progress = false;
        for (const auto& trav : program.traversals) {
            if (placed.count(trav.name)) continue;
            std::set<std::string> deps = traversalDependencies(trav);
            bool ready = std::all_of(
                deps.begin(), deps.end(),
                [&placed](const std::string& d) { return placed.count(d) > 0; });
            if (ready) {
                ordered.push_back(&trav);
                placed.insert(trav.name);
                progress = true;
            }
        }
        if (!progress) {
            std::string cycle;
            for (const auto& trav : program.traversals) {
                if (placed.count(trav.name)) continue;
                if (!cycle.empty()) cycle += ", ";
                cycle += trav.name;
            }
            throw ValidationError(
                "cyclic import dependencies between traversals: " + cycle);
        }
    }
    return ordered;
}

TravMap mergeDefault(const TravMap& left, const TravMap& right) {
    TravMap out;
    for (const auto& [name, lv] : left) {
        auto it = right.find(name);
        if (it == right.end()) {
            out[name] = lv.deepCopy();
            continue;
        }
        const AspectValue& rv = it->second;
        if (lv.kind() == AspectValue::Kind::Bool &&
            rv.kind() == AspectValue::Kind::Bool) {
            out[name] = AspectValue::boolean(lv.asBool() || rv.asBool());
            continue;
        }
        if (lv.kind() == AspectValue::Kind::Set &&
            rv.kind() == AspectValue::Kind::Set) {
            AspectValue::SetRep rep;
            for (const auto& e : lv.asSet()) rep.insert(e.deepCopy());
            for (const auto& e : rv.asSet()) rep.insert(e.deepCopy());
            out[name] = AspectValue::set(std::move(rep));
            continue;
        }
        if (lv == rv) {
            out[name] = lv.deepCopy();
            continue;
        }
        throw EvalError(
            "Conflict of values: for non-Boolean, non-set values, values for "
            "both traversal maps are expected to be the same.");
    }
    for (const auto& [name, rv] : right)
        if (!left.count(name)) out[name] = rv.deepCopy();
    return out;
}

bool isFixpoint(const AnnotationMap& oldAnnotation, const TravMap& travMap) {
    for (const auto& [name, value] : travMap) {
        auto it = oldAnnotation.find(name);
        if (it == oldAnnotation.end()) return false;
        if (it->second != value) return false;
    }
    return true;
}

namespace {

TravMap copyMap(const TravMap& map) {
    TravMap out;
    for (const auto& [k, v] : map) out[k] = v.deepCopy();
    return out;
}

}  // namespace

Analyzer::Analyzer(Scfg& scfg, const SableProgram& program,
                   const LabeledSymbols& annotation, EngineOptions options)
    : scfg_(&scfg),
      program_(&program),
      annotation_(annotation),
      options_(options) {}

AnalysisResult Analyzer::run() {
    step_ = 0;
    alarms_.clear();
    stats_.clear();
    for (StateId id = 0; id < scfg_->stateCount(); ++id) {
        if (!scfg_->live(id)) continue;
        SymbolicState& st = scfg_->state(id);
        st.annotation.clear();
        st.enterLoop = isLoopLabel(st.label);
    }
    for (const TraversalDef* trav : orderTraversals(*program_))
        runTraversal(*trav);

    AnalysisResult result;
    result.alarms = alarms_;
    result.stats = stats_;
    result.steps = step_;
    return result;
}

void Analyzer::runTraversal(const TraversalDef& traversal) {
    current_ = &traversal;
    AdviceOptions adviceOptions;
    adviceOptions.callDepthCap = options_.callDepthCap;
    runtime_ = std::make_unique<AdviceRuntime>(traversal, toValue(annotation_),
                                               adviceOptions);
    loopVisits_.clear();
    stats_.push_back(TraversalStats{traversal.name, {}});
    currentStats_ = &stats_.back();

    TravMap init;
    for (const auto& decl : traversal.aspects)
        init[decl.name] = AspectValue::none();

    VisitOutcome outcome = visit(scfg_->start, -1, std::move(init));

    // The end state is woven exactly once, with the map control carried out
    // of the graph.
    TravMap finalMap = weave(scfg_->end, std::move(outcome.map));
    annotate(scfg_->end, finalMap);
}

TravMap Analyzer::weave(StateId id, TravMap map) {
    const SymbolicState& st = scfg_->state(id);
    if (const PointcutDef* pc = current_->pointcutFor(st.label))
        runtime_->runPointcut(*pc, st, map);
    ++step_;
    for (const auto& trig : current_->triggers) {
        auto it = map.find(trig.aspect);
        if (it != map.end() && it->second == trig.value) {
            Alarm alarm;
            alarm.state = id;
            alarm.line = st.loc;
            alarm.step = step_;
            alarm.traversal = current_->name;
            alarm.aspect = trig.aspect;
            alarm.value = it->second.deepCopy();
            alarms_.push_back(std::move(alarm));
        }
    }
    return map;
}

TravMap Analyzer::mergeMaps(const TravMap& left, const TravMap& right) {
    if (current_->merge) return runtime_->runMerge(left, right);
    return mergeDefault(left, right);
}

void Analyzer::annotate(StateId id, const TravMap& map) {
    SymbolicState& st = scfg_->state(id);
    for (const auto& [name, value] : map) st.annotation[name] = value.deepCopy();
}

Analyzer::VisitOutcome Analyzer::visit(StateId id, StateId join, TravMap map) {
    if (id == join) return {join, std::move(map)};
    const SymbolicState& st = scfg_->state(id);
    if (st.label == StatementLabel::ExitProcedure ||
        st.label == StatementLabel::ExitContainer)
        return {scfg_->end, std::move(map)};

    AnnotationMap oldAnnotation = st.annotation;
    map = weave(id, std::move(map));
    annotate(id, map);
    return transition(id, join, oldAnnotation, std::move(map));
}

Analyzer::VisitOutcome Analyzer::transition(StateId id, StateId join,
                                            const AnnotationMap& oldAnnotation,
                                            TravMap map) {
    const SymbolicState& st = scfg_->state(id);
    if (isLoopLabel(st.label))
        return loopBranching(id, join, oldAnnotation, std::move(map));

    const std::vector<StateId>& kids = scfg_->children(id);
    if (kids.empty())
        throw ContractError("state " + std::to_string(id) +
                            " has no successors during traversal");
    if (kids.size() == 1) return visit(kids[0], join, std::move(map));
    if (!scfg_->hasEndingState(id)) {
        // Only redirect chains out of an EndTry fan out without an own
        // ending state; the traversal follows the normal continuation.
        return visit(kids.front(), join, std::move(map));
    }
    return condBranching(id, join, std::move(map));
}

Analyzer::VisitOutcome Analyzer::loopBranching(
    StateId id, StateId join, const AnnotationMap& oldAnnotation, TravMap map) {
    int visits = ++loopVisits_[id];
    if (visits > options_.maxLoopIters) {
        const SymbolicState& st = scfg_->state(id);
        throw EvalError("loop at line " + std::to_string(st.loc) +
                        " did not reach a fixpoint within " +
                        std::to_string(options_.maxLoopIters) +
                        " iterations (traversal " + current_->name + ")");
    }

    SymbolicState& st = scfg_->state(id);
    if (isFixpoint(oldAnnotation, map)) {
        st.enterLoop = true;
        return visit(scfg_->endingState(id), join, std::move(map));
    }
    st.enterLoop = false;
    ++currentStats_->loopBodyRuns[id];

    StateId body = -1;
    for (StateId c : scfg_->children(id)) {
        if (!scfg_->state(c).ending) {
            body = c;
            break;
        }
    }
    if (body < 0)
        throw ContractError("loop state " + std::to_string(id) +
                            " has no body successor");
    return visit(body, join, std::move(map));
}

Analyzer::VisitOutcome Analyzer::condBranching(StateId id, StateId join,
                                               TravMap map) {
    StateId joinState = scfg_->endingState(id);
    std::vector<TravMap> survivors;
    for (StateId c : scfg_->children(id)) {
        if (c == joinState) {
            survivors.push_back(copyMap(map));  // skip or fallthrough edge
            continue;
        }
        VisitOutcome out = visit(c, joinState, copyMap(map));
        if (out.terminal == joinState) survivors.push_back(std::move(out.map));
        // Branches that leave the procedure contribute nothing to the join.
    }
    if (survivors.empty()) return {scfg_->end, std::move(map)};

    TravMap merged = std::move(survivors.front());
    for (size_t i = 1; i < survivors.size(); ++i)
        merged = mergeMaps(merged, survivors[i]);
    return visit(joinState, join, std::move(merged));
}

}  // namespace saga
