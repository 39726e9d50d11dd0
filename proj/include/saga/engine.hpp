#ifndef SAGA_ENGINE_HPP
#define SAGA_ENGINE_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "saga/advice.hpp"
#include "saga/annotation.hpp"
#include "saga/sable.hpp"
#include "saga/scfg.hpp"

namespace saga {

struct EngineOptions {
    int maxLoopIters = 1000;  // fixpoint iterations per loop state
    int callDepthCap = 64;
};

// One ledger entry: an aspect reached a trigger value at the end of a weave.
struct Alarm {
    StateId state = 0;
    int line = 0;
    int step = 0;
    std::string traversal;
    std::string aspect;
    AspectValue value;
};

struct TraversalStats {
    std::string name;
    // Loop state -> number of times the loop body was entered (non-fixpoint
    // visits).
    std::map<StateId, int> loopBodyRuns;
};

struct AnalysisResult {
    std::vector<Alarm> alarms;
    std::vector<TraversalStats> stats;
    int steps = 0;  // total weave entries across all traversals
};

// Dependency order over the program's traversals: a traversal runs after
// everything it imports from. Unknown or cyclic dependencies are errors.
std::vector<const TraversalDef*> orderTraversals(const SableProgram& program);

// Default merge of two traversal maps: shared booleans are or-ed, shared
// sets unioned, other shared values must be equal; unshared entries are
// deep-copied across.
TravMap mergeDefault(const TravMap& left, const TravMap& right);

bool isFixpoint(const AnnotationMap& oldAnnotation, const TravMap& travMap);

// Runs the ordered traversals of one program over one graph, recording
// alarms with a step counter that is global to the analysis.
class Analyzer {
public:
    Analyzer(Scfg& scfg, const SableProgram& program,
             const LabeledSymbols& annotation, EngineOptions options = {});

    AnalysisResult run();

    // Runs a single traversal with the current step counter; exposed for
    // engine tests.
    void runTraversal(const TraversalDef& traversal);

    const std::vector<Alarm>& alarms() const { return alarms_; }
    const std::vector<TraversalStats>& stats() const { return stats_; }
    int steps() const { return step_; }

private:
    struct VisitOutcome {
        StateId terminal;
        TravMap map;
    };

    Scfg* scfg_;
    const SableProgram* program_;
    LabeledSymbols annotation_;
    EngineOptions options_;
    int step_ = 0;
    std::vector<Alarm> alarms_;
    std::vector<TraversalStats> stats_;

    // Per-traversal scratch.
    const TraversalDef* current_ = nullptr;
    std::unique_ptr<AdviceRuntime> runtime_;
    std::map<StateId, int> loopVisits_;
    TraversalStats* currentStats_ = nullptr;

    TravMap weave(StateId id, TravMap map);
    TravMap mergeMaps(const TravMap& left, const TravMap& right);
    void annotate(StateId id, const TravMap& map);
    VisitOutcome visit(StateId id, StateId join, TravMap map);
    VisitOutcome transition(StateId id, StateId join,
                            const AnnotationMap& oldAnnotation, TravMap map);
    VisitOutcome loopBranching(StateId id, StateId join,
                               const AnnotationMap& oldAnnotation, TravMap map);
    VisitOutcome condBranching(StateId id, StateId join, TravMap map);
};

}  // namespace saga

#endif
