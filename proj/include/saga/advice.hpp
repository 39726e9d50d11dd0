#ifndef SAGA_ADVICE_HPP
#define SAGA_ADVICE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "saga/annotation.hpp"
#include "saga/sable_ast.hpp"
#include "saga/scfg.hpp"

namespace saga {

// Aspect name -> value map threaded through a traversal.
using TravMap = AnnotationMap;

// Primitives available to advice code. Exposed directly for tests.
// label is one of 'def', 'use', 'call', 'all'.
std::set<std::string> getExprSymbs(const std::string& label,
                                   const ExprUsage& expr);
// Symbols carrying `label` in the procedure's annotation entry; missing
// label is an error.
std::set<std::string> getDescrSymbs(const std::string& label,
                                    const LabeledSymbols& annotation);
// Deep copy of a previously annotated aspect value; missing name is an
// error.
AspectValue getAspect(const SymbolicState& state, const std::string& name);
bool enterLoop(const SymbolicState& state);

AspectValue toValue(const LabeledSymbols& annotation);

struct AdviceOptions {
    int callDepthCap = 64;
};

// Executes pointcut advice, merge functions and utilities of one traversal.
class AdviceRuntime {
public:
    AdviceRuntime(const TraversalDef& traversal, AspectValue annotationEntry,
                  AdviceOptions options = {});

    // Binds the pointcut parameters positionally to state.exprs (count
    // mismatch is an error naming the label), runs the advice block against
    // travMap and type-checks the declared aspects afterwards.
    void runPointcut(const PointcutDef& pointcut, const SymbolicState& state,
                     TravMap& travMap);

    // Runs the traversal's custom merge function on two maps.
    TravMap runMerge(const TravMap& left, const TravMap& right);

    // Low-level entry: run a block with explicit parameter bindings.
    void execAdvice(const adv::Block& block, TravMap& travMap,
                    const std::map<std::string, AspectValue>& params,
                    const SymbolicState* currentPoint);

    // Call a utility, builtin or primitive by name (test hook).
    AspectValue callFunction(const std::string& name,
                             std::vector<AspectValue> args);

    void typeCheck(const TravMap& travMap) const;

    const TraversalDef& traversal() const { return *traversal_; }

private:
    AspectValue callFunctionAt(const std::string& name,
                               std::vector<AspectValue> args, int line);

    const TraversalDef* traversal_;
    AspectValue annotationEntry_;
    AdviceOptions options_;
    std::map<std::string, const UtilityDef*> utilities_;
    std::set<std::string> aspectNames_;
    std::set<std::string> importNames_;
    int callDepth_ = 0;

    friend class AdviceFrame;
};

}  // namespace saga

#endif
