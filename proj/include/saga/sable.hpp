#ifndef SAGA_SABLE_HPP
#define SAGA_SABLE_HPP

#include <set>
#include <string>
#include <vector>

#include "saga/sable_ast.hpp"

namespace saga {

// Parses one aspect-definition file and validates it: distinct traversal,
// aspect and utility names, at most one pointcut per label and one merge
// function per traversal, known pointcut labels, resolvable names in
// advice, triggers naming declared or imported aspects.
SableProgram parseSable(const std::string& text);

// Concatenates programs (multi-file analyses); re-checks that traversal
// names stay distinct.
SableProgram mergePrograms(std::vector<SableProgram> programs);

// Names of the traversals this one imports aspects from.
std::set<std::string> traversalDependencies(const TraversalDef& traversal);

// Canonical text form; parse(print(parse(x))) equals parse(x).
std::string printSable(const SableProgram& program);

// Validation entry used by parseSable; exposed for programs assembled in
// code.
void validateSable(const SableProgram& program);

}  // namespace saga

#endif
