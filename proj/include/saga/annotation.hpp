#ifndef SAGA_ANNOTATION_HPP
#define SAGA_ANNOTATION_HPP

#include <map>
#include <set>
#include <string>

namespace saga {

// Label -> symbols, e.g. "source" -> {genPrivate}.
using LabeledSymbols = std::map<std::string, std::set<std::string>>;

// Whole annotation file: "<file>:<procedure>" -> labeled symbols.
using SourceAnnotation = std::map<std::string, LabeledSymbols>;

// Parses the JSON annotation format: an object keyed by procedure
// qualifier, each value an object mapping labels to arrays of symbol
// strings. Throws FormatError on any other shape.
SourceAnnotation parseSourceAnnotation(const std::string& jsonText);

// Entry lookup: exact qualifier first, then a unique ":<procedure>" suffix
// match; empty labeled symbols when nothing matches.
LabeledSymbols annotationFor(const SourceAnnotation& annotation,
                             const std::string& qualifier);

}  // namespace saga

#endif
