#ifndef SAGA_EXPR_USAGE_HPP
#define SAGA_EXPR_USAGE_HPP

#include <set>
#include <string>

namespace saga {

// Def/use/call symbol triple for one statement expression.
struct ExprUsage {
    std::set<std::string> defs;
    std::set<std::string> uses;
    std::set<std::string> calls;

    bool operator==(const ExprUsage& other) const = default;
};

}  // namespace saga

#endif
