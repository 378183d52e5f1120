#pragma once

// A finite structure: one nonempty carrier per sort (elements 0..n-1) and
// one flat operation table per op, row-major over the argument tuple with
// the rightmost argument fastest.  Constants are tables with a single row.

#include <map>
#include <string>
#include <vector>

#include "tgk/ast.hpp"

namespace tgk {

struct FiniteStructure {
    std::map<SortName, int> carriers;
    std::map<SymbolName, std::vector<int>> tables;

    int carrier(const SortName& s) const {
        auto it = carriers.find(s);
        return it == carriers.end() ? 0 : it->second;
    }
    bool has_table(const SymbolName& f) const { return tables.count(f) != 0; }

    bool operator==(const FiniteStructure&) const = default;
};

}  // namespace tgk
