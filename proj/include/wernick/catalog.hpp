#pragma once

#include <string>
#include <vector>

#include "wernick/solver.hpp"

namespace wernick {

struct CatalogEntry {
    int idx = 0;
    std::vector<std::string> given; // three point labels
    char status = '?';              // S, U, R, L or ? (unresolved)
    std::string note;

    ProblemSpec problem() const {
        return ProblemSpec{std::to_string(idx), given, {"A", "B", "C"}, status};
    }
};

// Format: idx|P1,P2,P3|status|note, '#' comments.
std::vector<CatalogEntry> parse_catalog(const std::string& text);
std::string serialize_catalog(const std::vector<CatalogEntry>& entries);

// The shipped 139-problem catalog.
const std::string& builtin_catalog_text();

} // namespace wernick
