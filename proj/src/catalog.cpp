#include "wernick/catalog.hpp"

#include <sstream>

namespace wernick {

std::vector<CatalogEntry> parse_catalog(const std::string& text) {
    std::vector<CatalogEntry> out;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ln++;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::string tok;
        std::istringstream ls(line);
        while (std::getline(ls, tok, '|')) f.push_back(tok);
        while (f.size() < 4) f.push_back("");
        if (f.size() != 4) throw ParseError(ln, "catalog row needs 4 fields");
        CatalogEntry e;
        try {
            e.idx = std::stoi(f[0]);
        } catch (const std::exception&) {
            throw ParseError(ln, "bad catalog index: " + f[0]);
        }
        std::istringstream gs(f[1]);
        while (std::getline(gs, tok, ',')) e.given.push_back(tok);
        if (e.given.size() != 3) throw ParseError(ln, "catalog row needs a point triple");
        if (f[2].size() != 1) throw ParseError(ln, "bad status: " + f[2]);
        e.status = f[2][0];
        e.note = f[3];
        out.push_back(std::move(e));
    }
    return out;
}

std::string serialize_catalog(const std::vector<CatalogEntry>& entries) {
    std::ostringstream out;
    for (const auto& e : entries) {
        out << e.idx << "|" << e.given[0] << "," << e.given[1] << "," << e.given[2] << "|"
            << e.status << "|" << e.note << "\n";
    }
    return out.str();
}

} // namespace wernick
