#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "kos/io.hpp"
#include "kos/model.hpp"

namespace kos {

namespace detail {

inline std::string dotQuote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace detail

/// Graphviz view of the structure: one cluster per facet, solid edges for
/// the hierarchy (children point at their parents), dashed labeled edges
/// for the typed relations. Output order is canonical.
inline std::string exportDot(const KnowledgeBase& kb) {
    using detail::dotQuote;
    std::string out = "digraph kb {\n  rankdir=BT;\n  node [shape=box];\n";
    for (const auto& [fid, facet] : kb.facets()) {
        out += "  subgraph " + dotQuote("cluster_" + fid.str()) + " {\n";
        out += "    label=" + dotQuote(facet.label) + ";\n";
        for (const auto& [cid, c] : kb.concepts()) {
            if (c.facet != fid) continue;
            out += "    " + dotQuote(cid.str()) + " [label=" + dotQuote(c.prefLabel) + "];\n";
        }
        out += "  }\n";
    }
    // Concepts pointing at undeclared facets still need a node.
    for (const auto& [cid, c] : kb.concepts()) {
        if (!kb.hasFacet(c.facet))
            out += "  " + dotQuote(cid.str()) + " [label=" + dotQuote(c.prefLabel) + "];\n";
    }
    std::vector<Edge> edges(kb.edges().begin(), kb.edges().end());
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        auto ta = relationToken(a.type), tb = relationToken(b.type);
        if (ta != tb) return ta < tb;
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });
    for (const Edge& e : edges) {
        out += "  " + dotQuote(e.source.str()) + " -> " + dotQuote(e.target.str());
        if (auto kind = hierKindOf(e.type)) {
            if (*kind == HierKind::Partitive) out += " [arrowhead=diamond]";
        } else {
            out += " [style=dashed, label=" + dotQuote(relationToken(e.type)) + "]";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

} // namespace kos
