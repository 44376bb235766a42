#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kos/errors.hpp"
#include "kos/relations.hpp"

namespace kos {

/// Identifiers are non-empty ASCII tokens over [A-Za-z0-9_.-], compared
/// case-sensitively.
constexpr bool isValidIdToken(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
        if (!ok) return false;
    }
    return true;
}

/// Thin typed wrapper so facet, concept and document identifiers cannot be
/// mixed up. Construction validates the token shape.
template <class Tag>
class TaggedId {
public:
    TaggedId() = default;
    explicit TaggedId(std::string value) : value_(std::move(value)) {
        if (!isValidIdToken(value_))
            throw std::invalid_argument("invalid identifier token: '" + value_ + "'");
    }

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    auto operator<=>(const TaggedId&) const = default;

private:
    std::string value_;
};

using FacetId = TaggedId<struct FacetIdTag>;
using ConceptId = TaggedId<struct ConceptIdTag>;
using DocId = TaggedId<struct DocIdTag>;

/// Deterministically ordered concept set (lexicographic by id).
using ConceptSet = std::set<ConceptId>;

enum class HierKind { Generic, Partitive };

constexpr RelationType relationOf(HierKind k) {
    return k == HierKind::Generic ? RelationType::HierGeneric
                                  : RelationType::HierPartitive;
}

constexpr std::optional<HierKind> hierKindOf(RelationType r) {
    if (r == RelationType::HierGeneric) return HierKind::Generic;
    if (r == RelationType::HierPartitive) return HierKind::Partitive;
    return std::nullopt;
}

struct Facet {
    FacetId id;
    std::string label;

    bool operator==(const Facet&) const = default;
};

struct Concept {
    ConceptId id;
    FacetId facet;
    std::string prefLabel;
    std::set<std::string> altLabels;

    bool operator==(const Concept&) const = default;
};

/// Directed typed edge. Hierarchical edges run child -> parent within one
/// facet; chronological edges are stored in the earlier -> later direction
/// only; associative edges point from the named source role to the target
/// role (e.g. raw material -> product).
struct Edge {
    ConceptId source;
    ConceptId target;
    RelationType type{};

    auto operator<=>(const Edge&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity{};
    std::string code;
    std::string message;
    std::vector<std::string> subjects;

    bool operator==(const Diagnostic&) const = default;
};

/// Immutable-after-load container for one faceted vocabulary. The add*
/// methods enforce local invariants (token shape, duplicates, edge
/// direction); referential problems are left for validate() so that files
/// with dangling references can still be loaded and diagnosed.
class KnowledgeBase {
public:
    void addFacet(Facet f) {
        if (facets_.count(f.id))
            throw DuplicateIdError("duplicate facet id '" + f.id.str() + "'");
        if (f.label.empty()) throw std::invalid_argument("facet label must be non-empty");
        facets_.emplace(f.id, std::move(f));
    }

    void addConcept(Concept c) {
        if (concepts_.count(c.id))
            throw DuplicateIdError("duplicate concept id '" + c.id.str() + "'");
        if (c.prefLabel.empty())
            throw std::invalid_argument("concept '" + c.id.str() + "' needs a non-empty prefLabel");
        if (c.altLabels.count(c.prefLabel))
            throw std::invalid_argument("concept '" + c.id.str() +
                                        "': altLabels must not repeat the prefLabel");
        for (const std::string& alt : c.altLabels) {
            if (alt.empty())
                throw std::invalid_argument("concept '" + c.id.str() + "': empty alt label");
            if (alt.find('|') != std::string::npos)
                throw std::invalid_argument("concept '" + c.id.str() +
                                            "': alt label may not contain '|'");
        }
        concepts_.emplace(c.id, std::move(c));
    }

    /// Synonymy lives on concept labels, never on edges. A later_earlier edge
    /// is normalized to its canonical earlier_later mirror.
    void addEdge(ConceptId source, ConceptId target, RelationType type) {
        if (type == RelationType::Synonym)
            throw std::invalid_argument("synonym edges are not stored; use altLabels");
        if (type == RelationType::LaterEarlier) {
            std::swap(source, target);
            type = RelationType::EarlierLater;
        }
        if (source == target)
            throw std::invalid_argument("self-referential edge on '" + source.str() + "'");
        Edge e{std::move(source), std::move(target), type};
        if (edges_.count(e))
            throw std::invalid_argument("duplicate edge " + e.source.str() + " -> " +
                                        e.target.str() + " (" +
                                        std::string(relationToken(e.type)) + ")");
        if (auto kind = hierKindOf(type)) {
            hierParents_[kindIndex(*kind)][e.source].insert(e.target);
            hierChildren_[kindIndex(*kind)][e.target].insert(e.source);
        } else {
            outEdges_[e.source].insert(e);
            inEdges_[e.target].insert(e);
        }
        edges_.insert(std::move(e));
    }

    const std::map<FacetId, Facet>& facets() const noexcept { return facets_; }
    const std::map<ConceptId, Concept>& concepts() const noexcept { return concepts_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }

    bool hasConcept(const ConceptId& id) const { return concepts_.count(id) != 0; }
    bool hasFacet(const FacetId& id) const { return facets_.count(id) != 0; }

    const Concept& concept(const ConceptId& id) const {
        auto it = concepts_.find(id);
        if (it == concepts_.end())
            throw NotFoundError("no concept with id '" + id.str() + "'");
        return it->second;
    }

    /// Direct hierarchical neighbors; empty set for unknown ids (existence
    /// checks belong to the calling operation).
    const ConceptSet& directParents(const ConceptId& c, HierKind k) const {
        return lookup(hierParents_[kindIndex(k)], c);
    }
    const ConceptSet& directChildren(const ConceptId& c, HierKind k) const {
        return lookup(hierChildren_[kindIndex(k)], c);
    }

    /// Non-hierarchical edges keyed by endpoint.
    const std::set<Edge>& edgesFrom(const ConceptId& c) const { return lookup(outEdges_, c); }
    const std::set<Edge>& edgesInto(const ConceptId& c) const { return lookup(inEdges_, c); }

    bool operator==(const KnowledgeBase& other) const {
        return facets_ == other.facets_ && concepts_ == other.concepts_ &&
               edges_ == other.edges_;
    }

private:
    static std::size_t kindIndex(HierKind k) { return k == HierKind::Generic ? 0 : 1; }

    template <class Map>
    static const typename Map::mapped_type& lookup(const Map& m, const ConceptId& c) {
        static const typename Map::mapped_type empty{};
        auto it = m.find(c);
        return it == m.end() ? empty : it->second;
    }

    std::map<FacetId, Facet> facets_;
    std::map<ConceptId, Concept> concepts_;
    std::set<Edge> edges_;
    std::map<ConceptId, ConceptSet> hierParents_[2];
    std::map<ConceptId, ConceptSet> hierChildren_[2];
    std::map<ConceptId, std::set<Edge>> outEdges_;
    std::map<ConceptId, std::set<Edge>> inEdges_;
};

namespace detail {

inline Diagnostic makeDiag(Severity sev, std::string code, std::string message,
                           std::vector<std::string> subjects) {
    return Diagnostic{sev, std::move(code), std::move(message), std::move(subjects)};
}

/// Collects every strongly connected component of size >= 2 in the child ->
/// parent graph of one facet and kind. Iterative Tarjan; recursion depth on
/// user data is not acceptable.
inline std::vector<std::vector<ConceptId>> hierCycles(const KnowledgeBase& kb,
                                                      const FacetId& facet, HierKind kind) {
    std::vector<ConceptId> nodes;
    for (const auto& [id, c] : kb.concepts())
        if (c.facet == facet) nodes.push_back(id);

    std::map<ConceptId, int> index, low;
    std::map<ConceptId, bool> onStack;
    std::vector<ConceptId> stack;
    std::vector<std::vector<ConceptId>> cycles;
    int counter = 0;

    struct Frame {
        ConceptId node;
        ConceptSet::const_iterator next, end;
    };

    for (const ConceptId& root : nodes) {
        if (index.count(root)) continue;
        std::vector<Frame> call;
        auto open = [&](const ConceptId& v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            onStack[v] = true;
            const ConceptSet& succ = kb.directParents(v, kind);
            call.push_back(Frame{v, succ.begin(), succ.end()});
        };
        open(root);
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next != f.end) {
                const ConceptId& w = *f.next++;
                // Dangling or cross-facet parents are reported elsewhere.
                auto it = kb.concepts().find(w);
                if (it == kb.concepts().end() || it->second.facet != facet) continue;
                if (!index.count(w)) {
                    open(w);
                } else if (onStack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
            } else {
                ConceptId v = f.node;
                call.pop_back();
                if (!call.empty())
                    low[call.back().node] = std::min(low[call.back().node], low[v]);
                if (low[v] == index[v]) {
                    std::vector<ConceptId> comp;
                    while (true) {
                        ConceptId w = stack.back();
                        stack.pop_back();
                        onStack[w] = false;
                        comp.push_back(w);
                        if (w == v) break;
                    }
                    if (comp.size() > 1) {
                        std::sort(comp.begin(), comp.end());
                        cycles.push_back(std::move(comp));
                    }
                }
            }
        }
    }
    return cycles;
}

} // namespace detail

/// Structural validation. Returns all findings sorted by (code, subjects);
/// an empty list means the knowledge base is well-formed. Errors make the
/// kb unusable for inference; warnings flag discouraged modeling.
inline std::vector<Diagnostic> validate(const KnowledgeBase& kb) {
    using detail::makeDiag;
    std::vector<Diagnostic> out;

    // E_DANGLING: concept -> facet references.
    for (const auto& [id, c] : kb.concepts()) {
        if (!kb.hasFacet(c.facet))
            out.push_back(makeDiag(Severity::Error, "E_DANGLING",
                                   "concept '" + id.str() + "' references undeclared facet '" +
                                       c.facet.str() + "'",
                                   {c.facet.str()}));
    }

    for (const Edge& e : kb.edges()) {
        // E_DANGLING: edge endpoints.
        bool dangling = false;
        for (const ConceptId& end : {e.source, e.target}) {
            if (!kb.hasConcept(end)) {
                dangling = true;
                out.push_back(makeDiag(Severity::Error, "E_DANGLING",
                                       "edge " + e.source.str() + " -> " + e.target.str() +
                                           " (" + std::string(relationToken(e.type)) +
                                           ") references undeclared concept '" + end.str() + "'",
                                       {end.str()}));
            }
        }
        // E_XFACET_HIER: hierarchy must stay inside one facet.
        if (!dangling && isHierarchical(e.type)) {
            const Concept& s = kb.concept(e.source);
            const Concept& t = kb.concept(e.target);
            if (s.facet != t.facet)
                out.push_back(makeDiag(Severity::Error, "E_XFACET_HIER",
                                       "hierarchical edge " + e.source.str() + " -> " +
                                           e.target.str() + " crosses facets '" +
                                           s.facet.str() + "' and '" + t.facet.str() + "'",
                                       {e.source.str(), e.target.str()}));
        }
    }

    // E_CYCLE: per facet and per kind the hierarchy must be a DAG.
    for (const auto& [fid, facet] : kb.facets()) {
        for (HierKind kind : {HierKind::Generic, HierKind::Partitive}) {
            for (std::vector<ConceptId>& cycle : detail::hierCycles(kb, fid, kind)) {
                std::vector<std::string> subjects;
                std::string names;
                for (const ConceptId& c : cycle) {
                    if (!names.empty()) names += ", ";
                    names += c.str();
                    subjects.push_back(c.str());
                }
                out.push_back(makeDiag(Severity::Error, "E_CYCLE",
                                       std::string(kind == HierKind::Generic ? "generic"
                                                                             : "partitive") +
                                           " hierarchy cycle in facet '" + fid.str() +
                                           "': " + names,
                                       std::move(subjects)));
            }
        }
    }

    // E_DUP_PREF: prefLabel unique per facet (case-sensitive).
    {
        std::map<std::pair<FacetId, std::string>, std::vector<ConceptId>> byLabel;
        for (const auto& [id, c] : kb.concepts())
            byLabel[{c.facet, c.prefLabel}].push_back(id);
        for (auto& [key, ids] : byLabel) {
            if (ids.size() < 2) continue;
            std::sort(ids.begin(), ids.end());
            std::vector<std::string> subjects;
            for (const ConceptId& id : ids) subjects.push_back(id.str());
            out.push_back(makeDiag(Severity::Error, "E_DUP_PREF",
                                   "prefLabel \"" + key.second + "\" used by " +
                                       std::to_string(ids.size()) + " concepts in facet '" +
                                       key.first.str() + "'",
                                   std::move(subjects)));
        }
    }

    // W_POLYHIER / W_MIXED_DIM.
    for (const auto& [id, c] : kb.concepts()) {
        const ConceptSet& generic = kb.directParents(id, HierKind::Generic);
        const ConceptSet& partitive = kb.directParents(id, HierKind::Partitive);
        for (const auto* parents : {&generic, &partitive}) {
            if (parents->size() > 1) {
                std::vector<std::string> subjects{id.str()};
                std::string names;
                for (const ConceptId& p : *parents) {
                    if (!names.empty()) names += ", ";
                    names += p.str();
                    subjects.push_back(p.str());
                }
                out.push_back(makeDiag(Severity::Warning, "W_POLYHIER",
                                       "concept '" + id.str() + "' has " +
                                           std::to_string(parents->size()) +
                                           (parents == &generic ? " generic" : " partitive") +
                                           " parents: " + names,
                                       std::move(subjects)));
            }
        }
        if (!generic.empty() && !partitive.empty())
            out.push_back(makeDiag(Severity::Warning, "W_MIXED_DIM",
                                   "concept '" + id.str() +
                                       "' has both generic and partitive parents",
                                   {id.str()}));
    }

    std::sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.code != b.code) return a.code < b.code;
        if (a.subjects != b.subjects) return a.subjects < b.subjects;
        return a.message < b.message;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool hasErrors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Resolves a concept reference: a bare token is tried as an id first and
/// then as a label; a double-quoted string is matched against pref and alt
/// labels only. Label matches must be unique across the whole kb.
inline ConceptId resolveRef(const KnowledgeBase& kb, std::string_view ref) {
    std::string_view label = ref;
    bool quoted = false;
    if (ref.size() >= 2 && ref.front() == '"' && ref.back() == '"') {
        quoted = true;
        label = ref.substr(1, ref.size() - 2);
    }

    if (!quoted && isValidIdToken(ref)) {
        ConceptId id{std::string(ref)};
        if (kb.hasConcept(id)) return id;
    }

    std::vector<ConceptId> matches;
    for (const auto& [id, c] : kb.concepts()) {
        if (c.prefLabel == label || c.altLabels.count(std::string(label)))
            matches.push_back(id);
    }
    if (matches.empty())
        throw NotFoundError("no concept matches '" + std::string(ref) + "'");
    if (matches.size() > 1) {
        std::string candidates;
        for (const ConceptId& id : matches) {
            if (!candidates.empty()) candidates += ", ";
            candidates += id.str();
        }
        throw AmbiguousError("label '" + std::string(label) + "' matches " +
                             std::to_string(matches.size()) + " concepts: " + candidates);
    }
    return matches.front();
}

inline ConceptSet parentsOf(const KnowledgeBase& kb, const ConceptId& c, HierKind kind) {
    if (!kb.hasConcept(c)) throw NotFoundError("no concept with id '" + c.str() + "'");
    return kb.directParents(c, kind);
}

inline ConceptSet childrenOf(const KnowledgeBase& kb, const ConceptId& c, HierKind kind) {
    if (!kb.hasConcept(c)) throw NotFoundError("no concept with id '" + c.str() + "'");
    return kb.directChildren(c, kind);
}

} // namespace kos
