#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "kos/errors.hpp"
#include "kos/model.hpp"
#include "kos/relations.hpp"

namespace kos {

enum class KindSet : unsigned {
    Generic = 1u,
    Partitive = 2u,
    Both = 3u,
};

constexpr KindSet operator|(KindSet a, KindSet b) {
    return static_cast<KindSet>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}

constexpr bool contains(KindSet s, HierKind k) {
    unsigned bit = k == HierKind::Generic ? 1u : 2u;
    return (static_cast<unsigned>(s) & bit) != 0;
}

/// A materialized inference together with one witnessing path of stored
/// edges, listed in traversal order from source to target. The witness is
/// canonical: shortest, ties broken by the lexicographic concept sequence
/// and then the step tokens.
struct InferredEdge {
    ConceptId source;
    ConceptId target;
    RelationType type{};
    std::vector<Edge> viaPath;

    auto operator<=>(const InferredEdge&) const = default;
};

/// Upper bound on associative same-type steps in one inference chain. The
/// closure itself is a visited-set fixpoint and terminates on any input;
/// the cap bounds witness growth on adversarial chain graphs.
inline constexpr std::size_t kMaxAssociativeChainSteps = 16;

namespace detail {

inline void requireConcept(const KnowledgeBase& kb, const ConceptId& c) {
    if (!kb.hasConcept(c)) throw NotFoundError("no concept with id '" + c.str() + "'");
}

inline void requireQueryableRelation(RelationType r) {
    if (isHierarchical(r) || r == RelationType::Synonym)
        throw BadRelTypeError("relation '" + std::string(relationToken(r)) +
                              "' selects via hierarchy operations, not typed traversal");
}

/// Closure over child->parent edges of the requested kinds, in the chosen
/// direction. Plain BFS; mixed-kind cycles are legal input, the visited set
/// handles them.
inline ConceptSet hierReach(const KnowledgeBase& kb, const ConceptId& start, KindSet kinds,
                            bool includeSelf, bool upward) {
    ConceptSet visited;
    std::vector<ConceptId> frontier{start};
    visited.insert(start);
    while (!frontier.empty()) {
        std::vector<ConceptId> next;
        for (const ConceptId& c : frontier) {
            for (HierKind k : {HierKind::Generic, HierKind::Partitive}) {
                if (!contains(kinds, k)) continue;
                const ConceptSet& step =
                    upward ? kb.directParents(c, k) : kb.directChildren(c, k);
                for (const ConceptId& n : step)
                    if (visited.insert(n).second) next.push_back(n);
            }
        }
        frontier = std::move(next);
    }
    if (!includeSelf) visited.erase(start);
    return visited;
}

/// Direct neighbors of `c` over one associative or chronological relation.
/// later_earlier is a traversal direction over the canonically stored
/// earlier_later edges.
inline ConceptSet typedNeighbors(const KnowledgeBase& kb, const ConceptId& c, RelationType r) {
    ConceptSet out;
    if (r == RelationType::LaterEarlier) {
        for (const Edge& e : kb.edgesInto(c))
            if (e.type == RelationType::EarlierLater) out.insert(e.source);
    } else {
        for (const Edge& e : kb.edgesFrom(c))
            if (e.type == r) out.insert(e.target);
    }
    return out;
}

struct Witness {
    std::vector<Edge> path;
};

/// Shorter first, then the concept sequence, then the step tokens (parallel
/// edges of different types can share a concept sequence).
inline bool witnessLess(const Witness& a, const Witness& b) {
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    auto concepts = [](const Witness& w) {
        std::vector<ConceptId> seq;
        if (w.path.empty()) return seq;
        seq.push_back(w.path.front().source);
        for (const Edge& e : w.path) seq.push_back(e.target);
        return seq;
    };
    auto ca = concepts(a), cb = concepts(b);
    if (ca != cb) return ca < cb;
    std::vector<std::string_view> ta, tb;
    for (const Edge& e : a.path) ta.push_back(relationToken(e.type));
    for (const Edge& e : b.path) tb.push_back(relationToken(e.type));
    return ta < tb;
}

/// State of the pattern search that drives one result type:
///   - hierarchy / chronology closures only ever use endsTyped = 0;
///   - associative carry accepts exactly the states whose last step was the
///     associative edge (endsTyped = 1), with `chainSteps` counting the
///     associative steps taken so far.
struct SearchNode {
    ConceptId at;
    std::uint8_t endsTyped = 0;
    std::uint8_t chainSteps = 0;

    auto operator<=>(const SearchNode&) const = default;
};

using Transition = std::pair<Edge, SearchNode>;

/// Layered BFS that keeps, per reached state, the canonical best witness.
/// Extending only per-state bests is sufficient: witness order is prefix
/// compatible (a better prefix always yields a better extension).
template <class ExpandFn>
std::map<SearchNode, Witness> bestWitnessSearch(const SearchNode& start, ExpandFn expand) {
    std::map<SearchNode, Witness> best;
    std::map<SearchNode, Witness> frontier;
    frontier.emplace(start, Witness{});
    best.emplace(start, Witness{});
    while (!frontier.empty()) {
        std::map<SearchNode, Witness> next;
        for (const auto& [node, witness] : frontier) {
            for (const Transition& t : expand(node)) {
                if (best.count(t.second)) continue; // strictly shorter path exists
                Witness extended{witness.path};
                extended.path.push_back(t.first);
                auto it = next.find(t.second);
                if (it == next.end())
                    next.emplace(t.second, std::move(extended));
                else if (witnessLess(extended, it->second))
                    it->second = std::move(extended);
            }
        }
        for (auto& [node, witness] : next) best.emplace(node, witness);
        frontier = std::move(next);
    }
    return best;
}

using TripleKey = std::tuple<ConceptId, ConceptId, RelationType>;

/// Derives every inference licensed by the composition inventory as the
/// engine consumes it: same-kind hierarchy closure, chronological closure,
/// downward carry of associative edges along the hierarchy below their
/// source, and same-type chaining for the chainable associative types —
/// interleaved to a fixpoint. `excluded` edges are ignored entirely.
inline std::map<TripleKey, Witness> deriveClosure(const KnowledgeBase& kb,
                                                  const std::set<Edge>& excluded) {
    std::map<TripleKey, Witness> out;

    auto consider = [&out](const ConceptId& src, const SearchNode& node, RelationType type,
                           const Witness& w) {
        TripleKey key{src, node.at, type};
        auto it = out.find(key);
        if (it == out.end())
            out.emplace(key, w);
        else if (witnessLess(w, it->second))
            it->second = w;
    };

    auto usable = [&excluded](const Edge& e) { return !excluded.count(e); };

    // Hierarchy closure, one kind at a time.
    for (HierKind kind : {HierKind::Generic, HierKind::Partitive}) {
        const RelationType rel = relationOf(kind);
        for (const auto& [start, c] : kb.concepts()) {
            auto expand = [&](const SearchNode& n) {
                std::vector<Transition> ts;
                for (const ConceptId& p : kb.directParents(n.at, kind)) {
                    Edge e{n.at, p, rel};
                    if (usable(e)) ts.emplace_back(e, SearchNode{p, 0, 0});
                }
                return ts;
            };
            for (const auto& [node, witness] : bestWitnessSearch(SearchNode{start, 0, 0}, expand))
                if (!witness.path.empty()) consider(start, node, rel, witness);
        }
    }

    // Chronological closure over the canonical earlier -> later edges.
    for (const auto& [start, c] : kb.concepts()) {
        auto expand = [&](const SearchNode& n) {
            std::vector<Transition> ts;
            for (const Edge& e : kb.edgesFrom(n.at))
                if (e.type == RelationType::EarlierLater && usable(e))
                    ts.emplace_back(e, SearchNode{e.target, 0, 0});
            return ts;
        };
        for (const auto& [node, witness] : bestWitnessSearch(SearchNode{start, 0, 0}, expand))
            if (!witness.path.empty())
                consider(start, node, RelationType::EarlierLater, witness);
    }

    // Associative carry and chaining. A witness for result type `a` is any
    // interleaving of upward hierarchy steps with `a` steps that ends on an
    // `a` step; without chaining only the final step may be typed.
    std::set<RelationType> assocPresent;
    for (const Edge& e : kb.edges())
        if (isAssociative(e.type) && usable(e)) assocPresent.insert(e.type);

    for (RelationType a : assocPresent) {
        const bool chain = isChainable(a);
        for (const auto& [start, c] : kb.concepts()) {
            auto expand = [&](const SearchNode& n) {
                std::vector<Transition> ts;
                if (n.endsTyped && !chain) return ts;
                for (HierKind k : {HierKind::Generic, HierKind::Partitive}) {
                    const RelationType rel = relationOf(k);
                    for (const ConceptId& p : kb.directParents(n.at, k)) {
                        Edge e{n.at, p, rel};
                        if (usable(e)) ts.emplace_back(e, SearchNode{p, 0, n.chainSteps});
                    }
                }
                if (n.chainSteps < kMaxAssociativeChainSteps) {
                    for (const Edge& e : kb.edgesFrom(n.at))
                        if (e.type == a && usable(e))
                            ts.emplace_back(e, SearchNode{e.target, 1,
                                                          std::uint8_t(n.chainSteps + 1)});
                }
                return ts;
            };
            for (const auto& [node, witness] : bestWitnessSearch(SearchNode{start, 0, 0}, expand))
                if (node.endsTyped) consider(start, node, a, witness);
        }
    }

    return out;
}

/// Reachability-only variant of one closure question: is (source, target,
/// type) still derivable ignoring `excluded`?
inline bool canDerive(const KnowledgeBase& kb, const std::set<Edge>& excluded,
                      const ConceptId& source, const ConceptId& target, RelationType type) {
    auto usable = [&excluded](const Edge& e) { return !excluded.count(e); };

    std::set<SearchNode> visited;
    std::vector<SearchNode> frontier{SearchNode{source, 0, 0}};
    visited.insert(frontier.front());
    const bool assoc = isAssociative(type);
    const bool chain = isChainable(type);
    while (!frontier.empty()) {
        std::vector<SearchNode> next;
        for (const SearchNode& n : frontier) {
            std::vector<SearchNode> steps;
            if (assoc) {
                if (!(n.endsTyped && !chain)) {
                    for (HierKind k : {HierKind::Generic, HierKind::Partitive})
                        for (const ConceptId& p : kb.directParents(n.at, k))
                            if (usable(Edge{n.at, p, relationOf(k)}))
                                steps.push_back(SearchNode{p, 0, n.chainSteps});
                    if (n.chainSteps < kMaxAssociativeChainSteps)
                        for (const Edge& e : kb.edgesFrom(n.at))
                            if (e.type == type && usable(e))
                                steps.push_back(SearchNode{e.target, 1,
                                                           std::uint8_t(n.chainSteps + 1)});
                }
            } else if (auto kind = hierKindOf(type)) {
                for (const ConceptId& p : kb.directParents(n.at, *kind))
                    if (usable(Edge{n.at, p, type}))
                        steps.push_back(SearchNode{p, 0, 0});
            } else { // EarlierLater
                for (const Edge& e : kb.edgesFrom(n.at))
                    if (e.type == RelationType::EarlierLater && usable(e))
                        steps.push_back(SearchNode{e.target, 0, 0});
            }
            for (const SearchNode& s : steps) {
                const bool accepted = assoc ? (s.endsTyped != 0) : true;
                if (accepted && s.at == target) return true;
                if (visited.insert(s).second) next.push_back(s);
            }
        }
        frontier = std::move(next);
    }
    return false;
}

inline void requireValid(const KnowledgeBase& kb) {
    if (hasErrors(validate(kb)))
        throw InvalidKbError("knowledge base has validation errors; run validate");
}

} // namespace detail

/// Reflexive-transitive closure below `c` over the chosen hierarchy kinds.
inline ConceptSet descendants(const KnowledgeBase& kb, const ConceptId& c, KindSet kinds,
                              bool includeSelf) {
    detail::requireConcept(kb, c);
    if (static_cast<unsigned>(kinds) == 0)
        throw std::invalid_argument("descendants: empty kind set");
    return detail::hierReach(kb, c, kinds, includeSelf, false);
}

inline ConceptSet ancestors(const KnowledgeBase& kb, const ConceptId& c, KindSet kinds,
                            bool includeSelf) {
    detail::requireConcept(kb, c);
    if (static_cast<unsigned>(kinds) == 0)
        throw std::invalid_argument("ancestors: empty kind set");
    return detail::hierReach(kb, c, kinds, includeSelf, true);
}

/// Concepts reachable from `c` over one associative or chronological
/// relation, honoring downward inheritance: an edge carried by any ancestor
/// of `c` (either hierarchy kind) applies to `c` as well. With
/// `expandTarget` every hit is widened to its own descendant closure.
inline ConceptSet relatedVia(const KnowledgeBase& kb, const ConceptId& c, RelationType relType,
                             bool expandTarget) {
    detail::requireConcept(kb, c);
    detail::requireQueryableRelation(relType);
    ConceptSet carriers = detail::hierReach(kb, c, KindSet::Both, true, true);
    ConceptSet hits;
    for (const ConceptId& a : carriers)
        for (const ConceptId& y : detail::typedNeighbors(kb, a, relType)) hits.insert(y);
    if (!expandTarget) return hits;
    ConceptSet expanded;
    for (const ConceptId& y : hits) {
        if (!kb.hasConcept(y)) {
            expanded.insert(y);
            continue;
        }
        ConceptSet sub = detail::hierReach(kb, y, KindSet::Both, true, false);
        expanded.insert(sub.begin(), sub.end());
    }
    return expanded;
}

/// The constraint selection: concepts strictly below `under` that stand in
/// `relType` (directly or by inheritance) to `target` or anything below it.
/// `under` itself is never part of the answer; the caller searches with the
/// selected narrower concepts only.
inline ConceptSet selectConstrained(const KnowledgeBase& kb, const ConceptId& under,
                                    RelationType relType, const ConceptId& target) {
    detail::requireConcept(kb, under);
    detail::requireConcept(kb, target);
    detail::requireQueryableRelation(relType);
    ConceptSet targetSet = detail::hierReach(kb, target, KindSet::Both, true, false);
    ConceptSet out;
    for (const ConceptId& x : detail::hierReach(kb, under, KindSet::Both, false, false)) {
        ConceptSet related = relatedVia(kb, x, relType, false);
        for (const ConceptId& y : related) {
            if (targetSet.count(y)) {
                out.insert(x);
                break;
            }
        }
    }
    return out;
}

/// Materializes every derivable inference with a canonical witness path.
/// Output is sorted by (source, relation token, target).
inline std::vector<InferredEdge> materializeInferences(const KnowledgeBase& kb) {
    detail::requireValid(kb);
    std::vector<InferredEdge> out;
    for (auto& [key, witness] : detail::deriveClosure(kb, {})) {
        const auto& [source, target, type] = key;
        out.push_back(InferredEdge{source, target, type, witness.path});
    }
    std::sort(out.begin(), out.end(), [](const InferredEdge& a, const InferredEdge& b) {
        if (a.source != b.source) return a.source < b.source;
        auto ta = relationToken(a.type), tb = relationToken(b.type);
        if (ta != tb) return ta < tb;
        return a.target < b.target;
    });
    return out;
}

/// Flags associative edges whose statement survives their removal — the
/// per-leaf attachments that a highest-level attachment already covers.
/// Edges are examined in canonical order and removals accumulate, so
/// deleting the whole flagged set never loses a derivable statement even
/// when two edges each cover the other.
inline std::vector<Diagnostic> lintRedundant(const KnowledgeBase& kb) {
    detail::requireValid(kb);

    std::vector<Edge> assocEdges;
    for (const Edge& e : kb.edges())
        if (isAssociative(e.type)) assocEdges.push_back(e);
    std::sort(assocEdges.begin(), assocEdges.end(), [](const Edge& a, const Edge& b) {
        auto ta = relationToken(a.type), tb = relationToken(b.type);
        if (ta != tb) return ta < tb;
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });

    std::vector<Diagnostic> out;
    std::set<Edge> removed;
    for (const Edge& e : assocEdges) {
        removed.insert(e);
        if (detail::canDerive(kb, removed, e.source, e.target, e.type)) {
            out.push_back(Diagnostic{
                Severity::Warning, "W_REDUNDANT_EDGE",
                "edge " + e.source.str() + " -> " + e.target.str() + " (" +
                    std::string(relationToken(e.type)) +
                    ") is already derivable and can be dropped",
                {e.source.str(), e.target.str()}});
        } else {
            removed.erase(e);
        }
    }
    std::sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.code, a.subjects) < std::tie(b.code, b.subjects);
    });
    return out;
}

} // namespace kos
