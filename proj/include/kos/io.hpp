#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kos/errors.hpp"
#include "kos/model.hpp"
#include "kos/retrieval.hpp"

namespace kos {

namespace detail {

inline std::vector<std::string_view> splitLines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = nl + 1;
    }
    return lines;
}

inline bool isBlankOrComment(std::string_view line) {
    for (char c : line) {
        if (c == ' ' || c == '\t') continue;
        return c == '#';
    }
    return true;
}

/// Whitespace-separated fields; double quotes group text (and may appear
/// mid-field, as in title="..."). Escapes inside quotes are preserved for a
/// later unescape step.
inline std::vector<std::string> splitFields(std::string_view line, std::size_t lineNo) {
    std::vector<std::string> fields;
    std::string cur;
    bool inQuote = false;
    bool started = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (inQuote) {
            cur.push_back(c);
            if (c == '\\') {
                if (i + 1 >= line.size())
                    throw FormatError("dangling escape in quoted string", lineNo);
                cur.push_back(line[++i]);
            } else if (c == '"') {
                inQuote = false;
            }
            continue;
        }
        if (c == ' ' || c == '\t') {
            if (started) fields.push_back(std::move(cur));
            cur.clear();
            started = false;
            continue;
        }
        started = true;
        cur.push_back(c);
        if (c == '"') inQuote = true;
    }
    if (inQuote) throw FormatError("unterminated quoted string", lineNo);
    if (started) fields.push_back(std::move(cur));
    return fields;
}

inline std::string unescapeQuoted(std::string_view raw, std::size_t lineNo) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        throw FormatError("expected a quoted string, got '" + std::string(raw) + "'", lineNo);
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\\') {
            char esc = raw[++i];
            if (esc != '"' && esc != '\\')
                throw FormatError("unsupported escape '\\" + std::string(1, esc) + "'", lineNo);
            out.push_back(esc);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

inline std::string escapeQuoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

template <class Id>
Id parseId(const std::string& raw, std::size_t lineNo) {
    if (!isValidIdToken(raw))
        throw FormatError("invalid identifier '" + raw + "'", lineNo);
    return Id{raw};
}

} // namespace detail

/// Parses the line-oriented vocabulary format. Local problems (bad tokens,
/// duplicate declarations, malformed edges) fail here with a line number;
/// unresolved references load fine and surface through validate().
inline KnowledgeBase parseKos(std::string_view text) {
    using namespace detail;
    KnowledgeBase kb;
    std::size_t lineNo = 0;
    for (std::string_view line : splitLines(text)) {
        ++lineNo;
        if (isBlankOrComment(line)) continue;
        std::vector<std::string> f = splitFields(line, lineNo);
        const std::string& keyword = f[0];
        try {
            if (keyword == "facet") {
                if (f.size() != 3) throw FormatError("facet expects: facet <id> \"<label>\"", lineNo);
                kb.addFacet(Facet{parseId<FacetId>(f[1], lineNo), unescapeQuoted(f[2], lineNo)});
            } else if (keyword == "concept") {
                if (f.size() != 5 && f.size() != 7)
                    throw FormatError(
                        "concept expects: concept <id> <facet-id> pref \"<label>\" [alt \"<l>|<l>\"]",
                        lineNo);
                if (f[3] != "pref") throw FormatError("expected 'pref', got '" + f[3] + "'", lineNo);
                Concept c;
                c.id = parseId<ConceptId>(f[1], lineNo);
                c.facet = parseId<FacetId>(f[2], lineNo);
                c.prefLabel = unescapeQuoted(f[4], lineNo);
                if (f.size() == 7) {
                    if (f[5] != "alt")
                        throw FormatError("expected 'alt', got '" + f[5] + "'", lineNo);
                    std::string joined = unescapeQuoted(f[6], lineNo);
                    std::size_t start = 0;
                    while (start <= joined.size()) {
                        std::size_t bar = joined.find('|', start);
                        std::string label = joined.substr(
                            start, bar == std::string::npos ? std::string::npos : bar - start);
                        if (label.empty()) throw FormatError("empty alt label", lineNo);
                        c.altLabels.insert(std::move(label));
                        if (bar == std::string::npos) break;
                        start = bar + 1;
                    }
                }
                kb.addConcept(std::move(c));
            } else if (keyword == "broader") {
                if (f.size() != 4)
                    throw FormatError("broader expects: broader <child> <parent> <generic|partitive>",
                                      lineNo);
                HierKind kind;
                if (f[3] == "generic") kind = HierKind::Generic;
                else if (f[3] == "partitive") kind = HierKind::Partitive;
                else throw FormatError("unknown hierarchy kind '" + f[3] + "'", lineNo);
                kb.addEdge(parseId<ConceptId>(f[1], lineNo), parseId<ConceptId>(f[2], lineNo),
                           relationOf(kind));
            } else if (keyword == "before") {
                if (f.size() != 3)
                    throw FormatError("before expects: before <earlier> <later>", lineNo);
                kb.addEdge(parseId<ConceptId>(f[1], lineNo), parseId<ConceptId>(f[2], lineNo),
                           RelationType::EarlierLater);
            } else if (keyword == "rel") {
                if (f.size() != 4)
                    throw FormatError("rel expects: rel <source> <target> <assoc-type>", lineNo);
                auto rel = relationFromToken(f[3]);
                if (!rel || !isAssociative(*rel))
                    throw FormatError("unknown associative relation '" + f[3] + "'", lineNo);
                kb.addEdge(parseId<ConceptId>(f[1], lineNo), parseId<ConceptId>(f[2], lineNo),
                           *rel);
            } else {
                throw FormatError("unknown directive '" + keyword + "'", lineNo);
            }
        } catch (const DuplicateIdError& e) {
            if (e.line) throw;
            throw DuplicateIdError(e.what(), lineNo);
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what(), lineNo);
        }
    }
    return kb;
}

/// Canonical text form: facets sorted by id, concepts by id, edges by
/// (relation token, source, target). Serializing a parse of this output
/// reproduces it byte for byte.
inline std::string serializeKos(const KnowledgeBase& kb) {
    using namespace detail;
    std::string out;
    for (const auto& [id, facet] : kb.facets())
        out += "facet " + id.str() + " " + escapeQuoted(facet.label) + "\n";
    for (const auto& [id, c] : kb.concepts()) {
        out += "concept " + id.str() + " " + c.facet.str() + " pref " + escapeQuoted(c.prefLabel);
        if (!c.altLabels.empty()) {
            std::string joined;
            for (const std::string& alt : c.altLabels) {
                if (!joined.empty()) joined += "|";
                joined += alt;
            }
            out += " alt " + escapeQuoted(joined);
        }
        out += "\n";
    }
    std::vector<Edge> edges(kb.edges().begin(), kb.edges().end());
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        auto ta = relationToken(a.type), tb = relationToken(b.type);
        if (ta != tb) return ta < tb;
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });
    for (const Edge& e : edges) {
        if (auto kind = hierKindOf(e.type)) {
            out += "broader " + e.source.str() + " " + e.target.str() + " " +
                   (*kind == HierKind::Generic ? "generic" : "partitive") + "\n";
        } else if (e.type == RelationType::EarlierLater) {
            out += "before " + e.source.str() + " " + e.target.str() + "\n";
        } else {
            out += "rel " + e.source.str() + " " + e.target.str() + " " +
                   std::string(relationToken(e.type)) + "\n";
        }
    }
    return out;
}

/// Document lines: doc <id> title="<string>" terms=<id>{,<id>}
inline Corpus parseCorpus(std::string_view text) {
    using namespace detail;
    Corpus corpus;
    std::size_t lineNo = 0;
    for (std::string_view line : splitLines(text)) {
        ++lineNo;
        if (isBlankOrComment(line)) continue;
        std::vector<std::string> f = splitFields(line, lineNo);
        if (f[0] != "doc") throw FormatError("unknown directive '" + f[0] + "'", lineNo);
        if (f.size() != 4)
            throw FormatError("doc expects: doc <id> title=\"<string>\" terms=<id>{,<id>}",
                              lineNo);
        Document d;
        d.id = parseId<DocId>(f[1], lineNo);
        if (f[2].rfind("title=", 0) != 0)
            throw FormatError("expected title=\"...\"", lineNo);
        d.title = unescapeQuoted(std::string_view(f[2]).substr(6), lineNo);
        if (f[3].rfind("terms=", 0) != 0)
            throw FormatError("expected terms=<id>{,<id>}", lineNo);
        std::string_view terms = std::string_view(f[3]).substr(6);
        if (terms.empty()) throw FormatError("document needs at least one term", lineNo);
        std::size_t start = 0;
        while (start <= terms.size()) {
            std::size_t comma = terms.find(',', start);
            std::string_view piece = terms.substr(
                start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            if (piece.empty()) throw FormatError("empty term in terms list", lineNo);
            d.terms.insert(parseId<ConceptId>(std::string(piece), lineNo));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        try {
            corpus.addDocument(std::move(d));
        } catch (const DuplicateIdError& e) {
            if (e.line) throw;
            throw DuplicateIdError(e.what(), lineNo);
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what(), lineNo);
        }
    }
    return corpus;
}

struct SkosImport {
    KnowledgeBase kb;
    std::size_t skippedPredicates = 0;
};

namespace detail {

struct SkosTriple {
    std::size_t line;
    std::string subject;   // IRI local name
    std::string predicate; // IRI local name
    bool objectIsIri = false;
    std::string object;    // local name or literal value
};

inline std::string_view trimView(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::string iriLocalName(std::string_view iri, std::size_t lineNo) {
    std::size_t cut = iri.find_last_of("#/");
    std::string_view local = cut == std::string_view::npos ? iri : iri.substr(cut + 1);
    if (!isValidIdToken(local))
        throw FormatError("cannot derive an identifier from IRI <" + std::string(iri) + ">",
                          lineNo);
    return std::string(local);
}

/// One N-Triples-style statement: <s> <p> <o> .  with a literal object
/// optionally carrying @lang or ^^<datatype>, both ignored.
inline SkosTriple parseTripleLine(std::string_view line, std::size_t lineNo) {
    SkosTriple t;
    t.line = lineNo;
    std::string_view rest = trimView(line);

    auto takeIri = [&rest, lineNo]() {
        if (rest.empty() || rest.front() != '<')
            throw FormatError("expected <IRI>", lineNo);
        std::size_t close = rest.find('>');
        if (close == std::string_view::npos)
            throw FormatError("unterminated IRI", lineNo);
        std::string_view iri = rest.substr(1, close - 1);
        rest = trimView(rest.substr(close + 1));
        return iri;
    };

    std::string_view subjIri = takeIri();
    std::string_view predIri = takeIri();
    t.subject = iriLocalName(subjIri, lineNo);
    std::size_t cut = predIri.find_last_of("#/");
    t.predicate = std::string(cut == std::string_view::npos ? predIri : predIri.substr(cut + 1));

    if (rest.empty()) throw FormatError("missing object", lineNo);
    if (rest.front() == '<') {
        t.objectIsIri = true;
        t.object = iriLocalName(takeIri(), lineNo);
    } else if (rest.front() == '"') {
        std::string value;
        std::size_t i = 1;
        bool closed = false;
        for (; i < rest.size(); ++i) {
            char c = rest[i];
            if (c == '\\' && i + 1 < rest.size()) {
                value.push_back(rest[++i]);
            } else if (c == '"') {
                closed = true;
                ++i;
                break;
            } else {
                value.push_back(c);
            }
        }
        if (!closed) throw FormatError("unterminated literal", lineNo);
        // Drop @lang / ^^<datatype> decorations.
        while (i < rest.size() && rest[i] != ' ' && rest[i] != '\t' && rest[i] != '.') ++i;
        rest = trimView(rest.substr(i));
        t.object = std::move(value);
    } else {
        throw FormatError("expected <IRI> or \"literal\" object", lineNo);
    }

    if (rest != ".") throw FormatError("statement must end with '.'", lineNo);
    return t;
}

} // namespace detail

/// Imports the broader/narrower/related/prefLabel/altLabel/inScheme subset
/// of SKOS from N-Triples-style text. Unknown predicates are counted, not
/// rejected. Concepts without a scheme land in a synthetic `_default`
/// facet; narrower statements are inverted into the canonical child ->
/// parent storage and merged with their broader mirror.
inline SkosImport importSkosSubset(std::string_view text) {
    using namespace detail;

    std::vector<SkosTriple> triples;
    std::size_t lineNo = 0;
    std::size_t skipped = 0;
    for (std::string_view line : splitLines(text)) {
        ++lineNo;
        if (isBlankOrComment(line)) continue;
        triples.push_back(parseTripleLine(line, lineNo));
    }

    static const std::set<std::string> recognized = {
        "broader", "narrower", "related", "prefLabel", "altLabel", "inScheme"};

    std::set<std::string> conceptIds;
    std::map<std::string, std::string> scheme;                     // concept -> facet (first wins)
    std::map<std::string, std::pair<std::string, std::size_t>> pref; // concept -> label, line
    std::map<std::string, std::set<std::string>> alts;
    std::set<std::string> facetIds;
    struct PendingEdge {
        std::string source, target;
        RelationType type;
        std::size_t line;
        bool operator<(const PendingEdge& o) const {
            return std::tie(source, target, type) < std::tie(o.source, o.target, o.type);
        }
    };
    std::set<PendingEdge> edges;

    for (const SkosTriple& t : triples) {
        if (!recognized.count(t.predicate)) {
            ++skipped;
            continue;
        }
        conceptIds.insert(t.subject);
        if (t.predicate == "broader" || t.predicate == "narrower" || t.predicate == "related") {
            if (!t.objectIsIri)
                throw FormatError("predicate '" + t.predicate + "' needs an IRI object", t.line);
            conceptIds.insert(t.object);
            if (t.predicate == "related") {
                edges.insert({t.subject, t.object, RelationType::UnspecificAssociation, t.line});
            } else if (t.predicate == "broader") {
                edges.insert({t.subject, t.object, RelationType::HierGeneric, t.line});
            } else {
                edges.insert({t.object, t.subject, RelationType::HierGeneric, t.line});
            }
        } else if (t.predicate == "inScheme") {
            if (!t.objectIsIri)
                throw FormatError("inScheme needs an IRI object", t.line);
            facetIds.insert(t.object);
            scheme.emplace(t.subject, t.object); // first statement wins
        } else { // prefLabel / altLabel
            if (t.objectIsIri)
                throw FormatError("predicate '" + t.predicate + "' needs a literal object",
                                  t.line);
            if (t.object.empty()) throw FormatError("empty label", t.line);
            if (t.predicate == "prefLabel") {
                auto [it, inserted] = pref.emplace(t.subject, std::make_pair(t.object, t.line));
                if (!inserted && it->second.first != t.object)
                    alts[t.subject].insert(t.object); // extra preferred labels become synonyms
            } else {
                alts[t.subject].insert(t.object);
            }
        }
    }

    SkosImport result;
    result.skippedPredicates = skipped;

    bool needDefault = false;
    for (const std::string& c : conceptIds)
        if (!scheme.count(c)) needDefault = true;
    if (needDefault) facetIds.insert("_default");

    for (const std::string& f : facetIds)
        result.kb.addFacet(Facet{FacetId{f}, f});

    for (const std::string& c : conceptIds) {
        Concept concept;
        concept.id = ConceptId{c};
        auto s = scheme.find(c);
        concept.facet = FacetId{s == scheme.end() ? "_default" : s->second};
        auto p = pref.find(c);
        concept.prefLabel = p == pref.end() ? c : p->second.first;
        auto a = alts.find(c);
        if (a != alts.end()) {
            for (const std::string& alt : a->second) {
                if (alt == concept.prefLabel) continue;
                concept.altLabels.insert(alt);
            }
        }
        try {
            result.kb.addConcept(std::move(concept));
        } catch (const std::invalid_argument& ex) {
            throw FormatError(ex.what());
        }
    }

    for (const PendingEdge& e : edges) {
        try {
            result.kb.addEdge(ConceptId{e.source}, ConceptId{e.target}, e.type);
        } catch (const std::invalid_argument& ex) {
            throw FormatError(ex.what(), e.line);
        }
    }

    return result;
}

} // namespace kos
