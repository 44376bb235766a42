#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kos/errors.hpp"
#include "kos/inference.hpp"
#include "kos/model.hpp"

namespace kos {

struct Document {
    DocId id;
    std::string title;
    std::set<ConceptId> terms;

    bool operator==(const Document&) const = default;
};

/// Post-coordinate index: documents carry independent concept terms, the
/// inverted index maps each term to its documents. Immutable once loaded.
class Corpus {
public:
    void addDocument(Document d) {
        if (documents_.count(d.id))
            throw DuplicateIdError("duplicate document id '" + d.id.str() + "'");
        if (d.terms.empty())
            throw std::invalid_argument("document '" + d.id.str() + "' has no terms");
        for (const ConceptId& t : d.terms) index_[t].insert(d.id);
        documents_.emplace(d.id, std::move(d));
    }

    const std::map<DocId, Document>& documents() const noexcept { return documents_; }
    const std::map<ConceptId, std::set<DocId>>& index() const noexcept { return index_; }

    const std::set<DocId>& docsWithTerm(const ConceptId& t) const {
        static const std::set<DocId> empty;
        auto it = index_.find(t);
        return it == index_.end() ? empty : it->second;
    }

    void rebuildIndex() {
        index_.clear();
        for (const auto& [id, d] : documents_)
            for (const ConceptId& t : d.terms) index_[t].insert(id);
    }

    bool operator==(const Corpus& other) const {
        return documents_ == other.documents_ && index_ == other.index_;
    }

private:
    std::map<DocId, Document> documents_;
    std::map<ConceptId, std::set<DocId>> index_;
};

inline Corpus rebuildIndex(Corpus corpus) {
    corpus.rebuildIndex();
    return corpus;
}

// --- query language -------------------------------------------------------

struct TermRef {
    std::string ref;    // identifier, or a label still wrapped in quotes
    bool exact = false; // '=' prefix: no hierarchy expansion

    bool operator==(const TermRef&) const = default;
};

enum class QueryKind { Term, With, And, Or, AndNot };

/// Expression tree for the query grammar. Term and With are leaves; the
/// boolean kinds own two subtrees. A With constraint always anchors on a
/// single term, never on a compound expression.
struct QueryNode {
    QueryKind kind{};
    TermRef term;                       // Term, With
    RelationType rel{};                 // With
    TermRef target;                     // With
    std::unique_ptr<QueryNode> left;    // And, Or, AndNot
    std::unique_ptr<QueryNode> right;   // And, Or, AndNot
};

using QueryPtr = std::unique_ptr<QueryNode>;

namespace detail {

struct QueryToken {
    enum Kind { Ident, Quoted, Equals, LParen, RParen, LBracket, RBracket, Colon, End };
    Kind kind{};
    std::string text;    // unescaped for Quoted (without the surrounding quotes)
    std::size_t offset;  // 1-based byte position of the first character
};

class QueryLexer {
public:
    explicit QueryLexer(std::string_view text) : text_(text) {}

    QueryToken next() {
        while (pos_ < text_.size() && isSpace(text_[pos_])) ++pos_;
        const std::size_t at = pos_ + 1;
        if (pos_ >= text_.size()) return {QueryToken::End, "", at};
        const char c = text_[pos_];
        switch (c) {
            case '=': ++pos_; return {QueryToken::Equals, "=", at};
            case '(': ++pos_; return {QueryToken::LParen, "(", at};
            case ')': ++pos_; return {QueryToken::RParen, ")", at};
            case '[': ++pos_; return {QueryToken::LBracket, "[", at};
            case ']': ++pos_; return {QueryToken::RBracket, "]", at};
            case ':': ++pos_; return {QueryToken::Colon, ":", at};
            case '"': return quoted(at);
            default: break;
        }
        if (isValidIdToken(std::string_view(&c, 1))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && isValidIdToken(std::string_view(&text_[pos_], 1)))
                ++pos_;
            return {QueryToken::Ident, std::string(text_.substr(start, pos_ - start)), at};
        }
        throw kos::ParseError("unexpected character '" + std::string(1, c) + "'", at);
    }

private:
    static bool isSpace(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r';
    }

    QueryToken quoted(std::size_t at) {
        std::string out;
        ++pos_; // opening quote
        while (pos_ < text_.size()) {
            char c = text_[pos_++];
            if (c == '"') return {QueryToken::Quoted, out, at};
            if (c == '\\' && pos_ < text_.size()) {
                char esc = text_[pos_++];
                if (esc != '"' && esc != '\\')
                    throw kos::ParseError("unsupported escape '\\" + std::string(1, esc) + "'",
                                          pos_ - 1);
                out.push_back(esc);
                continue;
            }
            out.push_back(c);
        }
        throw kos::ParseError("unterminated quoted label", at);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

/// Recursive-descent parser over the token stream. Keywords are the
/// upper-case identifiers OR, AND, ANDNOT, WITH; precedence is OR lowest,
/// then AND, then ANDNOT, all left associative.
class QueryParser {
public:
    explicit QueryParser(std::string_view text) : lexer_(text) { advance(); }

    QueryPtr parse() {
        QueryPtr q = parseOr();
        if (current_.kind != QueryToken::End)
            throw kos::ParseError("expected end of query, found '" + describe(current_) + "'",
                                  current_.offset);
        return q;
    }

private:
    static bool isKeyword(const QueryToken& t, std::string_view kw) {
        return t.kind == QueryToken::Ident && t.text == kw;
    }

    static std::string describe(const QueryToken& t) {
        return t.kind == QueryToken::End ? "end of input" : t.text;
    }

    void advance() { current_ = lexer_.next(); }

    QueryPtr parseOr() {
        QueryPtr node = parseAnd();
        while (isKeyword(current_, "OR")) {
            advance();
            node = makeBool(QueryKind::Or, std::move(node), parseAnd());
        }
        return node;
    }

    QueryPtr parseAnd() {
        QueryPtr node = parseDiff();
        while (isKeyword(current_, "AND")) {
            advance();
            node = makeBool(QueryKind::And, std::move(node), parseDiff());
        }
        return node;
    }

    QueryPtr parseDiff() {
        QueryPtr node = parsePrimary();
        while (isKeyword(current_, "ANDNOT")) {
            advance();
            node = makeBool(QueryKind::AndNot, std::move(node), parsePrimary());
        }
        return node;
    }

    QueryPtr parsePrimary() {
        if (current_.kind == QueryToken::LParen) {
            advance();
            QueryPtr inner = parseOr();
            expect(QueryToken::RParen, "')'");
            return inner;
        }
        TermRef base = parseTermRef();
        if (!isKeyword(current_, "WITH")) {
            auto node = std::make_unique<QueryNode>();
            node->kind = QueryKind::Term;
            node->term = std::move(base);
            return node;
        }
        advance();
        expect(QueryToken::LBracket, "'['");
        if (current_.kind != QueryToken::Ident)
            throw kos::ParseError("expected relation type token", current_.offset);
        auto rel = relationFromToken(current_.text);
        if (!rel)
            throw kos::ParseError("unknown relation type '" + current_.text + "'",
                                  current_.offset);
        advance();
        expect(QueryToken::Colon, "':'");
        TermRef target = parseTermRef();
        expect(QueryToken::RBracket, "']'");
        auto node = std::make_unique<QueryNode>();
        node->kind = QueryKind::With;
        node->term = std::move(base);
        node->rel = *rel;
        node->target = std::move(target);
        return node;
    }

    TermRef parseTermRef() {
        TermRef ref;
        if (current_.kind == QueryToken::Equals) {
            ref.exact = true;
            advance();
        }
        if (current_.kind == QueryToken::Ident) {
            if (current_.text == "AND" || current_.text == "OR" ||
                current_.text == "ANDNOT" || current_.text == "WITH")
                throw kos::ParseError("expected concept reference, found keyword '" +
                                          current_.text + "'",
                                      current_.offset);
            ref.ref = current_.text;
            advance();
            return ref;
        }
        if (current_.kind == QueryToken::Quoted) {
            ref.ref = "\"" + current_.text + "\"";
            advance();
            return ref;
        }
        throw kos::ParseError("expected concept reference, found '" + describe(current_) + "'",
                              current_.offset);
    }

    void expect(QueryToken::Kind kind, const std::string& what) {
        if (current_.kind != kind)
            throw kos::ParseError("expected " + what + ", found '" + describe(current_) + "'",
                                  current_.offset);
        advance();
    }

    static QueryPtr makeBool(QueryKind kind, QueryPtr left, QueryPtr right) {
        auto node = std::make_unique<QueryNode>();
        node->kind = kind;
        node->left = std::move(left);
        node->right = std::move(right);
        return node;
    }

    QueryLexer lexer_;
    QueryToken current_{};
};

} // namespace detail

inline QueryPtr parseQuery(std::string_view text) {
    return detail::QueryParser(text).parse();
}

/// Matching documents in deterministic order plus the index terms that put
/// them there.
struct ResultSet {
    std::vector<DocId> docs;
    ConceptSet matchedTerms;

    bool operator==(const ResultSet&) const = default;
};

namespace detail {

/// Concept set selected by one leaf.
inline ConceptSet leafSelection(const KnowledgeBase& kb, const QueryNode& node) {
    if (node.kind == QueryKind::Term) {
        ConceptId c = resolveRef(kb, node.term.ref);
        if (node.term.exact) return ConceptSet{c};
        return descendants(kb, c, KindSet::Both, true);
    }
    // With: constrain the descendants of the base concept.
    ConceptId under = resolveRef(kb, node.term.ref);
    ConceptId target = resolveRef(kb, node.target.ref);
    requireQueryableRelation(node.rel);
    if (node.term.exact) return {}; // `under` itself is never selected
    if (!node.target.exact) return selectConstrained(kb, under, node.rel, target);
    // Exact target: no downward widening of the constraint side.
    ConceptSet out;
    for (const ConceptId& x : hierReach(kb, under, KindSet::Both, false, false))
        if (relatedVia(kb, x, node.rel, false).count(target)) out.insert(x);
    return out;
}

inline std::set<DocId> docsForSelection(const Corpus& corpus, const ConceptSet& selection) {
    std::set<DocId> out;
    for (const ConceptId& c : selection) {
        const std::set<DocId>& docs = corpus.docsWithTerm(c);
        out.insert(docs.begin(), docs.end());
    }
    return out;
}

inline std::set<DocId> evalDocs(const KnowledgeBase& kb, const Corpus& corpus,
                                const QueryNode& node,
                                std::vector<const QueryNode*>& leaves) {
    switch (node.kind) {
        case QueryKind::Term:
        case QueryKind::With:
            leaves.push_back(&node);
            return docsForSelection(corpus, leafSelection(kb, node));
        default: break;
    }
    std::set<DocId> left = evalDocs(kb, corpus, *node.left, leaves);
    std::set<DocId> right = evalDocs(kb, corpus, *node.right, leaves);
    std::set<DocId> out;
    switch (node.kind) {
        case QueryKind::And:
            std::set_intersection(left.begin(), left.end(), right.begin(), right.end(),
                                  std::inserter(out, out.begin()));
            break;
        case QueryKind::Or:
            std::set_union(left.begin(), left.end(), right.begin(), right.end(),
                           std::inserter(out, out.begin()));
            break;
        case QueryKind::AndNot:
            std::set_difference(left.begin(), left.end(), right.begin(), right.end(),
                                std::inserter(out, out.begin()));
            break;
        default: break;
    }
    return out;
}

} // namespace detail

/// Boolean evaluation over the corpus. A plain term matches every document
/// indexed at or below the concept; `=` disables the expansion; a WITH leaf
/// matches documents indexed with the constrained selection — the base
/// concept itself and the constraint concept are never consulted as index
/// terms. Every corpus term must resolve against the kb.
inline ResultSet evalQuery(const KnowledgeBase& kb, const Corpus& corpus,
                           const QueryNode& ast) {
    detail::requireValid(kb);
    for (const auto& [term, docs] : corpus.index())
        if (!kb.hasConcept(term))
            throw NotFoundError("corpus term '" + term.str() +
                                "' is not declared in the knowledge base");

    std::vector<const QueryNode*> leaves;
    std::set<DocId> docs = detail::evalDocs(kb, corpus, ast, leaves);

    ResultSet result;
    result.docs.assign(docs.begin(), docs.end());
    for (const QueryNode* leaf : leaves) {
        for (const ConceptId& c : detail::leafSelection(kb, *leaf)) {
            const std::set<DocId>& withTerm = corpus.docsWithTerm(c);
            const bool contributes = std::any_of(withTerm.begin(), withTerm.end(),
                                                 [&docs](const DocId& d) {
                                                     return docs.count(d) != 0;
                                                 });
            if (contributes) result.matchedTerms.insert(c);
        }
    }
    return result;
}

inline ResultSet evalQuery(const KnowledgeBase& kb, const Corpus& corpus,
                           std::string_view queryText) {
    return evalQuery(kb, corpus, *parseQuery(queryText));
}

} // namespace kos
