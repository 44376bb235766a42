#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

namespace kos {

/// Closed inventory of typed relations. Exactly 13 members: one equivalence
/// relation, two hierarchical kinds, the two chronological directions, and
/// eight associative types.
enum class RelationType {
    Synonym,
    HierGeneric,
    HierPartitive,
    EarlierLater,
    LaterEarlier,
    UnspecificAssociation,
    RawMaterialProduct,
    Causality,
    PersonActorAction,
    InstitutionActorAction,
    PersonActorProduct,
    InstitutionActorProduct,
    ActionProduct,
};

inline constexpr std::size_t kRelationTypeCount = 13;

inline constexpr std::array<RelationType, kRelationTypeCount> kAllRelationTypes = {
    RelationType::Synonym,
    RelationType::HierGeneric,
    RelationType::HierPartitive,
    RelationType::EarlierLater,
    RelationType::LaterEarlier,
    RelationType::UnspecificAssociation,
    RelationType::RawMaterialProduct,
    RelationType::Causality,
    RelationType::PersonActorAction,
    RelationType::InstitutionActorAction,
    RelationType::PersonActorProduct,
    RelationType::InstitutionActorProduct,
    RelationType::ActionProduct,
};

constexpr std::string_view relationToken(RelationType r) {
    switch (r) {
        case RelationType::Synonym: return "synonym";
        case RelationType::HierGeneric: return "generic";
        case RelationType::HierPartitive: return "partitive";
        case RelationType::EarlierLater: return "earlier_later";
        case RelationType::LaterEarlier: return "later_earlier";
        case RelationType::UnspecificAssociation: return "assoc";
        case RelationType::RawMaterialProduct: return "raw_material_product";
        case RelationType::Causality: return "causality";
        case RelationType::PersonActorAction: return "person_action";
        case RelationType::InstitutionActorAction: return "institution_action";
        case RelationType::PersonActorProduct: return "person_product";
        case RelationType::InstitutionActorProduct: return "institution_product";
        case RelationType::ActionProduct: return "action_product";
    }
    return "";
}

constexpr std::optional<RelationType> relationFromToken(std::string_view token) {
    for (RelationType r : kAllRelationTypes)
        if (relationToken(r) == token) return r;
    return std::nullopt;
}

constexpr bool isHierarchical(RelationType r) {
    return r == RelationType::HierGeneric || r == RelationType::HierPartitive;
}

constexpr bool isChronological(RelationType r) {
    return r == RelationType::EarlierLater || r == RelationType::LaterEarlier;
}

constexpr bool isAssociative(RelationType r) {
    return !isHierarchical(r) && !isChronological(r) && r != RelationType::Synonym;
}

/// Associative types whose same-type chains compose transitively. All other
/// associative types carry no same-type inference.
constexpr bool isChainable(RelationType r) {
    return r == RelationType::RawMaterialProduct || r == RelationType::Causality;
}

/// Outcome of composing two relations, mirroring the inventory's three-way
/// judgment plus a fourth value for pairs the inventory does not cover.
enum class TransitivityStatus {
    Given,       // "+"
    NotExpected, // "-"
    NotAllowed,  // "O"
    Unspecified, // "?" (pair absent from the inventory tables)
};

constexpr std::string_view statusToken(TransitivityStatus s) {
    switch (s) {
        case TransitivityStatus::Given: return "+";
        case TransitivityStatus::NotExpected: return "-";
        case TransitivityStatus::NotAllowed: return "O";
        case TransitivityStatus::Unspecified: return "?";
    }
    return "?";
}

/// Which row group of the composition inventory an entry comes from.
/// SameType: both operands of one type. StructuralMix: synonym, hierarchy
/// and chronology combined across types. AssociativeCarry: an associative
/// type carried over a hierarchical or chronological step. Default: pair
/// absent from the inventory.
enum class CompositionSource {
    SameType,
    StructuralMix,
    AssociativeCarry,
    Default,
};

struct CompositionEntry {
    RelationType first{};
    RelationType second{};
    TransitivityStatus status = TransitivityStatus::Unspecified;
    std::optional<RelationType> result; // present iff status == Given
    CompositionSource source = CompositionSource::Default;
};

namespace detail {

constexpr std::size_t relIndex(RelationType r) { return static_cast<std::size_t>(r); }

struct CompositionTable {
    std::array<CompositionEntry, kRelationTypeCount * kRelationTypeCount> cells{};
    bool doubleAssignment = false;

    constexpr CompositionEntry& at(RelationType a, RelationType b) {
        return cells[relIndex(a) * kRelationTypeCount + relIndex(b)];
    }
    constexpr const CompositionEntry& at(RelationType a, RelationType b) const {
        return cells[relIndex(a) * kRelationTypeCount + relIndex(b)];
    }
};

constexpr CompositionTable makeCompositionTable() {
    using R = RelationType;
    using S = TransitivityStatus;
    CompositionTable t;

    for (R a : kAllRelationTypes)
        for (R b : kAllRelationTypes)
            t.at(a, b) = CompositionEntry{a, b, S::Unspecified, std::nullopt,
                                          CompositionSource::Default};

    auto set = [&t](R a, R b, S s, std::optional<R> result, CompositionSource src) {
        if (t.at(a, b).source != CompositionSource::Default) t.doubleAssignment = true;
        t.at(a, b) = CompositionEntry{a, b, s, result, src};
    };

    constexpr auto same = CompositionSource::SameType;
    constexpr auto mix = CompositionSource::StructuralMix;
    constexpr auto carry = CompositionSource::AssociativeCarry;

    // Same-type rows (17). Transitive: both hierarchy kinds, both
    // chronological directions, raw material/product and causality chains.
    set(R::Synonym, R::Synonym, S::NotAllowed, std::nullopt, same);
    set(R::HierGeneric, R::HierGeneric, S::Given, R::HierGeneric, same);
    set(R::HierPartitive, R::HierPartitive, S::Given, R::HierPartitive, same);
    set(R::HierGeneric, R::HierPartitive, S::NotExpected, std::nullopt, same);
    set(R::HierPartitive, R::HierGeneric, S::NotExpected, std::nullopt, same);
    set(R::EarlierLater, R::EarlierLater, S::Given, R::EarlierLater, same);
    set(R::LaterEarlier, R::LaterEarlier, S::Given, R::LaterEarlier, same);
    set(R::EarlierLater, R::LaterEarlier, S::NotExpected, std::nullopt, same);
    set(R::LaterEarlier, R::EarlierLater, S::NotExpected, std::nullopt, same);
    set(R::UnspecificAssociation, R::UnspecificAssociation, S::NotExpected, std::nullopt, same);
    set(R::RawMaterialProduct, R::RawMaterialProduct, S::Given, R::RawMaterialProduct, same);
    set(R::Causality, R::Causality, S::Given, R::Causality, same);
    set(R::PersonActorAction, R::PersonActorAction, S::NotExpected, std::nullopt, same);
    set(R::InstitutionActorAction, R::InstitutionActorAction, S::NotExpected, std::nullopt, same);
    set(R::PersonActorProduct, R::PersonActorProduct, S::NotExpected, std::nullopt, same);
    set(R::InstitutionActorProduct, R::InstitutionActorProduct, S::NotExpected, std::nullopt, same);
    set(R::ActionProduct, R::ActionProduct, S::NotExpected, std::nullopt, same);

    // Structural-mix rows (16). Synonym composes forward onto any structural
    // relation and yields it; the mirrored pairs are disallowed for indexing
    // languages. Hierarchy and chronology compose in either order and the
    // chronological type survives.
    set(R::Synonym, R::HierGeneric, S::Given, R::HierGeneric, mix);
    set(R::Synonym, R::HierPartitive, S::Given, R::HierPartitive, mix);
    set(R::HierGeneric, R::Synonym, S::NotAllowed, std::nullopt, mix);
    set(R::HierPartitive, R::Synonym, S::NotAllowed, std::nullopt, mix);
    set(R::Synonym, R::EarlierLater, S::Given, R::EarlierLater, mix);
    set(R::Synonym, R::LaterEarlier, S::Given, R::LaterEarlier, mix);
    set(R::EarlierLater, R::Synonym, S::NotAllowed, std::nullopt, mix);
    set(R::LaterEarlier, R::Synonym, S::NotAllowed, std::nullopt, mix);
    set(R::HierGeneric, R::EarlierLater, S::Given, R::EarlierLater, mix);
    set(R::HierGeneric, R::LaterEarlier, S::Given, R::LaterEarlier, mix);
    set(R::EarlierLater, R::HierGeneric, S::Given, R::EarlierLater, mix);
    set(R::LaterEarlier, R::HierGeneric, S::Given, R::LaterEarlier, mix);
    set(R::HierPartitive, R::EarlierLater, S::Given, R::EarlierLater, mix);
    set(R::HierPartitive, R::LaterEarlier, S::Given, R::LaterEarlier, mix);
    set(R::EarlierLater, R::HierPartitive, S::Given, R::EarlierLater, mix);
    set(R::LaterEarlier, R::HierPartitive, S::Given, R::LaterEarlier, mix);

    // Associative-carry rows (32): every associative type survives a step
    // along either hierarchy kind or either chronological direction.
    constexpr std::array<R, 8> associative = {
        R::UnspecificAssociation, R::RawMaterialProduct, R::Causality,
        R::PersonActorAction,     R::InstitutionActorAction,
        R::PersonActorProduct,    R::InstitutionActorProduct,
        R::ActionProduct,
    };
    for (R a : associative) {
        set(a, R::HierGeneric, S::Given, a, carry);
        set(a, R::HierPartitive, S::Given, a, carry);
        set(a, R::EarlierLater, S::Given, a, carry);
        set(a, R::LaterEarlier, S::Given, a, carry);
    }

    return t;
}

inline constexpr CompositionTable kCompositionTable = makeCompositionTable();

constexpr bool validateCompositionTable(const CompositionTable& t) {
    if (t.doubleAssignment) return false;
    std::size_t sameType = 0, mix = 0, carry = 0, dflt = 0;
    for (const CompositionEntry& e : t.cells) {
        switch (e.source) {
            case CompositionSource::SameType: ++sameType; break;
            case CompositionSource::StructuralMix: ++mix; break;
            case CompositionSource::AssociativeCarry: ++carry; break;
            case CompositionSource::Default: ++dflt; break;
        }
        const bool given = e.status == TransitivityStatus::Given;
        if (given != e.result.has_value()) return false;
        if (e.source == CompositionSource::Default &&
            e.status != TransitivityStatus::Unspecified)
            return false;
    }
    return sameType == 17 && mix == 16 && carry == 32 &&
           dflt == kRelationTypeCount * kRelationTypeCount - 65;
}

static_assert(validateCompositionTable(kCompositionTable),
              "composition table must cover all 169 ordered pairs with 65 inventory rows");

} // namespace detail

/// Total composition lookup: defined for all 169 ordered pairs. Pairs the
/// inventory does not mention come back Unspecified with a Default source.
constexpr const CompositionEntry& compose(RelationType r1, RelationType r2) {
    return detail::kCompositionTable.at(r1, r2);
}

/// Named inverse within the inventory: the chronological directions swap,
/// hierarchical kinds are their own inverse (the traversal direction flips,
/// not the type), and all other types have no named inverse.
constexpr std::optional<RelationType> invert(RelationType r) {
    switch (r) {
        case RelationType::EarlierLater: return RelationType::LaterEarlier;
        case RelationType::LaterEarlier: return RelationType::EarlierLater;
        case RelationType::HierGeneric: return RelationType::HierGeneric;
        case RelationType::HierPartitive: return RelationType::HierPartitive;
        default: return std::nullopt;
    }
}

struct PathResult {
    TransitivityStatus status = TransitivityStatus::Unspecified;
    std::optional<RelationType> result;

    bool operator==(const PathResult&) const = default;
};

/// Left fold of `compose` over a relation sequence. A single-element path is
/// trivially Given with itself as result. The fold stops at the first step
/// that is not Given and reports that step's status; the sequence is never
/// reordered.
inline PathResult pathStatus(std::span<const RelationType> path) {
    if (path.empty()) throw std::invalid_argument("pathStatus: empty path");
    RelationType current = path[0];
    for (std::size_t i = 1; i < path.size(); ++i) {
        const CompositionEntry& e = compose(current, path[i]);
        if (e.status != TransitivityStatus::Given) return {e.status, std::nullopt};
        current = *e.result;
    }
    return {TransitivityStatus::Given, current};
}

inline PathResult pathStatus(std::initializer_list<RelationType> path) {
    return pathStatus(std::span<const RelationType>(path.begin(), path.size()));
}

} // namespace kos
