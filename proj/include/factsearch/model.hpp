#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factsearch {

// Queryable fields. Wire names equal the enumerator names.
enum class FieldName : std::uint8_t {
    Id,
    ChildId,
    Command,
    SourceCode,
    SourceTheory,
    SourceTheoryFacet,
    StartLine,
    Kind,
    Name,
    NameFacet,
    ConstantType,
    ConstantTypeFacet,
    Uses,
};

inline constexpr std::size_t kFieldCount = 13;

inline constexpr std::array<FieldName, kFieldCount> kAllFields = {
    FieldName::Id,        FieldName::ChildId,           FieldName::Command,
    FieldName::SourceCode, FieldName::SourceTheory,     FieldName::SourceTheoryFacet,
    FieldName::StartLine, FieldName::Kind,              FieldName::Name,
    FieldName::NameFacet, FieldName::ConstantType,      FieldName::ConstantTypeFacet,
    FieldName::Uses,
};

enum class FieldClass { Text, Facet, Numeric, Identifier };

// Which document type carries a field.
enum class DocClass : std::uint8_t { Block, Entity };

std::string_view to_string(FieldName field);
std::optional<FieldName> parse_field_name(std::string_view name);

std::string_view to_string(FieldClass cls);

FieldClass field_class(FieldName field);
DocClass doc_class(FieldName field);

/// Field whose verbatim values back facet counts for `field`, if any.
/// Facet-class fields and Command are their own companions.
std::optional<FieldName> facet_companion(FieldName field);

inline std::size_t field_index(FieldName field) { return static_cast<std::size_t>(field); }

enum class EntityKind : std::uint8_t { Constant, Fact, Type };

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view name);

struct TheoryEntity {
    std::string child_id;
    std::string parent_id;
    EntityKind kind = EntityKind::Fact;
    std::string name;
    std::optional<std::string> constant_type;  // Constant only
    std::vector<std::string> uses;

    bool operator==(const TheoryEntity&) const = default;
};

/// One command span of theory source and the entities it defines.
struct Block {
    std::string id;
    std::string source_theory;
    std::int64_t start_line = 1;
    std::string command;
    std::string source_code;
    std::vector<TheoryEntity> entities;

    bool operator==(const Block&) const = default;
};

/// Verbatim stored values of a block-class field (empty for entity fields).
std::vector<std::string_view> field_values(const Block& block, FieldName field);
/// Verbatim stored values of an entity-class field (empty for block fields).
std::vector<std::string_view> field_values(const TheoryEntity& entity, FieldName field);

}  // namespace factsearch
