#include "factsearch/model.hpp"

#include "factsearch/error.hpp"

namespace factsearch {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NumericFieldNotAnalyzable: return "NumericFieldNotAnalyzable";
    case ErrorCode::OverlappingGroups: return "OverlappingGroups";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NotNumeric: return "NotNumeric";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::NotFacetable: return "NotFacetable";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptSegment: return "CorruptSegment";
    case ErrorCode::IncompatibleFieldFilter: return "IncompatibleFieldFilter";
    case ErrorCode::InvalidFilter: return "InvalidFilter";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::ExpansionOverflow: return "ExpansionOverflow";
    case ErrorCode::LimitOutOfRange: return "LimitOutOfRange";
    case ErrorCode::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

namespace {

constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "Id",        "ChildId", "Command", "SourceCode", "SourceTheory",
    "SourceTheoryFacet", "StartLine", "Kind", "Name", "NameFacet",
    "ConstantType", "ConstantTypeFacet", "Uses",
};

}  // namespace

std::string_view to_string(FieldName field) { return kFieldNames[field_index(field)]; }

std::optional<FieldName> parse_field_name(std::string_view name) {
    for (FieldName f : kAllFields) {
        if (kFieldNames[field_index(f)] == name) return f;
    }
    return std::nullopt;
}

std::string_view to_string(FieldClass cls) {
    switch (cls) {
    case FieldClass::Text: return "text";
    case FieldClass::Facet: return "facet";
    case FieldClass::Numeric: return "numeric";
    case FieldClass::Identifier: return "identifier";
    }
    return "unknown";
}

FieldClass field_class(FieldName field) {
    switch (field) {
    case FieldName::Command:
    case FieldName::SourceCode:
    case FieldName::SourceTheory:
    case FieldName::Name:
    case FieldName::ConstantType:
        return FieldClass::Text;
    case FieldName::SourceTheoryFacet:
    case FieldName::NameFacet:
    case FieldName::ConstantTypeFacet:
    case FieldName::Kind:
        return FieldClass::Facet;
    case FieldName::StartLine:
        return FieldClass::Numeric;
    case FieldName::Id:
    case FieldName::ChildId:
    case FieldName::Uses:
        return FieldClass::Identifier;
    }
    return FieldClass::Identifier;
}

DocClass doc_class(FieldName field) {
    switch (field) {
    case FieldName::Id:
    case FieldName::Command:
    case FieldName::SourceCode:
    case FieldName::SourceTheory:
    case FieldName::SourceTheoryFacet:
    case FieldName::StartLine:
        return DocClass::Block;
    default:
        return DocClass::Entity;
    }
}

std::optional<FieldName> facet_companion(FieldName field) {
    switch (field) {
    case FieldName::SourceTheory: return FieldName::SourceTheoryFacet;
    case FieldName::Name: return FieldName::NameFacet;
    case FieldName::ConstantType: return FieldName::ConstantTypeFacet;
    case FieldName::Kind:
    case FieldName::Command:
    case FieldName::SourceTheoryFacet:
    case FieldName::NameFacet:
    case FieldName::ConstantTypeFacet:
        return field;
    default:
        return std::nullopt;
    }
}

std::string_view to_string(EntityKind kind) {
    switch (kind) {
    case EntityKind::Constant: return "Constant";
    case EntityKind::Fact: return "Fact";
    case EntityKind::Type: return "Type";
    }
    return "Fact";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
    if (name == "Constant") return EntityKind::Constant;
    if (name == "Fact") return EntityKind::Fact;
    if (name == "Type") return EntityKind::Type;
    return std::nullopt;
}

std::vector<std::string_view> field_values(const Block& block, FieldName field) {
    switch (field) {
    case FieldName::Id: return {block.id};
    case FieldName::Command: return {block.command};
    case FieldName::SourceCode: return {block.source_code};
    case FieldName::SourceTheory:
    case FieldName::SourceTheoryFacet:
        return {block.source_theory};
    default:
        return {};
    }
}

std::vector<std::string_view> field_values(const TheoryEntity& entity, FieldName field) {
    switch (field) {
    case FieldName::ChildId: return {entity.child_id};
    case FieldName::Kind: return {to_string(entity.kind)};
    case FieldName::Name:
    case FieldName::NameFacet:
        return {entity.name};
    case FieldName::ConstantType:
    case FieldName::ConstantTypeFacet:
        if (entity.constant_type) return {*entity.constant_type};
        return {};
    case FieldName::Uses:
        return {entity.uses.begin(), entity.uses.end()};
    default:
        return {};
    }
}

}  // namespace factsearch
