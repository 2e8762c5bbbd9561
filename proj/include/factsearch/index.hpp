#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "factsearch/analysis.hpp"
#include "factsearch/docset.hpp"
#include "factsearch/model.hpp"

namespace factsearch {

/// Kernels that come in two flavours: a straightforward single-threaded
/// reference and an OpenMP version. Both must produce identical output.
enum class Execution { Serial, Parallel };

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Postings of one field: a sorted term dictionary over CSR-packed
/// (doc, positions) lists.
struct FieldPostings {
    std::vector<std::string> terms;         // sorted, unique
    std::vector<std::uint64_t> term_start;  // terms.size() + 1 offsets into docs
    std::vector<DocOrdinal> docs;
    std::vector<std::uint64_t> pos_start;   // docs.size() + 1 offsets into positions
    std::vector<std::uint32_t> positions;

    std::size_t term_count() const { return terms.size(); }
    std::optional<std::size_t> find(std::string_view term) const;

    bool operator==(const FieldPostings&) const = default;
};

/// View over the posting list of one term.
class PostingList {
public:
    PostingList() = default;
    PostingList(const FieldPostings* field, std::size_t first, std::size_t last)
        : field_(field), first_(first), last_(last) {}

    std::size_t size() const { return last_ - first_; }
    bool empty() const { return first_ == last_; }
    DocOrdinal doc(std::size_t i) const { return field_->docs[first_ + i]; }
    std::span<const std::uint32_t> positions(std::size_t i) const;
    std::span<const DocOrdinal> docs() const;
    /// Positions of `doc`, empty when the doc is not in the list.
    std::span<const std::uint32_t> positions_of(DocOrdinal doc) const;

    DocSet doc_set() const;

private:
    const FieldPostings* field_ = nullptr;
    std::size_t first_ = 0;
    std::size_t last_ = 0;
};

struct NumericColumn {
    std::vector<std::pair<std::int64_t, DocOrdinal>> entries;  // sorted by (value, doc)

    bool operator==(const NumericColumn&) const = default;
};

/// Verbatim per-document values backing facet counts.
struct FacetColumn {
    static constexpr std::uint32_t kNoValue = 0xFFFFFFFFu;

    std::vector<std::string> values;      // sorted, unique
    std::vector<std::uint32_t> value_of;  // per doc ordinal
};

struct FacetValue {
    std::string value;
    std::uint64_t count = 0;

    bool operator==(const FacetValue&) const = default;
};

struct FacetResult {
    std::vector<FacetValue> values;  // count desc, then value asc
    bool truncated = false;

    bool operator==(const FacetResult&) const = default;
};

/// Block/entity relation. Entities of a block occupy the ordinals directly
/// after it, so each block's children form a contiguous range.
struct JoinMap {
    std::vector<DocOrdinal> parent;       // per ordinal; blocks map to themselves
    std::vector<DocOrdinal> child_begin;  // per ordinal; meaningful for blocks
    std::vector<DocOrdinal> child_end;

    bool operator==(const JoinMap&) const = default;
};

struct DocRef {
    DocClass cls = DocClass::Block;
    std::uint32_t block = 0;   // index into the block store
    std::uint32_t entity = 0;  // index into that block's entities

    bool operator==(const DocRef&) const = default;
};

namespace detail {

struct IndexData {
    AnalyzerConfig analyzer;
    std::vector<Block> blocks;
    std::vector<DocRef> docs;
    std::array<FieldPostings, kFieldCount> postings;  // numeric slots unused
    NumericColumn start_line;
    JoinMap join;
};

}  // namespace detail

/// Sealed search structure. Immutable once constructed; share it freely
/// between threads.
class Index {
public:
    explicit Index(detail::IndexData data);

    Index(Index&&) noexcept = default;
    Index& operator=(Index&&) noexcept = default;
    Index(const Index&) = delete;
    Index& operator=(const Index&) = delete;

    const AnalyzerConfig& analyzer() const { return data_.analyzer; }

    std::size_t doc_count() const { return data_.docs.size(); }
    std::size_t block_count() const { return data_.blocks.size(); }
    std::size_t entity_count() const { return doc_count() - block_count(); }

    DocClass doc_class(DocOrdinal doc) const { return data_.docs[doc].cls; }
    const Block& block(DocOrdinal doc) const;
    const TheoryEntity& entity(DocOrdinal doc) const;
    const std::vector<Block>& blocks() const { return data_.blocks; }

    std::optional<DocOrdinal> find_block(std::string_view id) const;
    std::optional<DocOrdinal> find_entity(std::string_view child_id) const;

    DocOrdinal parent(DocOrdinal entity) const { return data_.join.parent[entity]; }
    DocSet children(DocOrdinal block) const;
    const JoinMap& join() const { return data_.join; }

    /// Every block, or every entity.
    const DocSet& universe(DocClass cls) const;
    /// Docs with at least one indexed term in `field`.
    const DocSet& docs_with_terms(FieldName field) const;

    /// Posting list of `term`, normalized like indexed values of `field`.
    PostingList postings(FieldName field, std::string_view term) const;
    /// Posting list of an already-analyzed term.
    PostingList postings_exact(FieldName field, std::string_view analyzed_term) const;
    /// Indexed terms of `field` matching a `*` pattern.
    std::vector<std::string_view> expand_wildcard(FieldName field, std::string_view pattern) const;
    const FieldPostings& field_postings(FieldName field) const { return data_.postings[field_index(field)]; }

    DocSet numeric_range(FieldName field, std::int64_t lo, std::int64_t hi) const;
    std::optional<std::int64_t> numeric_value(FieldName field, DocOrdinal doc) const;

    FacetResult facet_counts(FieldName field, const DocSet& over, std::size_t max_values,
                             Execution mode = Execution::Parallel) const;

    void save(const std::filesystem::path& dir) const;
    static Index load(const std::filesystem::path& dir);

    const detail::IndexData& data() const { return data_; }

private:
    const FacetColumn& facet_column(FieldName field) const;

    detail::IndexData data_;
    std::unordered_map<std::string, DocOrdinal> block_ids_;
    std::unordered_map<std::string, DocOrdinal> child_ids_;
    std::array<DocSet, 2> universe_;
    std::array<DocSet, kFieldCount> docs_with_terms_;
    std::array<FacetColumn, kFieldCount> facets_;
};

/// Accumulates blocks, then seals them into an Index.
class IndexBuilder {
public:
    explicit IndexBuilder(AnalyzerConfig config = AnalyzerConfig());

    /// Throws DuplicateId on block/child id reuse.
    void add(Block block);
    std::size_t size() const { return blocks_.size(); }

    Index finish(Execution mode = Execution::Parallel) &&;

private:
    AnalyzerConfig config_;
    std::vector<Block> blocks_;
    std::unordered_map<std::string, char> ids_;  // 'b' block, 'e' entity
};

Index build_index(std::span<const Block> blocks, const AnalyzerConfig& config = AnalyzerConfig(),
                  Execution mode = Execution::Parallel);

/// Posting construction for one field over the ordinal-ordered doc store.
FieldPostings build_field_postings(const AnalyzerConfig& config, FieldName field,
                                   std::span<const Block> blocks, std::span<const DocRef> docs,
                                   Execution mode);

}  // namespace factsearch
