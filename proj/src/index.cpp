#include <algorithm>

#include <omp.h>

#include "factsearch/error.hpp"
#include "factsearch/index.hpp"

namespace factsearch {

std::optional<std::size_t> FieldPostings::find(std::string_view term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == terms.end() || *it != term) return std::nullopt;
    return static_cast<std::size_t>(it - terms.begin());
}

std::span<const std::uint32_t> PostingList::positions(std::size_t i) const {
    const auto b = field_->pos_start[first_ + i];
    const auto e = field_->pos_start[first_ + i + 1];
    return std::span<const std::uint32_t>(field_->positions).subspan(b, e - b);
}

std::span<const DocOrdinal> PostingList::docs() const {
    if (!field_) return {};
    return std::span<const DocOrdinal>(field_->docs).subspan(first_, size());
}

std::span<const std::uint32_t> PostingList::positions_of(DocOrdinal doc) const {
    auto d = docs();
    auto it = std::lower_bound(d.begin(), d.end(), doc);
    if (it == d.end() || *it != doc) return {};
    return positions(static_cast<std::size_t>(it - d.begin()));
}

DocSet PostingList::doc_set() const {
    auto d = docs();
    return DocSet::from_sorted({d.begin(), d.end()});
}

Index::Index(detail::IndexData data) : data_(std::move(data)) {
    const auto n = static_cast<DocOrdinal>(data_.docs.size());
    std::vector<DocOrdinal> blocks, entities;
    blocks.reserve(data_.blocks.size());
    entities.reserve(n - data_.blocks.size());
    block_ids_.reserve(data_.blocks.size());
    child_ids_.reserve(n - data_.blocks.size());
    for (DocOrdinal d = 0; d < n; ++d) {
        if (doc_class(d) == DocClass::Block) {
            blocks.push_back(d);
            block_ids_.emplace(block(d).id, d);
        } else {
            entities.push_back(d);
            child_ids_.emplace(entity(d).child_id, d);
        }
    }
    universe_[0] = DocSet::from_sorted(std::move(blocks));
    universe_[1] = DocSet::from_sorted(std::move(entities));

    for (FieldName f : kAllFields) {
        const FieldPostings& p = data_.postings[field_index(f)];
        docs_with_terms_[field_index(f)] = DocSet::from_unsorted(p.docs);
    }

    // Facet columns hold verbatim values; derived from the doc store so they
    // never need to be persisted.
    for (FieldName f : kAllFields) {
        if (facet_companion(f) != f) continue;
        FacetColumn& col = facets_[field_index(f)];
        col.value_of.assign(n, FacetColumn::kNoValue);
        std::vector<std::pair<std::string_view, DocOrdinal>> pairs;
        for (DocOrdinal d = 0; d < n; ++d) {
            const DocRef& r = data_.docs[d];
            const Block& b = data_.blocks[r.block];
            auto values = r.cls == DocClass::Block ? field_values(b, f) : field_values(b.entities[r.entity], f);
            if (!values.empty()) pairs.push_back({values.front(), d});
        }
        std::sort(pairs.begin(), pairs.end());
        for (const auto& [value, doc] : pairs) {
            if (col.values.empty() || col.values.back() != value) col.values.emplace_back(value);
            col.value_of[doc] = static_cast<std::uint32_t>(col.values.size() - 1);
        }
    }
}

const Block& Index::block(DocOrdinal doc) const {
    const DocRef& r = data_.docs.at(doc);
    return data_.blocks[r.block];
}

const TheoryEntity& Index::entity(DocOrdinal doc) const {
    const DocRef& r = data_.docs.at(doc);
    return data_.blocks[r.block].entities.at(r.entity);
}

std::optional<DocOrdinal> Index::find_block(std::string_view id) const {
    auto it = block_ids_.find(std::string(id));
    if (it == block_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<DocOrdinal> Index::find_entity(std::string_view child_id) const {
    auto it = child_ids_.find(std::string(child_id));
    if (it == child_ids_.end()) return std::nullopt;
    return it->second;
}

DocSet Index::children(DocOrdinal block) const {
    return DocSet::range(data_.join.child_begin[block], data_.join.child_end[block]);
}

const DocSet& Index::universe(DocClass cls) const {
    return universe_[cls == DocClass::Block ? 0 : 1];
}

const DocSet& Index::docs_with_terms(FieldName field) const {
    return docs_with_terms_[field_index(field)];
}

PostingList Index::postings_exact(FieldName field, std::string_view analyzed_term) const {
    const FieldPostings& p = field_postings(field);
    auto t = p.find(analyzed_term);
    if (!t) return {};
    return PostingList(&p, p.term_start[*t], p.term_start[*t + 1]);
}

PostingList Index::postings(FieldName field, std::string_view term) const {
    if (field_class(field) == FieldClass::Numeric) return {};
    auto tokens = analyze(analyzer(), field, term);
    if (tokens.size() != 1) return {};
    return postings_exact(field, tokens.front().term);
}

std::vector<std::string_view> Index::expand_wildcard(FieldName field, std::string_view pattern) const {
    const auto& terms = field_postings(field).terms;
    const std::string_view prefix = pattern.substr(0, pattern.find('*'));
    auto it = std::lower_bound(terms.begin(), terms.end(), prefix,
                               [](const std::string& a, std::string_view b) { return a < b; });
    std::vector<std::string_view> out;
    for (; it != terms.end() && std::string_view(*it).starts_with(prefix); ++it) {
        if (glob_match(pattern, *it)) out.push_back(*it);
    }
    return out;
}

DocSet Index::numeric_range(FieldName field, std::int64_t lo, std::int64_t hi) const {
    if (field_class(field) != FieldClass::Numeric) {
        throw Error(ErrorCode::NotNumeric, "field " + std::string(to_string(field)) + " is not numeric");
    }
    if (lo > hi) {
        throw Error(ErrorCode::EmptyRange,
                    "empty range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    const auto& e = data_.start_line.entries;
    auto first = std::lower_bound(e.begin(), e.end(), std::pair{lo, DocOrdinal{0}});
    std::vector<DocOrdinal> docs;
    for (auto it = first; it != e.end() && it->first <= hi; ++it) docs.push_back(it->second);
    return DocSet::from_unsorted(std::move(docs));
}

std::optional<std::int64_t> Index::numeric_value(FieldName field, DocOrdinal doc) const {
    if (field != FieldName::StartLine || doc_class(doc) != DocClass::Block) return std::nullopt;
    return block(doc).start_line;
}

const FacetColumn& Index::facet_column(FieldName field) const {
    auto companion = facet_companion(field);
    if (!companion) {
        throw Error(ErrorCode::NotFacetable, "field " + std::string(to_string(field)) + " has no facet");
    }
    return facets_[field_index(*companion)];
}

FacetResult Index::facet_counts(FieldName field, const DocSet& over, std::size_t max_values,
                                Execution mode) const {
    const FacetColumn& col = facet_column(field);
    const std::size_t value_count = col.values.size();
    std::vector<std::uint64_t> counts(value_count, 0);
    const auto& docs = over.ordinals();
    const std::size_t n = docs.size();

    if (mode == Execution::Serial || n < 16384) {
        for (DocOrdinal d : docs) {
            const std::uint32_t v = col.value_of[d];
            if (v != FacetColumn::kNoValue) ++counts[v];
        }
    } else {
#pragma omp parallel
        {
            std::vector<std::uint64_t> local(value_count, 0);
#pragma omp for schedule(static) nowait
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint32_t v = col.value_of[docs[i]];
                if (v != FacetColumn::kNoValue) ++local[v];
            }
#pragma omp critical(facet_merge)
            for (std::size_t v = 0; v < value_count; ++v) counts[v] += local[v];
        }
    }

    FacetResult out;
    for (std::size_t v = 0; v < value_count; ++v) {
        if (counts[v]) out.values.push_back({col.values[v], counts[v]});
    }
    std::sort(out.values.begin(), out.values.end(), [](const FacetValue& a, const FacetValue& b) {
        return a.count != b.count ? a.count > b.count : a.value < b.value;
    });
    if (out.values.size() > max_values) {
        out.values.resize(max_values);
        out.truncated = true;
    }
    return out;
}

}  // namespace factsearch
