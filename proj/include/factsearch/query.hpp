#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "factsearch/docset.hpp"
#include "factsearch/index.hpp"
#include "factsearch/model.hpp"

namespace factsearch {

struct Filter;
struct Clause;

struct TermFilter {
    std::string query;
};
struct ExactFilter {
    std::string phrase;
};
struct InRangeFilter {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};
struct NotFilter {
    std::shared_ptr<const Filter> inner;
};
struct AndFilter {
    std::vector<Filter> filters;
};
struct OrFilter {
    std::vector<Filter> filters;
};
struct InResultFilter {
    FieldName extract_field = FieldName::Id;
    std::vector<Clause> sub_query;
};

/// Filter := Term | Exact | InRange | Not | And | Or | InResult
struct Filter {
    using Node = std::variant<TermFilter, ExactFilter, InRangeFilter, NotFilter, AndFilter, OrFilter,
                              InResultFilter>;
    Node node;

    static Filter term(std::string query);
    static Filter exact(std::string phrase);
    static Filter in_range(std::int64_t lo, std::int64_t hi);
    static Filter negate(Filter inner);
    static Filter all_of(std::vector<Filter> filters);
    static Filter any_of(std::vector<Filter> filters);
    static Filter in_result(FieldName extract_field, std::vector<Clause> sub_query);
};

struct Clause {
    FieldName field = FieldName::SourceCode;
    Filter filter;
};

/// The result is the intersection of all clauses.
struct FieldQuery {
    std::vector<Clause> clauses;
};

struct QueryOptions {
    std::uint32_t slop = 2;
    std::size_t max_expansion = 1000;
};

struct ScoredResult {
    DocOrdinal block = 0;
    double score = 0.0;
    std::vector<DocOrdinal> matched_entities;

    bool operator==(const ScoredResult&) const = default;
};

struct ResultPage {
    std::size_t total = 0;
    std::size_t offset = 0;
    std::size_t limit = 0;
    std::vector<ScoredResult> results;
    std::map<FieldName, FacetResult> facets;
};

inline constexpr std::size_t kMaxPageLimit = 1000;
inline constexpr std::size_t kDefaultFacetValues = 100;

/// Evaluates filter queries against a sealed index. Holds no mutable state,
/// so one Searcher may serve concurrent callers.
class Searcher {
public:
    explicit Searcher(const Index& index, QueryOptions options = {}) : index_(index), options_(options) {}

    const Index& index() const { return index_; }
    const QueryOptions& options() const { return options_; }

    /// Matching docs of the field's doc class (blocks or entities).
    DocSet eval_filter(FieldName field, const Filter& filter) const;

    /// Matching blocks, ascending ordinal, with their scores.
    std::vector<ScoredResult> eval_query(const FieldQuery& query) const;

    double score_result(const FieldQuery& query, DocOrdinal block) const;

    ResultPage run(const FieldQuery& query, const std::vector<FieldName>& facet_fields,
                   std::size_t offset, std::size_t limit,
                   std::size_t facet_values = kDefaultFacetValues) const;

private:
    const Index& index_;
    QueryOptions options_;
};

/// Throws IncompatibleFieldFilter / InvalidFilter / InvalidRange for
/// filters that cannot be evaluated on `field`.
void check_filter(FieldName field, const Filter& filter);

}  // namespace factsearch
