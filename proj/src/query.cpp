#include "factsearch/query.hpp"

#include <algorithm>
#include <set>

#include "factsearch/error.hpp"

namespace factsearch {

Filter Filter::term(std::string query) { return {TermFilter{std::move(query)}}; }
Filter Filter::exact(std::string phrase) { return {ExactFilter{std::move(phrase)}}; }
Filter Filter::in_range(std::int64_t lo, std::int64_t hi) { return {InRangeFilter{lo, hi}}; }
Filter Filter::negate(Filter inner) {
    return {NotFilter{std::make_shared<const Filter>(std::move(inner))}};
}
Filter Filter::all_of(std::vector<Filter> filters) { return {AndFilter{std::move(filters)}}; }
Filter Filter::any_of(std::vector<Filter> filters) { return {OrFilter{std::move(filters)}}; }
Filter Filter::in_result(FieldName extract_field, std::vector<Clause> sub_query) {
    return {InResultFilter{extract_field, std::move(sub_query)}};
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void incompatible(FieldName field, std::string_view what) {
    throw Error(ErrorCode::IncompatibleFieldFilter,
                std::string(what) + " filter cannot be applied to " + std::string(to_string(field)) + " (" +
                    std::string(to_string(field_class(field))) + " field)");
}

}  // namespace

void check_filter(FieldName field, const Filter& filter) {
    const bool numeric = field_class(field) == FieldClass::Numeric;
    std::visit(Overloaded{
                   [&](const TermFilter&) {
                       if (numeric) incompatible(field, "Term");
                   },
                   [&](const ExactFilter& f) {
                       if (numeric) incompatible(field, "Exact");
                       if (has_wildcard(f.phrase)) {
                           throw Error(ErrorCode::IncompatibleFieldFilter,
                                       "wildcards are not supported in Exact phrases");
                       }
                   },
                   [&](const InRangeFilter& f) {
                       if (!numeric) incompatible(field, "InRange");
                       if (f.lo > f.hi) {
                           throw Error(ErrorCode::InvalidRange, "InRange(" + std::to_string(f.lo) + ", " +
                                                                    std::to_string(f.hi) + "): lo > hi");
                       }
                   },
                   [&](const NotFilter& f) {
                       if (!f.inner) throw Error(ErrorCode::InvalidFilter, "Not without operand");
                       check_filter(field, *f.inner);
                   },
                   [&](const AndFilter& f) {
                       if (f.filters.empty()) throw Error(ErrorCode::InvalidFilter, "And with no operands");
                       for (const auto& x : f.filters) check_filter(field, x);
                   },
                   [&](const OrFilter& f) {
                       if (f.filters.empty()) throw Error(ErrorCode::InvalidFilter, "Or with no operands");
                       for (const auto& x : f.filters) check_filter(field, x);
                   },
                   [&](const InResultFilter& f) {
                       if (numeric) incompatible(field, "InResult");
                       const auto cls = field_class(f.extract_field);
                       if (cls != FieldClass::Identifier && cls != FieldClass::Facet) {
                           throw Error(ErrorCode::IncompatibleFieldFilter,
                                       "InResult cannot extract values of " +
                                           std::string(to_string(f.extract_field)));
                       }
                       for (std::size_t i = 0; i < f.sub_query.size(); ++i) {
                           try {
                               check_filter(f.sub_query[i].field, f.sub_query[i].filter);
                           } catch (const Error& e) {
                               throw Error(e.code(), "sub-query clause " + std::to_string(i) + ": " + e.what());
                           }
                       }
                   },
               },
               filter.node);
}

namespace {

// A filter evaluated once against the index, keeping what scoring needs.
struct Plan {
    enum class Kind { Term, Exact, Unscored, And, Or };

    Kind kind = Kind::Unscored;
    DocSet matches;
    std::vector<DocSet> term_docs;                            // Term: one per distinct query term
    std::vector<std::pair<DocOrdinal, std::uint32_t>> spans;  // Exact: doc -> minimal span
    std::uint32_t phrase_len = 0;
    std::vector<Plan> children;

    double score(DocOrdinal doc) const {
        if (!matches.contains(doc)) return 0.0;
        switch (kind) {
        case Kind::Term: {
            double n = 0;
            for (const auto& s : term_docs) n += s.contains(doc) ? 1 : 0;
            return n;
        }
        case Kind::Exact: {
            auto it = std::lower_bound(spans.begin(), spans.end(), std::pair{doc, std::uint32_t{0}});
            if (it == spans.end() || it->first != doc) return 0.0;
            return static_cast<double>(phrase_len) / (1.0 + it->second - phrase_len);
        }
        case Kind::And: {
            double s = 0;
            for (const auto& c : children) s += c.score(doc);
            return s;
        }
        case Kind::Or: {
            double s = 0;
            for (const auto& c : children) s = std::max(s, c.score(doc));
            return s;
        }
        case Kind::Unscored:
            return 0.0;
        }
        return 0.0;
    }
};

// Blocks matching a query plus, per block, the entities satisfying every
// entity-field clause at once.
struct Match {
    DocSet blocks;
    std::vector<std::vector<DocOrdinal>> matched;  // aligned with blocks
    std::vector<Plan> plans;                       // aligned with clauses
};

// Smallest window [p0, pk] holding the phrase terms in order.
std::optional<std::uint32_t> minimal_span(const std::vector<std::span<const std::uint32_t>>& lists) {
    std::optional<std::uint32_t> best;
    const auto phrase_len = static_cast<std::uint32_t>(lists.size());
    for (std::uint32_t start : lists[0]) {
        std::uint32_t cur = start;
        bool complete = true;
        for (std::size_t k = 1; k < lists.size(); ++k) {
            auto it = std::upper_bound(lists[k].begin(), lists[k].end(), cur);
            if (it == lists[k].end()) {
                complete = false;
                break;
            }
            cur = *it;
        }
        if (!complete) break;  // later starts cannot complete either
        const std::uint32_t span = cur - start + 1;
        if (!best || span < *best) best = span;
        if (*best == phrase_len) break;
    }
    return best;
}

class Evaluator {
public:
    Evaluator(const Index& index, const QueryOptions& options) : index_(index), options_(options) {}

    Plan compile(FieldName field, const Filter& filter) const {
        return std::visit(Overloaded{
                              [&](const TermFilter& f) { return compile_term(field, f.query); },
                              [&](const ExactFilter& f) { return compile_exact(field, f.phrase); },
                              [&](const InRangeFilter& f) {
                                  Plan p;
                                  p.matches = index_.numeric_range(field, f.lo, f.hi);
                                  return p;
                              },
                              [&](const NotFilter& f) {
                                  Plan inner = compile(field, *f.inner);
                                  Plan p;
                                  p.matches = difference(index_.universe(doc_class(field)), inner.matches);
                                  return p;
                              },
                              [&](const AndFilter& f) {
                                  Plan p;
                                  p.kind = Plan::Kind::And;
                                  for (const auto& x : f.filters) p.children.push_back(compile(field, x));
                                  std::vector<const DocSet*> sets;
                                  for (const auto& c : p.children) sets.push_back(&c.matches);
                                  std::sort(sets.begin(), sets.end(),
                                            [](auto* a, auto* b) { return a->size() < b->size(); });
                                  p.matches = *sets.front();
                                  for (std::size_t i = 1; i < sets.size() && !p.matches.empty(); ++i) {
                                      p.matches = intersect(p.matches, *sets[i]);
                                  }
                                  return p;
                              },
                              [&](const OrFilter& f) {
                                  Plan p;
                                  p.kind = Plan::Kind::Or;
                                  std::vector<DocSet> sets;
                                  for (const auto& x : f.filters) {
                                      p.children.push_back(compile(field, x));
                                      sets.push_back(p.children.back().matches);
                                  }
                                  p.matches = unite_all(sets);
                                  return p;
                              },
                              [&](const InResultFilter& f) { return compile_in_result(field, f); },
                          },
                          filter.node);
    }

    Match match(const std::vector<Clause>& clauses) const {
        Match m;
        for (std::size_t i = 0; i < clauses.size(); ++i) {
            try {
                check_filter(clauses[i].field, clauses[i].filter);
                m.plans.push_back(compile(clauses[i].field, clauses[i].filter));
            } catch (const Error& e) {
                throw Error(e.code(), "clause " + std::to_string(i) + ": " + e.what());
            }
        }

        std::vector<DocSet> lifted;
        std::vector<std::size_t> entity_clauses;
        for (std::size_t i = 0; i < clauses.size(); ++i) {
            if (doc_class(clauses[i].field) == DocClass::Block) {
                lifted.push_back(m.plans[i].matches);
            } else {
                entity_clauses.push_back(i);
                lifted.push_back(lift(m.plans[i].matches));
            }
        }
        if (lifted.empty()) {
            m.blocks = index_.universe(DocClass::Block);
        } else {
            std::sort(lifted.begin(), lifted.end(), [](const DocSet& a, const DocSet& b) { return a.size() < b.size(); });
            m.blocks = std::move(lifted.front());
            for (std::size_t i = 1; i < lifted.size() && !m.blocks.empty(); ++i) {
                m.blocks = intersect(m.blocks, lifted[i]);
            }
        }

        m.matched.resize(m.blocks.size());
        const JoinMap& join = index_.join();
        for (std::size_t k = 0; k < m.blocks.size(); ++k) {
            const DocOrdinal b = m.blocks[k];
            for (DocOrdinal e = join.child_begin[b]; e < join.child_end[b]; ++e) {
                bool all = true;
                for (std::size_t c : entity_clauses) {
                    if (!m.plans[c].matches.contains(e)) {
                        all = false;
                        break;
                    }
                }
                if (all) m.matched[k].push_back(e);
            }
        }
        return m;
    }

    double score(const std::vector<Clause>& clauses, const Match& m, DocOrdinal block) const {
        double total = 0;
        const JoinMap& join = index_.join();
        for (std::size_t i = 0; i < clauses.size(); ++i) {
            const Plan& p = m.plans[i];
            if (doc_class(clauses[i].field) == DocClass::Block) {
                total += p.score(block);
                continue;
            }
            double best = 0;
            for (DocOrdinal e = join.child_begin[block]; e < join.child_end[block]; ++e) {
                best = std::max(best, p.score(e));
            }
            total += best;
        }
        return total;
    }

private:
    DocSet lift(const DocSet& entities) const {
        // Children follow their parent, so parents come out non-decreasing.
        std::vector<DocOrdinal> parents;
        parents.reserve(entities.size());
        for (DocOrdinal e : entities) {
            const DocOrdinal p = index_.parent(e);
            if (parents.empty() || parents.back() != p) parents.push_back(p);
        }
        return DocSet::from_sorted(std::move(parents));
    }

    DocSet term_docs(FieldName field, const std::string& term) const {
        if (!has_wildcard(term)) return index_.postings_exact(field, term).doc_set();
        if (term.find_first_not_of('*') == std::string::npos) return index_.docs_with_terms(field);
        std::vector<DocSet> sets;
        for (auto t : index_.expand_wildcard(field, term)) sets.push_back(index_.postings_exact(field, t).doc_set());
        return unite_all(sets);
    }

    Plan compile_term(FieldName field, std::string_view query) const {
        Plan p;
        p.kind = Plan::Kind::Term;
        auto terms = analyze_query(index_.analyzer(), field, query);
        std::vector<std::string> distinct;
        for (auto& t : terms) {
            if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(std::move(t));
        }
        for (const auto& t : distinct) p.term_docs.push_back(term_docs(field, t));
        p.matches = unite_all(p.term_docs);
        return p;
    }

    Plan compile_exact(FieldName field, std::string_view phrase) const {
        Plan p;
        p.kind = Plan::Kind::Exact;
        auto terms = analyze_query(index_.analyzer(), field, phrase);
        if (terms.empty()) return p;
        p.phrase_len = static_cast<std::uint32_t>(terms.size());

        std::vector<PostingList> lists;
        for (const auto& t : terms) {
            lists.push_back(index_.postings_exact(field, t));
            if (lists.back().empty()) return p;
        }
        std::vector<std::size_t> order(lists.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lists[a].size() < lists[b].size(); });
        DocSet candidates = lists[order[0]].doc_set();
        for (std::size_t i = 1; i < order.size() && !candidates.empty(); ++i) {
            candidates = intersect(candidates, lists[order[i]].doc_set());
        }

        const std::uint32_t max_span = p.phrase_len + options_.slop;
        std::vector<DocOrdinal> matched;
        std::vector<std::span<const std::uint32_t>> positions(lists.size());
        for (DocOrdinal d : candidates) {
            for (std::size_t k = 0; k < lists.size(); ++k) positions[k] = lists[k].positions_of(d);
            auto span = minimal_span(positions);
            if (span && *span <= max_span) {
                matched.push_back(d);
                p.spans.push_back({d, *span});
            }
        }
        p.matches = DocSet::from_sorted(std::move(matched));
        return p;
    }

    Plan compile_in_result(FieldName field, const InResultFilter& f) const {
        Match sub = match(f.sub_query);
        std::set<std::string> values;
        auto collect = [&](const std::vector<std::string_view>& vs) {
            for (auto v : vs) {
                values.emplace(v);
                if (values.size() > options_.max_expansion) {
                    throw Error(ErrorCode::ExpansionOverflow,
                                "InResult sub-query yields more than " + std::to_string(options_.max_expansion) +
                                    " distinct " + std::string(to_string(f.extract_field)) + " values");
                }
            }
        };
        if (doc_class(f.extract_field) == DocClass::Block) {
            for (DocOrdinal b : sub.blocks) collect(field_values(index_.block(b), f.extract_field));
        } else {
            for (const auto& ents : sub.matched) {
                for (DocOrdinal e : ents) collect(field_values(index_.entity(e), f.extract_field));
            }
        }

        Plan p;
        std::vector<DocSet> sets;
        for (const auto& v : values) sets.push_back(compile_term(field, v).matches);
        p.matches = unite_all(sets);
        return p;
    }

    const Index& index_;
    const QueryOptions& options_;
};

}  // namespace

DocSet Searcher::eval_filter(FieldName field, const Filter& filter) const {
    check_filter(field, filter);
    return Evaluator(index_, options_).compile(field, filter).matches;
}

std::vector<ScoredResult> Searcher::eval_query(const FieldQuery& query) const {
    Evaluator ev(index_, options_);
    Match m = ev.match(query.clauses);
    std::vector<ScoredResult> out;
    out.reserve(m.blocks.size());
    for (std::size_t k = 0; k < m.blocks.size(); ++k) {
        out.push_back({m.blocks[k], ev.score(query.clauses, m, m.blocks[k]), std::move(m.matched[k])});
    }
    return out;
}

double Searcher::score_result(const FieldQuery& query, DocOrdinal block) const {
    Evaluator ev(index_, options_);
    Match m = ev.match(query.clauses);
    return ev.score(query.clauses, m, block);
}

ResultPage Searcher::run(const FieldQuery& query, const std::vector<FieldName>& facet_fields,
                         std::size_t offset, std::size_t limit, std::size_t facet_values) const {
    if (limit < 1 || limit > kMaxPageLimit) {
        throw Error(ErrorCode::LimitOutOfRange,
                    "limit " + std::to_string(limit) + " outside [1, " + std::to_string(kMaxPageLimit) + "]");
    }
    for (FieldName f : facet_fields) {
        if (!facet_companion(f)) {
            throw Error(ErrorCode::NotFacetable, "field " + std::string(to_string(f)) + " has no facet");
        }
    }

    std::vector<ScoredResult> all = eval_query(query);

    ResultPage page;
    page.total = all.size();
    page.offset = offset;
    page.limit = limit;

    if (!facet_fields.empty()) {
        std::vector<DocOrdinal> blocks, entities;
        blocks.reserve(all.size());
        for (const auto& r : all) {
            blocks.push_back(r.block);
            entities.insert(entities.end(), r.matched_entities.begin(), r.matched_entities.end());
        }
        const DocSet block_set = DocSet::from_sorted(std::move(blocks));
        const DocSet entity_set = DocSet::from_sorted(std::move(entities));
        for (FieldName f : facet_fields) {
            const DocSet& over = doc_class(*facet_companion(f)) == DocClass::Block ? block_set : entity_set;
            page.facets[f] = index_.facet_counts(f, over, facet_values);
        }
    }

    auto by_rank = [](const ScoredResult& a, const ScoredResult& b) {
        return a.score != b.score ? a.score > b.score : a.block < b.block;
    };
    if (offset < all.size()) {
        const std::size_t end = std::min(all.size(), offset + limit);
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(end), all.end(), by_rank);
        page.results.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(offset)),
                            std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(end)));
    }
    return page;
}

}  // namespace factsearch
