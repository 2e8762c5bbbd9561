#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include <omp.h>

#include "factsearch/error.hpp"
#include "factsearch/index.hpp"

namespace factsearch {

namespace {

std::vector<std::string_view> doc_values(std::span<const Block> blocks, const DocRef& ref,
                                         FieldName field) {
    const Block& b = blocks[ref.block];
    if (ref.cls == DocClass::Block) return field_values(b, field);
    return field_values(b.entities[ref.entity], field);
}

// Analyzes every value of a multi-valued field with positions running on
// across values.
template <typename Emit>
void analyze_doc(const AnalyzerConfig& config, FieldName field,
                 const std::vector<std::string_view>& values, Emit&& emit) {
    std::uint32_t base = 0;
    for (auto v : values) {
        auto tokens = analyze(config, field, v);
        for (auto& t : tokens) emit(std::move(t.term), base + t.position);
        base += static_cast<std::uint32_t>(tokens.size());
    }
}

FieldPostings build_serial(const AnalyzerConfig& config, FieldName field,
                           std::span<const Block> blocks, std::span<const DocRef> docs) {
    const DocClass cls = doc_class(field);
    std::map<std::string, std::vector<std::pair<DocOrdinal, std::vector<std::uint32_t>>>> lists;
    for (DocOrdinal d = 0; d < docs.size(); ++d) {
        if (docs[d].cls != cls) continue;
        analyze_doc(config, field, doc_values(blocks, docs[d], field),
                    [&](std::string&& term, std::uint32_t pos) {
                        auto& list = lists[std::move(term)];
                        if (list.empty() || list.back().first != d) list.push_back({d, {}});
                        list.back().second.push_back(pos);
                    });
    }

    FieldPostings out;
    out.term_start.push_back(0);
    out.pos_start.push_back(0);
    for (auto& [term, list] : lists) {
        out.terms.push_back(term);
        for (auto& [doc, positions] : list) {
            out.docs.push_back(doc);
            out.positions.insert(out.positions.end(), positions.begin(), positions.end());
            out.pos_start.push_back(out.positions.size());
        }
        out.term_start.push_back(out.docs.size());
    }
    return out;
}

struct LocalList {
    std::vector<DocOrdinal> docs;
    std::vector<std::uint32_t> pos_count;
    std::vector<std::uint32_t> positions;
};

using ChunkMap = std::unordered_map<std::string, LocalList>;

// Chunks are contiguous ordinal ranges, so concatenating chunk lists in chunk
// order keeps every posting list sorted by doc.
FieldPostings build_parallel(const AnalyzerConfig& config, FieldName field,
                             std::span<const Block> blocks, std::span<const DocRef> docs) {
    const DocClass cls = doc_class(field);
    const std::size_t n = docs.size();
    const std::size_t chunk_count = std::max<std::size_t>(1, std::min<std::size_t>(
        static_cast<std::size_t>(omp_get_max_threads()) * 4, (n + 1023) / 1024));
    std::vector<ChunkMap> chunks(chunk_count);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t c = 0; c < chunk_count; ++c) {
        const std::size_t lo = n * c / chunk_count;
        const std::size_t hi = n * (c + 1) / chunk_count;
        ChunkMap& map = chunks[c];
        for (std::size_t d = lo; d < hi; ++d) {
            if (docs[d].cls != cls) continue;
            const auto doc = static_cast<DocOrdinal>(d);
            analyze_doc(config, field, doc_values(blocks, docs[d], field),
                        [&](std::string&& term, std::uint32_t pos) {
                            LocalList& l = map[std::move(term)];
                            if (l.docs.empty() || l.docs.back() != doc) {
                                l.docs.push_back(doc);
                                l.pos_count.push_back(0);
                            }
                            ++l.pos_count.back();
                            l.positions.push_back(pos);
                        });
        }
    }

    FieldPostings out;
    for (const auto& map : chunks) {
        for (const auto& [term, list] : map) out.terms.push_back(term);
    }
    std::sort(out.terms.begin(), out.terms.end());
    out.terms.erase(std::unique(out.terms.begin(), out.terms.end()), out.terms.end());
    const std::size_t term_count = out.terms.size();

    std::vector<std::uint64_t> doc_total(term_count), pos_total(term_count);
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < term_count; ++t) {
        for (const auto& map : chunks) {
            auto it = map.find(out.terms[t]);
            if (it == map.end()) continue;
            doc_total[t] += it->second.docs.size();
            pos_total[t] += it->second.positions.size();
        }
    }

    out.term_start.assign(term_count + 1, 0);
    std::vector<std::uint64_t> pos_base(term_count + 1, 0);
    std::inclusive_scan(doc_total.begin(), doc_total.end(), out.term_start.begin() + 1);
    std::inclusive_scan(pos_total.begin(), pos_total.end(), pos_base.begin() + 1);
    out.docs.resize(out.term_start.back());
    out.pos_start.resize(out.docs.size() + 1);
    out.positions.resize(pos_base.back());
    out.pos_start.back() = out.positions.size();

#pragma omp parallel for schedule(dynamic, 64)
    for (std::size_t t = 0; t < term_count; ++t) {
        std::uint64_t d_at = out.term_start[t];
        std::uint64_t p_at = pos_base[t];
        for (const auto& map : chunks) {
            auto it = map.find(out.terms[t]);
            if (it == map.end()) continue;
            const LocalList& l = it->second;
            for (std::size_t k = 0; k < l.docs.size(); ++k) {
                out.docs[d_at] = l.docs[k];
                out.pos_start[d_at] = p_at;
                ++d_at;
                p_at += l.pos_count[k];
            }
            std::copy(l.positions.begin(), l.positions.end(),
                      out.positions.begin() + static_cast<std::ptrdiff_t>(p_at - l.positions.size()));
        }
    }
    return out;
}

}  // namespace

FieldPostings build_field_postings(const AnalyzerConfig& config, FieldName field,
                                   std::span<const Block> blocks, std::span<const DocRef> docs,
                                   Execution mode) {
    if (field_class(field) == FieldClass::Numeric) return {};
    return mode == Execution::Serial ? build_serial(config, field, blocks, docs)
                                     : build_parallel(config, field, blocks, docs);
}

IndexBuilder::IndexBuilder(AnalyzerConfig config) : config_(std::move(config)) {}

void IndexBuilder::add(Block block) {
    auto claim = [&](const std::string& id, char tag) {
        if (id.empty()) throw Error(ErrorCode::DuplicateId, "empty identifier");
        if (!ids_.emplace(id, tag).second) throw Error(ErrorCode::DuplicateId, "duplicate id '" + id + "'");
    };
    claim(block.id, 'b');
    for (auto& e : block.entities) {
        claim(e.child_id, 'e');
        e.parent_id = block.id;
    }
    blocks_.push_back(std::move(block));
}

Index IndexBuilder::finish(Execution mode) && {
    detail::IndexData data;
    data.analyzer = std::move(config_);
    data.blocks = std::move(blocks_);
    ids_.clear();

    for (std::uint32_t b = 0; b < data.blocks.size(); ++b) {
        const auto self = static_cast<DocOrdinal>(data.docs.size());
        data.docs.push_back({DocClass::Block, b, 0});
        data.join.parent.push_back(self);
        const auto& entities = data.blocks[b].entities;
        const auto first = self + 1;
        const auto last = first + static_cast<DocOrdinal>(entities.size());
        data.join.child_begin.push_back(first);
        data.join.child_end.push_back(last);
        for (std::uint32_t e = 0; e < entities.size(); ++e) {
            data.docs.push_back({DocClass::Entity, b, e});
            data.join.parent.push_back(self);
            data.join.child_begin.push_back(first);
            data.join.child_end.push_back(first);
        }
        data.start_line.entries.push_back({data.blocks[b].start_line, self});
    }
    std::sort(data.start_line.entries.begin(), data.start_line.entries.end());

    for (FieldName f : kAllFields) {
        data.postings[field_index(f)] =
            build_field_postings(data.analyzer, f, data.blocks, data.docs, mode);
    }
    return Index(std::move(data));
}

Index build_index(std::span<const Block> blocks, const AnalyzerConfig& config, Execution mode) {
    IndexBuilder builder(config);
    for (const auto& b : blocks) builder.add(b);
    return std::move(builder).finish(mode);
}

}  // namespace factsearch
