#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace factsearch {

using DocOrdinal = std::uint32_t;

/// Sorted, duplicate-free set of document ordinals.
class DocSet {
public:
    DocSet() = default;

    static DocSet from_sorted(std::vector<DocOrdinal> docs);
    static DocSet from_unsorted(std::vector<DocOrdinal> docs);
    static DocSet range(DocOrdinal first, DocOrdinal last);  // [first, last)

    bool contains(DocOrdinal doc) const;
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

    auto begin() const { return docs_.begin(); }
    auto end() const { return docs_.end(); }
    DocOrdinal operator[](std::size_t i) const { return docs_[i]; }
    const std::vector<DocOrdinal>& ordinals() const { return docs_; }

    bool operator==(const DocSet&) const = default;

private:
    std::vector<DocOrdinal> docs_;
};

DocSet intersect(const DocSet& a, const DocSet& b);
DocSet unite(const DocSet& a, const DocSet& b);
DocSet unite_all(std::span<const DocSet> sets);
/// Members of `universe` not in `excluded`.
DocSet difference(const DocSet& universe, const DocSet& excluded);

}  // namespace factsearch
