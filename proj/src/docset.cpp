#include "factsearch/docset.hpp"

#include <algorithm>
#include <cassert>
#include <iterator>
#include <numeric>

namespace factsearch {

DocSet DocSet::from_sorted(std::vector<DocOrdinal> docs) {
    assert(std::adjacent_find(docs.begin(), docs.end(), std::greater_equal<>()) == docs.end());
    DocSet s;
    s.docs_ = std::move(docs);
    return s;
}

DocSet DocSet::from_unsorted(std::vector<DocOrdinal> docs) {
    std::sort(docs.begin(), docs.end());
    docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
    return from_sorted(std::move(docs));
}

DocSet DocSet::range(DocOrdinal first, DocOrdinal last) {
    std::vector<DocOrdinal> docs(last > first ? last - first : 0);
    std::iota(docs.begin(), docs.end(), first);
    return from_sorted(std::move(docs));
}

bool DocSet::contains(DocOrdinal doc) const {
    return std::binary_search(docs_.begin(), docs_.end(), doc);
}

DocSet intersect(const DocSet& a, const DocSet& b) {
    const DocSet& small = a.size() <= b.size() ? a : b;
    const DocSet& large = a.size() <= b.size() ? b : a;
    std::vector<DocOrdinal> out;
    out.reserve(small.size());
    if (small.size() * 16 < large.size()) {
        // galloping: binary search each member of the smaller set
        auto lo = large.begin();
        for (DocOrdinal d : small) {
            lo = std::lower_bound(lo, large.end(), d);
            if (lo == large.end()) break;
            if (*lo == d) out.push_back(d);
        }
    } else {
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    }
    return DocSet::from_sorted(std::move(out));
}

DocSet unite(const DocSet& a, const DocSet& b) {
    std::vector<DocOrdinal> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return DocSet::from_sorted(std::move(out));
}

DocSet unite_all(std::span<const DocSet> sets) {
    if (sets.empty()) return {};
    if (sets.size() == 1) return sets[0];
    if (sets.size() == 2) return unite(sets[0], sets[1]);
    std::size_t total = 0;
    for (const auto& s : sets) total += s.size();
    std::vector<DocOrdinal> all;
    all.reserve(total);
    for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
    return DocSet::from_unsorted(std::move(all));
}

DocSet difference(const DocSet& universe, const DocSet& excluded) {
    std::vector<DocOrdinal> out;
    out.reserve(universe.size());
    std::set_difference(universe.begin(), universe.end(), excluded.begin(), excluded.end(),
                        std::back_inserter(out));
    return DocSet::from_sorted(std::move(out));
}

}  // namespace factsearch
