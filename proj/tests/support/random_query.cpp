#include "random_query.hpp"

#include <sstream>

#include "factsearch/analysis.hpp"
#include "factsearch/synth.hpp"

namespace factsearch::testing {

RandomQueryGenerator::RandomQueryGenerator(const std::vector<Block>& corpus, std::uint64_t seed)
    : corpus_(corpus), rng_(seed) {}

const Block& RandomQueryGenerator::any_block() { return pick(corpus_); }

const TheoryEntity* RandomQueryGenerator::any_entity() {
    for (int tries = 0; tries < 16; ++tries) {
        const Block& b = any_block();
        if (!b.entities.empty()) return &pick(b.entities);
    }
    return nullptr;
}

FieldName RandomQueryGenerator::field() {
    static const std::vector<FieldName> kWeighted = {
        FieldName::SourceCode, FieldName::SourceCode, FieldName::SourceCode, FieldName::Name,
        FieldName::Name,       FieldName::Kind,       FieldName::Kind,       FieldName::Command,
        FieldName::ConstantType, FieldName::ConstantTypeFacet, FieldName::NameFacet,
        FieldName::SourceTheory, FieldName::SourceTheoryFacet, FieldName::StartLine,
        FieldName::StartLine,  FieldName::Uses,       FieldName::ChildId,    FieldName::Id,
    };
    return pick(kWeighted);
}

std::string RandomQueryGenerator::literal(FieldName f) {
    auto wildcard = [&](std::string s) {
        if (s.size() > 2 && chance(0.15)) return s.substr(0, 1 + rng_() % (s.size() - 1)) + "*";
        if (chance(0.03)) return std::string("*");
        return s;
    };
    switch (f) {
    case FieldName::Kind: {
        static const std::vector<std::string> k = {"Constant", "Fact", "Type", "Const*", "*act"};
        return pick(k);
    }
    case FieldName::Id: return wildcard(any_block().id);
    case FieldName::SourceTheoryFacet:
    case FieldName::SourceTheory: return wildcard(any_block().source_theory);
    case FieldName::Command: return wildcard(any_block().command);
    case FieldName::ChildId:
    case FieldName::NameFacet:
    case FieldName::Name:
    case FieldName::Uses: {
        const TheoryEntity* e = any_entity();
        if (!e) return "nothing";
        if (f == FieldName::ChildId) return wildcard(e->child_id);
        if (f == FieldName::Uses) return e->uses.empty() ? e->child_id : pick(e->uses);
        if (f == FieldName::NameFacet) return wildcard(e->name);
        // a word or two of the name
        std::string out = wildcard(e->name);
        if (chance(0.3)) out += " " + pick(SynthGenerator::lexicon());
        return out;
    }
    case FieldName::ConstantType:
    case FieldName::ConstantTypeFacet: {
        std::string t = pick(SynthGenerator::constant_types());
        if (f == FieldName::ConstantType && chance(0.5)) {
            static const std::vector<std::string> words = {"nat", "bool", "nat bool", "list", "'a", "int ⇒", "=> real"};
            return pick(words);
        }
        return t;
    }
    default: {
        static const std::vector<std::string> symbols = {"==>", "⟹", "\\<Longrightarrow>", "-->", "\\<forall>", "∃", "<=", "&"};
        std::string w = chance(0.2) ? pick(symbols) : pick(SynthGenerator::lexicon());
        if (chance(0.3)) w = "w" + std::to_string(rng_() % 40);
        w = wildcard(w);
        if (chance(0.35)) w += " " + (chance(0.5) ? pick(SynthGenerator::lexicon()) : "w" + std::to_string(rng_() % 200));
        return w;
    }
    }
}

std::string RandomQueryGenerator::phrase(FieldName f) {
    if (field_class(f) != FieldClass::Text) {
        std::string s = literal(f);
        if (s.find('*') != std::string::npos) s.erase(s.find('*'));
        return s.empty() ? "x" : s;
    }
    // a window of the field's analyzed terms, with optional gaps
    const Block& b = any_block();
    std::string source;
    if (doc_class(f) == DocClass::Block) {
        auto vs = field_values(b, f);
        source = vs.empty() ? "" : std::string(vs.front());
    } else if (const TheoryEntity* e = any_entity()) {
        auto vs = field_values(*e, f);
        source = vs.empty() ? "" : std::string(vs.front());
    }
    auto toks = analyze(AnalyzerConfig(), f, source);
    if (toks.empty()) return pick(SynthGenerator::lexicon());
    const std::size_t len = 1 + rng_() % 3;
    std::size_t at = rng_() % toks.size();
    std::string out;
    for (std::size_t k = 0; k < len && at < toks.size(); ++k) {
        if (k) out += ' ';
        out += toks[at].term;
        at += 1 + (chance(0.4) ? rng_() % 4 : 0);
    }
    if (chance(0.1)) out = pick(SynthGenerator::lexicon()) + " " + out;
    return out;
}

Filter RandomQueryGenerator::in_result(FieldName f, int depth) {
    struct Pivot {
        FieldName outer;
        FieldName extract;
        FieldName sub;
    };
    static const std::vector<Pivot> kPivots = {
        {FieldName::Uses, FieldName::ChildId, FieldName::ChildId},
        {FieldName::Uses, FieldName::ChildId, FieldName::NameFacet},
        {FieldName::ChildId, FieldName::Uses, FieldName::ChildId},
        {FieldName::Name, FieldName::NameFacet, FieldName::ChildId},
        {FieldName::Id, FieldName::Id, FieldName::StartLine},
        {FieldName::SourceTheoryFacet, FieldName::SourceTheoryFacet, FieldName::Id},
        {FieldName::Kind, FieldName::Kind, FieldName::Id},
        {FieldName::ConstantTypeFacet, FieldName::ConstantTypeFacet, FieldName::Id},
        {FieldName::SourceCode, FieldName::NameFacet, FieldName::ChildId},
    };
    std::vector<Pivot> usable;
    for (const auto& p : kPivots) {
        if (p.outer == f) usable.push_back(p);
    }
    Pivot p = usable.empty() ? Pivot{f, pick(std::vector<FieldName>{FieldName::ChildId, FieldName::NameFacet, FieldName::Kind}),
                                      FieldName::ChildId}
                             : pick(usable);
    std::vector<Clause> sub;
    if (p.sub == FieldName::StartLine) {
        const auto lo = static_cast<std::int64_t>(rng_() % 200);
        sub.push_back({p.sub, Filter::in_range(lo, lo + static_cast<std::int64_t>(rng_() % 10))});
    } else {
        sub.push_back({p.sub, Filter::term(literal(p.sub))});
        if (depth >= 3 && chance(0.5)) sub.back().filter = Filter::any_of({sub.back().filter, Filter::term(literal(p.sub))});
    }
    if (depth > 1 && chance(0.3)) sub.push_back({FieldName::Kind, filter(FieldName::Kind, depth - 1)});
    return Filter::in_result(p.extract, std::move(sub));
}

Filter RandomQueryGenerator::filter(FieldName f, int depth) {
    const bool numeric = field_class(f) == FieldClass::Numeric;
    const bool leaf = depth <= 1 || chance(0.4);
    if (leaf) {
        if (numeric) {
            const auto lo = static_cast<std::int64_t>(rng_() % 300);
            const auto hi = lo + static_cast<std::int64_t>(chance(0.3) ? 0 : rng_() % 120);
            return Filter::in_range(lo, hi);
        }
        const double r = std::uniform_real_distribution<double>(0, 1)(rng_);
        if (r < 0.6) return Filter::term(literal(f));
        if (r < 0.9 || depth <= 1) return Filter::exact(phrase(f));
        return in_result(f, depth);
    }
    const double r = std::uniform_real_distribution<double>(0, 1)(rng_);
    if (r < 0.2) return Filter::negate(filter(f, depth - 1));
    if (!numeric && r < 0.3) return in_result(f, depth);
    std::vector<Filter> members;
    const std::size_t n = 1 + rng_() % 3;
    for (std::size_t i = 0; i < n; ++i) members.push_back(filter(f, depth - 1));
    return r < 0.65 ? Filter::all_of(std::move(members)) : Filter::any_of(std::move(members));
}

FieldQuery RandomQueryGenerator::query(int max_depth, std::size_t max_clauses) {
    FieldQuery q;
    const std::size_t n = rng_() % (max_clauses + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const FieldName f = field();
        q.clauses.push_back({f, filter(f, 1 + static_cast<int>(rng_() % max_depth))});
    }
    return q;
}

}  // namespace factsearch::testing
