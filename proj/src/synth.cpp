#include "factsearch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "factsearch/dump.hpp"

namespace factsearch {

const std::vector<std::string>& SynthGenerator::lexicon() {
    static const std::vector<std::string> kWords = {
        "prime", "nat", "bool", "int", "real", "list", "set", "map", "fun", "dvd", "gcd", "lcm",
        "finite", "card", "sum", "prod", "length", "append", "rev", "filter", "foldr", "Suc", "zero",
        "one", "add", "mult", "less", "le", "inj", "surj", "bij", "mono", "continuous", "limit",
        "measure", "integral", "group", "ring", "field", "order", "lattice", "induct", "cases",
        "simp", "auto", "blast", "Nat.nat", "HOL.bool", "List.list", "p", "q", "x", "y", "n", "m",
    };
    return kWords;
}

const std::vector<std::string>& SynthGenerator::constant_types() {
    static const std::vector<std::string> kTypes = {
        "nat ⇒ bool", "nat ⇒ nat", "nat ⇒ nat ⇒ nat", "int ⇒ bool", "int ⇒ int", "real ⇒ real",
        "'a list ⇒ nat", "'a list ⇒ 'a list", "'a set ⇒ bool", "'a set ⇒ 'a set ⇒ bool",
        "('a ⇒ 'b) ⇒ 'a list ⇒ 'b list", "bool", "nat", "'a ⇒ 'a ⇒ bool",
    };
    return kTypes;
}

const std::vector<std::string>& SynthGenerator::theory_names() {
    static const std::vector<std::string> kNames = {
        "HOL.Nat", "HOL.List", "HOL.Set", "HOL.Groups", "HOL.Fun", "HOL.Orderings", "HOL.Int",
        "HOL.Real", "HOL-Library.Multiset", "HOL-Number_Theory.Primes", "HOL-Algebra.Group",
        "HOL-Analysis.Measure", "ZF.Nat_ZF", "ZF.Arith",
    };
    return kNames;
}

namespace {

const std::vector<std::string>& symbol_forms() {
    static const std::vector<std::string> kForms = {
        "==>", "⟹", "\\<Longrightarrow>", "-->", "⟶", "\\<longrightarrow>", "=>", "⇒", "\\<forall>",
        "∀", "\\<exists>", "∃", "&", "∧", "\\<or>", "∨", "~", "¬", "<=", "≤", "~=", "≠", "\\<in>", "∈",
        "(", ")", "=", "+", "*", ":", ",",
    };
    return kForms;
}

const std::vector<std::string>& fact_commands() {
    static const std::vector<std::string> k = {"lemma", "theorem", "corollary"};
    return k;
}
const std::vector<std::string>& constant_commands() {
    static const std::vector<std::string> k = {"definition", "fun", "abbreviation", "primrec"};
    return k;
}
const std::vector<std::string>& type_commands() {
    static const std::vector<std::string> k = {"datatype", "typedef", "record"};
    return k;
}

}  // namespace

SynthGenerator::SynthGenerator(SynthOptions options)
    : options_(options), rng_(options.seed) {
    zipf_cdf_.resize(std::max<std::size_t>(options_.vocabulary, 1));
    double acc = 0;
    for (std::size_t r = 0; r < zipf_cdf_.size(); ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r + 1), 1.1);
        zipf_cdf_[r] = acc;
    }
    theory_line_.assign(std::max<std::size_t>(options_.theories, 1), 1);
}

std::string SynthGenerator::word() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) < 0.5) {
        const auto& lex = lexicon();
        return lex[std::uniform_int_distribution<std::size_t>(0, lex.size() - 1)(rng_)];
    }
    const double x = u(rng_) * zipf_cdf_.back();
    const auto rank = static_cast<std::size_t>(std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), x) - zipf_cdf_.begin());
    return "w" + std::to_string(rank);
}

std::string SynthGenerator::formula(std::size_t tokens) {
    std::string out;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& sym = symbol_forms();
    for (std::size_t i = 0; i < tokens; ++i) {
        if (i) out += ' ';
        if (u(rng_) < 0.3) {
            out += sym[std::uniform_int_distribution<std::size_t>(0, sym.size() - 1)(rng_)];
        } else {
            out += word();
        }
    }
    return out;
}

Block SynthGenerator::next() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
    };

    Block b;
    const std::size_t idx = produced_++;
    b.id = "b" + std::to_string(idx);
    const std::size_t theory = std::uniform_int_distribution<std::size_t>(0, theory_line_.size() - 1)(rng_);
    const auto& names = theory_names();
    b.source_theory = theory < names.size() ? names[theory] : "Session" + std::to_string(theory / 8) + ".T" + std::to_string(theory);

    const std::size_t n_entities = std::uniform_int_distribution<std::size_t>(
        options_.min_entities, std::max(options_.min_entities, options_.max_entities))(rng_);
    const double r = u(rng_);
    const EntityKind main_kind = r < 0.55 ? EntityKind::Fact : r < 0.9 ? EntityKind::Constant : EntityKind::Type;
    b.command = pick(main_kind == EntityKind::Fact       ? fact_commands()
                     : main_kind == EntityKind::Constant ? constant_commands()
                                                         : type_commands());

    const std::string head = word() + (u(rng_) < 0.5 ? "_" + word() : "");
    std::string src = b.command + " " + head + ":\n  \"" + formula(4 + rng_() % 20) + "\"";
    if (u(rng_) < 0.5) src += "\n  by " + pick({"simp", "auto", "blast", "(induct n) auto"});
    if (u(rng_) < options_.markup_rate) src = "<span class=\"command\">" + b.command + "</span>" + src.substr(b.command.size());
    b.source_code = std::move(src);

    for (std::size_t k = 0; k < n_entities; ++k) {
        TheoryEntity e;
        e.child_id = "e" + std::to_string(next_entity_++);
        e.parent_id = b.id;
        e.kind = k == 0 ? main_kind : static_cast<EntityKind>(rng_() % 3);
        e.name = k == 0 ? head : head + "_" + word();
        if (e.kind == EntityKind::Constant) e.constant_type = pick(constant_types());
        const std::size_t n_uses = rng_() % 4;
        for (std::size_t j = 0; j < n_uses && e.child_id != "e0"; ++j) {
            if (u(rng_) < options_.dangling_rate) {
                e.uses.push_back("missing" + std::to_string(rng_() % 1000));
            } else {
                const std::size_t earlier = next_entity_ - 1;
                // favour nearby entities, like imports within a theory
                const std::size_t back = std::min<std::size_t>(earlier, 1 + rng_() % 64);
                e.uses.push_back("e" + std::to_string(earlier - back));
            }
        }
        std::sort(e.uses.begin(), e.uses.end());
        e.uses.erase(std::unique(e.uses.begin(), e.uses.end()), e.uses.end());
        b.entities.push_back(std::move(e));
    }

    b.start_line = theory_line_[theory];
    theory_line_[theory] += 1 + static_cast<std::int64_t>(std::count(b.source_code.begin(), b.source_code.end(), '\n')) +
                            static_cast<std::int64_t>(rng_() % 3);
    return b;
}

std::vector<Block> generate_corpus(const SynthOptions& options) {
    SynthGenerator gen(options);
    std::vector<Block> out;
    out.reserve(options.blocks);
    while (!gen.done()) out.push_back(gen.next());
    return out;
}

std::size_t write_synthetic_dump(std::ostream& out, const SynthOptions& options) {
    SynthGenerator gen(options);
    std::size_t n = 0;
    while (!gen.done()) {
        out << format_record(gen.next()) << '\n';
        ++n;
    }
    return n;
}

}  // namespace factsearch
