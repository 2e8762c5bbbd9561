#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "factsearch/model.hpp"

namespace factsearch {

struct Token {
    std::string term;
    std::uint32_t position = 0;

    bool operator==(const Token&) const = default;
};

struct SymbolGroup {
    std::string canonical;
    std::vector<std::string> aliases;

    bool operator==(const SymbolGroup&) const = default;
};

/// Disjoint groups of notations for the same symbol. Every alias normalizes
/// to its group's canonical (Unicode) form.
class SymbolTable {
public:
    SymbolTable() = default;

    /// Throws OverlappingGroups when a string appears in two groups.
    static SymbolTable from_groups(std::vector<SymbolGroup> groups);

    const std::vector<SymbolGroup>& groups() const { return groups_; }
    bool empty() const { return groups_.empty(); }

    std::string_view normalize(std::string_view token) const;
    bool contains(std::string_view token) const { return lookup_.contains(std::string(token)); }

    /// Length of the longest table entry that prefixes `text`, or 0.
    std::size_t longest_prefix(std::string_view text) const;

    /// Two-column text form: `canonical<TAB>alias alias ...`.
    std::string to_text() const;

private:
    std::vector<SymbolGroup> groups_;
    std::unordered_map<std::string, std::size_t> lookup_;  // any member -> group
    std::size_t max_len_ = 0;
};

SymbolTable parse_symbol_table(std::istream& in);
SymbolTable load_symbol_table(const std::filesystem::path& path);
const SymbolTable& default_symbol_table();

std::string normalize_symbol(const SymbolTable& table, std::string_view token);

/// Removes HTML-like tags (`<b>`, `</span>`, `<a href="..">`). Isabelle
/// escapes such as `\<forall>` are left alone.
std::string strip_tags(std::string_view value);

enum class AnalysisRule {
    Text,         // tokenize, lowercase, symbol-normalize
    MarkupText,   // strip tags, then Text
    Verbatim,     // one token, the raw value
    None,         // numeric: not analyzable
};

class AnalyzerConfig {
public:
    AnalyzerConfig() : AnalyzerConfig(default_symbol_table()) {}
    explicit AnalyzerConfig(SymbolTable symbols);

    AnalysisRule rule(FieldName field) const;
    const SymbolTable& symbols() const { return symbols_; }

    /// Stable hash of every input that affects analysis output.
    std::uint64_t fingerprint() const { return fingerprint_; }

private:
    SymbolTable symbols_;
    std::uint64_t fingerprint_ = 0;
};

/// Index-time analysis of a single field value.
std::vector<Token> analyze(const AnalyzerConfig& config, FieldName field, std::string_view value);

/// Query-time analysis. Identical to `analyze` except that `*` survives
/// inside terms as a wildcard.
std::vector<std::string> analyze_query(const AnalyzerConfig& config, FieldName field,
                                       std::string_view value);

bool has_wildcard(std::string_view term);

/// `*` matches any run of characters (possibly empty); everything else is literal.
bool glob_match(std::string_view pattern, std::string_view text);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull);

}  // namespace factsearch
