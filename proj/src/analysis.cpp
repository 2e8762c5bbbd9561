#include "factsearch/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "factsearch/error.hpp"

namespace factsearch {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// --- symbol table -------------------------------------------------------------

SymbolTable SymbolTable::from_groups(std::vector<SymbolGroup> groups) {
    SymbolTable t;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto add = [&](const std::string& s) {
            if (s.empty()) return;
            auto [it, fresh] = t.lookup_.emplace(s, g);
            if (!fresh && it->second != g) {
                throw Error(ErrorCode::OverlappingGroups, "symbol '" + s + "' appears in more than one group");
            }
            t.max_len_ = std::max(t.max_len_, s.size());
        };
        if (groups[g].canonical.empty()) {
            throw Error(ErrorCode::MalformedLine, "symbol group with empty canonical form");
        }
        add(groups[g].canonical);
        for (const auto& a : groups[g].aliases) add(a);
    }
    t.groups_ = std::move(groups);
    return t;
}

std::string_view SymbolTable::normalize(std::string_view token) const {
    auto it = lookup_.find(std::string(token));
    if (it == lookup_.end()) return token;
    return groups_[it->second].canonical;
}

std::size_t SymbolTable::longest_prefix(std::string_view text) const {
    for (std::size_t len = std::min(max_len_, text.size()); len > 0; --len) {
        if (lookup_.contains(std::string(text.substr(0, len)))) return len;
    }
    return 0;
}

std::string SymbolTable::to_text() const {
    std::string out;
    for (const auto& g : groups_) {
        out += g.canonical;
        out += '\t';
        for (std::size_t i = 0; i < g.aliases.size(); ++i) {
            if (i) out += ' ';
            out += g.aliases[i];
        }
        out += '\n';
    }
    return out;
}

SymbolTable parse_symbol_table(std::istream& in) {
    std::vector<SymbolGroup> groups;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw Error(ErrorCode::MalformedLine, "symbol table line " + std::to_string(n) +
                                                      ": expected canonical<TAB>aliases");
        }
        SymbolGroup g;
        g.canonical = line.substr(0, tab);
        std::istringstream rest(line.substr(tab + 1));
        std::string alias;
        while (rest >> alias) g.aliases.push_back(alias);
        groups.push_back(std::move(g));
    }
    return SymbolTable::from_groups(std::move(groups));
}

SymbolTable load_symbol_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open symbol table " + path.string());
    return parse_symbol_table(in);
}

const SymbolTable& default_symbol_table() {
    static const SymbolTable kTable = SymbolTable::from_groups({
        {"⟹", {"\\<Longrightarrow>", "==>"}},
        {"⟶", {"\\<longrightarrow>", "-->"}},
        {"⇒", {"\\<Rightarrow>", "=>"}},
        {"→", {"\\<rightarrow>", "->"}},
        {"⟷", {"\\<longleftrightarrow>", "<-->"}},
        {"⟸", {"\\<Longleftarrow>", "<=="}},
        {"∀", {"\\<forall>"}},
        {"∃", {"\\<exists>"}},
        {"∧", {"\\<and>", "&"}},
        {"∨", {"\\<or>", "|"}},
        {"¬", {"\\<not>", "~"}},
        {"≤", {"\\<le>", "<="}},
        {"≥", {"\\<ge>", ">="}},
        {"≠", {"\\<noteq>", "~="}},
        {"∈", {"\\<in>"}},
        {"∉", {"\\<notin>", "~:"}},
        {"⊆", {"\\<subseteq>"}},
        {"∩", {"\\<inter>"}},
        {"∪", {"\\<union>"}},
        {"λ", {"\\<lambda>", "%"}},
        {"≡", {"\\<equiv>", "=="}},
        {"⋀", {"\\<And>", "!!"}},
        {"×", {"\\<times>"}},
        {"⟦", {"\\<lbrakk>", "[|"}},
        {"⟧", {"\\<rbrakk>", "|]"}},
    });
    return kTable;
}

std::string normalize_symbol(const SymbolTable& table, std::string_view token) {
    return std::string(table.normalize(token));
}

// --- markup ---------------------------------------------------------------------

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Returns the length of a tag starting at s[i] == '<', or 0.
std::size_t tag_length(std::string_view s, std::size_t i) {
    std::size_t j = i + 1;
    if (j < s.size() && s[j] == '/') ++j;
    if (j >= s.size() || !is_alpha(s[j])) return 0;
    for (; j < s.size(); ++j) {
        if (s[j] == '>') return j - i + 1;
        if (s[j] == '<' || s[j] == '\n') return 0;
    }
    return 0;
}

}  // namespace

namespace {

std::string strip_once(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size();) {
        if (value[i] == '<' && (i == 0 || value[i - 1] != '\\')) {
            if (std::size_t len = tag_length(value, i)) {
                i += len;
                continue;
            }
        }
        out.push_back(value[i++]);
    }
    return out;
}

}  // namespace

// Repeated until stable so that "<<b>b>" loses both tags.
std::string strip_tags(std::string_view value) {
    std::string out = strip_once(value);
    for (std::string next = strip_once(out); next.size() != out.size(); next = strip_once(out)) {
        out = std::move(next);
    }
    return out;
}

// --- tokenizer --------------------------------------------------------------------

namespace {

std::size_t utf8_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;  // stray continuation byte
}

char32_t decode(std::string_view s, std::size_t i, std::size_t len) {
    auto b = [&](std::size_t k) { return static_cast<unsigned char>(s[i + k]); };
    switch (len) {
    case 2: return ((b(0) & 0x1F) << 6) | (b(1) & 0x3F);
    case 3: return ((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F);
    case 4: return ((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) | ((b(2) & 0x3F) << 6) | (b(3) & 0x3F);
    default: return b(0) < 0x80 ? b(0) : 0xFFFD;
    }
}

bool is_unicode_letter(char32_t cp) {
    return (cp >= 0x00C0 && cp <= 0x024F && cp != 0xD7 && cp != 0xF7) ||
           (cp >= 0x0370 && cp <= 0x03FF) || (cp >= 0x0400 && cp <= 0x04FF) ||
           (cp >= 0x2070 && cp <= 0x209C) || (cp >= 0x1D400 && cp <= 0x1D7FF);
}

bool is_ascii_word(char c, bool query) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '.' || c == '\'' || (query && c == '*');
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Length of an Isabelle escape `\<name>` at s[i], or 0.
std::size_t escape_length(std::string_view s, std::size_t i) {
    if (s[i] != '\\' || i + 1 >= s.size() || s[i + 1] != '<') return 0;
    for (std::size_t j = i + 2; j < s.size() && j < i + 64; ++j) {
        if (s[j] == '>') return j > i + 2 ? j - i + 1 : 0;
        if (is_space(s[j]) || s[j] == '<' || s[j] == '\\') return 0;
    }
    return 0;
}

template <typename Emit>
void tokenize_text(const SymbolTable& table, std::string_view s, bool query, Emit&& emit) {
    std::size_t i = 0;
    const std::size_t n = s.size();
    std::string word;

    auto flush_word = [&] {
        std::size_t b = word.find_first_not_of('.');
        std::size_t e = word.find_last_not_of('.');
        if (b != std::string::npos) {
            std::string w = word.substr(b, e - b + 1);
            for (char& c : w) {
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            }
            if (w.find_first_not_of('\'') != std::string::npos) emit(std::string(table.normalize(w)));
        }
        word.clear();
    };

    while (i < n) {
        char c = s[i];
        auto uc = static_cast<unsigned char>(c);
        if (is_space(c)) {
            flush_word();
            ++i;
            continue;
        }
        if (std::size_t len = escape_length(s, i)) {
            flush_word();
            emit(std::string(table.normalize(s.substr(i, len))));
            i += len;
            continue;
        }
        if (uc < 0x80) {
            if (is_ascii_word(c, query)) {
                word.push_back(c);
                ++i;
                continue;
            }
            flush_word();
            if (std::size_t len = table.longest_prefix(s.substr(i))) {
                emit(std::string(table.normalize(s.substr(i, len))));
                i += len;
            } else {
                ++i;
            }
            continue;
        }
        std::size_t len = utf8_length(uc);
        if (len > n - i) len = 1;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) len = 1;  // truncated sequence
        if (std::size_t sym = table.longest_prefix(s.substr(i))) {
            flush_word();
            emit(std::string(table.normalize(s.substr(i, sym))));
            i += sym;
            continue;
        }
        if (is_unicode_letter(decode(s, i, len))) {
            word.append(s.substr(i, len));
        } else {
            flush_word();
            emit(std::string(s.substr(i, len)));
        }
        i += len;
    }
    flush_word();
}

}  // namespace

// --- analyzer ------------------------------------------------------------------

AnalyzerConfig::AnalyzerConfig(SymbolTable symbols) : symbols_(std::move(symbols)) {
    fingerprint_ = fnv1a64("analyzer-v1\n" + symbols_.to_text());
}

AnalysisRule AnalyzerConfig::rule(FieldName field) const {
    if (field == FieldName::SourceCode) return AnalysisRule::MarkupText;
    switch (field_class(field)) {
    case FieldClass::Text: return AnalysisRule::Text;
    case FieldClass::Facet:
    case FieldClass::Identifier: return AnalysisRule::Verbatim;
    case FieldClass::Numeric: return AnalysisRule::None;
    }
    return AnalysisRule::None;
}

namespace {

template <typename Emit>
void run_rule(const AnalyzerConfig& config, FieldName field, std::string_view value, bool query,
              Emit&& emit) {
    switch (config.rule(field)) {
    case AnalysisRule::None:
        throw Error(ErrorCode::NumericFieldNotAnalyzable,
                    "field " + std::string(to_string(field)) + " is numeric and cannot be analyzed");
    case AnalysisRule::Verbatim:
        if (!value.empty()) emit(std::string(value));
        return;
    case AnalysisRule::MarkupText:
        tokenize_text(config.symbols(), strip_tags(value), query, emit);
        return;
    case AnalysisRule::Text:
        tokenize_text(config.symbols(), value, query, emit);
        return;
    }
}

}  // namespace

std::vector<Token> analyze(const AnalyzerConfig& config, FieldName field, std::string_view value) {
    std::vector<Token> out;
    run_rule(config, field, value, false, [&](std::string&& term) {
        out.push_back({std::move(term), static_cast<std::uint32_t>(out.size())});
    });
    return out;
}

std::vector<std::string> analyze_query(const AnalyzerConfig& config, FieldName field,
                                       std::string_view value) {
    std::vector<std::string> out;
    run_rule(config, field, value, true, [&](std::string&& term) { out.push_back(std::move(term)); });
    return out;
}

bool has_wildcard(std::string_view term) { return term.find('*') != std::string_view::npos; }

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (p < pattern.size() && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace factsearch
