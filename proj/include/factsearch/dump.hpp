#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "factsearch/model.hpp"

namespace factsearch {

struct Diagnostic {
    std::size_t record = 0;  // 1-based line / record index
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

/// Parses one dump line. Unknown keys are reported through `warnings`.
Block parse_record(std::string_view line, std::size_t line_no,
                   std::vector<Diagnostic>* warnings = nullptr);

/// Single-line encoding of a block (no trailing newline).
std::string format_record(const Block& block);

/// Streams blocks out of a line-delimited dump, one record at a time.
/// Blank lines are skipped.
class DumpReader {
public:
    explicit DumpReader(std::istream& in) : in_(in) {}

    std::optional<Block> next();

    std::size_t line() const { return line_; }
    const std::vector<Diagnostic>& warnings() const { return warnings_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::string buffer_;
    std::vector<Diagnostic> warnings_;
};

std::vector<Block> read_dump(std::istream& in, std::vector<Diagnostic>* warnings = nullptr);
std::vector<Block> read_dump_file(const std::filesystem::path& path,
                                  std::vector<Diagnostic>* warnings = nullptr);

void write_dump(std::ostream& out, std::span<const Block> blocks);
void write_dump_file(const std::filesystem::path& path, std::span<const Block> blocks);

// --- raw theory text ----------------------------------------------------

struct Span {
    std::int64_t start_line = 1;
    std::string command;
    std::string text;

    bool operator==(const Span&) const = default;
};

inline constexpr std::string_view kPreambleCommand = "<preamble>";

const std::set<std::string, std::less<>>& default_command_keywords();

/// Partitions `source` into command spans. A span starts at every line whose
/// first identifier token is a keyword; text before the first keyword line is
/// a "<preamble>" span. Concatenating the span texts gives back `source`.
std::vector<Span> split_spans(std::string_view source,
                              const std::set<std::string, std::less<>>& keywords);

// --- validation ---------------------------------------------------------

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;
    std::size_t blocks = 0;
    std::size_t constants = 0;
    std::size_t facts = 0;
    std::size_t types = 0;

    bool ok() const { return errors.empty(); }
    std::size_t entities() const { return constants + facts + types; }
};

/// Incremental validator so that `validate` can run over a streamed dump.
class CorpusValidator {
public:
    void add(const Block& block, std::size_t record);
    ValidationReport finish();

private:
    struct PendingUse {
        std::size_t record;
        std::string from;
        std::string target;
    };

    ValidationReport report_;
    std::unordered_map<std::string, std::size_t> block_ids_;
    std::unordered_map<std::string, std::size_t> child_ids_;
    std::vector<PendingUse> uses_;
};

ValidationReport validate_corpus(std::span<const Block> blocks);

}  // namespace factsearch
