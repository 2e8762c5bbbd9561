#include "factsearch/dump.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "factsearch/error.hpp"
#include "json.hpp"

namespace factsearch {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw MalformedRecord(line, std::string("missing key '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
    const json& v = require(obj, key, line);
    if (!v.is_string()) throw MalformedRecord(line, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

void warn_unknown_keys(const json& obj, std::initializer_list<std::string_view> known,
                       std::string_view where, std::size_t line,
                       std::vector<Diagnostic>* warnings) {
    if (!warnings) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool found = false;
        for (auto k : known) found = found || it.key() == k;
        if (!found) {
            warnings->push_back({line, "unknown key '" + it.key() + "' in " + std::string(where)});
        }
    }
}

TheoryEntity parse_entity(const json& obj, const std::string& parent, std::size_t line,
                          std::vector<Diagnostic>* warnings) {
    if (!obj.is_object()) throw MalformedRecord(line, "entity must be an object");
    warn_unknown_keys(obj, {"child_id", "kind", "name", "const_type", "uses"}, "entity", line,
                      warnings);

    TheoryEntity e;
    e.parent_id = parent;
    e.child_id = require_string(obj, "child_id", line);
    if (e.child_id.empty()) throw MalformedRecord(line, "empty child_id");
    auto kind = parse_entity_kind(require_string(obj, "kind", line));
    if (!kind) throw MalformedRecord(line, "kind must be Constant, Fact or Type");
    e.kind = *kind;
    e.name = require_string(obj, "name", line);

    if (auto it = obj.find("const_type"); it != obj.end()) {
        if (e.kind != EntityKind::Constant) {
            throw MalformedRecord(line, "const_type on non-constant entity '" + e.child_id + "'");
        }
        if (!it->is_string()) throw MalformedRecord(line, "'const_type' must be a string");
        e.constant_type = it->get<std::string>();
    }

    const json& uses = require(obj, "uses", line);
    if (!uses.is_array()) throw MalformedRecord(line, "'uses' must be an array");
    e.uses.reserve(uses.size());
    for (const auto& u : uses) {
        if (!u.is_string()) throw MalformedRecord(line, "'uses' entries must be strings");
        e.uses.push_back(u.get<std::string>());
    }
    return e;
}

}  // namespace

Block parse_record(std::string_view line, std::size_t line_no, std::vector<Diagnostic>* warnings) {
    json obj = json::parse(line.begin(), line.end(), nullptr, false);
    if (obj.is_discarded()) throw MalformedRecord(line_no, "not valid JSON");
    if (!obj.is_object()) throw MalformedRecord(line_no, "record must be an object");
    warn_unknown_keys(obj, {"id", "theory", "start_line", "command", "src", "entities"}, "record",
                      line_no, warnings);

    Block b;
    b.id = require_string(obj, "id", line_no);
    if (b.id.empty()) throw MalformedRecord(line_no, "empty id");
    b.source_theory = require_string(obj, "theory", line_no);
    const json& start = require(obj, "start_line", line_no);
    if (!start.is_number_integer()) throw MalformedRecord(line_no, "'start_line' must be an integer");
    b.start_line = start.get<std::int64_t>();
    if (b.start_line < 1) throw MalformedRecord(line_no, "'start_line' must be >= 1");
    b.command = require_string(obj, "command", line_no);
    b.source_code = require_string(obj, "src", line_no);

    const json& entities = require(obj, "entities", line_no);
    if (!entities.is_array()) throw MalformedRecord(line_no, "'entities' must be an array");
    b.entities.reserve(entities.size());
    for (const auto& e : entities) b.entities.push_back(parse_entity(e, b.id, line_no, warnings));
    return b;
}

std::string format_record(const Block& block) {
    nlohmann::ordered_json obj;
    obj["id"] = block.id;
    obj["theory"] = block.source_theory;
    obj["start_line"] = block.start_line;
    obj["command"] = block.command;
    obj["src"] = block.source_code;
    auto entities = nlohmann::ordered_json::array();
    for (const auto& e : block.entities) {
        nlohmann::ordered_json je;
        je["child_id"] = e.child_id;
        je["kind"] = to_string(e.kind);
        je["name"] = e.name;
        if (e.constant_type) je["const_type"] = *e.constant_type;
        je["uses"] = e.uses;
        entities.push_back(std::move(je));
    }
    obj["entities"] = std::move(entities);
    return obj.dump();
}

std::optional<Block> DumpReader::next() {
    while (std::getline(in_, buffer_)) {
        ++line_;
        if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
        if (buffer_.find_first_not_of(" \t") == std::string::npos) continue;
        return parse_record(buffer_, line_, &warnings_);
    }
    if (in_.bad()) throw Error(ErrorCode::Io, "read failure after line " + std::to_string(line_));
    return std::nullopt;
}

std::vector<Block> read_dump(std::istream& in, std::vector<Diagnostic>* warnings) {
    DumpReader reader(in);
    std::vector<Block> blocks;
    while (auto b = reader.next()) blocks.push_back(std::move(*b));
    if (warnings) *warnings = reader.warnings();
    return blocks;
}

std::vector<Block> read_dump_file(const std::filesystem::path& path,
                                  std::vector<Diagnostic>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_dump(in, warnings);
}

void write_dump(std::ostream& out, std::span<const Block> blocks) {
    for (const auto& b : blocks) out << format_record(b) << '\n';
}

void write_dump_file(const std::filesystem::path& path, std::span<const Block> blocks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_dump(out, blocks);
    if (!out) throw Error(ErrorCode::Io, "write failure on " + path.string());
}

// --- spans ----------------------------------------------------------------

const std::set<std::string, std::less<>>& default_command_keywords() {
    static const std::set<std::string, std::less<>> kKeywords = {
        "theory", "lemma", "theorem", "definition", "fun", "datatype", "locale", "end",
    };
    return kKeywords;
}

namespace {

bool is_ident_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string_view first_token(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && is_ident_char(static_cast<unsigned char>(line[j]))) ++j;
    return line.substr(i, j - i);
}

}  // namespace

std::vector<Span> split_spans(std::string_view source,
                              const std::set<std::string, std::less<>>& keywords) {
    std::vector<Span> spans;
    std::size_t pos = 0;
    std::int64_t line_no = 1;
    while (pos < source.size()) {
        std::size_t eol = source.find('\n', pos);
        std::size_t next = eol == std::string_view::npos ? source.size() : eol + 1;
        std::string_view line = source.substr(pos, next - pos);

        std::string_view tok = first_token(line);
        if (!tok.empty() && keywords.contains(tok)) {
            spans.push_back({line_no, std::string(tok), std::string(line)});
        } else if (spans.empty()) {
            spans.push_back({line_no, std::string(kPreambleCommand), std::string(line)});
        } else {
            spans.back().text.append(line);
        }
        pos = next;
        ++line_no;
    }
    return spans;
}

// --- validation ---------------------------------------------------------------

void CorpusValidator::add(const Block& block, std::size_t record) {
    ++report_.blocks;
    if (block.id.empty()) report_.errors.push_back({record, "empty block id"});
    if (block.start_line < 1) report_.errors.push_back({record, "start_line < 1 in block '" + block.id + "'"});
    if (auto [it, fresh] = block_ids_.emplace(block.id, record); !fresh) {
        report_.errors.push_back({record, "duplicate block id '" + block.id + "' (first at record " +
                                              std::to_string(it->second) + ")"});
    }
    for (const auto& e : block.entities) {
        switch (e.kind) {
        case EntityKind::Constant: ++report_.constants; break;
        case EntityKind::Fact: ++report_.facts; break;
        case EntityKind::Type: ++report_.types; break;
        }
        if (e.child_id.empty()) report_.errors.push_back({record, "empty child id in block '" + block.id + "'"});
        if (e.parent_id != block.id) {
            report_.errors.push_back({record, "entity '" + e.child_id + "' has parent '" + e.parent_id +
                                                  "' but lives in block '" + block.id + "'"});
        }
        if (e.constant_type && e.kind != EntityKind::Constant) {
            report_.errors.push_back({record, "constant type on non-constant '" + e.child_id + "'"});
        }
        if (auto [it, fresh] = child_ids_.emplace(e.child_id, record); !fresh) {
            report_.errors.push_back({record, "duplicate child id '" + e.child_id + "' (first at record " +
                                                  std::to_string(it->second) + ")"});
        }
        for (const auto& target : e.uses) uses_.push_back({record, e.child_id, target});
    }
}

ValidationReport CorpusValidator::finish() {
    for (const auto& [id, record] : child_ids_) {
        if (block_ids_.contains(id)) {
            report_.errors.push_back({record, "child id '" + id + "' collides with a block id"});
        }
    }
    for (const auto& u : uses_) {
        if (!child_ids_.contains(u.target)) {
            report_.warnings.push_back({u.record, "entity '" + u.from + "' uses unknown '" + u.target + "'"});
        }
    }
    auto by_record = [](const Diagnostic& a, const Diagnostic& b) {
        return a.record != b.record ? a.record < b.record : a.message < b.message;
    };
    std::stable_sort(report_.errors.begin(), report_.errors.end(), by_record);
    std::stable_sort(report_.warnings.begin(), report_.warnings.end(), by_record);
    return std::move(report_);
}

ValidationReport validate_corpus(std::span<const Block> blocks) {
    CorpusValidator v;
    for (std::size_t i = 0; i < blocks.size(); ++i) v.add(blocks[i], i + 1);
    return v.finish();
}

}  // namespace factsearch
