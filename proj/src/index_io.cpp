#include <chrono>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "factsearch/error.hpp"
#include "factsearch/index.hpp"
#include "json.hpp"

namespace factsearch {

namespace {

namespace fs = std::filesystem;

constexpr std::uint32_t kSegmentMagic = 0x58495346;  // "FSIX"
constexpr std::string_view kManifestMagic = "factsearch-index";

enum class Section : std::uint32_t { Docs = 1, Postings = 2, Numeric = 3, Join = 4 };

class ByteWriter {
public:
    explicit ByteWriter(Section section) {
        u32(kSegmentMagic);
        u32(kIndexFormatVersion);
        u32(static_cast<std::uint32_t>(section));
    }

    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u64(s.size());
        buf_.append(s);
    }
    template <typename T>
    void u32s(const std::vector<T>& v) {
        u64(v.size());
        for (auto x : v) u32(static_cast<std::uint32_t>(x));
    }
    void u64s(const std::vector<std::uint64_t>& v) {
        u64(v.size());
        for (auto x : v) u64(x);
    }

    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string bytes, std::string file, Section section)
        : buf_(std::move(bytes)), file_(std::move(file)) {
        if (u32() != kSegmentMagic) fail("bad magic");
        if (auto v = u32(); v != kIndexFormatVersion) {
            throw Error(ErrorCode::VersionMismatch, file_ + ": format version " + std::to_string(v) +
                                                        ", expected " + std::to_string(kIndexFormatVersion));
        }
        if (u32() != static_cast<std::uint32_t>(section)) fail("wrong section type");
    }

    [[noreturn]] void fail(const std::string& reason) const {
        throw Error(ErrorCode::CorruptSegment, file_ + ": " + reason);
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    std::string str() {
        auto n = count(1);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::vector<std::uint32_t> u32s() {
        auto n = count(4);
        std::vector<std::uint32_t> v(n);
        for (auto& x : v) x = u32();
        return v;
    }
    std::vector<std::uint64_t> u64s() {
        auto n = count(8);
        std::vector<std::uint64_t> v(n);
        for (auto& x : v) x = u64();
        return v;
    }
    // Element count, checked against the remaining bytes.
    std::size_t count(std::size_t elem_size) {
        auto n = u64();
        if (n > (buf_.size() - pos_) / elem_size) fail("length field exceeds segment size");
        return static_cast<std::size_t>(n);
    }
    void expect_end() const {
        if (pos_ != buf_.size()) fail("trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (buf_.size() - pos_ < n) fail("truncated");
    }

    std::string buf_;
    std::string file_;
    std::size_t pos_ = 0;
};

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failure on " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::CorruptSegment, "missing segment " + path.filename().string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string postings_file(FieldName f) { return "postings." + std::string(to_string(f)) + ".bin"; }

std::string encode_docs(const detail::IndexData& d) {
    ByteWriter w(Section::Docs);
    w.u64(d.blocks.size());
    for (const auto& b : d.blocks) {
        w.str(b.id);
        w.str(b.source_theory);
        w.i64(b.start_line);
        w.str(b.command);
        w.str(b.source_code);
        w.u64(b.entities.size());
        for (const auto& e : b.entities) {
            w.str(e.child_id);
            w.u8(static_cast<std::uint8_t>(e.kind));
            w.str(e.name);
            w.u8(e.constant_type ? 1 : 0);
            if (e.constant_type) w.str(*e.constant_type);
            w.u64(e.uses.size());
            for (const auto& u : e.uses) w.str(u);
        }
    }
    return w.bytes();
}

std::string encode_postings(const FieldPostings& p) {
    ByteWriter w(Section::Postings);
    w.u64(p.terms.size());
    for (const auto& t : p.terms) w.str(t);
    w.u64s(p.term_start);
    w.u32s(p.docs);
    w.u64s(p.pos_start);
    w.u32s(p.positions);
    return w.bytes();
}

std::string encode_numeric(const NumericColumn& c) {
    ByteWriter w(Section::Numeric);
    w.u64(c.entries.size());
    for (const auto& [value, doc] : c.entries) {
        w.i64(value);
        w.u32(doc);
    }
    return w.bytes();
}

std::string encode_join(const JoinMap& j) {
    ByteWriter w(Section::Join);
    w.u32s(j.parent);
    w.u32s(j.child_begin);
    w.u32s(j.child_end);
    return w.bytes();
}

std::vector<Block> decode_docs(ByteReader r) {
    std::vector<Block> blocks(r.count(1));
    for (auto& b : blocks) {
        b.id = r.str();
        b.source_theory = r.str();
        b.start_line = r.i64();
        b.command = r.str();
        b.source_code = r.str();
        b.entities.resize(r.count(1));
        for (auto& e : b.entities) {
            e.child_id = r.str();
            e.parent_id = b.id;
            auto kind = r.u8();
            if (kind > 2) r.fail("bad entity kind");
            e.kind = static_cast<EntityKind>(kind);
            e.name = r.str();
            if (r.u8()) e.constant_type = r.str();
            e.uses.resize(r.count(1));
            for (auto& u : e.uses) u = r.str();
        }
    }
    r.expect_end();
    return blocks;
}

FieldPostings decode_postings(ByteReader r, DocClass cls, const std::vector<DocRef>& docs) {
    FieldPostings p;
    p.terms.resize(r.count(1));
    for (auto& t : p.terms) t = r.str();
    p.term_start = r.u64s();
    p.docs = r.u32s();
    p.pos_start = r.u64s();
    p.positions = r.u32s();
    r.expect_end();

    if (p.term_start.size() != p.terms.size() + 1 || p.term_start.front() != 0 ||
        p.term_start.back() != p.docs.size() || p.pos_start.size() != p.docs.size() + 1 ||
        p.pos_start.front() != 0 || p.pos_start.back() != p.positions.size()) {
        r.fail("inconsistent offsets");
    }
    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        if (t && !(p.terms[t - 1] < p.terms[t])) r.fail("term dictionary not sorted");
        if (p.term_start[t] > p.term_start[t + 1]) r.fail("inconsistent offsets");
        for (auto i = p.term_start[t]; i < p.term_start[t + 1]; ++i) {
            if (p.docs[i] >= docs.size() || docs[p.docs[i]].cls != cls) r.fail("posting references unknown doc");
            if (i > p.term_start[t] && p.docs[i - 1] >= p.docs[i]) r.fail("posting list not sorted");
            if (p.pos_start[i] >= p.pos_start[i + 1]) r.fail("posting without positions");
        }
    }
    return p;
}

}  // namespace

void Index::save(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::pair<std::string, std::string>> segments;
    segments.emplace_back("docs.bin", encode_docs(data_));
    for (FieldName f : kAllFields) {
        if (field_class(f) == FieldClass::Numeric) continue;
        segments.emplace_back(postings_file(f), encode_postings(data_.postings[field_index(f)]));
    }
    segments.emplace_back("numeric.StartLine.bin", encode_numeric(data_.start_line));
    segments.emplace_back("join.bin", encode_join(data_.join));

    nlohmann::json manifest;
    manifest["magic"] = kManifestMagic;
    manifest["format_version"] = kIndexFormatVersion;
    manifest["created"] = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
    manifest["analyzer_fingerprint"] = hex64(analyzer().fingerprint());
    manifest["symbols"] = analyzer().symbols().to_text();
    manifest["doc_count"] = doc_count();
    manifest["block_count"] = block_count();
    manifest["entity_count"] = entity_count();
    for (const auto& [name, bytes] : segments) {
        write_file(dir / name, bytes);
        manifest["segments"][name] = {{"size", bytes.size()}, {"checksum", hex64(fnv1a64(bytes))}};
    }
    write_file(dir / "manifest", manifest.dump(2) + "\n");
}

Index Index::load(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "no index directory at " + dir.string());
    if (!fs::exists(dir / "manifest")) throw Error(ErrorCode::CorruptSegment, "manifest missing in " + dir.string());

    nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest"), nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object() || manifest.value("magic", "") != kManifestMagic) {
        throw Error(ErrorCode::CorruptSegment, "manifest: not an index manifest");
    }
    if (!manifest.contains("format_version") || !manifest["format_version"].is_number_unsigned()) {
        throw Error(ErrorCode::CorruptSegment, "manifest: missing format_version");
    }
    if (auto v = manifest["format_version"].get<std::uint32_t>(); v != kIndexFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, "index format version " + std::to_string(v) + ", expected " +
                                                    std::to_string(kIndexFormatVersion));
    }

    auto segment = [&](const std::string& name, Section section) {
        std::string bytes = read_file(dir / name);
        const auto& seg = manifest["segments"];
        if (!seg.is_object() || !seg.contains(name)) throw Error(ErrorCode::CorruptSegment, "manifest lacks " + name);
        if (seg[name].value("size", std::uint64_t{0}) != bytes.size() ||
            seg[name].value("checksum", std::string{}) != hex64(fnv1a64(bytes))) {
            throw Error(ErrorCode::CorruptSegment, name + ": checksum mismatch");
        }
        return ByteReader(std::move(bytes), name, section);
    };

    detail::IndexData data;
    try {
        std::istringstream symbols(manifest.value("symbols", std::string{}));
        data.analyzer = AnalyzerConfig(parse_symbol_table(symbols));
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptSegment, std::string("manifest: bad symbol table: ") + e.what());
    }
    if (hex64(data.analyzer.fingerprint()) != manifest.value("analyzer_fingerprint", std::string{})) {
        throw Error(ErrorCode::CorruptSegment, "manifest: analyzer fingerprint mismatch");
    }

    data.blocks = decode_docs(segment("docs.bin", Section::Docs));
    for (std::uint32_t b = 0; b < data.blocks.size(); ++b) {
        data.docs.push_back({DocClass::Block, b, 0});
        for (std::uint32_t e = 0; e < data.blocks[b].entities.size(); ++e) {
            data.docs.push_back({DocClass::Entity, b, e});
        }
    }
    if (manifest.value("doc_count", std::uint64_t{0}) != data.docs.size() ||
        manifest.value("block_count", std::uint64_t{0}) != data.blocks.size()) {
        throw Error(ErrorCode::CorruptSegment, "docs.bin: document count disagrees with manifest");
    }

    for (FieldName f : kAllFields) {
        if (field_class(f) == FieldClass::Numeric) continue;
        data.postings[field_index(f)] =
            decode_postings(segment(postings_file(f), Section::Postings), factsearch::doc_class(f), data.docs);
    }

    {
        ByteReader r = segment("numeric.StartLine.bin", Section::Numeric);
        data.start_line.entries.resize(r.count(12));
        for (auto& [value, doc] : data.start_line.entries) {
            value = r.i64();
            doc = r.u32();
            if (doc >= data.docs.size() || data.docs[doc].cls != DocClass::Block ||
                data.blocks[data.docs[doc].block].start_line != value) {
                r.fail("numeric entry disagrees with doc store");
            }
        }
        r.expect_end();
        if (data.start_line.entries.size() != data.blocks.size()) r.fail("numeric entry count");
    }

    {
        ByteReader r = segment("join.bin", Section::Join);
        data.join.parent = r.u32s();
        data.join.child_begin = r.u32s();
        data.join.child_end = r.u32s();
        r.expect_end();
        const std::size_t n = data.docs.size();
        if (data.join.parent.size() != n || data.join.child_begin.size() != n || data.join.child_end.size() != n) {
            r.fail("join map size");
        }
        DocOrdinal current_block = 0;
        for (DocOrdinal d = 0; d < n; ++d) {
            if (data.docs[d].cls == DocClass::Block) {
                current_block = d;
                const auto expect_end = d + 1 + data.blocks[data.docs[d].block].entities.size();
                if (data.join.child_begin[d] != d + 1 || data.join.child_end[d] != expect_end) {
                    r.fail("join map child range");
                }
            }
            if (data.join.parent[d] != current_block) r.fail("join map parent");
        }
    }

    return Index(std::move(data));
}

}  // namespace factsearch
