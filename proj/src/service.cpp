#include "factsearch/service.hpp"

#include <thread>

#include "factsearch/dump.hpp"
#include "httplib.h"

namespace factsearch {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_request(const std::string& message) { throw Error(ErrorCode::BadRequest, message); }

FieldName parse_field(const json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end() || !it->is_string()) bad_request(std::string("missing string '") + key + "'");
    auto f = parse_field_name(it->get<std::string>());
    if (!f) bad_request("unknown field '" + it->get<std::string>() + "'");
    return *f;
}

std::vector<Clause> parse_clauses(const json& node) {
    if (!node.is_array()) bad_request("clauses must be an array");
    std::vector<Clause> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        try {
            const json& c = node[i];
            if (!c.is_object()) bad_request("clause must be an object");
            auto f = c.find("filter");
            if (f == c.end()) bad_request("missing 'filter'");
            out.push_back({parse_field(c, "field"), parse_filter(*f)});
        } catch (const Error& e) {
            throw Error(e.code(), "clause " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

std::int64_t parse_int(const json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end() || !it->is_number_integer()) bad_request(std::string("missing integer '") + key + "'");
    return it->get<std::int64_t>();
}

json clauses_to_json(const std::vector<Clause>& clauses) {
    json out = json::array();
    for (const auto& c : clauses) out.push_back({{"field", to_string(c.field)}, {"filter", filter_to_json(c.filter)}});
    return out;
}

ordered_json entity_summary(const TheoryEntity& e) {
    ordered_json j;
    j["childId"] = e.child_id;
    j["kind"] = to_string(e.kind);
    j["name"] = e.name;
    if (e.constant_type) j["constType"] = *e.constant_type;
    return j;
}

std::string error_body(int status, const std::string& message) {
    ordered_json j;
    j["status"] = status;
    j["error"] = message;
    return j.dump();
}

}  // namespace

Filter parse_filter(const json& node) {
    if (!node.is_object()) bad_request("filter must be an object");
    auto type_it = node.find("type");
    if (type_it == node.end() || !type_it->is_string()) bad_request("filter lacks a 'type'");
    const std::string type = type_it->get<std::string>();

    auto string_value = [&] {
        auto it = node.find("value");
        if (it == node.end() || !it->is_string()) bad_request(type + " filter needs a string 'value'");
        return it->get<std::string>();
    };
    auto filter_list = [&] {
        auto it = node.find("filters");
        if (it == node.end() || !it->is_array() || it->empty()) {
            bad_request(type + " filter needs a non-empty 'filters' array");
        }
        std::vector<Filter> out;
        for (const auto& f : *it) out.push_back(parse_filter(f));
        return out;
    };

    if (type == "Term") return Filter::term(string_value());
    if (type == "Exact") return Filter::exact(string_value());
    if (type == "InRange") return Filter::in_range(parse_int(node, "lo"), parse_int(node, "hi"));
    if (type == "Not") {
        auto it = node.find("filter");
        if (it == node.end()) bad_request("Not filter needs 'filter'");
        return Filter::negate(parse_filter(*it));
    }
    if (type == "And") return Filter::all_of(filter_list());
    if (type == "Or") return Filter::any_of(filter_list());
    if (type == "InResult") {
        auto it = node.find("subQuery");
        if (it == node.end()) bad_request("InResult filter needs 'subQuery'");
        return Filter::in_result(parse_field(node, "extractField"), parse_clauses(*it));
    }
    bad_request("unknown filter type '" + type + "'");
}

json filter_to_json(const Filter& filter) {
    struct Visitor {
        json operator()(const TermFilter& f) const { return {{"type", "Term"}, {"value", f.query}}; }
        json operator()(const ExactFilter& f) const { return {{"type", "Exact"}, {"value", f.phrase}}; }
        json operator()(const InRangeFilter& f) const { return {{"type", "InRange"}, {"lo", f.lo}, {"hi", f.hi}}; }
        json operator()(const NotFilter& f) const { return {{"type", "Not"}, {"filter", filter_to_json(*f.inner)}}; }
        json operator()(const AndFilter& f) const { return list("And", f.filters); }
        json operator()(const OrFilter& f) const { return list("Or", f.filters); }
        json operator()(const InResultFilter& f) const {
            return {{"type", "InResult"},
                    {"extractField", to_string(f.extract_field)},
                    {"subQuery", clauses_to_json(f.sub_query)}};
        }
        static json list(const char* type, const std::vector<Filter>& fs) {
            json arr = json::array();
            for (const auto& f : fs) arr.push_back(filter_to_json(f));
            return {{"type", type}, {"filters", std::move(arr)}};
        }
    };
    return std::visit(Visitor{}, filter.node);
}

SearchRequest parse_search_request(const json& body) {
    if (!body.is_object()) bad_request("request body must be an object");
    SearchRequest r;
    if (auto it = body.find("clauses"); it != body.end()) r.query.clauses = parse_clauses(*it);
    if (auto it = body.find("facetFields"); it != body.end()) {
        if (!it->is_array()) bad_request("facetFields must be an array");
        for (const auto& f : *it) {
            if (!f.is_string()) bad_request("facetFields entries must be strings");
            auto name = parse_field_name(f.get<std::string>());
            if (!name) bad_request("unknown facet field '" + f.get<std::string>() + "'");
            r.facet_fields.push_back(*name);
        }
    }
    auto non_negative = [&](const char* key, std::size_t fallback) -> std::size_t {
        auto it = body.find(key);
        if (it == body.end()) return fallback;
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
            bad_request(std::string("'") + key + "' must be a non-negative integer");
        }
        return it->get<std::size_t>();
    };
    r.offset = non_negative("offset", 0);
    r.limit = non_negative("limit", r.limit);
    if (body.contains("slop")) r.slop = static_cast<std::uint32_t>(non_negative("slop", 0));
    return r;
}

json request_to_json(const SearchRequest& request) {
    json facets = json::array();
    for (auto f : request.facet_fields) facets.push_back(to_string(f));
    json j = {{"clauses", clauses_to_json(request.query.clauses)},
              {"facetFields", facets},
              {"offset", request.offset},
              {"limit", request.limit}};
    if (request.slop) j["slop"] = *request.slop;
    return j;
}

ordered_json block_to_json(const Block& block) { return ordered_json::parse(format_record(block)); }

ordered_json response_to_json(const Index& index, const ResultPage& page) {
    ordered_json j;
    j["total"] = page.total;
    j["offset"] = page.offset;
    j["limit"] = page.limit;
    ordered_json results = ordered_json::array();
    for (const auto& r : page.results) {
        const Block& b = index.block(r.block);
        ordered_json item;
        item["blockId"] = b.id;
        item["score"] = r.score;
        item["theory"] = b.source_theory;
        item["startLine"] = b.start_line;
        item["command"] = b.command;
        item["sourceCode"] = b.source_code;
        ordered_json entities = ordered_json::array();
        for (const auto& e : b.entities) entities.push_back(entity_summary(e));
        item["entities"] = std::move(entities);
        ordered_json matched = ordered_json::array();
        for (DocOrdinal e : r.matched_entities) matched.push_back(index.entity(e).child_id);
        item["matchedEntityIds"] = std::move(matched);
        results.push_back(std::move(item));
    }
    j["results"] = std::move(results);
    ordered_json facets = ordered_json::object();
    for (const auto& [field, facet] : page.facets) {
        ordered_json values = ordered_json::array();
        for (const auto& v : facet.values) values.push_back({{"value", v.value}, {"count", v.count}});
        facets[std::string(to_string(field))] = {{"values", std::move(values)}, {"truncated", facet.truncated}};
    }
    j["facets"] = std::move(facets);
    return j;
}

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::IncompatibleFieldFilter:
    case ErrorCode::InvalidFilter:
    case ErrorCode::InvalidRange:
    case ErrorCode::LimitOutOfRange:
    case ErrorCode::NotFacetable:
    case ErrorCode::NotNumeric:
    case ErrorCode::EmptyRange:
    case ErrorCode::NumericFieldNotAnalyzable:
        return 400;
    case ErrorCode::ExpansionOverflow:
        return 422;
    default:
        return 500;
    }
}

// --- handlers ---------------------------------------------------------------------

SearchService::SearchService(std::shared_ptr<const Index> index, ServiceOptions options)
    : index_(std::move(index)), options_(std::move(options)) {}

HttpResult SearchService::search(std::string_view body) const {
    if (!index_) return {503, error_body(503, "index not loaded")};
    try {
        json parsed = json::parse(body.begin(), body.end(), nullptr, false);
        if (parsed.is_discarded()) bad_request("request body is not valid JSON");
        SearchRequest req = parse_search_request(parsed);
        QueryOptions qo = options_.query;
        if (req.slop) qo.slop = *req.slop;
        Searcher searcher(*index_, qo);
        ResultPage page = searcher.run(req.query, req.facet_fields, req.offset, req.limit, options_.facet_values);
        return {200, response_to_json(*index_, page).dump()};
    } catch (const Error& e) {
        const int status = http_status(e.code());
        return {status, error_body(status, e.what())};
    }
}

HttpResult SearchService::get_block(std::string_view id) const {
    if (!index_) return {503, error_body(503, "index not loaded")};
    auto doc = index_->find_block(id);
    if (!doc) return {404, error_body(404, "no block '" + std::string(id) + "'")};
    return {200, block_to_json(index_->block(*doc)).dump()};
}

HttpResult SearchService::get_entity(std::string_view child_id) const {
    if (!index_) return {503, error_body(503, "index not loaded")};
    auto doc = index_->find_entity(child_id);
    if (!doc) return {404, error_body(404, "no entity '" + std::string(child_id) + "'")};
    const TheoryEntity& e = index_->entity(*doc);
    ordered_json j = entity_summary(e);
    j["parentId"] = index_->block(index_->parent(*doc)).id;
    j["uses"] = e.uses;
    ordered_json used_by = ordered_json::array();
    for (DocOrdinal user : index_->postings_exact(FieldName::Uses, e.child_id).docs()) {
        used_by.push_back(index_->entity(user).child_id);
    }
    j["usedBy"] = std::move(used_by);
    return {200, j.dump()};
}

// --- HTTP -------------------------------------------------------------------------

struct HttpServer::Impl {
    httplib::Server server;
    std::thread thread;
};

HttpServer::HttpServer(const SearchService& service, const ServiceOptions& options)
    : impl_(std::make_unique<Impl>()) {
    auto& srv = impl_->server;
    auto reply = [](httplib::Response& res, const HttpResult& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json; charset=utf-8");
    };
    srv.Post("/v1/search", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.search(req.body));
    });
    srv.Get(R"(/v1/blocks/(.+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.get_block(req.matches[1].str()));
    });
    srv.Get(R"(/v1/entities/(.+))", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.get_entity(req.matches[1].str()));
    });
    if (!options.cors_origin.empty()) {
        const std::string origin = options.cors_origin;
        srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        });
        srv.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    if (port == 0) {
        port_ = srv.bind_to_any_port(host);
    } else {
        port_ = srv.bind_to_port(host, port) ? port : -1;
    }
    return port_;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::start() {
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace factsearch
