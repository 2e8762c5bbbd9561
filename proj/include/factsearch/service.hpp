#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factsearch/error.hpp"
#include "factsearch/index.hpp"
#include "factsearch/query.hpp"
#include "json.hpp"

namespace factsearch {

inline constexpr int kDefaultPort = 8600;

struct ServiceOptions {
    QueryOptions query;
    std::size_t facet_values = kDefaultFacetValues;
    std::string cors_origin;  // empty disables CORS headers
};

struct SearchRequest {
    FieldQuery query;
    std::vector<FieldName> facet_fields;
    std::size_t offset = 0;
    std::size_t limit = 20;
    std::optional<std::uint32_t> slop;
};

// --- wire codec ---------------------------------------------------------------
//
// Filters travel as tagged objects:
//   {"type":"Term","value":"prime"}          {"type":"Exact","value":"prime p"}
//   {"type":"InRange","lo":1,"hi":9}         {"type":"Not","filter":{...}}
//   {"type":"And"|"Or","filters":[...]}
//   {"type":"InResult","extractField":"ChildId","subQuery":[{"field":..,"filter":..}]}

/// Throws Error(BadRequest) naming the offending clause.
SearchRequest parse_search_request(const nlohmann::json& body);
Filter parse_filter(const nlohmann::json& node);
nlohmann::json filter_to_json(const Filter& filter);
nlohmann::json request_to_json(const SearchRequest& request);

nlohmann::ordered_json block_to_json(const Block& block);
nlohmann::ordered_json response_to_json(const Index& index, const ResultPage& page);

/// HTTP status for a library error.
int http_status(ErrorCode code);

struct HttpResult {
    int status = 200;
    std::string body;
};

/// Transport-independent request handlers. Both the HTTP server and the
/// `query` CLI go through these, so their bodies are byte-identical.
class SearchService {
public:
    SearchService(std::shared_ptr<const Index> index, ServiceOptions options = {});

    HttpResult search(std::string_view body) const;
    HttpResult get_block(std::string_view id) const;
    HttpResult get_entity(std::string_view child_id) const;

    const ServiceOptions& options() const { return options_; }

private:
    std::shared_ptr<const Index> index_;
    ServiceOptions options_;
};

/// /v1 REST endpoints over cpp-httplib.
class HttpServer {
public:
    HttpServer(const SearchService& service, const ServiceOptions& options);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); blocks.
    bool listen();
    /// Runs listen() on a background thread and waits until it accepts.
    void start();
    /// Stops accepting and lets in-flight requests finish.
    void stop();

    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = -1;
};

}  // namespace factsearch
