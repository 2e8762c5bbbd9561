// factsearch: build, inspect, query and serve theory search indexes.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"
#include "factsearch/dump.hpp"
#include "factsearch/index.hpp"
#include "factsearch/service.hpp"
#include "factsearch/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace factsearch;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

int exit_code(const Error& e) { return e.code() == ErrorCode::Io ? kIo : kData; }

ordered_json diagnostics_json(const std::vector<Diagnostic>& ds) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : ds) arr.push_back({{"record", d.record}, {"message", d.message}});
    return arr;
}

ordered_json report_json(const ValidationReport& r) {
    ordered_json j;
    j["ok"] = r.ok();
    j["blocks"] = r.blocks;
    j["entities"] = {{"Constant", r.constants}, {"Fact", r.facts}, {"Type", r.types}};
    j["errors"] = diagnostics_json(r.errors);
    j["warnings"] = diagnostics_json(r.warnings);
    return j;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return in;
}

// Streams the dump, tolerating malformed lines so that all problems are reported.
ValidationReport validate_stream(std::istream& in, IndexBuilder* builder) {
    CorpusValidator validator;
    std::vector<Diagnostic> extra_errors;
    std::vector<Diagnostic> extra_warnings;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            Block b = parse_record(line, n, &extra_warnings);
            validator.add(b, n);
            if (builder) builder->add(std::move(b));
        } catch (const MalformedRecord& e) {
            extra_errors.push_back({n, e.what()});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DuplicateId) throw;
            // reported by the validator
        }
    }
    if (in.bad()) throw Error(ErrorCode::Io, "read failure");
    ValidationReport report = validator.finish();
    report.errors.insert(report.errors.end(), extra_errors.begin(), extra_errors.end());
    report.warnings.insert(report.warnings.end(), extra_warnings.begin(), extra_warnings.end());
    auto by_record = [](const Diagnostic& a, const Diagnostic& b) { return a.record < b.record; };
    std::stable_sort(report.errors.begin(), report.errors.end(), by_record);
    std::stable_sort(report.warnings.begin(), report.warnings.end(), by_record);
    return report;
}

AnalyzerConfig analyzer_from(const std::string& symbols_file) {
    if (symbols_file.empty()) return AnalyzerConfig();
    return AnalyzerConfig(load_symbol_table(symbols_file));
}

std::string resolve_index_dir(const std::string& given) {
    if (!given.empty()) return given;
    if (const char* env = std::getenv("FACTSEARCH_INDEX"); env && *env) return env;
    throw CLI::ValidationError("indexDir", "no index directory given and FACTSEARCH_INDEX is unset");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Faceted search over formal theory corpora"};
    app.require_subcommand(1);

    std::string symbols_file;
    std::uint32_t slop = 2;
    std::size_t max_expansion = 1000;

    // index
    auto* index_cmd = app.add_subcommand("index", "Build an index directory from a dump file");
    std::string dump_file, index_dir;
    bool serial = false;
    index_cmd->add_option("dumpFile", dump_file)->required();
    index_cmd->add_option("indexDir", index_dir)->required();
    index_cmd->add_option("--symbols", symbols_file, "Symbol synonym table");
    index_cmd->add_flag("--serial", serial, "Use the single-threaded reference build");

    // query
    auto* query_cmd = app.add_subcommand("query", "Run one search request against an index");
    std::vector<std::string> query_args;
    query_cmd->add_option("args", query_args, "[indexDir] requestFile|inlineJson")->required()->expected(1, 2);
    query_cmd->add_option("--slop-default", slop);
    query_cmd->add_option("--max-expansion", max_expansion);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Serve the /v1 REST API");
    std::string serve_dir, host = "127.0.0.1", cors_origin;
    int port = kDefaultPort;
    serve_cmd->add_option("indexDir", serve_dir);
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--slop-default", slop);
    serve_cmd->add_option("--max-expansion", max_expansion);
    serve_cmd->add_option("--cors-origin", cors_origin);

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a dump file for id and reference problems");
    std::string validate_file;
    validate_cmd->add_option("dumpFile", validate_file)->required();

    // symbols
    auto* symbols_cmd = app.add_subcommand("symbols", "Symbol table utilities");
    symbols_cmd->require_subcommand(1);
    auto* export_cmd = symbols_cmd->add_subcommand("export", "Print the built-in symbol table");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dump to stdout");
    SynthOptions synth;
    gen_cmd->add_option("--blocks", synth.blocks);
    gen_cmd->add_option("--seed", synth.seed);
    gen_cmd->add_option("--theories", synth.theories);
    gen_cmd->add_option("--min-entities", synth.min_entities);
    gen_cmd->add_option("--max-entities", synth.max_entities);

    // split
    auto* split_cmd = app.add_subcommand("split", "Split a plain theory file into dump records");
    std::string theory_file, theory_name, id_prefix;
    split_cmd->add_option("theoryFile", theory_file)->required();
    split_cmd->add_option("--theory", theory_name, "Session-qualified theory name")->required();
    split_cmd->add_option("--id-prefix", id_prefix, "Prefix for generated block ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*index_cmd) {
            std::ifstream in = open_input(dump_file);
            IndexBuilder builder(analyzer_from(symbols_file));
            ValidationReport report = validate_stream(in, &builder);
            if (!report.ok()) {
                std::cerr << report_json(report).dump(2) << '\n';
                return kData;
            }
            Index index = std::move(builder).finish(serial ? Execution::Serial : Execution::Parallel);
            index.save(index_dir);
            ordered_json out;
            out["indexDir"] = index_dir;
            out["blocks"] = index.block_count();
            out["entities"] = index.entity_count();
            out["warnings"] = report.warnings.size();
            std::cout << out.dump() << '\n';
            return kOk;
        }

        if (*query_cmd) {
            std::string dir = query_args.size() == 2 ? query_args[0] : "";
            const std::string& request = query_args.back();
            dir = resolve_index_dir(dir);
            std::string body = request;
            if (fs::is_regular_file(request)) {
                std::ifstream in = open_input(request);
                std::ostringstream ss;
                ss << in.rdbuf();
                body = ss.str();
            }
            auto index = std::make_shared<const Index>(Index::load(dir));
            ServiceOptions options;
            options.query.slop = slop;
            options.query.max_expansion = max_expansion;
            SearchService service(index, options);
            HttpResult r = service.search(body);
            if (r.status != 200) {
                std::cerr << r.body << '\n';
                return kData;
            }
            std::cout << r.body << '\n';
            return kOk;
        }

        if (*serve_cmd) {
            // Handle termination signals on a dedicated thread.
            sigset_t signals;
            sigemptyset(&signals);
            sigaddset(&signals, SIGINT);
            sigaddset(&signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &signals, nullptr);

            auto index = std::make_shared<const Index>(Index::load(resolve_index_dir(serve_dir)));
            ServiceOptions options;
            options.query.slop = slop;
            options.query.max_expansion = max_expansion;
            options.cors_origin = cors_origin;
            SearchService service(index, options);
            HttpServer server(service, options);
            const int bound = server.bind(host, port);
            if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
            std::cerr << "serving " << index->block_count() << " blocks on http://" << host << ":" << bound << '\n';

            std::thread waiter([&] {
                int sig = 0;
                sigwait(&signals, &sig);
                server.stop();
            });
            server.listen();
            pthread_kill(waiter.native_handle(), SIGTERM);
            waiter.join();
            return kOk;
        }

        if (*validate_cmd) {
            std::ifstream in = open_input(validate_file);
            ValidationReport report = validate_stream(in, nullptr);
            std::cout << report_json(report).dump(2) << '\n';
            return report.ok() ? kOk : kData;
        }

        if (*export_cmd) {
            std::cout << default_symbol_table().to_text();
            return kOk;
        }

        if (*gen_cmd) {
            write_synthetic_dump(std::cout, synth);
            return kOk;
        }

        if (*split_cmd) {
            std::ifstream in = open_input(theory_file);
            std::ostringstream ss;
            ss << in.rdbuf();
            const std::string prefix = id_prefix.empty() ? theory_name + ":" : id_prefix;
            for (const Span& s : split_spans(ss.str(), default_command_keywords())) {
                Block b;
                b.id = prefix + std::to_string(s.start_line);
                b.source_theory = theory_name;
                b.start_line = s.start_line;
                b.command = s.command;
                b.source_code = s.text;
                std::cout << format_record(b) << '\n';
            }
            return kOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}
