#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "factsearch/model.hpp"

namespace factsearch {

struct SynthOptions {
    std::size_t blocks = 1000;
    std::size_t min_entities = 1;  // per block, uniform in [min, max]
    std::size_t max_entities = 5;
    std::size_t theories = 40;
    std::size_t vocabulary = 2000;  // synthetic filler words on top of the fixed lexicon
    double markup_rate = 0.2;       // fraction of blocks whose source carries HTML tags
    double dangling_rate = 0.0;     // fraction of uses pointing at unknown ids
    std::uint64_t seed = 1;
};

/// Deterministic generator of theory-like blocks: formulas mixing the
/// fixed lexicon, symbol aliases and Zipf-distributed filler words.
class SynthGenerator {
public:
    explicit SynthGenerator(SynthOptions options);

    bool done() const { return produced_ >= options_.blocks; }
    Block next();

    /// Words a query generator can draw from to hit indexed terms.
    static const std::vector<std::string>& lexicon();
    static const std::vector<std::string>& constant_types();
    static const std::vector<std::string>& theory_names();

private:
    std::string word();
    std::string formula(std::size_t tokens);

    SynthOptions options_;
    std::mt19937_64 rng_;
    std::vector<double> zipf_cdf_;
    std::size_t produced_ = 0;
    std::size_t next_entity_ = 0;
    std::vector<std::int64_t> theory_line_;
};

std::vector<Block> generate_corpus(const SynthOptions& options);

/// Streams a corpus straight into dump format without holding it in memory.
std::size_t write_synthetic_dump(std::ostream& out, const SynthOptions& options);

}  // namespace factsearch
