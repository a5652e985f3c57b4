#pragma once

#include "pathpiece/pretokenize.hpp"
#include "pathpiece/rng.hpp"
#include "pathpiece/vocab.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathpiece {

class SegmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TieBreak { Longest, Random };

enum class Engine { PathPieceLongest, PathPieceRandom, Greedy, Weighted };

// CLI names: pathpiece-l | pathpiece-r | greedy | weighted.
Engine parse_engine(std::string_view name);
std::string to_string(Engine engine);

inline constexpr std::uint32_t kUnreachable = 0xFFFFFFFFu;

// Per-byte dynamic-programming state of one chunk of n bytes. Positions are
// 1-based: index i refers to the i-th byte, index 0 is the empty prefix
// (pl[0] = 0) and bpl[n + 1] = 0 is the empty suffix.
struct SegmentationTrace {
    std::size_t n = 0;
    std::vector<std::uint32_t> pl;   // shortest token count for bytes 1..i
    std::vector<std::uint32_t> wid;  // width of the chosen token ending at i
    std::vector<TokenId> tid;        // id of that token
    std::vector<std::uint32_t> sc;   // number of tokens ending at i that attain pl[i]
    std::vector<std::uint32_t> bpl;  // shortest token count for bytes i..n (backward pass)

    // vt[i]: widths >= 2 of vocabulary tokens ending at i, ascending.
    std::vector<std::uint32_t> vt_offsets;
    std::vector<std::uint32_t> vt_widths;

    bool has_valid_widths() const { return !vt_offsets.empty(); }
    bool has_backward() const { return !bpl.empty(); }

    std::span<const std::uint32_t> valid_widths(std::size_t i) const {
        return {vt_widths.data() + vt_offsets[i - 1], vt_widths.data() + vt_offsets[i]};
    }
    // Optimal token count of the whole chunk.
    std::uint32_t optimum() const { return n == 0 ? 0 : pl[n]; }
};

struct Segmentation {
    std::vector<TokenId> tokens;

    std::size_t size() const { return tokens.size(); }
    std::string concat(const Vocabulary& vocab) const;
};

// Forward shortest-path pass over `chunk`. LONGEST updates wid on
// `candidate <= pl[e]` while scanning widths ascending (longest tie wins);
// RANDOM updates on `<` and keeps a uniform reservoir choice among ties,
// drawing from `rng`. sc[] is filled either way. `max_width` 0 means the
// vocabulary's L. Throws SegmentError if some byte cannot be reached.
void pathpiece_forward(std::string_view chunk, const Vocabulary& vocab, TieBreak tiebreak,
                       Rng* rng, SegmentationTrace& trace, bool record_valid_widths = true,
                       std::size_t max_width = 0);
SegmentationTrace pathpiece_forward(std::string_view chunk, const Vocabulary& vocab,
                                    TieBreak tiebreak = TieBreak::Longest, Rng* rng = nullptr,
                                    std::size_t max_width = 0);

// Fills trace.bpl (size n + 2). bpl[i] is the fewest tokens covering bytes
// i..n; bpl[1] equals pl[n].
void pathpiece_backward(std::string_view chunk, const Vocabulary& vocab, SegmentationTrace& trace,
                        std::size_t max_width = 0);
std::vector<std::uint32_t> pathpiece_backward(std::string_view chunk, const Vocabulary& vocab,
                                              std::size_t max_width = 0);

// Follows wid[] back from the chunk end. The result has pl[n] tokens.
Segmentation decode_path(const SegmentationTrace& trace);
void decode_path(const SegmentationTrace& trace, std::vector<TokenId>& out);

// Repeatedly takes the longest vocabulary token that prefixes the rest.
Segmentation greedy_segment(std::string_view chunk, const Vocabulary& vocab,
                            std::size_t max_width = 0);

// Per-token costs for the weighted engine, checked once: every entry must be
// finite and > 0 and there must be one per token.
class TokenWeights {
public:
    TokenWeights(std::vector<double> weights, const Vocabulary& vocab);

    // -log p(t) from a unigram probability table.
    static TokenWeights from_probabilities(std::span<const double> probs, const Vocabulary& vocab);
    // Uniform cost 1 for every token.
    static TokenWeights uniform(const Vocabulary& vocab);

    double operator[](TokenId id) const { return weights_[id]; }
    std::span<const double> values() const { return weights_; }

private:
    std::vector<double> weights_;
};

// Minimum total-weight segmentation. Equal-cost ties go to the longest last
// token.
Segmentation weighted_shortest_path(std::string_view chunk, const Vocabulary& vocab,
                                    const TokenWeights& weights, std::size_t max_width = 0);

struct SegmenterOptions {
    Engine engine = Engine::PathPieceLongest;
    PreTokenMode mode = PreTokenMode::none();
    std::uint64_t seed = 0;  // global seed for PathPieceRandom
    std::shared_ptr<const TokenWeights> weights;  // required for Weighted
};

// Reusable per-thread segmenter: owns the DP buffers, which grow to the
// largest chunk seen and are then reused. Not thread-safe; create one per
// worker. The vocabulary must outlive it.
class Segmenter {
public:
    Segmenter(const Vocabulary& vocab, SegmenterOptions options);

    // Appends the tokens of one document. `ordinal` seeds PathPieceRandom.
    void segment(std::string_view document, std::uint64_t ordinal, std::vector<TokenId>& out);
    Segmentation segment(std::string_view document, std::uint64_t ordinal = 0);
    // Token count K_d without materializing the token list.
    std::uint64_t count(std::string_view document, std::uint64_t ordinal = 0);

    const Vocabulary& vocab() const { return *vocab_; }
    const SegmenterOptions& options() const { return options_; }

private:
    void segment_chunk(std::string_view chunk, std::vector<TokenId>& out);
    std::uint64_t count_chunk(std::string_view chunk);

    const Vocabulary* vocab_;
    SegmenterOptions options_;
    Rng rng_;
    SegmentationTrace trace_;
    std::vector<double> cost_;
    std::vector<TokenId> scratch_;
};

// Chunks `document` and segments each chunk independently.
Segmentation segment_document(std::string_view document, const Vocabulary& vocab,
                              const SegmenterOptions& options, std::uint64_t ordinal = 0);

} // namespace pathpiece
