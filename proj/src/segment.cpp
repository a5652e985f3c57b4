#include "pathpiece/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pathpiece {

namespace {

[[noreturn]] void throw_unreachable(std::string_view chunk, std::size_t offset) {
    throw SegmentError("byte " + to_hex(chunk.substr(offset, 1)) + " at chunk offset " +
                       std::to_string(offset) +
                       " is not covered by the vocabulary (missing single-byte token?)");
}

} // namespace

Engine parse_engine(std::string_view name) {
    if (name == "pathpiece-l") return Engine::PathPieceLongest;
    if (name == "pathpiece-r") return Engine::PathPieceRandom;
    if (name == "greedy") return Engine::Greedy;
    if (name == "weighted") return Engine::Weighted;
    throw std::invalid_argument("unknown engine '" + std::string(name) +
                                "' (expected pathpiece-l|pathpiece-r|greedy|weighted)");
}

std::string to_string(Engine engine) {
    switch (engine) {
    case Engine::PathPieceLongest: return "pathpiece-l";
    case Engine::PathPieceRandom: return "pathpiece-r";
    case Engine::Greedy: return "greedy";
    case Engine::Weighted: return "weighted";
    }
    return "unknown";
}

std::string Segmentation::concat(const Vocabulary& vocab) const {
    std::string out;
    for (TokenId id : tokens) {
        out += vocab.token(id);
    }
    return out;
}

namespace {

// Hot loop, specialized on tie-break and on whether vt is recorded. pl[0] = 0
// makes tokens starting at byte 1 cost 1 like any other; an unreachable
// predecessor cannot occur because that position would already have thrown.
template <bool Longest, bool RecordVt>
void forward_pass(std::string_view chunk, const Vocabulary& vocab, Rng* rng, SegmentationTrace& trace,
                  std::size_t max_width) {
    const std::size_t n = chunk.size();
    std::uint32_t* pl = trace.pl.data();
    std::uint32_t* wid = trace.wid.data();
    TokenId* tid = trace.tid.data();
    std::uint32_t* sc = trace.sc.data();
    for (std::size_t e = 1; e <= n; ++e) {
        std::uint32_t best = kUnreachable;
        std::uint32_t best_w = 0;
        TokenId best_id = kNoToken;
        std::uint32_t count = 0;
        vocab.for_each_ending_at(
            chunk, e,
            [&](std::size_t w, TokenId id) {
                if constexpr (RecordVt) {
                    if (w >= 2) trace.vt_widths.push_back(static_cast<std::uint32_t>(w));
                }
                const std::uint32_t nl = pl[e - w] + 1;
                if (nl < best) {
                    best = nl;
                    best_w = static_cast<std::uint32_t>(w);
                    best_id = id;
                    count = 1;
                } else if (nl == best) {
                    ++count;
                    if (Longest || rng->below(count) == 0) {
                        best_w = static_cast<std::uint32_t>(w);
                        best_id = id;
                    }
                }
            },
            max_width);
        if (best == kUnreachable) {
            throw_unreachable(chunk, e - 1);
        }
        pl[e] = best;
        wid[e] = best_w;
        tid[e] = best_id;
        sc[e] = count;
        if constexpr (RecordVt) {
            trace.vt_offsets[e] = static_cast<std::uint32_t>(trace.vt_widths.size());
        }
    }
}

} // namespace

void pathpiece_forward(std::string_view chunk, const Vocabulary& vocab, TieBreak tiebreak,
                       Rng* rng, SegmentationTrace& trace, bool record_valid_widths,
                       std::size_t max_width) {
    if (tiebreak == TieBreak::Random && rng == nullptr) {
        throw std::invalid_argument("random tie-breaking needs an Rng");
    }
    const std::size_t n = chunk.size();
    trace.n = n;
    trace.pl.resize(n + 1);
    trace.wid.resize(n + 1);
    trace.tid.resize(n + 1);
    trace.sc.resize(n + 1);
    trace.bpl.clear();
    trace.pl[0] = 0;
    trace.wid[0] = 0;
    trace.tid[0] = kNoToken;
    trace.sc[0] = 1;
    trace.vt_widths.clear();
    if (record_valid_widths) {
        trace.vt_offsets.resize(n + 1);
        trace.vt_offsets[0] = 0;
    } else {
        trace.vt_offsets.clear();
    }

    const bool longest = tiebreak == TieBreak::Longest;
    if (longest && record_valid_widths) {
        forward_pass<true, true>(chunk, vocab, rng, trace, max_width);
    } else if (longest) {
        forward_pass<true, false>(chunk, vocab, rng, trace, max_width);
    } else if (record_valid_widths) {
        forward_pass<false, true>(chunk, vocab, rng, trace, max_width);
    } else {
        forward_pass<false, false>(chunk, vocab, rng, trace, max_width);
    }
}

SegmentationTrace pathpiece_forward(std::string_view chunk, const Vocabulary& vocab,
                                    TieBreak tiebreak, Rng* rng, std::size_t max_width) {
    SegmentationTrace trace;
    pathpiece_forward(chunk, vocab, tiebreak, rng, trace, true, max_width);
    return trace;
}

void pathpiece_backward(std::string_view chunk, const Vocabulary& vocab, SegmentationTrace& trace,
                        std::size_t max_width) {
    const std::size_t n = chunk.size();
    trace.bpl.resize(n + 2);
    std::uint32_t* bpl = trace.bpl.data();
    bpl[n + 1] = 0;
    for (std::size_t i = n; i >= 1; --i) {
        std::uint32_t best = kUnreachable;
        vocab.for_each_starting_at(
            chunk, i - 1,
            [&](std::size_t w, TokenId) {
                const std::uint32_t next = bpl[i + w];
                if (next != kUnreachable && next + 1 < best) {
                    best = next + 1;
                }
            },
            max_width);
        if (best == kUnreachable) {
            throw_unreachable(chunk, i - 1);
        }
        bpl[i] = best;
    }
    bpl[0] = n == 0 ? 0 : bpl[1];
}

std::vector<std::uint32_t> pathpiece_backward(std::string_view chunk, const Vocabulary& vocab,
                                              std::size_t max_width) {
    SegmentationTrace trace;
    trace.n = chunk.size();
    pathpiece_backward(chunk, vocab, trace, max_width);
    return std::move(trace.bpl);
}

void decode_path(const SegmentationTrace& trace, std::vector<TokenId>& out) {
    const std::size_t first = out.size();
    for (std::size_t e = trace.n; e >= 1; e -= trace.wid[e]) {
        out.push_back(trace.tid[e]);
    }
    std::reverse(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

Segmentation decode_path(const SegmentationTrace& trace) {
    Segmentation seg;
    seg.tokens.reserve(trace.optimum());
    decode_path(trace, seg.tokens);
    return seg;
}

namespace {

void greedy_into(std::string_view chunk, const Vocabulary& vocab, std::size_t max_width,
                 std::vector<TokenId>& out) {
    std::size_t pos = 0;
    while (pos < chunk.size()) {
        std::size_t take = 0;
        TokenId take_id = kNoToken;
        vocab.for_each_starting_at(
            chunk, pos,
            [&](std::size_t w, TokenId id) {
                take = w;
                take_id = id;
            },
            max_width);
        if (take == 0) {
            throw_unreachable(chunk, pos);
        }
        out.push_back(take_id);
        pos += take;
    }
}

void weighted_into(std::string_view chunk, const Vocabulary& vocab, const TokenWeights& weights,
                   std::size_t max_width, std::vector<double>& cost, SegmentationTrace& trace,
                   std::vector<TokenId>& out) {
    const std::size_t n = chunk.size();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    cost.resize(n + 1);
    trace.n = n;
    trace.wid.resize(n + 1);
    trace.tid.resize(n + 1);
    cost[0] = 0.0;
    for (std::size_t e = 1; e <= n; ++e) {
        double best = kInf;
        std::uint32_t best_w = 0;
        TokenId best_id = kNoToken;
        vocab.for_each_ending_at(
            chunk, e,
            [&](std::size_t w, TokenId id) {
                const double c = cost[e - w] + weights[id];
                if (c <= best) {
                    best = c;
                    best_w = static_cast<std::uint32_t>(w);
                    best_id = id;
                }
            },
            max_width);
        if (best_w == 0) {
            throw_unreachable(chunk, e - 1);
        }
        cost[e] = best;
        trace.wid[e] = best_w;
        trace.tid[e] = best_id;
    }
    decode_path(trace, out);
}

} // namespace

Segmentation greedy_segment(std::string_view chunk, const Vocabulary& vocab, std::size_t max_width) {
    Segmentation seg;
    greedy_into(chunk, vocab, max_width, seg.tokens);
    return seg;
}

TokenWeights::TokenWeights(std::vector<double> weights, const Vocabulary& vocab)
    : weights_(std::move(weights)) {
    if (weights_.size() != vocab.size()) {
        throw std::invalid_argument("weight table has " + std::to_string(weights_.size()) +
                                    " entries for " + std::to_string(vocab.size()) + " tokens");
    }
    for (std::size_t id = 0; id < weights_.size(); ++id) {
        const double w = weights_[id];
        if (!std::isfinite(w) || !(w > 0.0)) {
            throw std::invalid_argument("token " + std::to_string(id) + " (" +
                                        to_hex(vocab.token(static_cast<TokenId>(id))) +
                                        ") has non-positive or non-finite weight " +
                                        std::to_string(w));
        }
    }
}

TokenWeights TokenWeights::from_probabilities(std::span<const double> probs, const Vocabulary& vocab) {
    std::vector<double> w(probs.size());
    std::transform(probs.begin(), probs.end(), w.begin(), [](double p) { return -std::log(p); });
    return TokenWeights(std::move(w), vocab);
}

TokenWeights TokenWeights::uniform(const Vocabulary& vocab) {
    return TokenWeights(std::vector<double>(vocab.size(), 1.0), vocab);
}

Segmentation weighted_shortest_path(std::string_view chunk, const Vocabulary& vocab,
                                    const TokenWeights& weights, std::size_t max_width) {
    if (weights.values().size() != vocab.size()) {
        throw std::invalid_argument("weight table does not match vocabulary");
    }
    Segmentation seg;
    std::vector<double> cost;
    SegmentationTrace trace;
    weighted_into(chunk, vocab, weights, max_width, cost, trace, seg.tokens);
    return seg;
}

Segmenter::Segmenter(const Vocabulary& vocab, SegmenterOptions options)
    : vocab_(&vocab), options_(std::move(options)) {
    if (options_.engine == Engine::Weighted) {
        if (!options_.weights) {
            throw std::invalid_argument("weighted engine needs token weights");
        }
        if (options_.weights->values().size() != vocab.size()) {
            throw std::invalid_argument("weight table does not match vocabulary");
        }
    }
}

void Segmenter::segment_chunk(std::string_view chunk, std::vector<TokenId>& out) {
    switch (options_.engine) {
    case Engine::PathPieceLongest:
        pathpiece_forward(chunk, *vocab_, TieBreak::Longest, nullptr, trace_, false);
        decode_path(trace_, out);
        break;
    case Engine::PathPieceRandom:
        pathpiece_forward(chunk, *vocab_, TieBreak::Random, &rng_, trace_, false);
        decode_path(trace_, out);
        break;
    case Engine::Greedy:
        greedy_into(chunk, *vocab_, 0, out);
        break;
    case Engine::Weighted:
        weighted_into(chunk, *vocab_, *options_.weights, 0, cost_, trace_, out);
        break;
    }
}

std::uint64_t Segmenter::count_chunk(std::string_view chunk) {
    switch (options_.engine) {
    case Engine::PathPieceLongest:
    case Engine::PathPieceRandom:
        // Both tie-breaks reach the same optimum; the count needs no draws.
        pathpiece_forward(chunk, *vocab_, TieBreak::Longest, nullptr, trace_, false);
        return trace_.optimum();
    case Engine::Greedy:
    case Engine::Weighted: {
        scratch_.clear();
        segment_chunk(chunk, scratch_);
        return scratch_.size();
    }
    }
    return 0;
}

void Segmenter::segment(std::string_view document, std::uint64_t ordinal, std::vector<TokenId>& out) {
    if (options_.engine == Engine::PathPieceRandom) {
        rng_.reseed(document_seed(options_.seed, ordinal));
    }
    for_each_chunk(document, options_.mode, [&](std::string_view c) { segment_chunk(c, out); });
}

Segmentation Segmenter::segment(std::string_view document, std::uint64_t ordinal) {
    Segmentation seg;
    segment(document, ordinal, seg.tokens);
    return seg;
}

std::uint64_t Segmenter::count(std::string_view document, std::uint64_t ordinal) {
    (void)ordinal;
    std::uint64_t total = 0;
    for_each_chunk(document, options_.mode, [&](std::string_view c) { total += count_chunk(c); });
    return total;
}

Segmentation segment_document(std::string_view document, const Vocabulary& vocab,
                              const SegmenterOptions& options, std::uint64_t ordinal) {
    Segmenter segmenter(vocab, options);
    return segmenter.segment(document, ordinal);
}

} // namespace pathpiece
