#include "pathpiece/randtrain.hpp"

#include "pathpiece/corpus_io.hpp"
#include "pathpiece/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pathpiece {

std::vector<TokenId> SelectionWeights::infeasible(std::size_t m) const {
    std::vector<TokenId> out;
    const double cap = 1.0 / static_cast<double>(m);
    for (std::size_t id = 0; id < p.size(); ++id) {
        if (p[id] > cap) {
            out.push_back(static_cast<TokenId>(id));
        }
    }
    return out;
}

SelectionWeights normalize_counts(std::span<const std::uint64_t> counts) {
    long double total = 0;
    for (auto c : counts) total += static_cast<long double>(c);
    if (total == 0) {
        throw std::invalid_argument("all token counts are zero");
    }
    SelectionWeights w;
    w.p.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        w.p[i] = static_cast<double>(static_cast<long double>(counts[i]) / total);
    }
    return w;
}

namespace {

void merge_counts(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
    for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

} // namespace

std::vector<std::uint64_t> ngram_token_counts(std::span<const std::string> corpus,
                                              const Vocabulary& vocab, PreTokenMode mode,
                                              std::size_t workers) {
    const std::vector<std::uint64_t> init(vocab.size(), 0);
    return parallel_map_reduce(
        corpus, workers, init,
        [&](std::vector<std::uint64_t>& acc, std::uint64_t, std::string_view doc) {
            for_each_chunk(doc, mode, [&](std::string_view chunk) {
                for (std::size_t i = 0; i < chunk.size(); ++i) {
                    vocab.for_each_starting_at(chunk, i, [&](std::size_t, TokenId id) { ++acc[id]; });
                }
            });
        },
        [](std::vector<std::uint64_t>& into, std::vector<std::uint64_t>&& from) { merge_counts(into, from); });
}

std::vector<std::uint64_t> segmented_token_counts(std::span<const std::string> corpus,
                                                  const Vocabulary& vocab,
                                                  const SegmenterOptions& options,
                                                  std::size_t workers) {
    vocab.require_complete();
    struct Partial {
        Segmenter segmenter;
        std::vector<std::uint64_t> counts;
        std::vector<TokenId> buffer;
    };
    const Partial init{Segmenter(vocab, options), std::vector<std::uint64_t>(vocab.size(), 0), {}};
    Partial result = parallel_map_reduce(
        corpus, workers, init,
        [](Partial& p, std::uint64_t ordinal, std::string_view doc) {
            p.buffer.clear();
            p.segmenter.segment(doc, ordinal, p.buffer);
            for (TokenId id : p.buffer) ++p.counts[id];
        },
        [](Partial& into, Partial&& from) { merge_counts(into.counts, from.counts); });
    return std::move(result.counts);
}

SelectionWeights occurrence_weights(std::span<const std::string> corpus, const Vocabulary& vocab,
                                    CountSource source, const SegmenterOptions& segmenter,
                                    std::size_t workers) {
    const auto counts = source == CountSource::NgramCounts
                            ? ngram_token_counts(corpus, vocab, segmenter.mode, workers)
                            : segmented_token_counts(corpus, vocab, segmenter, workers);
    return normalize_counts(counts);
}

std::vector<TokenId> sample_without_replacement(std::span<const double> weights, std::size_t m,
                                                std::uint64_t seed,
                                                std::span<const TokenId> protected_ids) {
    std::vector<bool> is_protected(weights.size(), false);
    std::vector<TokenId> chosen;
    for (TokenId id : protected_ids) {
        if (id >= weights.size()) {
            throw std::invalid_argument("protected id " + std::to_string(id) + " out of range");
        }
        if (!is_protected[id]) {
            is_protected[id] = true;
            chosen.push_back(id);
        }
    }
    if (chosen.size() > m) {
        throw std::invalid_argument("sample size " + std::to_string(m) + " is smaller than the " +
                                    std::to_string(chosen.size()) + " protected tokens");
    }
    const std::size_t draws = m - chosen.size();

    Rng rng(seed);
    std::vector<std::pair<double, TokenId>> keyed;
    for (std::size_t id = 0; id < weights.size(); ++id) {
        const double w = weights[id];
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("weight of token " + std::to_string(id) + " is invalid");
        }
        // One draw per item keeps the key of item i independent of which
        // other items are eligible.
        const double u = rng.uniform_open();
        if (is_protected[id] || w == 0.0) {
            continue;
        }
        keyed.emplace_back(-std::log(u) / w, static_cast<TokenId>(id));
    }
    if (keyed.size() < draws) {
        throw std::invalid_argument("only " + std::to_string(keyed.size()) +
                                    " tokens have positive weight, cannot draw " +
                                    std::to_string(draws));
    }
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(draws), keyed.end());
    std::sort(chosen.begin(), chosen.end());
    const std::size_t n_protected = chosen.size();
    for (std::size_t i = 0; i < draws; ++i) {
        chosen.push_back(keyed[i].second);
    }
    std::sort(chosen.begin() + static_cast<std::ptrdiff_t>(n_protected), chosen.end());
    return chosen;
}

Vocabulary randtrain(const Vocabulary& initial, const SelectionWeights& weights, std::size_t m,
                     std::uint64_t seed) {
    initial.require_complete();
    if (weights.p.size() != initial.size()) {
        throw std::invalid_argument("selection weights do not match the initial vocabulary");
    }
    std::vector<TokenId> singles;
    for (std::size_t id = 0; id < initial.size(); ++id) {
        if (initial.token(static_cast<TokenId>(id)).size() == 1) {
            singles.push_back(static_cast<TokenId>(id));
        }
    }
    std::vector<TokenId> chosen = sample_without_replacement(weights.p, m, seed, singles);
    std::sort(chosen.begin(), chosen.end());

    std::vector<std::string> tokens;
    std::vector<std::uint64_t> counts;
    for (TokenId id : chosen) {
        tokens.push_back(initial.token(id));
        if (initial.has_counts()) counts.push_back(initial.counts()[id]);
    }
    return Vocabulary(std::move(tokens), initial.max_token_len(), std::move(counts));
}

} // namespace pathpiece
