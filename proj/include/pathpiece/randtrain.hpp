#pragma once

#include "pathpiece/pretokenize.hpp"
#include "pathpiece/segment.hpp"
#include "pathpiece/vocab.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pathpiece {

enum class CountSource {
    NgramCounts,     // overlapping occurrences of each token inside chunks
    SegmentedCounts  // occurrences in the corpus segmentation
};

// Target selection probabilities, one per token id, summing to 1.
struct SelectionWeights {
    std::vector<double> p;

    // Tokens whose p exceeds 1/m cannot reach their target when m tokens
    // are drawn without replacement.
    std::vector<TokenId> infeasible(std::size_t m) const;
};

// Normalizes raw counts. Throws std::invalid_argument if they are all zero.
SelectionWeights normalize_counts(std::span<const std::uint64_t> counts);

std::vector<std::uint64_t> ngram_token_counts(std::span<const std::string> corpus,
                                              const Vocabulary& vocab, PreTokenMode mode,
                                              std::size_t workers = 1);
std::vector<std::uint64_t> segmented_token_counts(std::span<const std::string> corpus,
                                                  const Vocabulary& vocab,
                                                  const SegmenterOptions& options,
                                                  std::size_t workers = 1);

SelectionWeights occurrence_weights(std::span<const std::string> corpus, const Vocabulary& vocab,
                                    CountSource source, const SegmenterOptions& segmenter,
                                    std::size_t workers = 1);

// Weighted sampling without replacement (A-ES): every unprotected token with
// positive weight gets the key -ln(u)/w, u ~ U(0,1), and the m - |protected|
// smallest keys win (the same order as the largest u^(1/w)). Returns the
// chosen ids, protected first, ascending. Deterministic in `seed`.
// Throws std::invalid_argument when there are too few candidates.
std::vector<TokenId> sample_without_replacement(std::span<const double> weights, std::size_t m,
                                                std::uint64_t seed,
                                                std::span<const TokenId> protected_ids = {});

// RandTrain: draws `m` tokens of `initial`, always keeping the 256 single
// bytes. Surviving tokens keep their initial order and counts.
Vocabulary randtrain(const Vocabulary& initial, const SelectionWeights& weights, std::size_t m,
                     std::uint64_t seed);

} // namespace pathpiece
