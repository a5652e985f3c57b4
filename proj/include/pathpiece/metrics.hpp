#pragma once

#include "pathpiece/segment.hpp"
#include "pathpiece/vocab.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pathpiece {

// Token frequencies over a segmented corpus.
struct TokenDistribution {
    std::vector<std::uint64_t> freq;
    std::uint64_t total = 0;

    TokenDistribution() = default;
    explicit TokenDistribution(std::vector<std::uint64_t> counts);

    void merge(const TokenDistribution& other);
    std::size_t support() const;
};

// Corpus token count: sum over documents of their token counts.
std::uint64_t ctc(std::span<const std::string> corpus, const Vocabulary& vocab,
                  const SegmenterOptions& options, std::size_t workers = 1);

// CTC together with the token distribution of the same segmentation.
struct SegmentationStats {
    std::uint64_t ctc = 0;
    TokenDistribution dist;
};
SegmentationStats segmentation_stats(std::span<const std::string> corpus, const Vocabulary& vocab,
                                     const SegmenterOptions& options, std::size_t workers = 1);

// Order-alpha Renyi entropy of `dist` (natural log) divided by
// log(vocab_size). alpha == 1 gives the Shannon ratio. Throws
// std::invalid_argument for alpha <= 0, vocab_size < 2 or an empty
// distribution.
double renyi_efficiency(const TokenDistribution& dist, double alpha, std::size_t vocab_size);
double renyi_entropy(const TokenDistribution& dist, double alpha);

enum class EfficiencyNorm { NominalVocab, ObservedSupport };

struct MetricsReport {
    std::uint64_t ctc = 0;
    std::map<double, double> renyi;
    std::size_t vocab_size = 0;
};

MetricsReport metrics_report(const SegmentationStats& stats, std::span<const double> alphas,
                             std::size_t vocab_size,
                             EfficiencyNorm norm = EfficiencyNorm::NominalVocab);

// Sample Pearson correlation. Throws std::invalid_argument on unequal or
// too-short inputs and on constant series.
double pearson(std::span<const double> xs, std::span<const double> ys);

// One-sided Wilcoxon signed-rank p-value for H1: first > second, from the
// paired differences first - second. Zeros are dropped, tied |d| share
// average ranks. Exact null distribution for n <= 20 non-zero differences,
// else a normal approximation with tie and continuity corrections.
// Throws std::invalid_argument when every difference is zero.
double wilcoxon_one_sided(std::span<const double> diffs);

inline constexpr std::size_t kWilcoxonExactMax = 20;

// Overlap of 2 or 3 token sets. Region keys name the member sets: "A",
// "B", "AB" for two; "A", "B", "C", "AB", "AC", "BC", "ABC" for three.
// Each region counts tokens in exactly those sets.
std::map<std::string, std::size_t> vocab_overlap(std::span<const Vocabulary* const> vocabs);

} // namespace pathpiece
