#pragma once

#include "pathpiece/pretokenize.hpp"
#include "pathpiece/segment.hpp"
#include "pathpiece/vocab.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace pathpiece {

inline constexpr std::size_t kDefaultInitSize = std::size_t{1} << 18;  // 262,144

// ---------------------------------------------------------------------------
// Initial vocabulary
// ---------------------------------------------------------------------------

enum class NgramRanking {
    Count,             // raw occurrence count
    CountTimesLength,  // count * byte length
};

// Ranking for NgramRanking::CountTimesLength; ties as in ranks_before.
bool ranks_before_by_mass(const CountedToken& a, const CountedToken& b);

struct NgramInitOptions {
    std::size_t max_token_len = kDefaultMaxTokenLen;
    std::size_t size = kDefaultInitSize;
    PreTokenMode mode = PreTokenMode::none();
    NgramRanking ranking = NgramRanking::Count;
    std::size_t workers = 1;
};

// The `size` highest-ranked byte n-grams of widths 1..L, counted with
// overlapping windows inside pre-tokenization chunks only. Ranked by
// ranks_before (or ranks_before_by_mass).
std::vector<CountedToken> top_ngrams(std::span<const std::string> corpus,
                                     const NgramInitOptions& options);

// top_ngrams followed by ensure_single_bytes at capacity `size`.
// Throws std::invalid_argument on an empty corpus or size < 256.
Vocabulary init_vocab_ngrams(std::span<const std::string> corpus, const NgramInitOptions& options);

// ---------------------------------------------------------------------------
// Minimum increase from omitting one token occurrence
// ---------------------------------------------------------------------------
//
// All positions are 1-based and inclusive, matching SegmentationTrace: the
// occurrence covers bytes [s, e]. The trace needs pl, sc, vt and bpl.

inline constexpr std::uint64_t kInfiniteIncrease = std::numeric_limits<std::uint64_t>::max();

// Smallest increase over segmentations with a token boundary after some j
// in [s, e - 1]; kInfiniteIncrease for single-byte spans.
std::uint64_t min_increase_break(const SegmentationTrace& trace, std::size_t s, std::size_t e);

// Smallest increase over segmentations using a vocabulary token that
// strictly contains [s, e]; kInfiniteIncrease if none exists within width L.
std::uint64_t min_increase_superset(const SegmentationTrace& trace, std::size_t s, std::size_t e,
                                    std::size_t max_token_len);

// 0 when another optimal token also ends at e (sc[e] > 1), else the smaller
// of the break and superset increases.
std::uint64_t min_increase_occurrence(const SegmentationTrace& trace, std::size_t s, std::size_t e,
                                      std::size_t max_token_len);

// Per-token aggregate of minimum increases over a corpus, plus occurrence
// counts on the reference (PathPiece, longest tie-break) segmentation and its
// corpus token count. Merges by pointwise addition; infinite increases
// saturate.
struct OmissionLedger {
    std::vector<std::uint64_t> mi;
    std::vector<std::uint64_t> occurrences;
    std::uint64_t ctc = 0;

    OmissionLedger() = default;
    explicit OmissionLedger(std::size_t vocab_size) : mi(vocab_size, 0), occurrences(vocab_size, 0) {}

    void merge(const OmissionLedger& other);
    friend bool operator==(const OmissionLedger&, const OmissionLedger&) = default;
};

// Adds one document's occurrences to `ledger`. `trace` is scratch space.
void accumulate_mi(std::string_view document, const Vocabulary& vocab, PreTokenMode mode,
                   OmissionLedger& ledger, SegmentationTrace& trace);

// Requires a segmentation-complete vocabulary.
OmissionLedger aggregate_mi(std::span<const std::string> corpus, const Vocabulary& vocab,
                            PreTokenMode mode, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

struct PruneSchedule {
    std::size_t target = 0;
    double batch_fraction = 0.25;
    std::size_t min_batch = 256;

    // Throws std::invalid_argument unless 0 < batch_fraction <= 1 and
    // target >= 256.
    void validate() const;
    // max(min_batch, ceil(batch_fraction * surplus)) clamped to the surplus.
    std::size_t batch_size(std::size_t current_size) const;
};

// Removes the `batch` multi-byte tokens with the smallest MI, ties broken
// by fewer occurrences, then longer tokens, then byte order. Survivors keep
// their relative order (and counts). Throws std::invalid_argument when
// fewer than `batch` multi-byte tokens exist.
Vocabulary prune_step(const Vocabulary& vocab, const OmissionLedger& ledger, std::size_t batch);

struct ProgressRecord {
    std::size_t iteration = 0;
    std::size_t vocab_size = 0;
    std::uint64_t ctc = 0;
};

struct BuildOptions {
    PruneSchedule schedule;
    PreTokenMode mode = PreTokenMode::none();
    std::size_t workers = 1;
    std::function<void(const ProgressRecord&)> on_progress;
};

struct BuildResult {
    Vocabulary vocab;
    std::vector<ProgressRecord> progress;
};

// Segment, aggregate MI, prune; repeated until the vocabulary has exactly
// `schedule.target` tokens. One record is emitted per pass (the last one
// carries the CTC of the final vocabulary).
BuildResult build_vocab(std::span<const std::string> corpus, const Vocabulary& initial,
                        const BuildOptions& options);

} // namespace pathpiece
