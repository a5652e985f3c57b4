#include "pathpiece/construct.hpp"

#include "pathpiece/corpus_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pathpiece {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return a > kInfiniteIncrease - b ? kInfiniteIncrease : a + b;
}

using NgramCount = std::pair<std::string_view, std::uint64_t>;

// Top `keep` n-grams of exactly width w, by count desc then bytes asc.
std::vector<NgramCount> top_of_width(std::span<const std::string> corpus, PreTokenMode mode,
                                     std::size_t w, std::size_t keep) {
    std::vector<NgramCount> all;
    if (w == 1) {
        std::array<std::uint64_t, kByteAlphabetSize> counts{};
        std::array<std::string_view, kByteAlphabetSize> where{};
        for (const auto& doc : corpus) {
            for (std::size_t i = 0; i < doc.size(); ++i) {
                const auto b = static_cast<unsigned char>(doc[i]);
                if (counts[b]++ == 0) {
                    where[b] = std::string_view(doc).substr(i, 1);
                }
            }
        }
        for (std::size_t b = 0; b < kByteAlphabetSize; ++b) {
            if (counts[b] > 0) {
                all.emplace_back(where[b], counts[b]);
            }
        }
    } else {
        std::unordered_map<std::string_view, std::uint64_t> counts;
        for (const auto& doc : corpus) {
            for_each_chunk(doc, mode, [&](std::string_view chunk) {
                for (std::size_t i = 0; i + w <= chunk.size(); ++i) {
                    ++counts[chunk.substr(i, w)];
                }
            });
        }
        all.assign(counts.begin(), counts.end());
    }
    const auto better = [](const NgramCount& a, const NgramCount& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    if (all.size() > keep) {
        std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), better);
        all.resize(keep);
    }
    return all;
}

} // namespace

bool ranks_before_by_mass(const CountedToken& a, const CountedToken& b) {
    const auto ma = static_cast<unsigned __int128>(a.count) * a.bytes.size();
    const auto mb = static_cast<unsigned __int128>(b.count) * b.bytes.size();
    if (ma != mb) {
        return ma > mb;
    }
    return ranks_before(a, b);
}

std::vector<CountedToken> top_ngrams(std::span<const std::string> corpus,
                                     const NgramInitOptions& options) {
    const std::size_t max_len = options.max_token_len;
    std::vector<std::vector<NgramCount>> per_width(max_len);
    detail::run_indexed(
        max_len, std::max<std::size_t>(1, options.workers),
        [&](std::size_t, std::size_t i) {
            per_width[i] = top_of_width(corpus, options.mode, i + 1, options.size);
        },
        [](std::size_t i) { return static_cast<std::uint64_t>(i); });

    std::vector<CountedToken> candidates;
    for (const auto& list : per_width) {
        for (const auto& [bytes, count] : list) {
            candidates.push_back(CountedToken{std::string(bytes), count});
        }
    }
    const TokenRanking rank =
        options.ranking == NgramRanking::Count ? ranks_before : ranks_before_by_mass;
    std::sort(candidates.begin(), candidates.end(), rank);
    if (candidates.size() > options.size) {
        candidates.resize(options.size);
    }
    return candidates;
}

Vocabulary init_vocab_ngrams(std::span<const std::string> corpus, const NgramInitOptions& options) {
    if (options.size < kByteAlphabetSize) {
        throw std::invalid_argument("initial vocabulary size must be at least 256");
    }
    if (options.max_token_len == 0) {
        throw std::invalid_argument("max token length must be at least 1");
    }
    const bool empty = std::all_of(corpus.begin(), corpus.end(),
                                   [](const std::string& d) { return d.empty(); });
    if (empty) {
        throw std::invalid_argument("cannot initialise a vocabulary from an empty corpus");
    }
    const TokenRanking rank =
        options.ranking == NgramRanking::Count ? ranks_before : ranks_before_by_mass;
    return ensure_single_bytes(top_ngrams(corpus, options), options.size, options.max_token_len, {},
                               rank);
}

std::uint64_t min_increase_break(const SegmentationTrace& trace, std::size_t s, std::size_t e) {
    const std::uint64_t k = trace.optimum();
    std::uint64_t best = kInfiniteIncrease;
    for (std::size_t j = s; j < e; ++j) {
        const std::uint64_t kb = std::uint64_t{trace.pl[j]} + trace.bpl[j + 1];
        best = std::min(best, kb - k);
    }
    return best;
}

std::uint64_t min_increase_superset(const SegmentationTrace& trace, std::size_t s, std::size_t e,
                                    std::size_t max_token_len) {
    const std::uint64_t k = trace.optimum();
    const std::size_t last_end = std::min(trace.n, s + max_token_len - 1);
    std::uint64_t best = kInfiniteIncrease;
    for (std::size_t e2 = e; e2 <= last_end; ++e2) {
        for (std::uint32_t w2 : trace.valid_widths(e2)) {
            if (w2 > max_token_len || w2 > e2) {
                continue;
            }
            const std::size_t s2 = e2 - w2 + 1;
            if (s2 > s || (s2 == s && e2 == e)) {
                continue;
            }
            const std::uint64_t ks = std::uint64_t{trace.pl[s2 - 1]} + trace.bpl[e2 + 1] + 1;
            best = std::min(best, ks - k);
        }
    }
    return best;
}

std::uint64_t min_increase_occurrence(const SegmentationTrace& trace, std::size_t s, std::size_t e,
                                      std::size_t max_token_len) {
    if (trace.sc[e] > 1) {
        return 0;
    }
    return std::min(min_increase_break(trace, s, e),
                    min_increase_superset(trace, s, e, max_token_len));
}

void OmissionLedger::merge(const OmissionLedger& other) {
    if (mi.size() != other.mi.size()) {
        throw std::invalid_argument("cannot merge ledgers of different vocabularies");
    }
    for (std::size_t i = 0; i < mi.size(); ++i) {
        mi[i] = saturating_add(mi[i], other.mi[i]);
        occurrences[i] += other.occurrences[i];
    }
    ctc += other.ctc;
}

void accumulate_mi(std::string_view document, const Vocabulary& vocab, PreTokenMode mode,
                   OmissionLedger& ledger, SegmentationTrace& trace) {
    const std::size_t max_len = vocab.max_token_len();
    for_each_chunk(document, mode, [&](std::string_view chunk) {
        pathpiece_forward(chunk, vocab, TieBreak::Longest, nullptr, trace, true);
        pathpiece_backward(chunk, vocab, trace);
        ledger.ctc += trace.optimum();
        for (std::size_t e = trace.n; e >= 1; e -= trace.wid[e]) {
            const std::size_t s = e - trace.wid[e] + 1;
            const TokenId id = trace.tid[e];
            ++ledger.occurrences[id];
            ledger.mi[id] = saturating_add(ledger.mi[id], min_increase_occurrence(trace, s, e, max_len));
        }
    });
}

OmissionLedger aggregate_mi(std::span<const std::string> corpus, const Vocabulary& vocab,
                            PreTokenMode mode, std::size_t workers) {
    vocab.require_complete();
    struct Partial {
        OmissionLedger ledger;
        SegmentationTrace trace;
    };
    Partial init{OmissionLedger(vocab.size()), {}};
    Partial result = parallel_map_reduce(
        corpus, workers, init,
        [&](Partial& p, std::uint64_t, std::string_view doc) {
            accumulate_mi(doc, vocab, mode, p.ledger, p.trace);
        },
        [](Partial& into, Partial&& from) { into.ledger.merge(from.ledger); });
    return std::move(result.ledger);
}

void PruneSchedule::validate() const {
    if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
        throw std::invalid_argument("batch fraction must be in (0, 1]");
    }
    if (target < kByteAlphabetSize) {
        throw std::invalid_argument("target vocabulary size must be at least 256");
    }
}

std::size_t PruneSchedule::batch_size(std::size_t current_size) const {
    if (current_size <= target) {
        return 0;
    }
    const std::size_t surplus = current_size - target;
    const auto frac = static_cast<std::size_t>(std::ceil(batch_fraction * static_cast<double>(surplus)));
    return std::min(surplus, std::max(min_batch, frac));
}

Vocabulary prune_step(const Vocabulary& vocab, const OmissionLedger& ledger, std::size_t batch) {
    if (ledger.mi.size() != vocab.size() || ledger.occurrences.size() != vocab.size()) {
        throw std::invalid_argument("ledger does not match vocabulary");
    }
    std::vector<TokenId> candidates;
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        if (vocab.token(static_cast<TokenId>(id)).size() > 1) {
            candidates.push_back(static_cast<TokenId>(id));
        }
    }
    if (batch > candidates.size()) {
        throw std::invalid_argument("cannot remove " + std::to_string(batch) + " tokens: only " +
                                    std::to_string(candidates.size()) +
                                    " multi-byte tokens exist and single bytes are protected");
    }
    const auto order = [&](TokenId a, TokenId b) {
        if (ledger.mi[a] != ledger.mi[b]) return ledger.mi[a] < ledger.mi[b];
        if (ledger.occurrences[a] != ledger.occurrences[b])
            return ledger.occurrences[a] < ledger.occurrences[b];
        const std::string& ta = vocab.token(a);
        const std::string& tb = vocab.token(b);
        if (ta.size() != tb.size()) return ta.size() > tb.size();
        return ta < tb;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(batch),
                      candidates.end(), order);
    std::vector<bool> removed(vocab.size(), false);
    for (std::size_t i = 0; i < batch; ++i) {
        removed[candidates[i]] = true;
    }

    std::vector<std::string> tokens;
    std::vector<std::uint64_t> counts;
    tokens.reserve(vocab.size() - batch);
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        if (removed[id]) continue;
        tokens.push_back(vocab.token(static_cast<TokenId>(id)));
        if (vocab.has_counts()) {
            counts.push_back(vocab.counts()[id]);
        }
    }
    return Vocabulary(std::move(tokens), vocab.max_token_len(), std::move(counts));
}

BuildResult build_vocab(std::span<const std::string> corpus, const Vocabulary& initial,
                        const BuildOptions& options) {
    const PruneSchedule& schedule = options.schedule;
    schedule.validate();
    initial.require_complete();
    if (initial.size() < schedule.target) {
        throw std::invalid_argument("initial vocabulary (" + std::to_string(initial.size()) +
                                    ") is smaller than the target (" +
                                    std::to_string(schedule.target) + ")");
    }

    BuildResult result{initial, {}};
    const auto emit = [&](ProgressRecord rec) {
        result.progress.push_back(rec);
        if (options.on_progress) {
            options.on_progress(rec);
        }
    };

    std::size_t iteration = 0;
    while (result.vocab.size() > schedule.target) {
        const OmissionLedger ledger = aggregate_mi(corpus, result.vocab, options.mode, options.workers);
        emit({iteration, result.vocab.size(), ledger.ctc});
        result.vocab = prune_step(result.vocab, ledger, schedule.batch_size(result.vocab.size()));
        ++iteration;
    }
    if (iteration > 0) {
        const Vocabulary& vocab = result.vocab;
        SegmenterOptions seg{Engine::PathPieceLongest, options.mode, 0, nullptr};
        struct Partial {
            Segmenter segmenter;
            std::uint64_t ctc = 0;
        };
        const Partial init{Segmenter(vocab, seg), 0};
        const Partial total = parallel_map_reduce(
            corpus, options.workers, init,
            [](Partial& p, std::uint64_t ord, std::string_view doc) { p.ctc += p.segmenter.count(doc, ord); },
            [](Partial& into, Partial&& from) { into.ctc += from.ctc; });
        emit({iteration, vocab.size(), total.ctc});
    }
    return result;
}

} // namespace pathpiece
