#include "pathpiece/metrics.hpp"

#include "pathpiece/corpus_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace pathpiece {

TokenDistribution::TokenDistribution(std::vector<std::uint64_t> counts) : freq(std::move(counts)) {
    total = std::accumulate(freq.begin(), freq.end(), std::uint64_t{0});
}

void TokenDistribution::merge(const TokenDistribution& other) {
    if (freq.size() < other.freq.size()) {
        freq.resize(other.freq.size(), 0);
    }
    for (std::size_t i = 0; i < other.freq.size(); ++i) {
        freq[i] += other.freq[i];
    }
    total += other.total;
}

std::size_t TokenDistribution::support() const {
    return static_cast<std::size_t>(
        std::count_if(freq.begin(), freq.end(), [](std::uint64_t c) { return c > 0; }));
}

std::uint64_t ctc(std::span<const std::string> corpus, const Vocabulary& vocab,
                  const SegmenterOptions& options, std::size_t workers) {
    vocab.require_complete();
    struct Partial {
        Segmenter segmenter;
        std::uint64_t total = 0;
    };
    const Partial init{Segmenter(vocab, options), 0};
    return parallel_map_reduce(
               corpus, workers, init,
               [](Partial& p, std::uint64_t ordinal, std::string_view doc) {
                   p.total += p.segmenter.count(doc, ordinal);
               },
               [](Partial& into, Partial&& from) { into.total += from.total; })
        .total;
}

SegmentationStats segmentation_stats(std::span<const std::string> corpus, const Vocabulary& vocab,
                                     const SegmenterOptions& options, std::size_t workers) {
    vocab.require_complete();
    struct Partial {
        Segmenter segmenter;
        std::vector<std::uint64_t> freq;
        std::vector<TokenId> buffer;
    };
    const Partial init{Segmenter(vocab, options), std::vector<std::uint64_t>(vocab.size(), 0), {}};
    Partial result = parallel_map_reduce(
        corpus, workers, init,
        [](Partial& p, std::uint64_t ordinal, std::string_view doc) {
            p.buffer.clear();
            p.segmenter.segment(doc, ordinal, p.buffer);
            for (TokenId id : p.buffer) ++p.freq[id];
        },
        [](Partial& into, Partial&& from) {
            for (std::size_t i = 0; i < into.freq.size(); ++i) into.freq[i] += from.freq[i];
        });
    SegmentationStats stats;
    stats.dist = TokenDistribution(std::move(result.freq));
    stats.ctc = stats.dist.total;
    return stats;
}

namespace {

long double renyi_entropy_ld(const TokenDistribution& dist, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("Renyi order must be a finite positive number");
    }
    if (dist.total == 0) {
        throw std::invalid_argument("empty token distribution");
    }
    // Long double keeps uniform -> 1 and point mass -> 0 exact after
    // rounding to double.
    const long double total = static_cast<long double>(dist.total);
    if (alpha == 1.0) {
        long double h = 0;
        for (std::uint64_t c : dist.freq) {
            if (c == 0) continue;
            const long double p = static_cast<long double>(c) / total;
            h -= p * std::log(p);
        }
        return h;
    }
    const long double am1 = static_cast<long double>(alpha) - 1.0L;
    if (std::fabs(am1) < 0.25L) {
        // sum p^a - 1 == sum p * (p^(a-1) - 1) stays accurate near a = 1.
        long double excess = 0;
        for (std::uint64_t c : dist.freq) {
            if (c == 0) continue;
            const long double p = static_cast<long double>(c) / total;
            excess += p * std::expm1(am1 * std::log(p));
        }
        return std::log1p(excess) / -am1;
    }
    // Elsewhere log-sum-exp, since sum p^a can be far below 1.
    const long double a = alpha;
    long double top = -std::numeric_limits<long double>::infinity();
    for (std::uint64_t c : dist.freq) {
        if (c != 0) top = std::max(top, a * std::log(static_cast<long double>(c) / total));
    }
    long double sum = 0;
    for (std::uint64_t c : dist.freq) {
        if (c != 0) sum += std::exp(a * std::log(static_cast<long double>(c) / total) - top);
    }
    return (top + std::log(sum)) / -am1;
}

} // namespace

double renyi_entropy(const TokenDistribution& dist, double alpha) {
    return static_cast<double>(renyi_entropy_ld(dist, alpha));
}

double renyi_efficiency(const TokenDistribution& dist, double alpha, std::size_t vocab_size) {
    if (vocab_size < 2) {
        throw std::invalid_argument("vocabulary size must be at least 2");
    }
    const long double h = renyi_entropy_ld(dist, alpha);
    return static_cast<double>(h / std::log(static_cast<long double>(vocab_size)));
}

MetricsReport metrics_report(const SegmentationStats& stats, std::span<const double> alphas,
                             std::size_t vocab_size, EfficiencyNorm norm) {
    MetricsReport report;
    report.ctc = stats.ctc;
    report.vocab_size = vocab_size;
    const std::size_t denom = norm == EfficiencyNorm::NominalVocab ? vocab_size : stats.dist.support();
    for (double a : alphas) {
        report.renyi[a] = renyi_efficiency(stats.dist, a, denom);
    }
    return report;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("pearson: series lengths differ");
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("pearson: need at least two points");
    }
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::invalid_argument("pearson: constant series");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double wilcoxon_one_sided(std::span<const double> diffs) {
    std::vector<double> nz;
    for (double d : diffs) {
        if (d != 0.0) nz.push_back(d);
    }
    if (nz.empty()) {
        throw std::invalid_argument("wilcoxon: all differences are zero");
    }
    const std::size_t n = nz.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(nz[a]) < std::fabs(nz[b]); });

    // Doubled ranks keep average ranks integral.
    std::vector<std::uint64_t> rank2(n);
    double tie_term = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && std::fabs(nz[order[j]]) == std::fabs(nz[order[i]])) ++j;
        const std::uint64_t r2 = i + 1 + j;  // 2 * average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) rank2[order[k]] = r2;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    std::uint64_t w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (nz[i] > 0) w2 += rank2[i];
    }

    if (n <= kWilcoxonExactMax) {
        const std::uint64_t max_sum = std::accumulate(rank2.begin(), rank2.end(), std::uint64_t{0});
        std::vector<std::uint64_t> ways(max_sum + 1, 0);
        ways[0] = 1;
        for (std::uint64_t r : rank2) {
            for (std::uint64_t s = max_sum; s >= r; --s) {
                ways[s] += ways[s - r];
            }
        }
        std::uint64_t tail = 0;
        for (std::uint64_t s = w2; s <= max_sum; ++s) tail += ways[s];
        return static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n));
    }

    const auto nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4.0;
    const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
    const double z = (static_cast<double>(w2) / 2.0 - mean - 0.5) / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

std::map<std::string, std::size_t> vocab_overlap(std::span<const Vocabulary* const> vocabs) {
    if (vocabs.size() != 2 && vocabs.size() != 3) {
        throw std::invalid_argument("vocab_overlap takes 2 or 3 vocabularies");
    }
    std::unordered_map<std::string_view, unsigned> membership;
    for (std::size_t v = 0; v < vocabs.size(); ++v) {
        for (const auto& t : vocabs[v]->tokens()) {
            membership[t] |= 1u << v;
        }
    }
    std::map<std::string, std::size_t> regions;
    const unsigned full = (1u << vocabs.size()) - 1;
    for (unsigned mask = 1; mask <= full; ++mask) {
        std::string key;
        for (std::size_t v = 0; v < vocabs.size(); ++v) {
            if (mask & (1u << v)) key.push_back(static_cast<char>('A' + v));
        }
        regions[key] = 0;
    }
    for (const auto& [token, mask] : membership) {
        std::string key;
        for (std::size_t v = 0; v < vocabs.size(); ++v) {
            if (mask & (1u << v)) key.push_back(static_cast<char>('A' + v));
        }
        ++regions[key];
    }
    return regions;
}

} // namespace pathpiece
