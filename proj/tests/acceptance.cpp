// Acceptance harness: one PASS/FAIL line per criterion. Tolerances and
// workloads are fixed here; `--criterion N` runs a single one.

#include "pathpiece/construct.hpp"
#include "pathpiece/corpus_io.hpp"
#include "pathpiece/metrics.hpp"
#include "pathpiece/pretokenize.hpp"
#include "pathpiece/randtrain.hpp"
#include "pathpiece/segment.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

using namespace pathpiece;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 3) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

std::string sci(double x) {
    std::ostringstream os;
    os << std::scientific;
    os.precision(2);
    os << x;
    return os.str();
}

// Synthetic text: words from a random lexicon with Zipfian frequencies,
// separated by spaces, with the odd number and punctuation mark. With
// `mixed`, about 5% of bytes are arbitrary (including 0x00, 0xFF, tabs and
// multi-byte UTF-8), so every byte value shows up.
class ZipfText {
public:
    ZipfText(std::uint64_t seed, std::size_t lexicon, bool mixed) : gen_(seed), mixed_(mixed) {
        std::uniform_int_distribution<int> len(2, 10);
        std::vector<double> w;
        for (std::size_t r = 0; r < lexicon; ++r) {
            words_.push_back(oracle::random_string(gen_, static_cast<std::size_t>(len(gen_)), 26));
            w.push_back(1.0 / static_cast<double>(r + 1));
        }
        pick_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    std::string document(std::size_t approx_bytes) {
        std::string d;
        while (d.size() < approx_bytes) {
            if (!d.empty()) d.push_back(' ');
            const auto r = gen_() % 100;
            if (r < 4) {
                d += std::to_string(gen_() % 100000);
            } else if (r < 7) {
                d += ",.;:!?$%"[gen_() % 8];
            } else {
                d += words_[pick_(gen_)];
            }
            if (mixed_ && gen_() % 20 == 0) {
                static const std::string utf8[] = {"\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x98\x80", "\t", "\r"};
                if (gen_() % 2) {
                    d.push_back(static_cast<char>(gen_() & 0xFF));
                } else {
                    d += utf8[gen_() % 5];
                }
            }
        }
        return d;
    }

    std::vector<std::string> corpus(std::size_t total_bytes, std::size_t doc_bytes) {
        std::vector<std::string> docs;
        std::size_t n = 0;
        while (n < total_bytes) {
            docs.push_back(document(doc_bytes));
            n += docs.back().size();
        }
        return docs;
    }

private:
    std::mt19937_64 gen_;
    bool mixed_;
    std::vector<std::string> words_;
    std::discrete_distribution<std::size_t> pick_;
};

std::size_t total_bytes(const std::vector<std::string>& docs) {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.size();
    return n;
}

const PreTokenMode kModes[] = {PreTokenMode::none(), PreTokenMode::first_space(), PreTokenMode::first_space_digit(),
                               PreTokenMode::space_digit(), PreTokenMode::space()};

// ---------------------------------------------------------------------------

Outcome shortest_path_optimality() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(1001);
    int agree = 0;
    const int cases = 1000;
    for (int i = 0; i < cases; ++i) {
        const std::size_t max_len = i % 2 ? 3 : 16;
        const int alphabet = 1 + static_cast<int>(gen() % 4);
        const std::string text = oracle::random_string(gen, 1 + gen() % 12, alphabet);
        const auto extra = oracle::random_tokens(gen, text, gen() % 12, std::min<std::size_t>(max_len, 8), alphabet);
        const Vocabulary v = Vocabulary::with_single_bytes(extra, max_len);
        const auto seg = decode_path(pathpiece_forward(text, v));
        if (seg.concat(v) == text && seg.size() == oracle::min_segments(text, oracle::with_single_bytes(extra), max_len))
            ++agree;
    }
    const double secs = seconds_since(t0);
    return {agree == cases && secs < 10.0,
            std::to_string(agree) + "/" + std::to_string(cases) + " optimal, " + fmt(secs) + " s (limit 10 s)"};
}

Outcome losslessness() {
    ZipfText text(2002, 20000, true);
    const auto corpus = text.corpus(10u << 20, 4096);
    NgramInitOptions init;
    init.size = 8192;
    init.workers = 0;
    const std::vector<std::string> sample(corpus.begin(), corpus.begin() + 256);
    const Vocabulary v = init_vocab_ngrams(sample, init);
    const auto weights = std::make_shared<const TokenWeights>(TokenWeights::uniform(v));

    std::size_t runs = 0, failures = 0;
    for (Engine e : {Engine::PathPieceLongest, Engine::PathPieceRandom, Engine::Greedy, Engine::Weighted}) {
        for (PreTokenMode m : kModes) {
            const SegmenterOptions opts{e, m, 7, weights};
            struct State {
                Segmenter seg;
                std::vector<TokenId> ids;
                std::string joined;
                std::size_t bad = 0;
            };
            const State init_state{Segmenter(v, opts), {}, {}, 0};
            const auto done = parallel_map_reduce(
                corpus, 0, init_state,
                [&](State& s, std::uint64_t ord, std::string_view doc) {
                    s.ids.clear();
                    s.seg.segment(doc, ord, s.ids);
                    s.joined.clear();
                    for (TokenId id : s.ids) s.joined += v.token(id);
                    if (s.joined != doc) ++s.bad;
                },
                [](State& into, State&& from) { into.bad += from.bad; });
            failures += done.bad;
            ++runs;
        }
    }
    return {failures == 0, std::to_string(runs) + " engine x mode runs over " + fmt(total_bytes(corpus) / 1048576.0, 1) +
                               " MiB, " + std::to_string(failures) + " mismatching documents"};
}

Outcome mi_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(3003);
    std::size_t instances = 0, occurrences = 0, agree = 0, shortcut = 0, superset = 0;
    while (instances < 600) {
        const std::size_t max_len = instances % 3 == 0 ? 3 : 6;
        const std::string text = oracle::random_string(gen, 1 + gen() % 20, 2 + static_cast<int>(gen() % 2));
        const auto extra = oracle::random_tokens(gen, text, 2 + gen() % 12, max_len, 3);
        const Vocabulary v = Vocabulary::with_single_bytes(extra, max_len);
        SegmentationTrace t;
        pathpiece_forward(text, v, TieBreak::Longest, nullptr, t, true);
        pathpiece_backward(text, v, t);
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (std::size_t e = t.n; e >= 1; e -= t.wid[e]) spans.emplace_back(e - t.wid[e], e);
        const auto best = oracle::min_segments_excluding_each(text, oracle::with_single_bytes(extra), max_len, spans);
        for (std::size_t k = 0; k < spans.size(); ++k) {
            const std::size_t s = spans[k].first + 1, e = spans[k].second;
            const auto got = min_increase_occurrence(t, s, e, max_len);
            const auto want = best[k] == std::numeric_limits<std::size_t>::max() ? kInfiniteIncrease
                                                                                 : best[k] - t.optimum();
            ++occurrences;
            if (got == want) ++agree;
            if (t.sc[e] > 1) ++shortcut;
            else if (s < e && min_increase_superset(t, s, e, max_len) < min_increase_break(t, s, e)) ++superset;
        }
        ++instances;
    }
    const double secs = seconds_since(t0);
    return {agree == occurrences && shortcut > 0 && superset > 0 && secs < 60.0,
            std::to_string(agree) + "/" + std::to_string(occurrences) + " occurrences over " +
                std::to_string(instances) + " instances (" + std::to_string(shortcut) + " sc>1, " +
                std::to_string(superset) + " superset-decided), " + fmt(secs) + " s (limit 60 s)"};
}

Outcome valuation_chunking() {
    const std::string doc = "The valuation is estimated to be $213M";
    auto split = [&](PreTokenMode m) {
        std::vector<std::string> out;
        for (const auto& c : chunk(doc, m)) out.emplace_back(c.bytes(doc));
        return out;
    };
    const std::vector<std::string> space_digit{"The", " ", "valuation", " ", "is", " ", "estimated", " ", "to",
                                               " ", "be", " ", "$", "2", "1", "3", "M"};
    const std::vector<std::string> first_digit{"The", " valuation", " is", " estimated", " to", " be", " $",
                                               "2", "1", "3", "M"};
    const bool a = split(PreTokenMode::space_digit()) == space_digit;
    const bool b = split(PreTokenMode::first_space_digit()) == first_digit;
    return {a && b, std::string("space-digit ") + (a ? "matches" : "differs") + ", firstsp-digit " +
                        (b ? "matches" : "differs")};
}

Outcome ctc_ordering() {
    const auto t0 = Clock::now();
    ZipfText text(5005, 5000, false);
    const auto corpus = text.corpus(1u << 20, 1024);
    const PreTokenMode mode = PreTokenMode::first_space();
    NgramInitOptions init;
    init.size = 4096;
    init.mode = mode;
    init.workers = 0;
    const Vocabulary v0 = init_vocab_ngrams(corpus, init);

    bool greedy_ok = true;
    std::string detail;
    auto compare = [&](const Vocabulary& v, const char* label) {
        const auto pp = ctc(corpus, v, {Engine::PathPieceLongest, mode, 0, nullptr}, 0);
        const auto gr = ctc(corpus, v, {Engine::Greedy, mode, 0, nullptr}, 0);
        greedy_ok &= pp <= gr;
        detail += std::string(label) + " CTC pathpiece " + std::to_string(pp) + " <= greedy " + std::to_string(gr) + "; ";
    };
    compare(v0, "|V|=4096");

    BuildOptions opts;
    opts.schedule = {512, 0.25, 256};
    opts.mode = mode;
    opts.workers = 0;
    const auto built = build_vocab(corpus, v0, opts);
    compare(built.vocab, "|V|=512");
    bool monotone = true;
    for (std::size_t i = 1; i < built.progress.size(); ++i) {
        monotone &= built.progress[i].ctc >= built.progress[i - 1].ctc;
    }
    const double secs = seconds_since(t0);
    detail += std::to_string(built.progress.size()) + " progress records " +
              (monotone ? "non-decreasing" : "DECREASING") + ", " + fmt(secs, 1) + " s (limit 300 s)";
    return {greedy_ok && monotone && built.vocab.size() == 512 && secs < 300.0, detail};
}

Outcome unigram_equivalence() {
    std::mt19937_64 gen(6006);
    int agree = 0;
    const int cases = 500;
    for (int i = 0; i < cases; ++i) {
        const std::string text = oracle::random_string(gen, 1 + gen() % 10, 3);
        const auto extra = oracle::random_tokens(gen, text, 10, 5, 3);
        const Vocabulary v = Vocabulary::with_single_bytes(extra, 5);
        std::vector<double> p(v.size());
        std::uniform_real_distribution<double> u(0.001, 1.0);
        double sum = 0;
        for (auto& x : p) sum += (x = u(gen));
        for (auto& x : p) x /= sum;
        const auto weights = TokenWeights::from_probabilities(p, v);
        const auto seg = weighted_shortest_path(text, v, weights);
        double cost = 0;
        for (TokenId id : seg.tokens) cost += weights[id];
        const auto best = oracle::min_cost(text, oracle::with_single_bytes(extra), 5,
                                           [&](const std::string& t) { return -std::log(p[*v.contains(t)]); });
        bool ok = seg.concat(v) == text && std::fabs(cost - best.cost) <= 1e-12 * std::max(1.0, best.cost);
        if (ok && best.runner_up - best.cost > 1e-9) {
            std::vector<std::string> got;
            for (TokenId id : seg.tokens) got.push_back(v.token(id));
            ok = got == best.best;
        }
        agree += ok;
    }
    return {agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " maximum-likelihood segmentations"};
}

// Chi-square critical values at p = 0.01 for 1..10 degrees of freedom.
constexpr double kChiSquare01[] = {6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666, 23.209};

Outcome random_tiebreak() {
    struct Instance {
        std::string text;
        std::vector<std::string> extra;
    };
    const Instance instances[] = {
        {"abc", {"ab", "bc"}},
        {"abcd", {"ab", "bc", "cd", "abc", "bcd"}},
        {"aaaaaa", {"aa", "aaa"}},
    };
    const int runs = 10000;
    bool pass = true;
    std::string detail;
    for (const auto& inst : instances) {
        const Vocabulary v = Vocabulary::with_single_bytes(inst.extra);
        const auto ref = pathpiece_forward(inst.text, v);
        // Tied widths per position, from the longest-tie trace.
        std::vector<std::vector<std::uint32_t>> tied(inst.text.size() + 1);
        for (std::size_t e = 1; e <= inst.text.size(); ++e) {
            for (std::size_t w = 1; w <= e; ++w) {
                if (v.contains(inst.text.substr(e - w, w)) && ref.pl[e - w] + 1 == ref.pl[e]) {
                    tied[e].push_back(static_cast<std::uint32_t>(w));
                }
            }
        }
        std::vector<std::vector<int>> hits(inst.text.size() + 1);
        for (std::size_t e = 1; e <= inst.text.size(); ++e) hits[e].assign(tied[e].size(), 0);
        bool consistent = true;
        for (int r = 0; r < runs; ++r) {
            Rng rng(document_seed(77, static_cast<std::uint64_t>(r)));
            const auto t = pathpiece_forward(inst.text, v, TieBreak::Random, &rng);
            for (std::size_t e = 1; e <= inst.text.size(); ++e) {
                consistent &= t.sc[e] == tied[e].size() && t.pl[e] == ref.pl[e];
                const auto it = std::find(tied[e].begin(), tied[e].end(), t.wid[e]);
                if (it == tied[e].end()) {
                    consistent = false;
                } else {
                    ++hits[e][static_cast<std::size_t>(it - tied[e].begin())];
                }
            }
        }
        double chi = 0;
        std::size_t dof = 0;
        for (std::size_t e = 1; e <= inst.text.size(); ++e) {
            if (tied[e].size() < 2) continue;
            const double expected = static_cast<double>(runs) / static_cast<double>(tied[e].size());
            for (int h : hits[e]) chi += (h - expected) * (h - expected) / expected;
            dof += tied[e].size() - 1;
        }
        const bool ok = consistent && dof >= 1 && dof <= 10 && chi < kChiSquare01[dof - 1];
        pass &= ok;
        detail += "\"" + inst.text + "\" chi2=" + fmt(chi) + " dof=" + std::to_string(dof) +
                  " (crit " + (dof >= 1 && dof <= 10 ? fmt(kChiSquare01[dof - 1]) : "n/a") + "); ";
    }
    detail += std::to_string(runs) + " runs each";
    return {pass, detail};
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& xs) {
        std::vector<std::size_t> order(xs.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
        std::vector<double> r(xs.size());
        for (std::size_t i = 0; i < xs.size();) {
            std::size_t j = i;
            while (j < xs.size() && xs[order[j]] == xs[order[i]]) ++j;
            for (std::size_t k = i; k < j; ++k) r[order[k]] = (i + j - 1) / 2.0;
            i = j;
        }
        return r;
    };
    return pearson(ranks(a), ranks(b));
}

Outcome aes_statistics() {
    std::string detail;
    bool proportional = true;
    const int draws = 100000;
    for (const std::vector<double>& w : {std::vector<double>{0.9, 0.1}, std::vector<double>{0.05, 0.15, 0.3, 0.5}}) {
        std::vector<int> hits(w.size(), 0);
        for (int s = 0; s < draws; ++s) ++hits[sample_without_replacement(w, 1, static_cast<std::uint64_t>(s))[0]];
        double worst = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double sigma = std::sqrt(draws * w[k] * (1 - w[k]));
            worst = std::max(worst, std::fabs(hits[k] - draws * w[k]) / sigma);
        }
        proportional &= worst <= 3.0;
        detail += "m=1 max deviation " + fmt(worst, 2) + " sigma; ";
    }

    std::mt19937_64 gen(8008);
    std::vector<double> w(50);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i + 1);
    std::shuffle(w.begin(), w.end(), gen);
    std::vector<double> freq(w.size(), 0);
    for (std::uint64_t s = 0; s < 10000; ++s) {
        for (TokenId id : sample_without_replacement(w, 10, s)) freq[id] += 1;
    }
    const double rho = spearman(w, freq);
    detail += "inclusion rank correlation " + fmt(rho, 4) + " (> 0.95); ";

    bool deterministic = true;
    for (std::uint64_t s = 0; s < 100; ++s) {
        deterministic &= sample_without_replacement(w, 10, s) == sample_without_replacement(w, 10, s);
    }
    detail += deterministic ? "bit-exact per seed" : "NOT deterministic";
    return {proportional && rho > 0.95 && deterministic, detail};
}

double wilcoxon_enumerated(const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::fabs(d[j]) < std::fabs(d[i])) ++below;
            else if (std::fabs(d[j]) == std::fabs(d[i])) ++equal;
        }
        rank[i] = below + (equal + 1) / 2;
    }
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i) if (d[i] > 0) observed += rank[i];
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) if (mask >> i & 1) s += rank[i];
        if (s >= observed - 1e-9) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(1ull << n);
}

Outcome metrics_correctness() {
    bool endpoints = true;
    for (std::size_t v : {2u, 5u, 1000u, 32768u}) {
        const TokenDistribution uniform(std::vector<std::uint64_t>(v, 3));
        std::vector<std::uint64_t> point(v, 0);
        point[0] = 17;
        for (double a : {1.5, 2.0, 2.5, 3.0, 3.5}) {
            endpoints &= renyi_efficiency(uniform, a, v) == 1.0;
            endpoints &= renyi_efficiency(TokenDistribution(point), a, v) == 0.0;
        }
    }

    std::mt19937_64 gen(9009);
    bool monotone = true;
    for (int r = 0; r < 100; ++r) {
        std::vector<std::uint64_t> c(2 + gen() % 100);
        for (auto& x : c) x = gen() % 500;
        c[0] += 1;
        const TokenDistribution d(c);
        double prev = 2.0;
        for (double a : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 5.0}) {
            const double e = renyi_efficiency(d, a, c.size());
            monotone &= e <= prev + 1e-12;
            prev = e;
        }
    }

    bool wilcoxon = true;
    int wilcoxon_cases = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int r = 0; r < 20; ++r) {
            std::vector<double> d(n);
            for (auto& x : d) x = static_cast<double>(static_cast<int>(gen() % 11) - 5) + (gen() % 2 ? 0.5 : 0.0);
            if (std::any_of(d.begin(), d.end(), [](double x) { return x == 0; })) continue;
            wilcoxon &= std::fabs(wilcoxon_one_sided(d) - wilcoxon_enumerated(d)) <= 1e-12;
            ++wilcoxon_cases;
        }
    }

    double worst = 0;
    std::normal_distribution<double> nd;
    for (int r = 0; r < 100; ++r) {
        std::vector<double> x(40), y(40), x2(40), y2(40);
        for (auto& v : x) v = nd(gen);
        for (auto& v : y) v = nd(gen);
        const double a = 0.1 + std::fabs(nd(gen)) * 5, b = nd(gen) * 100, c = 0.1 + std::fabs(nd(gen)), d = nd(gen);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x2[i] = a * x[i] + b;
            y2[i] = c * y[i] + d;
        }
        worst = std::max(worst, std::fabs(pearson(x2, y2) - pearson(x, y)));
    }

    return {endpoints && monotone && wilcoxon && worst <= 1e-12,
            std::string("Renyi endpoints ") + (endpoints ? "exact" : "INEXACT") + ", alpha-monotone " +
                (monotone ? "yes" : "NO") + " on 100 distributions, Wilcoxon exact = enumeration on " +
                std::to_string(wilcoxon_cases) + " samples " + (wilcoxon ? "yes" : "NO") +
                ", Pearson affine drift " + sci(worst) + " (<= 1e-12)"};
}

Outcome scale_smoke() {
    ZipfText text(10010, 50000, false);
    const auto corpus = text.corpus(100u << 20, 8192);
    const double mb = static_cast<double>(total_bytes(corpus)) / 1e6;

    NgramInitOptions init;
    init.size = 32768;
    init.max_token_len = 16;
    init.workers = 0;
    const std::vector<std::string> sample(corpus.begin(), corpus.begin() + 256);
    const Vocabulary v = init_vocab_ngrams(sample, init);

    struct Acc {
        Segmenter seg;
        std::vector<TokenId> ids;
        std::uint64_t tokens = 0;
        std::uint64_t digest = 0;
    };
    auto run = [&](std::size_t workers) {
        const Acc init_acc{Segmenter(v, SegmenterOptions{}), {}, 0, 0};
        const auto t0 = Clock::now();
        const Acc r = parallel_map_reduce(
            corpus, workers, init_acc,
            [](Acc& a, std::uint64_t ord, std::string_view doc) {
                a.ids.clear();
                a.seg.segment(doc, ord, a.ids);
                a.tokens += a.ids.size();
                std::uint64_t h = splitmix64(ord);
                for (TokenId id : a.ids) h = splitmix64(h ^ id);
                a.digest += h;  // order-independent across documents
            },
            [](Acc& into, Acc&& from) {
                into.tokens += from.tokens;
                into.digest += from.digest;
            });
        return std::tuple{seconds_since(t0), r.tokens, r.digest};
    };
    const auto [t1, tok1, dig1] = run(1);
    const auto [t8, tok8, dig8] = run(8);
    const double rate = mb / t1;
    const double speedup = t1 / t8;
    const bool invariant = tok1 == tok8 && dig1 == dig8;
    const unsigned hw = std::thread::hardware_concurrency();
    return {rate >= 10.0 && speedup >= 4.0 && invariant,
            fmt(mb, 1) + " MB, |V|=" + std::to_string(v.size()) + ": 1 worker " + fmt(rate, 1) +
                " MB/s (>= 10), 8 workers speedup " + fmt(speedup, 2) + "x (>= 4) on " + std::to_string(hw) +
                " hardware threads, output " + (invariant ? "identical" : "DIFFERS") + " across worker counts"};
}

Outcome end_to_end_build() {
    ZipfText text(11011, 8000, false);
    const auto corpus = text.corpus(1u << 20, 1024);
    const PreTokenMode mode = PreTokenMode::first_space();
    const auto dir = std::filesystem::temp_directory_path() / "pathpiece_acceptance";
    std::filesystem::create_directories(dir);

    std::string files[2];
    for (int round = 0; round < 2; ++round) {
        NgramInitOptions init;
        init.size = 8192;
        init.mode = mode;
        init.workers = 0;
        const Vocabulary v0 = init_vocab_ngrams(corpus, init);
        BuildOptions opts;
        opts.schedule = {1024, 0.25, 256};
        opts.mode = mode;
        opts.workers = 0;
        const auto path = dir / ("build_" + std::to_string(round) + ".vocab");
        save_vocab(build_vocab(corpus, v0, opts).vocab, path);
        std::ifstream in(path, std::ios::binary);
        files[round].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    const Vocabulary back = parse_vocab(files[0]);
    return {files[0] == files[1] && back.size() == 1024,
            std::to_string(back.size()) + " tokens, two runs " +
                (files[0] == files[1] ? "byte-identical" : "DIFFER") + " (" + std::to_string(files[0].size()) +
                " bytes)"};
}

struct Criterion {
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"shortest-path optimality", shortest_path_optimality},
    {"losslessness", losslessness},
    {"minimum-increase oracle equivalence", mi_oracle},
    {"valuation sentence chunking", valuation_chunking},
    {"CTC ordering", ctc_ordering},
    {"unigram equivalence", unigram_equivalence},
    {"random tie-break uniformity", random_tiebreak},
    {"A-ES statistics", aes_statistics},
    {"metrics correctness", metrics_correctness},
    {"scale and performance", scale_smoke},
    {"end-to-end toy build", end_to_end_build},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (int i = 1; i <= 11; ++i) {
        if (only != 0 && i != only) continue;
        const auto& c = kCriteria[i - 1];
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << " (" << c.name << "): " << o.detail
                  << std::endl;
        all_pass &= o.pass;
    }
    return all_pass ? 0 : 1;
}
