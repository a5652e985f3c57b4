#include "pathpiece/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pathpiece;

namespace {

// Upper-tail p-value of the signed-rank statistic by listing all 2^n sign
// patterns of the absolute differences.
double wilcoxon_enumerated(const std::vector<double>& diffs) {
    std::vector<double> nz;
    for (double d : diffs) if (d != 0) nz.push_back(d);
    const std::size_t n = nz.size();
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::fabs(nz[j]) < std::fabs(nz[i])) ++below;
            else if (std::fabs(nz[j]) == std::fabs(nz[i])) ++equal;
        }
        rank[i] = below + (equal + 1) / 2;
    }
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i) if (nz[i] > 0) observed += rank[i];
    std::uint64_t at_least = 0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i) if (mask >> i & 1) w += rank[i];
        if (w >= observed - 1e-9) ++at_least;
    }
    return static_cast<double>(at_least) / static_cast<double>(1ull << n);
}

} // namespace

TEST_CASE("Renyi efficiency endpoints are exact") {
    for (std::size_t v : {2u, 3u, 7u, 256u, 32768u}) {
        const TokenDistribution uniform(std::vector<std::uint64_t>(v, 13));
        for (double a : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}) {
            CHECK(renyi_efficiency(uniform, a, v) == 1.0);
        }
        std::vector<std::uint64_t> point(v, 0);
        point[v / 2] = 1000;
        for (double a : {0.5, 1.0, 2.5, 3.5}) {
            CHECK(renyi_efficiency(TokenDistribution(point), a, v) == 0.0);
        }
    }
}

TEST_CASE("Renyi efficiency hand value") {
    const TokenDistribution d(std::vector<std::uint64_t>{3, 1});
    CHECK(renyi_efficiency(d, 2.0, 2) == doctest::Approx(std::log(1.6) / std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Renyi entropy is non-increasing in alpha and continuous at 1") {
    std::mt19937_64 gen(21);
    const double alphas[] = {0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0, 2.5, 3.0, 3.5, 5.0};
    for (int round = 0; round < 100; ++round) {
        std::vector<std::uint64_t> counts(2 + gen() % 60);
        for (auto& c : counts) c = gen() % 1000;
        counts[0] += 1;
        const TokenDistribution d(counts);
        double prev = std::numeric_limits<double>::infinity();
        for (double a : alphas) {
            const double e = renyi_efficiency(d, a, counts.size());
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
        CHECK(std::fabs(renyi_entropy(d, 1.0 + 1e-7) - renyi_entropy(d, 1.0)) < 1e-6);
        CHECK(std::fabs(renyi_entropy(d, 1.0 - 1e-7) - renyi_entropy(d, 1.0)) < 1e-6);
    }
}

TEST_CASE("Renyi argument checks") {
    const TokenDistribution d(std::vector<std::uint64_t>{1, 1});
    CHECK_THROWS_AS(renyi_efficiency(d, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(renyi_efficiency(d, 2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(renyi_efficiency(TokenDistribution(std::vector<std::uint64_t>{0, 0}), 2.0, 2),
                    std::invalid_argument);
}

TEST_CASE("metrics report and corpus statistics") {
    const Vocabulary v = Vocabulary::with_single_bytes({"ab"});
    const std::vector<std::string> corpus{"abab", "ba", ""};
    const auto stats = segmentation_stats(corpus, v, {}, 2);
    CHECK(stats.ctc == 4);
    CHECK(ctc(corpus, v, {}, 1) == 4);
    CHECK(stats.dist.freq[*v.contains("ab")] == 2);
    CHECK(stats.dist.support() == 3);

    const double alphas[] = {2.0};
    const auto nominal = metrics_report(stats, alphas, v.size());
    const auto observed = metrics_report(stats, alphas, v.size(), EfficiencyNorm::ObservedSupport);
    CHECK(nominal.ctc == 4);
    CHECK(nominal.vocab_size == 257);
    CHECK(nominal.renyi.at(2.0) < observed.renyi.at(2.0));
    // p = (1/2, 1/4, 1/4): H_2 = ln(8/3)
    CHECK(observed.renyi.at(2.0) == doctest::Approx(std::log(8.0 / 3.0) / std::log(3.0)));

    SegmenterOptions greedy{Engine::Greedy, PreTokenMode::none(), 0, nullptr};
    CHECK(ctc(corpus, v, greedy, 1) >= ctc(corpus, v, {}, 1));
}

TEST_CASE("Pearson correlation") {
    const std::vector<double> x{1, 2, 3};
    const std::vector<double> y{1, 2, 4};
    CHECK(pearson(x, y) == doctest::Approx(0.981980506).epsilon(1e-8));
    CHECK(pearson(x, x) == 1.0);

    std::mt19937_64 gen(4);
    std::normal_distribution<double> nd;
    for (int round = 0; round < 100; ++round) {
        std::vector<double> a(30), b(30), a2(30), b2(30);
        for (auto& v : a) v = nd(gen);
        for (auto& v : b) v = nd(gen);
        const double s = 0.5 + std::fabs(nd(gen)), c = nd(gen) * 10, t = -(0.5 + std::fabs(nd(gen))), d = nd(gen);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a2[i] = s * a[i] + c;
            b2[i] = t * b[i] + d;
        }
        CHECK(std::fabs(pearson(a2, b2) + pearson(a, b)) < 1e-12);
    }
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, x), std::invalid_argument);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, x), std::invalid_argument);
}

TEST_CASE("Wilcoxon signed-rank") {
    CHECK(wilcoxon_one_sided(std::vector<double>{1, 2, 3, 4, 5}) == 1.0 / 32);
    CHECK(wilcoxon_one_sided(std::vector<double>{1}) == 0.5);
    CHECK(wilcoxon_one_sided(std::vector<double>{-1, -2}) == 1.0);
    CHECK_THROWS_AS(wilcoxon_one_sided(std::vector<double>{0, 0}), std::invalid_argument);

    std::mt19937_64 gen(8);
    for (int round = 0; round < 400; ++round) {
        std::vector<double> d(1 + gen() % 12);
        for (auto& x : d) x = static_cast<double>(static_cast<int>(gen() % 9) - 4) * 0.5;  // ties and zeros
        if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0; })) d[0] = 1;
        CHECK(wilcoxon_one_sided(d) == doctest::Approx(wilcoxon_enumerated(d)).epsilon(1e-12));
    }

    // Past the exact range the normal approximation tracks the exact tail.
    for (std::size_t n : {25u, 40u}) {
        std::vector<double> d;
        for (std::size_t i = 1; i <= n; ++i) d.push_back(i % 3 == 0 ? -double(i) : double(i));
        std::vector<double> ways(n * (n + 1) / 2 + 1, 0.0);
        ways[0] = 1;
        for (std::size_t r = 1; r <= n; ++r)
            for (std::size_t s = ways.size() - 1; s >= r; --s) ways[s] += ways[s - r];
        std::size_t w = 0;
        for (std::size_t i = 1; i <= n; ++i) if (i % 3 != 0) w += i;
        double tail = 0;
        for (std::size_t s = w; s < ways.size(); ++s) tail += ways[s];
        tail /= std::ldexp(1.0, static_cast<int>(n));
        CHECK(std::fabs(wilcoxon_one_sided(d) - tail) < 0.005);
    }
}

TEST_CASE("vocabulary overlap") {
    const Vocabulary a({"x", "y", "z"}, 16);
    const Vocabulary b({"y", "z", "w"}, 16);
    const Vocabulary c({"z", "q"}, 16);
    const Vocabulary* two[] = {&a, &b};
    CHECK(vocab_overlap(two) == std::map<std::string, std::size_t>{{"A", 1}, {"B", 1}, {"AB", 2}});
    const Vocabulary* three[] = {&a, &b, &c};
    CHECK(vocab_overlap(three) == std::map<std::string, std::size_t>{
                                      {"A", 1}, {"B", 1}, {"C", 1}, {"AB", 1}, {"AC", 0}, {"BC", 0}, {"ABC", 1}});
    const Vocabulary* one[] = {&a};
    CHECK_THROWS_AS(vocab_overlap(one), std::invalid_argument);
}
