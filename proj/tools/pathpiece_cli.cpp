#include "pathpiece/construct.hpp"
#include "pathpiece/corpus_io.hpp"
#include "pathpiece/metrics.hpp"
#include "pathpiece/randtrain.hpp"
#include "pathpiece/segment.hpp"
#include "pathpiece/vocab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace pathpiece;
using nlohmann::json;

namespace {

struct CorpusArgs {
    std::string corpus;
    std::string framing = "line";
    bool skip_bad = false;
    std::size_t workers = 0;
    std::string pretok = "none";

    void add_to(CLI::App* app) {
        app->add_option("--corpus", corpus, "file, directory, or - for stdin")->required();
        app->add_option("--framing", framing, "line | file | jsonl:<field>")->capture_default_str();
        app->add_flag("--skip-bad", skip_bad, "skip malformed JSONL lines");
        app->add_option("--workers", workers, "worker threads (0 = all cores)")->capture_default_str();
        app->add_option("--pretok", pretok, "none | firstspace | space | firstsp-digit | space-digit")
            ->capture_default_str();
    }
    StreamOptions stream() const { return {Framing::parse(framing), skip_bad}; }
    PreTokenMode mode() const { return parse_pretoken_mode(pretok); }
    std::vector<std::string> load() const { return read_corpus(corpus, stream()); }
};

struct InitArgs {
    std::string init = "ngram";
    std::size_t init_size = kDefaultInitSize;
    std::string init_rank = "count";
    std::size_t max_len = kDefaultMaxTokenLen;

    void add_to(CLI::App* app) {
        app->add_option("--init", init, "ngram | file:<vocab>")->capture_default_str();
        app->add_option("--init-size", init_size, "initial vocabulary size for ngram init")->capture_default_str();
        app->add_option("--init-rank", init_rank, "count | count-x-len")->capture_default_str();
        app->add_option("--L", max_len, "maximum token length in bytes")->capture_default_str();
    }
    Vocabulary make(std::span<const std::string> corpus, PreTokenMode mode, std::size_t workers) const {
        if (init.starts_with("file:")) {
            return load_vocab(init.substr(5));
        }
        if (init != "ngram") {
            throw std::invalid_argument("unknown --init '" + init + "' (expected ngram|file:<path>)");
        }
        NgramInitOptions opts;
        opts.max_token_len = max_len;
        opts.size = init_size;
        opts.mode = mode;
        opts.workers = workers;
        if (init_rank == "count-x-len") {
            opts.ranking = NgramRanking::CountTimesLength;
        } else if (init_rank != "count") {
            throw std::invalid_argument("unknown --init-rank '" + init_rank + "'");
        }
        return init_vocab_ngrams(corpus, opts);
    }
};

// Add-one smoothed -log p from the counts stored in the vocabulary file;
// uniform when the file has no counts.
std::shared_ptr<const TokenWeights> weights_from_counts(const Vocabulary& vocab) {
    if (!vocab.has_counts()) {
        return std::make_shared<const TokenWeights>(TokenWeights::uniform(vocab));
    }
    long double total = 0;
    for (auto c : vocab.counts()) total += static_cast<long double>(c);
    const long double denom = total + static_cast<long double>(vocab.size());
    std::vector<double> w(vocab.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = static_cast<double>(-std::log((static_cast<long double>(vocab.counts()[i]) + 1) / denom));
    }
    return std::make_shared<const TokenWeights>(std::move(w), vocab);
}

SegmenterOptions segmenter_options(const Vocabulary& vocab, const std::string& engine,
                                   PreTokenMode mode, std::uint64_t seed) {
    SegmenterOptions opts;
    opts.engine = parse_engine(engine);
    opts.mode = mode;
    opts.seed = seed;
    if (opts.engine == Engine::Weighted) {
        opts.weights = weights_from_counts(vocab);
    }
    return opts;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string alpha_key(double a) {
    std::ostringstream os;
    os << a;
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PathPiece byte-level tokenizer toolkit"};
    app.require_subcommand(1);

    // segment
    auto* seg = app.add_subcommand("segment", "segment a corpus, one output line per document");
    CorpusArgs seg_corpus;
    seg_corpus.add_to(seg);
    std::string seg_vocab, seg_engine = "pathpiece-l", seg_emit = "ids", seg_out;
    std::uint64_t seg_seed = 0;
    seg->add_option("--vocab", seg_vocab)->required();
    seg->add_option("--engine", seg_engine, "pathpiece-l | pathpiece-r | greedy | weighted")->capture_default_str();
    seg->add_option("--seed", seg_seed, "global seed for pathpiece-r")->capture_default_str();
    seg->add_option("--emit", seg_emit, "ids | tokens")->check(CLI::IsMember({"ids", "tokens"}))->capture_default_str();
    seg->add_option("--out", seg_out, "output file (default stdout)");

    // build-vocab
    auto* build = app.add_subcommand("build-vocab", "top-down vocabulary construction");
    CorpusArgs build_corpus;
    build_corpus.add_to(build);
    InitArgs build_init;
    build_init.add_to(build);
    std::size_t build_target = 0, build_min_batch = 256;
    double build_fraction = 0.25;
    std::string build_out, build_progress;
    build->add_option("--target", build_target)->required();
    build->add_option("--batch-fraction", build_fraction)->capture_default_str();
    build->add_option("--min-batch", build_min_batch)->capture_default_str();
    build->add_option("--out", build_out)->required();
    build->add_option("--progress", build_progress, "JSON-lines progress file (default stderr)");

    // randtrain
    auto* rt = app.add_subcommand("randtrain", "random vocabulary by weighted sampling");
    CorpusArgs rt_corpus;
    rt_corpus.add_to(rt);
    InitArgs rt_init;
    rt_init.add_to(rt);
    std::string rt_counts = "ngram", rt_out;
    std::size_t rt_target = 0;
    std::uint64_t rt_seed = 0;
    rt->add_option("--counts", rt_counts, "ngram | segmented")->check(CLI::IsMember({"ngram", "segmented"}))
        ->capture_default_str();
    rt->add_option("--target", rt_target)->required();
    rt->add_option("--seed", rt_seed)->capture_default_str();
    rt->add_option("--out", rt_out)->required();

    // metrics
    auto* met = app.add_subcommand("metrics", "corpus token count and Renyi efficiency");
    CorpusArgs met_corpus;
    met_corpus.add_to(met);
    std::string met_vocab, met_engine = "pathpiece-l", met_norm = "vocab";
    std::uint64_t met_seed = 0;
    std::vector<double> met_alpha{1.5, 2, 2.5, 3, 3.5};
    met->add_option("--vocab", met_vocab)->required();
    met->add_option("--engine", met_engine)->capture_default_str();
    met->add_option("--seed", met_seed)->capture_default_str();
    met->add_option("--alpha", met_alpha, "comma-separated orders")->delimiter(',')->capture_default_str();
    met->add_option("--normalize", met_norm, "vocab | support")->check(CLI::IsMember({"vocab", "support"}))
        ->capture_default_str();

    // compare-vocabs
    auto* cmp = app.add_subcommand("compare-vocabs", "overlap of two or three vocabularies");
    std::vector<std::string> cmp_files;
    cmp->add_option("vocabs", cmp_files)->required()->expected(2, 3);

    CLI11_PARSE(app, argc, argv);

    try {
        if (seg->parsed()) {
            const Vocabulary vocab = load_vocab(seg_vocab);
            vocab.require_complete();
            const auto opts = segmenter_options(vocab, seg_engine, seg_corpus.mode(), seg_seed);
            const bool hex = seg_emit == "tokens";
            Output out(seg_out);
            std::ostream& os = out.stream();
            DocumentStream stream(seg_corpus.corpus, seg_corpus.stream());
            struct State {
                Segmenter segmenter;
                std::vector<TokenId> ids;
            };
            parallel_map_ordered(
                stream, seg_corpus.workers, State{Segmenter(vocab, opts), {}},
                [&](State& s, std::uint64_t ordinal, std::string_view doc) {
                    s.ids.clear();
                    s.segmenter.segment(doc, ordinal, s.ids);
                    std::string line;
                    for (std::size_t i = 0; i < s.ids.size(); ++i) {
                        if (i) line.push_back(' ');
                        line += hex ? to_hex(vocab.token(s.ids[i])) : std::to_string(s.ids[i]);
                    }
                    line.push_back('\n');
                    return line;
                },
                [&](std::uint64_t, std::string&& line) { os << line; });
            os.flush();
            if (!os) throw std::runtime_error("write failed");
        } else if (build->parsed()) {
            const auto corpus = build_corpus.load();
            const PreTokenMode mode = build_corpus.mode();
            const Vocabulary initial = build_init.make(corpus, mode, build_corpus.workers);
            std::ofstream progress_file;
            if (!build_progress.empty()) {
                progress_file.open(build_progress);
                if (!progress_file) throw std::runtime_error("cannot write '" + build_progress + "'");
            }
            std::ostream& progress = progress_file.is_open() ? progress_file : std::cerr;
            BuildOptions opts;
            opts.schedule = {build_target, build_fraction, build_min_batch};
            opts.mode = mode;
            opts.workers = build_corpus.workers;
            opts.on_progress = [&](const ProgressRecord& r) {
                progress << json{{"iter", r.iteration}, {"vocab_size", r.vocab_size}, {"ctc", r.ctc}}.dump()
                         << std::endl;
            };
            save_vocab(build_vocab(corpus, initial, opts).vocab, build_out);
        } else if (rt->parsed()) {
            const auto corpus = rt_corpus.load();
            const PreTokenMode mode = rt_corpus.mode();
            const Vocabulary initial = rt_init.make(corpus, mode, rt_corpus.workers);
            SegmenterOptions segopts;
            segopts.mode = mode;
            const auto weights = occurrence_weights(
                corpus, initial, rt_counts == "ngram" ? CountSource::NgramCounts : CountSource::SegmentedCounts,
                segopts, rt_corpus.workers);
            const auto over = weights.infeasible(rt_target);
            if (!over.empty()) {
                std::cerr << "pathpiece: note: " << over.size()
                          << " tokens exceed 1/target and are under-sampled relative to their weight\n";
            }
            save_vocab(randtrain(initial, weights, rt_target, rt_seed), rt_out);
        } else if (met->parsed()) {
            const Vocabulary vocab = load_vocab(met_vocab);
            const auto corpus = met_corpus.load();
            const auto opts = segmenter_options(vocab, met_engine, met_corpus.mode(), met_seed);
            const auto stats = segmentation_stats(corpus, vocab, opts, met_corpus.workers);
            const auto report = metrics_report(
                stats, met_alpha, vocab.size(),
                met_norm == "vocab" ? EfficiencyNorm::NominalVocab : EfficiencyNorm::ObservedSupport);
            json renyi = json::object();
            for (const auto& [a, e] : report.renyi) renyi[alpha_key(a)] = e;
            std::cout << json{{"ctc", report.ctc}, {"renyi", renyi}, {"vocab_size", report.vocab_size}}.dump()
                      << '\n';
        } else if (cmp->parsed()) {
            std::vector<Vocabulary> vocabs;
            for (const auto& f : cmp_files) vocabs.push_back(load_vocab(f));
            std::vector<const Vocabulary*> ptrs;
            for (const auto& v : vocabs) ptrs.push_back(&v);
            json out = json::object();
            for (const auto& [region, n] : vocab_overlap(ptrs)) out[region] = n;
            std::cout << out.dump() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "pathpiece: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
