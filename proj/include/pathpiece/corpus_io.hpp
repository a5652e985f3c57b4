#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pathpiece {

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FramingKind { Line, File, JsonlField };

struct Framing {
    FramingKind kind = FramingKind::Line;
    std::string field;  // JsonlField only

    // "line" | "file" | "jsonl:<field>"
    static Framing parse(std::string_view name);
    friend bool operator==(const Framing&, const Framing&) = default;
};

struct Document {
    std::uint64_t ordinal = 0;
    std::string bytes;
};

struct StreamOptions {
    Framing framing;
    bool skip_bad = false;  // skip malformed JSONL lines instead of aborting
};

// Reads documents one at a time from a file, a directory (regular files,
// recursively, sorted by path), or standard input ("-"). Ordinals are dense
// and 0-based. A directory defaults to one document per file; an explicit
// JSONL framing is applied inside each file instead.
class DocumentStream {
public:
    DocumentStream(std::string source, StreamOptions options = {});
    ~DocumentStream();
    DocumentStream(DocumentStream&&) noexcept;
    DocumentStream& operator=(DocumentStream&&) noexcept;

    std::optional<Document> next();

    // Appends up to `max_docs` documents or roughly `max_bytes` bytes.
    // Returns false when nothing was appended.
    bool next_batch(std::vector<Document>& out, std::size_t max_docs, std::size_t max_bytes);

private:
    bool open_next_file();

    std::string source_;
    StreamOptions options_;
    std::vector<std::filesystem::path> files_;
    std::size_t file_index_ = 0;
    std::unique_ptr<std::ifstream> file_;
    std::istream* in_ = nullptr;
    std::string current_name_;
    std::uint64_t line_no_ = 0;
    std::uint64_t next_ordinal_ = 0;
    bool whole_file_ = false;
    bool done_ = false;
};

// Materializes every document of a source.
std::vector<std::string> read_corpus(const std::string& source, StreamOptions options = {});

// Number of workers to use when the caller passes 0.
std::size_t default_workers();

namespace detail {

struct FirstError {
    std::mutex mu;
    std::uint64_t ordinal = std::numeric_limits<std::uint64_t>::max();
    std::string message;
    std::atomic<bool> failed{false};

    void record(std::uint64_t ord, const char* what) {
        std::lock_guard lock(mu);
        if (ord < ordinal) {
            ordinal = ord;
            message = what;
        }
        failed.store(true, std::memory_order_relaxed);
    }
    void rethrow() const {
        if (failed.load()) {
            throw CorpusError("document " + std::to_string(ordinal) + ": " + message);
        }
    }
};

// Runs fn(worker_index, item_index) over [0, count) on `workers` threads,
// items handed out dynamically. Exceptions are tagged with ordinal_of(i).
template <class Fn, class OrdinalOf>
void run_indexed(std::size_t count, std::size_t workers, Fn&& fn, OrdinalOf&& ordinal_of) {
    FirstError error;
    auto body = [&](std::size_t w, std::atomic<std::size_t>& cursor) {
        // A fetched item is always run, so every ordinal below a failure
        // gets processed and the lowest failure is the one reported.
        while (!error.failed.load(std::memory_order_relaxed)) {
            const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) {
                return;
            }
            try {
                fn(w, i);
            } catch (const std::exception& e) {
                error.record(ordinal_of(i), e.what());
            }
        }
    };
    std::atomic<std::size_t> cursor{0};
    if (workers <= 1 || count <= 1) {
        body(0, cursor);
    } else {
        std::vector<std::jthread> threads;
        const std::size_t n = std::min(workers, count);
        threads.reserve(n);
        for (std::size_t w = 0; w < n; ++w) {
            threads.emplace_back([&, w] { body(w, cursor); });
        }
    }
    error.rethrow();
}

inline constexpr std::size_t kBatchDocs = 65536;
inline constexpr std::size_t kBatchBytes = std::size_t{32} << 20;

} // namespace detail

// Folds every document into per-worker copies of `init` with
// per_doc(acc, ordinal, bytes), then merges the partials with
// merge(into, std::move(from)). merge must be commutative and associative;
// the result then equals the sequential fold for any worker count. An
// exception from per_doc is rethrown as CorpusError naming the lowest
// failing ordinal.
template <class Acc, class PerDoc, class Merge>
Acc parallel_map_reduce(std::span<const std::string> docs, std::size_t workers, const Acc& init,
                        PerDoc&& per_doc, Merge&& merge) {
    if (workers == 0) {
        workers = default_workers();
    }
    workers = std::max<std::size_t>(1, std::min(workers, docs.size()));
    std::vector<Acc> partial(workers, init);
    detail::run_indexed(
        docs.size(), workers,
        [&](std::size_t w, std::size_t i) { per_doc(partial[w], static_cast<std::uint64_t>(i), std::string_view(docs[i])); },
        [](std::size_t i) { return static_cast<std::uint64_t>(i); });
    Acc result = std::move(partial[0]);
    for (std::size_t w = 1; w < partial.size(); ++w) {
        merge(result, std::move(partial[w]));
    }
    return result;
}

template <class Acc, class PerDoc, class Merge>
Acc parallel_map_reduce(DocumentStream& stream, std::size_t workers, const Acc& init,
                        PerDoc&& per_doc, Merge&& merge) {
    if (workers == 0) {
        workers = default_workers();
    }
    std::vector<Acc> partial(std::max<std::size_t>(1, workers), init);
    std::vector<Document> batch;
    while (true) {
        batch.clear();
        if (!stream.next_batch(batch, detail::kBatchDocs, detail::kBatchBytes)) {
            break;
        }
        detail::run_indexed(
            batch.size(), workers,
            [&](std::size_t w, std::size_t i) {
                per_doc(partial[w], batch[i].ordinal, std::string_view(batch[i].bytes));
            },
            [&](std::size_t i) { return batch[i].ordinal; });
    }
    Acc result = std::move(partial[0]);
    for (std::size_t w = 1; w < partial.size(); ++w) {
        merge(result, std::move(partial[w]));
    }
    return result;
}

// Order-preserving map: fn(state, ordinal, bytes) -> R runs on per-worker
// copies of `state`; sink(ordinal, R&&) is called on the calling thread in
// ordinal order.
template <class State, class Fn, class Sink>
void parallel_map_ordered(DocumentStream& stream, std::size_t workers, const State& state, Fn&& fn,
                          Sink&& sink) {
    if (workers == 0) {
        workers = default_workers();
    }
    std::vector<State> states(std::max<std::size_t>(1, workers), state);
    std::vector<Document> batch;
    using Result = decltype(fn(states[0], std::uint64_t{}, std::string_view{}));
    std::vector<Result> results;
    while (true) {
        batch.clear();
        if (!stream.next_batch(batch, detail::kBatchDocs, detail::kBatchBytes)) {
            break;
        }
        results.clear();
        results.resize(batch.size());
        detail::run_indexed(
            batch.size(), workers,
            [&](std::size_t w, std::size_t i) {
                results[i] = fn(states[w], batch[i].ordinal, std::string_view(batch[i].bytes));
            },
            [&](std::size_t i) { return batch[i].ordinal; });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            sink(batch[i].ordinal, std::move(results[i]));
        }
    }
}

template <class State, class Fn, class Sink>
void parallel_map_ordered(std::span<const std::string> docs, std::size_t workers,
                          const State& state, Fn&& fn, Sink&& sink) {
    if (workers == 0) {
        workers = default_workers();
    }
    std::vector<State> states(std::max<std::size_t>(1, workers), state);
    using Result = decltype(fn(states[0], std::uint64_t{}, std::string_view{}));
    std::vector<Result> results(docs.size());
    detail::run_indexed(
        docs.size(), workers,
        [&](std::size_t w, std::size_t i) {
            results[i] = fn(states[w], static_cast<std::uint64_t>(i), std::string_view(docs[i]));
        },
        [](std::size_t i) { return static_cast<std::uint64_t>(i); });
    for (std::size_t i = 0; i < docs.size(); ++i) {
        sink(static_cast<std::uint64_t>(i), std::move(results[i]));
    }
}

} // namespace pathpiece
