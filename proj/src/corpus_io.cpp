#include "pathpiece/corpus_io.hpp"

#include <json.hpp>

#include <iostream>

namespace pathpiece {

Framing Framing::parse(std::string_view name) {
    if (name == "line") return {FramingKind::Line, {}};
    if (name == "file") return {FramingKind::File, {}};
    if (name.starts_with("jsonl:") && name.size() > 6) {
        return {FramingKind::JsonlField, std::string(name.substr(6))};
    }
    throw std::invalid_argument("unknown framing '" + std::string(name) +
                                "' (expected line|file|jsonl:<field>)");
}

std::size_t default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

DocumentStream::DocumentStream(std::string source, StreamOptions options)
    : source_(std::move(source)), options_(std::move(options)) {
    namespace fs = std::filesystem;
    if (source_ == "-") {
        in_ = &std::cin;
        current_name_ = "<stdin>";
        whole_file_ = options_.framing.kind == FramingKind::File;
        return;
    }
    std::error_code ec;
    const fs::file_status st = fs::status(source_, ec);
    if (ec || !fs::exists(st)) {
        throw CorpusError("cannot read corpus source '" + source_ + "'");
    }
    if (fs::is_directory(st)) {
        for (const auto& entry : fs::recursive_directory_iterator(source_)) {
            if (entry.is_regular_file()) {
                files_.push_back(entry.path());
            }
        }
        std::sort(files_.begin(), files_.end());
        whole_file_ = options_.framing.kind != FramingKind::JsonlField;
    } else {
        files_.push_back(source_);
        whole_file_ = options_.framing.kind == FramingKind::File;
    }
}

DocumentStream::~DocumentStream() = default;
DocumentStream::DocumentStream(DocumentStream&&) noexcept = default;
DocumentStream& DocumentStream::operator=(DocumentStream&&) noexcept = default;

bool DocumentStream::open_next_file() {
    if (file_index_ >= files_.size()) {
        return false;
    }
    const auto& path = files_[file_index_++];
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) {
        throw CorpusError("cannot open corpus file '" + path.string() + "'");
    }
    in_ = file_.get();
    current_name_ = path.string();
    line_no_ = 0;
    return true;
}

std::optional<Document> DocumentStream::next() {
    while (!done_) {
        if (in_ == nullptr && !open_next_file()) {
            done_ = true;
            break;
        }
        if (whole_file_) {
            std::string bytes{std::istreambuf_iterator<char>(*in_), std::istreambuf_iterator<char>()};
            if (in_->bad()) {
                throw CorpusError("read error on '" + current_name_ + "'");
            }
            in_ = nullptr;
            if (source_ == "-") {
                done_ = true;
            }
            return Document{next_ordinal_++, std::move(bytes)};
        }

        std::string line;
        if (!std::getline(*in_, line)) {
            if (in_->bad()) {
                throw CorpusError("read error on '" + current_name_ + "'");
            }
            in_ = nullptr;
            if (source_ == "-") {
                done_ = true;
            }
            continue;
        }
        ++line_no_;
        if (options_.framing.kind == FramingKind::Line) {
            return Document{next_ordinal_++, std::move(line)};
        }

        const auto fail = [&](const std::string& why) {
            return CorpusError(current_name_ + ":" + std::to_string(line_no_) + ": " + why);
        };
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            if (options_.skip_bad) continue;
            throw fail(std::string("malformed JSON: ") + e.what());
        }
        const auto it = record.is_object() ? record.find(options_.framing.field) : record.end();
        if (!record.is_object() || it == record.end() || !it->is_string()) {
            if (options_.skip_bad) continue;
            throw fail("missing string field '" + options_.framing.field + "'");
        }
        return Document{next_ordinal_++, it->get<std::string>()};
    }
    return std::nullopt;
}

bool DocumentStream::next_batch(std::vector<Document>& out, std::size_t max_docs,
                                std::size_t max_bytes) {
    std::size_t docs = 0;
    std::size_t bytes = 0;
    while (docs < max_docs && bytes < max_bytes) {
        auto doc = next();
        if (!doc) {
            break;
        }
        bytes += doc->bytes.size() + 1;
        out.push_back(std::move(*doc));
        ++docs;
    }
    return docs > 0;
}

std::vector<std::string> read_corpus(const std::string& source, StreamOptions options) {
    DocumentStream stream(source, std::move(options));
    std::vector<std::string> docs;
    while (auto doc = stream.next()) {
        docs.push_back(std::move(doc->bytes));
    }
    return docs;
}

} // namespace pathpiece
