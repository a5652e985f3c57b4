#include "pathpiece/vocab.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace pathpiece {

namespace {

constexpr std::string_view kHeaderMagic = "pathpiece-vocab v1";

std::string byte_name(unsigned char b) {
    return "0x" + to_hex(std::string_view(reinterpret_cast<const char*>(&b), 1));
}

template <class Int>
bool parse_decimal(std::string_view s, Int& out) {
    if (s.empty() || s.front() == '+' || s.front() == '-') {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw VocabError("vocab line " + std::to_string(line_no) + ": " + what);
}

} // namespace

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}, kDefaultMaxTokenLen) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t max_token_len,
                       std::vector<std::uint64_t> counts)
    : tokens_(std::move(tokens)), max_token_len_(max_token_len), counts_(std::move(counts)) {
    if (max_token_len_ == 0) {
        throw VocabError("max token length must be at least 1");
    }
    if (!counts_.empty() && counts_.size() != tokens_.size()) {
        throw VocabError("count table has " + std::to_string(counts_.size()) + " entries for " +
                         std::to_string(tokens_.size()) + " tokens");
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(tokens_.size());
    std::array<bool, kByteAlphabetSize> singles{};
    for (std::size_t id = 0; id < tokens_.size(); ++id) {
        const std::string& t = tokens_[id];
        if (t.empty()) {
            throw VocabError("token " + std::to_string(id) + " is empty");
        }
        if (t.size() > max_token_len_) {
            throw VocabError("token " + std::to_string(id) + " (" + to_hex(t) + ") is " +
                             std::to_string(t.size()) + " bytes, longer than L=" +
                             std::to_string(max_token_len_));
        }
        if (!seen.insert(t).second) {
            throw VocabError("duplicate token " + to_hex(t) + " at id " + std::to_string(id));
        }
        if (t.size() == 1) {
            singles[static_cast<unsigned char>(t[0])] = true;
        }
    }
    complete_ = std::all_of(singles.begin(), singles.end(), [](bool b) { return b; });
    prefix_ = std::make_shared<const TokenTrie>(tokens_, false);
    suffix_ = std::make_shared<const TokenTrie>(tokens_, true);
}

Vocabulary Vocabulary::single_bytes(std::size_t max_token_len) {
    return with_single_bytes({}, max_token_len);
}

Vocabulary Vocabulary::with_single_bytes(const std::vector<std::string>& extra,
                                         std::size_t max_token_len) {
    std::vector<std::string> tokens;
    tokens.reserve(kByteAlphabetSize + extra.size());
    for (std::size_t b = 0; b < kByteAlphabetSize; ++b) {
        tokens.emplace_back(1, static_cast<char>(b));
    }
    for (const auto& t : extra) {
        if (t.size() != 1) {
            tokens.push_back(t);
        }
    }
    return Vocabulary(std::move(tokens), max_token_len);
}

std::optional<TokenId> Vocabulary::contains(std::string_view bytes) const {
    const TokenId id = prefix_->find(bytes);
    if (id == kNoToken) {
        return std::nullopt;
    }
    return id;
}

void Vocabulary::require_complete() const {
    if (complete_) {
        return;
    }
    for (std::size_t b = 0; b < kByteAlphabetSize; ++b) {
        const char c = static_cast<char>(b);
        if (!contains(std::string_view(&c, 1))) {
            throw VocabError("vocabulary is missing single-byte token " +
                             byte_name(static_cast<unsigned char>(b)));
        }
    }
}

bool ranks_before(const CountedToken& a, const CountedToken& b) {
    if (a.count != b.count) {
        return a.count > b.count;
    }
    if (a.bytes.size() != b.bytes.size()) {
        return a.bytes.size() < b.bytes.size();
    }
    return a.bytes < b.bytes;
}

Vocabulary ensure_single_bytes(std::vector<CountedToken> tokens, std::size_t capacity,
                               std::size_t max_token_len,
                               std::span<const unsigned char> required, TokenRanking rank) {
    std::array<bool, kByteAlphabetSize> is_required{};
    std::size_t n_required = 0;
    if (required.empty()) {
        is_required.fill(true);
        n_required = kByteAlphabetSize;
    } else {
        for (unsigned char b : required) {
            if (!is_required[b]) {
                is_required[b] = true;
                ++n_required;
            }
        }
    }
    if (capacity < n_required) {
        throw VocabError("capacity " + std::to_string(capacity) + " cannot hold the " +
                         std::to_string(n_required) + " required single-byte tokens");
    }

    std::array<std::uint64_t, kByteAlphabetSize> single_counts{};
    std::vector<CountedToken> others;
    for (auto& t : tokens) {
        if (t.bytes.size() == 1 && is_required[static_cast<unsigned char>(t.bytes[0])]) {
            single_counts[static_cast<unsigned char>(t.bytes[0])] = t.count;
        } else {
            others.push_back(std::move(t));
        }
    }
    std::sort(others.begin(), others.end(), rank);
    const std::size_t slots = capacity - n_required;
    if (others.size() > slots) {
        others.resize(slots);
    }

    std::vector<std::string> out_tokens;
    std::vector<std::uint64_t> out_counts;
    out_tokens.reserve(n_required + others.size());
    out_counts.reserve(n_required + others.size());
    for (std::size_t b = 0; b < kByteAlphabetSize; ++b) {
        if (is_required[b]) {
            out_tokens.emplace_back(1, static_cast<char>(b));
            out_counts.push_back(single_counts[b]);
        }
    }
    for (auto& t : others) {
        out_tokens.push_back(std::move(t.bytes));
        out_counts.push_back(t.count);
    }
    return Vocabulary(std::move(out_tokens), max_token_len, std::move(out_counts));
}

std::string to_hex(std::string_view bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (char c : bytes) {
        const auto b = static_cast<unsigned char>(c);
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

std::string from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw VocabError("odd-length hex string '" + std::string(hex) + "'");
    }
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw VocabError("invalid hex digit in '" + std::string(hex) + "'");
    };
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
    }
    return out;
}

std::string serialize_vocab(const Vocabulary& vocab) {
    std::string out;
    out += kHeaderMagic;
    out += " L=" + std::to_string(vocab.max_token_len());
    out += vocab.is_complete() ? " complete=1\n" : " complete=0\n";
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        out += to_hex(vocab.token(static_cast<TokenId>(id)));
        if (vocab.has_counts()) {
            out += ' ';
            out += std::to_string(vocab.counts()[id]);
        }
        out += '\n';
    }
    return out;
}

Vocabulary parse_vocab(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (lines.empty()) {
        throw VocabError("vocab file is empty (missing header)");
    }

    const std::string_view header = lines[0];
    if (!header.starts_with(kHeaderMagic)) {
        fail_line(1, "bad header, expected '" + std::string(kHeaderMagic) + " L=<int> complete=<0|1>'");
    }
    std::size_t max_len = 0;
    bool declared_complete = false;
    {
        std::string_view rest = header.substr(kHeaderMagic.size());
        const std::string_view l_key = " L=";
        const std::string_view c_key = " complete=";
        const std::size_t c_at = rest.find(c_key);
        if (!rest.starts_with(l_key) || c_at == std::string_view::npos) {
            fail_line(1, "bad header '" + std::string(header) + "'");
        }
        if (!parse_decimal(rest.substr(l_key.size(), c_at - l_key.size()), max_len) || max_len == 0) {
            fail_line(1, "bad L value in header");
        }
        const std::string_view flag = rest.substr(c_at + c_key.size());
        if (flag != "0" && flag != "1") {
            fail_line(1, "bad complete flag in header");
        }
        declared_complete = flag == "1";
    }

    std::vector<std::string> tokens;
    std::vector<std::uint64_t> counts;
    std::optional<bool> with_counts;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string_view line = lines[i];
        if (line.empty()) {
            fail_line(line_no, "empty line");
        }
        const std::size_t sp = line.find(' ');
        const std::string_view hex = line.substr(0, sp);
        std::string bytes;
        try {
            bytes = from_hex(hex);
        } catch (const VocabError& e) {
            fail_line(line_no, e.what());
        }
        if (bytes.empty()) {
            fail_line(line_no, "empty token");
        }
        if (bytes.size() > max_len) {
            fail_line(line_no, "token " + std::string(hex) + " is " + std::to_string(bytes.size()) +
                                   " bytes, longer than L=" + std::to_string(max_len));
        }
        if (!seen.insert(bytes).second) {
            fail_line(line_no, "duplicate token " + std::string(hex));
        }
        const bool has_count = sp != std::string_view::npos;
        if (with_counts && *with_counts != has_count) {
            fail_line(line_no, "counts must be given on every line or on none");
        }
        with_counts = has_count;
        if (has_count) {
            std::uint64_t c = 0;
            if (!parse_decimal(line.substr(sp + 1), c)) {
                fail_line(line_no, "bad count '" + std::string(line.substr(sp + 1)) + "'");
            }
            counts.push_back(c);
        }
        tokens.push_back(std::move(bytes));
    }

    Vocabulary vocab(std::move(tokens), max_len, std::move(counts));
    if (declared_complete) {
        vocab.require_complete();
    }
    return vocab;
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw VocabError("cannot open '" + path.string() + "' for writing");
    }
    const std::string text = serialize_vocab(vocab);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw VocabError("failed writing '" + path.string() + "'");
    }
}

Vocabulary load_vocab(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw VocabError("cannot open vocab file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_vocab(buf.str());
    } catch (const VocabError& e) {
        throw VocabError(path.string() + ": " + e.what());
    }
}

} // namespace pathpiece
