#pragma once

#include "pathpiece/token_trie.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathpiece {

inline constexpr std::size_t kDefaultMaxTokenLen = 16;
inline constexpr std::size_t kByteAlphabetSize = 256;

class VocabError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Ordered set of unique, non-empty byte-string tokens; token id is the
// position in `tokens()`. Optionally carries one occurrence count per token.
// Immutable after construction and cheap to copy (tries are shared).
class Vocabulary {
public:
    Vocabulary();
    // Throws VocabError on an empty or duplicate token, a token longer than
    // `max_token_len`, or a count table of the wrong size.
    Vocabulary(std::vector<std::string> tokens, std::size_t max_token_len,
               std::vector<std::uint64_t> counts = {});

    // The 256 single-byte tokens, id = byte value.
    static Vocabulary single_bytes(std::size_t max_token_len = kDefaultMaxTokenLen);
    // single_bytes() followed by `extra` (skipping any already present).
    static Vocabulary with_single_bytes(const std::vector<std::string>& extra,
                                        std::size_t max_token_len = kDefaultMaxTokenLen);

    std::size_t size() const { return tokens_.size(); }
    std::size_t max_token_len() const { return max_token_len_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::string& token(TokenId id) const { return tokens_[id]; }

    bool has_counts() const { return !counts_.empty(); }
    const std::vector<std::uint64_t>& counts() const { return counts_; }

    std::optional<TokenId> contains(std::string_view bytes) const;

    // True when every single byte 0x00..0xFF is a token.
    bool is_complete() const { return complete_; }
    // Throws VocabError naming the first missing byte.
    void require_complete() const;

    // Walks bytes front to back from the root.
    const TokenTrie& prefix_trie() const { return *prefix_; }
    // Walks bytes back to front from the root.
    const TokenTrie& suffix_trie() const { return *suffix_; }

    // Calls fn(width, id) for each token ending just before `end`, in
    // ascending width, limited to the text start and to max_width (0 means
    // max_token_len()).
    template <class Fn>
    void for_each_ending_at(std::string_view text, std::size_t end, Fn&& fn,
                            std::size_t max_width = 0) const;
    // Calls fn(width, id) for each token starting at `begin`, ascending width.
    template <class Fn>
    void for_each_starting_at(std::string_view text, std::size_t begin, Fn&& fn,
                              std::size_t max_width = 0) const;

    // Effective width cap: max_width if non-zero and smaller, else L.
    std::size_t width_cap(std::size_t max_width) const {
        return max_width == 0 || max_width > max_token_len_ ? max_token_len_ : max_width;
    }

private:
    std::vector<std::string> tokens_;
    std::size_t max_token_len_ = kDefaultMaxTokenLen;
    std::vector<std::uint64_t> counts_;
    bool complete_ = false;
    std::shared_ptr<const TokenTrie> prefix_;
    std::shared_ptr<const TokenTrie> suffix_;
};

// One token with its occurrence count, as produced by n-gram counting.
struct CountedToken {
    std::string bytes;
    std::uint64_t count = 0;
};

// Deterministic ranking: count descending, then shorter first, then bytes
// ascending (unsigned).
bool ranks_before(const CountedToken& a, const CountedToken& b);

using TokenRanking = bool (*)(const CountedToken&, const CountedToken&);

// Makes room for every byte in `required` (all 256 by default) by dropping
// the lowest-ranked tokens. The result holds the required single bytes
// first (ids 0.. in byte order, carrying their input counts or 0) followed
// by the surviving other tokens in rank order, at most `capacity` in total.
// Throws VocabError when capacity < |required|.
Vocabulary ensure_single_bytes(std::vector<CountedToken> tokens, std::size_t capacity,
                               std::size_t max_token_len = kDefaultMaxTokenLen,
                               std::span<const unsigned char> required = {},
                               TokenRanking rank = ranks_before);

// Text format: header `pathpiece-vocab v1 L=<int> complete=<0|1>`, then one
// lowercase-hex token per line with an optional ` <count>` suffix, LF only.
std::string serialize_vocab(const Vocabulary& vocab);
Vocabulary parse_vocab(std::string_view text);
void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocab(const std::filesystem::path& path);

std::string to_hex(std::string_view bytes);
// Lowercase hex only; throws VocabError on odd length or bad digits.
std::string from_hex(std::string_view hex);

template <class Fn>
void Vocabulary::for_each_ending_at(std::string_view text, std::size_t end, Fn&& fn,
                                    std::size_t max_width) const {
    const TokenTrie& trie = *suffix_;
    TokenTrie::NodeIndex node = TokenTrie::root();
    const std::size_t cap = width_cap(max_width);
    const std::size_t max_w = end < cap ? end : cap;
    for (std::size_t w = 1; w <= max_w; ++w) {
        node = trie.child(node, static_cast<unsigned char>(text[end - w]));
        if (node == TokenTrie::kNoNode) {
            return;
        }
        const TokenId id = trie.token(node);
        if (id != kNoToken) {
            fn(w, id);
        }
    }
}

template <class Fn>
void Vocabulary::for_each_starting_at(std::string_view text, std::size_t begin, Fn&& fn,
                                      std::size_t max_width) const {
    const TokenTrie& trie = *prefix_;
    TokenTrie::NodeIndex node = TokenTrie::root();
    const std::size_t cap = width_cap(max_width);
    const std::size_t remaining = text.size() - begin;
    const std::size_t max_w = remaining < cap ? remaining : cap;
    for (std::size_t w = 1; w <= max_w; ++w) {
        node = trie.child(node, static_cast<unsigned char>(text[begin + w - 1]));
        if (node == TokenTrie::kNoNode) {
            return;
        }
        const TokenId id = trie.token(node);
        if (id != kNoToken) {
            fn(w, id);
        }
    }
}

} // namespace pathpiece
