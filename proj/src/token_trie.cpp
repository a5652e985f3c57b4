#include "pathpiece/token_trie.hpp"

#include <algorithm>
#include <utility>

namespace pathpiece {

namespace {
constexpr std::uint32_t kDenseThreshold = 12;
}

TokenTrie::TokenTrie(const std::vector<std::string>& tokens, bool reversed)
    : reversed_(reversed) {
    std::vector<std::pair<std::string, TokenId>> keys;
    keys.reserve(tokens.size());
    for (std::size_t id = 0; id < tokens.size(); ++id) {
        std::string key = tokens[id];
        if (reversed) {
            std::reverse(key.begin(), key.end());
        }
        keys.emplace_back(std::move(key), static_cast<TokenId>(id));
    }
    std::sort(keys.begin(), keys.end());

    nodes_.emplace_back();
    build_range(keys, 0, keys.size(), 0, root());
}

void TokenTrie::build_range(const std::vector<std::pair<std::string, TokenId>>& keys,
                            std::size_t lo, std::size_t hi, std::size_t depth, NodeIndex node) {
    if (lo < hi && keys[lo].first.size() == depth) {
        nodes_[node].token = keys[lo].second;
        ++lo;
    }
    if (lo >= hi) {
        return;
    }

    // Group the remaining keys by their byte at `depth`.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = lo; i < hi;) {
        const char byte = keys[i].first[depth];
        std::size_t j = i + 1;
        while (j < hi && keys[j].first[depth] == byte) {
            ++j;
        }
        groups.emplace_back(i, j);
        i = j;
    }

    const auto first = static_cast<std::uint32_t>(nodes_.size());
    nodes_[node].first_child = first;
    nodes_[node].child_count = static_cast<std::uint16_t>(groups.size());
    for (const auto& [a, b] : groups) {
        (void)b;
        nodes_.emplace_back().label = static_cast<unsigned char>(keys[a].first[depth]);
    }
    if (groups.size() >= kDenseThreshold || node == root()) {
        const auto table = static_cast<NodeIndex>(dense_.size() / 256);
        dense_.resize(dense_.size() + 256, kNoNode);
        for (std::uint32_t c = 0; c < groups.size(); ++c) {
            dense_[static_cast<std::size_t>(table) * 256 + nodes_[first + c].label] = first + c;
        }
        nodes_[node].dense = table;
    }
    for (std::uint32_t c = 0; c < groups.size(); ++c) {
        build_range(keys, groups[c].first, groups[c].second, depth + 1, first + c);
    }
}

TokenId TokenTrie::find(std::string_view bytes) const {
    if (bytes.empty() || nodes_.empty()) {
        return kNoToken;
    }
    NodeIndex node = root();
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const char c = reversed_ ? bytes[bytes.size() - 1 - i] : bytes[i];
        node = child(node, static_cast<unsigned char>(c));
        if (node == kNoNode) {
            return kNoToken;
        }
    }
    return token(node);
}

} // namespace pathpiece
