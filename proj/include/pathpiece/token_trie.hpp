#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace pathpiece {

using TokenId = std::uint32_t;
inline constexpr TokenId kNoToken = std::numeric_limits<TokenId>::max();

// Immutable byte trie over a token set, stored as flat arrays. A trie built
// with `reversed = true` indexes every token back to front, so walking it
// from a position leftwards enumerates the tokens that end there.
//
// Children of a node are contiguous. Nodes with many children get a dense
// 256-entry table; the rest are scanned linearly.
class TokenTrie {
public:
    using NodeIndex = std::uint32_t;
    static constexpr NodeIndex kNoNode = std::numeric_limits<NodeIndex>::max();

    TokenTrie() = default;
    TokenTrie(const std::vector<std::string>& tokens, bool reversed);

    static constexpr NodeIndex root() { return 0; }

    NodeIndex child(NodeIndex node, unsigned char byte) const {
        const Node& n = nodes_[node];
        if (n.dense != kNoNode) {
            return dense_[static_cast<std::size_t>(n.dense) * 256 + byte];
        }
        const std::uint32_t end = n.first_child + n.child_count;
        for (std::uint32_t c = n.first_child; c < end; ++c) {
            if (nodes_[c].label == byte) {
                return c;
            }
        }
        return kNoNode;
    }

    TokenId token(NodeIndex node) const { return nodes_[node].token; }
    std::size_t node_count() const { return nodes_.size(); }
    bool reversed() const { return reversed_; }

    // Exact lookup, walking `bytes` front to back (or back to front for a
    // reversed trie).
    TokenId find(std::string_view bytes) const;

private:
    // The label of the edge into a node lives in the node itself, so a
    // child scan and the step that follows touch the same cache lines.
    struct Node {
        std::uint32_t first_child = 0;
        std::uint16_t child_count = 0;
        unsigned char label = 0;
        NodeIndex dense = kNoNode;
        TokenId token = kNoToken;
    };

    void build_range(const std::vector<std::pair<std::string, TokenId>>& keys, std::size_t lo,
                     std::size_t hi, std::size_t depth, NodeIndex node);

    std::vector<Node> nodes_;
    std::vector<NodeIndex> dense_;
    bool reversed_ = false;
};

} // namespace pathpiece
