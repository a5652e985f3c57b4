#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pathpiece {

enum class SpaceRule { None, FirstSpace, Space };

// Pre-tokenization regime. Tokens never cross the chunk boundaries it
// produces.
struct PreTokenMode {
    SpaceRule space_rule = SpaceRule::None;
    bool digit_rule = false;

    static constexpr PreTokenMode none() { return {SpaceRule::None, false}; }
    static constexpr PreTokenMode first_space() { return {SpaceRule::FirstSpace, false}; }
    static constexpr PreTokenMode first_space_digit() { return {SpaceRule::FirstSpace, true}; }
    static constexpr PreTokenMode space_digit() { return {SpaceRule::Space, true}; }
    static constexpr PreTokenMode space() { return {SpaceRule::Space, false}; }

    friend constexpr bool operator==(PreTokenMode, PreTokenMode) = default;
};

// Parses the CLI names: none | firstspace | space | firstsp-digit | space-digit.
// Throws std::invalid_argument on anything else.
PreTokenMode parse_pretoken_mode(std::string_view name);
std::string to_string(PreTokenMode mode);

// Byte span [start, end) of a document.
struct Chunk {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    std::string_view bytes(std::string_view document) const {
        return document.substr(start, end - start);
    }
    friend bool operator==(const Chunk&, const Chunk&) = default;
};

inline constexpr unsigned char kSpaceByte = 0x20;

inline constexpr bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Splits `document` into non-empty contiguous chunks covering it exactly.
// An empty document yields no chunks.
std::vector<Chunk> chunk(std::string_view document, PreTokenMode mode);

// Callback form that avoids materializing the chunk list; `fn` receives
// each chunk's bytes in document order.
template <class Fn>
void for_each_chunk(std::string_view document, PreTokenMode mode, Fn&& fn);

namespace detail {
// True when a chunk boundary must be placed before position i (0 < i < n).
inline bool boundary_before(std::string_view d, std::size_t i, PreTokenMode mode) {
    const auto cur = static_cast<unsigned char>(d[i]);
    const auto prev = static_cast<unsigned char>(d[i - 1]);
    if (mode.digit_rule && (is_ascii_digit(cur) || is_ascii_digit(prev))) {
        return true;
    }
    switch (mode.space_rule) {
    case SpaceRule::None:
        return false;
    case SpaceRule::FirstSpace:
        return cur == kSpaceByte;
    case SpaceRule::Space:
        return cur == kSpaceByte || prev == kSpaceByte;
    }
    return false;
}
} // namespace detail

template <class Fn>
void for_each_chunk(std::string_view document, PreTokenMode mode, Fn&& fn) {
    const std::size_t n = document.size();
    if (n == 0) {
        return;
    }
    if (mode == PreTokenMode::none()) {
        fn(document);
        return;
    }
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (detail::boundary_before(document, i, mode)) {
            fn(document.substr(start, i - start));
            start = i;
        }
    }
    fn(document.substr(start));
}

} // namespace pathpiece
