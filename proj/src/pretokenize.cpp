#include "pathpiece/pretokenize.hpp"

#include <stdexcept>

namespace pathpiece {

PreTokenMode parse_pretoken_mode(std::string_view name) {
    if (name == "none") return PreTokenMode::none();
    if (name == "firstspace") return PreTokenMode::first_space();
    if (name == "space") return PreTokenMode::space();
    if (name == "firstsp-digit") return PreTokenMode::first_space_digit();
    if (name == "space-digit") return PreTokenMode::space_digit();
    throw std::invalid_argument("unknown pre-tokenization mode '" + std::string(name) +
                                "' (expected none|firstspace|space|firstsp-digit|space-digit)");
}

std::string to_string(PreTokenMode mode) {
    switch (mode.space_rule) {
    case SpaceRule::None:
        return mode.digit_rule ? "none+digit" : "none";
    case SpaceRule::FirstSpace:
        return mode.digit_rule ? "firstsp-digit" : "firstspace";
    case SpaceRule::Space:
        return mode.digit_rule ? "space-digit" : "space";
    }
    return "unknown";
}

std::vector<Chunk> chunk(std::string_view document, PreTokenMode mode) {
    std::vector<Chunk> out;
    for_each_chunk(document, mode, [&](std::string_view piece) {
        const auto start = static_cast<std::size_t>(piece.data() - document.data());
        out.push_back(Chunk{start, start + piece.size()});
    });
    return out;
}

} // namespace pathpiece
