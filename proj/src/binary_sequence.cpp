#include "capdiff/binary_sequence.hpp"

#include <algorithm>

#include "capdiff/error.hpp"

namespace capdiff {

BinarySequence::BinarySequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; }))
        throw InvalidArgument("BinarySequence: values must be 0 or 1");
}

BinarySequence BinarySequence::parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (const char c : text) {
        if (c != '0' && c != '1') throw InvalidArgument("BinarySequence::parse: expected '0' or '1'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BinarySequence(std::move(bits));
}

std::string BinarySequence::to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (const auto b : bits_) out.push_back(static_cast<char>('0' + b));
    return out;
}

}  // namespace capdiff
