#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace capdiff {

// A finite 0/1 sequence; every element is exactly 0 or 1.
class BinarySequence {
public:
    BinarySequence() = default;
    // Throws InvalidArgument on any value other than 0 or 1.
    explicit BinarySequence(std::vector<std::uint8_t> bits);
    // From characters '0' and '1'.
    static BinarySequence parse(std::string_view text);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const { return bits_; }
    std::string to_string() const;

    friend bool operator==(const BinarySequence&, const BinarySequence&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

}  // namespace capdiff
