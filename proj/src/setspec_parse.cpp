#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "capdiff/bitcap.hpp"
#include "capdiff/error.hpp"
#include "capdiff/setspec.hpp"

namespace capdiff {

namespace {

class SpecParser {
public:
    SpecParser(std::string_view text, const std::string& base_dir) : text_(text), base_dir_(base_dir) {}

    IndexSetSpec parse() {
        IndexSetSpec result = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return result;
    }

private:
    IndexSetSpec expression() {
        IndexSetSpec acc = term();
        for (;;) {
            skip_space();
            if (at_end() || (peek() != '+' && peek() != '-')) return acc;
            const char op = text_[pos_++];
            IndexSetSpec rhs = term();
            try {
                acc = op == '+' ? acc + rhs : acc - rhs;
            } catch (const InvalidArgument& e) {
                fail(e.what());
            }
        }
    }

    IndexSetSpec term() {
        skip_space();
        if (at_end()) fail("expected a set term");
        if (peek() == '(') {
            ++pos_;
            IndexSetSpec inner = expression();
            skip_space();
            if (at_end() || peek() != ')') fail("expected ')'");
            ++pos_;
            return inner;
        }
        if (keyword("all")) return IndexSetSpec::all();
        if (keyword("mersenne")) return IndexSetSpec::mersenne();
        if (prefix("block:")) return wrap([&] { return IndexSetSpec::block(static_cast<int>(integer(kMaxBlock))); });
        if (prefix("explicit:")) return explicit_list();
        if (prefix("nu>=const:"))
            return wrap([&] {
                return IndexSetSpec::nu_threshold(
                    ThresholdSchedule::constant(static_cast<int>(integer(1'000'000))));
            });
        if (keyword("nu>=log2")) return IndexSetSpec::nu_threshold(ThresholdSchedule::floor_log2());
        if (prefix("nu>=linear:"))
            return wrap([&] { return IndexSetSpec::nu_threshold(ThresholdSchedule::linear(real())); });
        if (prefix("nu>=table:")) return table();
        fail("unknown set term");
    }

    IndexSetSpec explicit_list() {
        std::vector<std::uint64_t> members;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            members.push_back(integer(UINT64_MAX));
            while (!at_end() && peek() == ',') {
                ++pos_;
                members.push_back(integer(UINT64_MAX));
            }
        }
        return wrap([&] { return IndexSetSpec::explicit_set(std::move(members)); });
    }

    IndexSetSpec table() {
        const std::size_t start = pos_;
        while (!at_end() && !std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start) fail("nu>=table: needs a file path");
        std::filesystem::path path(std::string(text_.substr(start, pos_ - start)));
        if (path.is_relative() && !base_dir_.empty()) path = std::filesystem::path(base_dir_) / path;
        return IndexSetSpec::nu_threshold(load_table_schedule(path.string()));
    }

    template <class Fn>
    IndexSetSpec wrap(Fn&& fn) {
        try {
            return fn();
        } catch (const InvalidArgument& e) {
            fail(e.what());
        }
    }

    std::uint64_t integer(std::uint64_t max) {
        std::uint64_t v = 0;
        const char* first = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
        if (ec != std::errc() || ptr == first) fail("expected a nonnegative integer");
        if (v > max) fail("integer " + std::to_string(v) + " out of range");
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    double real() {
        double v = 0;
        const char* first = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v,
                                               std::chars_format::fixed);
        if (ec != std::errc() || ptr == first) fail("expected a number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    bool keyword(std::string_view word) {
        if (text_.substr(pos_, word.size()) != word) return false;
        const std::size_t after = pos_ + word.size();
        if (after < text_.size()) {
            const char c = text_[after];
            if (!std::isspace(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != ')') return false;
        }
        pos_ = after;
        return true;
    }

    bool prefix(std::string_view word) {
        if (text_.substr(pos_, word.size()) != word) return false;
        pos_ += word.size();
        return true;
    }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("set spec '" + std::string(text_) + "' at offset " + std::to_string(pos_) +
                          ": " + msg);
    }

    std::string_view text_;
    const std::string& base_dir_;
    std::size_t pos_ = 0;
};

}  // namespace

IndexSetSpec parse_spec(std::string_view text, const std::string& base_dir) {
    return SpecParser(text, base_dir).parse();
}

ThresholdSchedule load_table_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open threshold table '" + path + "'");
    std::vector<int> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream fields(line);
        std::string tok;
        while (fields >> tok) {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0)
                throw ConfigError("threshold table '" + path + "' line " + std::to_string(line_no) +
                                  ": '" + tok + "' is not a nonnegative integer");
            values.push_back(v);
        }
    }
    if (values.empty()) throw ConfigError("threshold table '" + path + "' is empty");
    return ThresholdSchedule::table(std::move(values), path);
}

}  // namespace capdiff
