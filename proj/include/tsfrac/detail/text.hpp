#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "tsfrac/error.hpp"

namespace tsfrac::detail {

// Shortest decimal text that parses back to the same double.
inline std::string format_number(double value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buffer, end);
}

/// Minimal cursor over a text buffer shared by the scale and expression
/// parsers. Offsets reported in errors are byte offsets into the original text.
class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end()
    {
        skip_space();
        return pos_ >= text_.size();
    }

    char peek()
    {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c)
    {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    bool consume(std::string_view token)
    {
        skip_space();
        if (text_.substr(pos_, token.size()) != token) return false;
        pos_ += token.size();
        return true;
    }

    void expect(char c)
    {
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    void expect(std::string_view token)
    {
        if (!consume(token)) fail("expected '" + std::string(token) + "'");
    }

    // Decimal literal: [+-]? digits ('.' digits)? ([eE] [+-]? digits)?
    // A '.' only belongs to the number when a digit follows, so "1..4" scans as 1.
    std::optional<double> number(bool allow_sign)
    {
        skip_space();
        std::size_t i = pos_;
        if (allow_sign && i < text_.size() && (text_[i] == '+' || text_[i] == '-')) ++i;
        const std::size_t digits_start = i;
        while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
        bool any_digits = i > digits_start;
        if (i + 1 < text_.size() && text_[i] == '.' && std::isdigit(static_cast<unsigned char>(text_[i + 1]))) {
            ++i;
            while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) ++i;
            any_digits = true;
        }
        if (!any_digits) return std::nullopt;
        if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
            if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
                while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
                i = j;
            }
        }
        std::size_t begin = pos_;
        if (text_[begin] == '+') ++begin;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + begin, text_.data() + i, value);
        if (ec != std::errc{} || ptr != text_.data() + i) fail("malformed number");
        pos_ = i;
        return value;
    }

    double expect_number(bool allow_sign = true)
    {
        auto value = number(allow_sign);
        if (!value) fail("expected a number");
        return *value;
    }

    std::string_view identifier()
    {
        skip_space();
        std::size_t i = pos_;
        while (i < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[i])) || text_[i] == '_')) ++i;
        auto word = text_.substr(pos_, i - pos_);
        pos_ = i;
        return word;
    }

    std::size_t offset() const { return pos_; }
    void rewind(std::size_t offset) { pos_ = offset; }

    [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }

    [[noreturn]] void fail_at(const std::string& message, std::size_t offset) const
    {
        throw error(errc::syntax_error, message + " at offset " + std::to_string(offset), offset);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace tsfrac::detail
