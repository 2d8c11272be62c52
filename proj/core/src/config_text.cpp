// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/config_text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "nearlink/error.hpp"

namespace nearlink
{

const char* ConfigValue::type_name() const
{
    switch (data.index())
    {
    case 0: return "number";
    case 1: return "string";
    case 2: return "boolean";
    default: return "array";
    }
}

namespace
{
[[noreturn]] void parse_error(std::size_t line, const std::string& field, const std::string& what)
{
    throw ConfigError(ErrorCode::ParseError, field, line,
                      "line " + std::to_string(line) + ": " + what);
}

bool is_key_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

bool valid_key(std::string_view key)
{
    if (key.empty() || key.front() == '.' || key.back() == '.')
        return false;
    for (std::size_t i = 0; i < key.size(); ++i)
    {
        if (!is_key_char(key[i]))
            return false;
        if (key[i] == '.' && i + 1 < key.size() && key[i + 1] == '.')
            return false;
    }
    return true;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s)
{
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (in_string && s[i] == '\\')
            ++i;
        else if (s[i] == '"')
            in_string = !in_string;
        else if (!in_string && s[i] == '#')
            return s.substr(0, i);
    }
    return s;
}

class ValueParser
{
  public:
    ValueParser(std::string_view text, std::size_t line, std::string field)
        : text_(text), line_(line), field_(std::move(field))
    {
    }

    ConfigValue parse_all()
    {
        ConfigValue v = parse_value();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing characters");
        return v;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const
    {
        parse_error(line_, field_, what + " in value of '" + field_ + "'");
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    ConfigValue parse_value()
    {
        skip_ws();
        if (pos_ >= text_.size())
            fail("missing value");
        const char c = text_[pos_];
        ConfigValue out;
        out.line = line_;
        if (c == '"')
            out.data = parse_string();
        else if (c == '[')
            out.data = parse_array();
        else if (text_.substr(pos_, 4) == "true")
        {
            pos_ += 4;
            out.data = true;
        }
        else if (text_.substr(pos_, 5) == "false")
        {
            pos_ += 5;
            out.data = false;
        }
        else
            out.data = parse_number();
        return out;
    }

    std::string parse_string()
    {
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"')
        {
            char c = text_[pos_++];
            if (c == '\\')
            {
                if (pos_ >= text_.size())
                    fail("unterminated escape");
                const char e = text_[pos_++];
                if (e == 'n')
                    c = '\n';
                else if (e == 't')
                    c = '\t';
                else if (e == '"' || e == '\\')
                    c = e;
                else
                    fail(std::string("unknown escape '\\") + e + "'");
            }
            out.push_back(c);
        }
        if (pos_ >= text_.size())
            fail("unterminated string");
        ++pos_;
        return out;
    }

    ConfigValue::Array parse_array()
    {
        ++pos_;
        ConfigValue::Array out;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ']')
        {
            ++pos_;
            return out;
        }
        while (true)
        {
            out.push_back(parse_value());
            skip_ws();
            if (pos_ >= text_.size())
                fail("unterminated array");
            if (text_[pos_] == ',')
            {
                ++pos_;
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ']')
                {
                    ++pos_;
                    return out;
                }
                continue;
            }
            if (text_[pos_] == ']')
            {
                ++pos_;
                return out;
            }
            fail("expected ',' or ']'");
        }
    }

    ConfigValue::Number parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'
                   || text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '_'))
            ++pos_;
        std::string literal(text_.substr(start, pos_ - start));
        if (literal.empty())
            fail("expected a value");
        std::string digits;
        for (char c : literal)
            if (c != '_')
                digits.push_back(c);
        double value = 0.0;
        const char* first = digits.data();
        if (!digits.empty() && digits.front() == '+')
            ++first;
        const char* last = digits.data() + digits.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || !std::isfinite(value))
            fail("malformed number '" + literal + "'");
        return {value, digits};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::string field_;
};

int bracket_balance(std::string_view s)
{
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (in_string && s[i] == '\\')
            ++i;
        else if (s[i] == '"')
            in_string = !in_string;
        else if (!in_string && s[i] == '[')
            ++depth;
        else if (!in_string && s[i] == ']')
            --depth;
    }
    return depth;
}
} // namespace

ConfigDocument ConfigDocument::parse(std::string_view text)
{
    ConfigDocument doc;
    std::string section;
    std::size_t lineno = 0;
    std::size_t pos = 0;

    auto next_line = [&](std::string_view& out) {
        if (pos > text.size())
            return false;
        const std::size_t end = text.find('\n', pos);
        out = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++lineno;
        return true;
    };

    std::string_view raw;
    while (next_line(raw))
    {
        std::string_view line = trim(strip_comment(raw));
        if (line.empty())
            continue;

        if (line.front() == '[')
        {
            if (line.back() != ']')
                parse_error(lineno, "", "malformed section header");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name))
                parse_error(lineno, std::string(name), "invalid section name");
            section = std::string(name) + ".";
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            parse_error(lineno, "", "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        if (!valid_key(key))
            parse_error(lineno, std::string(key), "invalid key '" + std::string(key) + "'");
        const std::string full = section + std::string(key);

        const std::size_t start_line = lineno;
        std::string value(trim(line.substr(eq + 1)));
        while (bracket_balance(value) > 0)
        {
            std::string_view more;
            if (!next_line(more))
                parse_error(start_line, full, "unterminated array");
            value += ' ';
            value += std::string(trim(strip_comment(more)));
        }

        ConfigValue parsed = ValueParser(value, start_line, full).parse_all();
        if (!doc.entries_.emplace(full, std::move(parsed)).second)
            parse_error(start_line, full, "duplicate key '" + full + "'");
    }
    return doc;
}

void ConfigDocument::set(const std::string& key, std::string_view value_text)
{
    if (!valid_key(key))
        parse_error(0, key, "invalid key '" + key + "'");
    entries_[key] = ValueParser(value_text, 0, key).parse_all();
}

std::size_t ConfigDocument::erase_prefix(const std::string& prefix)
{
    std::size_t n = 0;
    for (auto it = entries_.lower_bound(prefix);
         it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;)
    {
        it = entries_.erase(it);
        ++n;
    }
    return n;
}

const ConfigValue* ConfigDocument::find(const std::string& key) const
{
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string quote_string(std::string_view s)
{
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        if (c == '\n')
        {
            out += "\\n";
            continue;
        }
        if (c == '\t')
        {
            out += "\\t";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace nearlink
