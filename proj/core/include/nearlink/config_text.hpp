// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nearlink
{

/*!
 * Values of the scenario config language.
 *
 * The language is a small TOML subset:
 *
 *   # comment
 *   key = 1.5e3            numbers (integers keep their literal text)
 *   key = "text"           double-quoted strings, \" and \\ escapes
 *   key = true             booleans
 *   key = [1, [2, 3]]      arrays, may span lines until brackets balance
 *   [section]              prefixes following keys with "section."
 *   section.key = 1        dotted keys are equivalent
 */
struct ConfigNumber
{
    double value = 0.0;
    std::string literal; // as written, for integer parsing
};

struct ConfigValue
{
    using Number = ConfigNumber;
    using Array = std::vector<ConfigValue>;

    std::variant<Number, std::string, bool, Array> data;
    std::size_t line = 0;

    const char* type_name() const;
};

// Flat map of fully-qualified keys ("ground.rows") to values.
class ConfigDocument
{
  public:
    static ConfigDocument parse(std::string_view text);

    // Parses `value_text` as a single value and stores it under `key`,
    // replacing any existing entry.
    void set(const std::string& key, std::string_view value_text);

    // Removes every key starting with `prefix`; returns how many.
    std::size_t erase_prefix(const std::string& prefix);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    const ConfigValue* find(const std::string& key) const;
    const std::map<std::string, ConfigValue>& entries() const { return entries_; }

  private:
    std::map<std::string, ConfigValue> entries_;
};

// Formats a double so that parsing it back yields the same bits.
std::string format_number(double v);
std::string quote_string(std::string_view s);

} // namespace nearlink
