#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mesched/errors.hpp"

namespace mesched::config {

// Minimal sectioned key-value format used by scenario files:
//   [section]        one instance
//   [[section]]      appendable instance (e.g. one block per agent)
//   key = 1.5 | "text" | true | [1, 2, 3]
// Comments start with '#'.

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Section {
    std::string name;
    std::map<std::string, Value> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    double number(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end() || !std::holds_alternative<double>(it->second))
            throw ConfigError(name + "." + key + ": expected a number");
        return std::get<double>(it->second);
    }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    bool boolean_or(const std::string& key, bool fallback) const {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (!std::holds_alternative<bool>(it->second))
            throw ConfigError(name + "." + key + ": expected true/false");
        return std::get<bool>(it->second);
    }

    std::string text(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end() || !std::holds_alternative<std::string>(it->second))
            throw ConfigError(name + "." + key + ": expected a string");
        return std::get<std::string>(it->second);
    }

    const std::vector<double>& array(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end() || !std::holds_alternative<std::vector<double>>(it->second))
            throw ConfigError(name + "." + key + ": expected an array of numbers");
        return std::get<std::vector<double>>(it->second);
    }
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_number(const std::string& token, const std::string& where) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(token, &consumed);
        if (consumed != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": invalid number '" + token + "'");
    }
}

inline Value parse_value(const std::string& raw, const std::string& where) {
    const std::string token = strip(raw);
    if (token.empty()) throw ConfigError(where + ": empty value");
    if (token == "true") return true;
    if (token == "false") return false;
    if (token.front() == '"') {
        if (token.size() < 2 || token.back() != '"')
            throw ConfigError(where + ": unterminated string");
        return token.substr(1, token.size() - 2);
    }
    if (token.front() == '[') {
        if (token.back() != ']') throw ConfigError(where + ": unterminated array");
        std::vector<double> values;
        std::string body = token.substr(1, token.size() - 2);
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t comma = body.find(',', pos);
            const std::string item = strip(body.substr(pos, comma - pos));
            if (!item.empty()) values.push_back(parse_number(item, where));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return values;
    }
    return parse_number(token, where);
}

}  // namespace detail

inline std::vector<Section> parse(const std::string& content) {
    std::vector<Section> sections;
    std::size_t pos = 0;
    int line_no = 0;
    std::string pending_key, pending_value;
    bool continuing = false;  // multi-line array value

    auto handle_entry = [&](const std::string& key, const std::string& value) {
        if (sections.empty()) throw ConfigError("entry before any section header");
        const std::string where = sections.back().name + "." + key;
        sections.back().entries[key] = detail::parse_value(value, where);
    };

    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::string line = content.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? content.size() + 1 : eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos && !continuing) line = line.substr(0, hash);
        line = detail::strip(line);
        if (line.empty() && !continuing) continue;

        if (continuing) {
            pending_value += line;
            if (!line.empty() && line.back() == ']') {
                handle_entry(pending_key, pending_value);
                continuing = false;
            }
            continue;
        }
        if (line.front() == '[' && line.size() > 1 && (line[1] == '[' || line.back() == ']')) {
            std::string name = line;
            while (!name.empty() && (name.front() == '[')) name.erase(name.begin());
            while (!name.empty() && (name.back() == ']')) name.pop_back();
            sections.push_back(Section{detail::strip(name), {}});
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::strip(line.substr(0, eq));
        const std::string value = detail::strip(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[' && value.back() != ']') {
            pending_key = key;
            pending_value = value;
            continuing = true;
            continue;
        }
        handle_entry(key, value);
    }
    if (continuing) throw ConfigError("unterminated array for key '" + pending_key + "'");
    return sections;
}

}  // namespace mesched::config
