#pragma once

#include <gausscomb/covariance_io.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gausscomb::config {

/// Parse or validation failure with the offending line (0 when unknown).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& msg)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, bool, std::string, Array> data;
    int line = 0;
    bool integral = false;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }

    double number() const {
        if (!is_number()) throw ConfigError(line, "expected a number");
        return std::get<double>(data);
    }
    long integer() const {
        if (!is_number() || !integral) throw ConfigError(line, "expected an integer");
        return static_cast<long>(std::get<double>(data));
    }
    bool boolean() const {
        if (!is_bool()) throw ConfigError(line, "expected true or false");
        return std::get<bool>(data);
    }
    const std::string& string() const {
        if (!is_string()) throw ConfigError(line, "expected a quoted string");
        return std::get<std::string>(data);
    }
    const Array& array() const {
        if (!is_array()) throw ConfigError(line, "expected an array");
        return std::get<Array>(data);
    }
};

/// Key/value pairs of one [table]; remembers its header line.
struct Table {
    std::map<std::string, Value> values;
    int line = 0;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const Value* find(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

/// Tables in file order; the unnamed root table is "".
struct Document {
    std::vector<std::pair<std::string, Table>> tables;

    const Table* table(const std::string& name) const {
        for (const auto& [n, t] : tables)
            if (n == name) return &t;
        return nullptr;
    }
};

namespace detail {

class Parser {
public:
    explicit Parser(std::istream& in) : in_(in) {}

    Document parse() {
        Document doc;
        doc.tables.emplace_back("", Table{});
        Table* current = &doc.tables.back().second;
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            text_ = strip_comment(raw);
            pos_ = 0;
            skip_ws();
            if (pos_ >= text_.size()) continue;
            if (text_[pos_] == '[') {
                const auto close = text_.find(']', pos_);
                if (close == std::string::npos) throw ConfigError(line_, "unterminated table header");
                std::string name = trim(text_.substr(pos_ + 1, close - pos_ - 1));
                if (name.empty()) throw ConfigError(line_, "empty table name");
                if (!trim(text_.substr(close + 1)).empty()) throw ConfigError(line_, "text after table header");
                if (doc.table(name)) throw ConfigError(line_, "duplicate table [" + name + "]");
                doc.tables.emplace_back(name, Table{{}, line_});
                current = &doc.tables.back().second;
                continue;
            }
            const auto eq = text_.find('=', pos_);
            if (eq == std::string::npos) throw ConfigError(line_, "expected key = value");
            std::string key = trim(text_.substr(pos_, eq - pos_));
            if (key.empty()) throw ConfigError(line_, "missing key");
            for (char c : key)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
                    throw ConfigError(line_, "invalid key '" + key + "'");
            pos_ = eq + 1;
            Value v = parse_value();
            skip_ws();
            if (pos_ < text_.size()) throw ConfigError(line_, "unexpected text after value");
            if (current->has(key)) throw ConfigError(line_, "duplicate key '" + key + "'");
            current->values.emplace(std::move(key), std::move(v));
        }
        return doc;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    static std::string strip_comment(const std::string& s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') quoted = !quoted;
            if (s[i] == '#' && !quoted) return s.substr(0, i);
        }
        return s;
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    Value parse_value() {
        skip_ws();
        if (pos_ >= text_.size()) throw ConfigError(line_, "missing value");
        const char c = text_[pos_];
        if (c == '"') {
            const auto close = text_.find('"', pos_ + 1);
            if (close == std::string::npos) throw ConfigError(line_, "unterminated string");
            Value v{text_.substr(pos_ + 1, close - pos_ - 1), line_};
            pos_ = close + 1;
            return v;
        }
        if (c == '[') {
            ++pos_;
            Array items;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == ']') {
                ++pos_;
                return {items, line_};
            }
            for (;;) {
                items.push_back(parse_value());
                skip_ws();
                if (pos_ >= text_.size()) throw ConfigError(line_, "unterminated array");
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (text_[pos_] == ']') {
                    ++pos_;
                    break;
                }
                throw ConfigError(line_, "expected ',' or ']' in array");
            }
            return {items, line_};
        }
        std::size_t end = pos_;
        while (end < text_.size() && text_[end] != ',' && text_[end] != ']' && text_[end] != ' ' && text_[end] != '\t' &&
               text_[end] != '\r')
            ++end;
        const std::string tok = text_.substr(pos_, end - pos_);
        pos_ = end;
        if (tok == "true") return {true, line_};
        if (tok == "false") return {false, line_};
        try {
            Value v{parse_double(tok), line_};
            v.integral = tok.find_first_of(".eE") == std::string::npos;
            return v;
        } catch (const std::invalid_argument&) {
            throw ConfigError(line_, "cannot parse value '" + tok + "'");
        }
    }

    std::istream& in_;
    std::string text_;
    std::size_t pos_ = 0;
    int line_ = 0;
};

}  // namespace detail

inline Document parse(std::istream& in) { return detail::Parser(in).parse(); }

inline Document parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file " + path);
    return parse(in);
}

}  // namespace gausscomb::config
