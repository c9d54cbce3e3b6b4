#include "recest/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace recest {

std::string format_double(double x) {
    if (std::isnan(x)) return "null";
    if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
    if (x == 0.0) return "0";  // folds negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void JsonWriter::comma_if_needed() {
    if (!need_comma_.empty()) {
        if (need_comma_.back()) out_ += ',';
        need_comma_.back() = true;
    }
}

JsonWriter& JsonWriter::begin_object() {
    comma_if_needed();
    out_ += '{';
    need_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    need_comma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma_if_needed();
    out_ += '[';
    need_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    need_comma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
    comma_if_needed();
    out_ += '"';
    out_ += name;
    out_ += "\":";
    if (!need_comma_.empty()) need_comma_.back() = false;
    return *this;
}

JsonWriter& JsonWriter::value(double x) {
    comma_if_needed();
    out_ += format_double(x);
    return *this;
}

JsonWriter& JsonWriter::value(long x) {
    comma_if_needed();
    out_ += std::to_string(x);
    return *this;
}

JsonWriter& JsonWriter::value(unsigned long long x) {
    comma_if_needed();
    out_ += std::to_string(x);
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    comma_if_needed();
    out_ += b ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
    comma_if_needed();
    out_ += '"';
    for (char c : s) {
        switch (c) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\n': out_ += "\\n"; break;
            case '\t': out_ += "\\t"; break;
            default: out_ += c;
        }
    }
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::values(const std::vector<double>& xs) {
    begin_array();
    for (double x : xs) value(x);
    return end_array();
}

JsonWriter& JsonWriter::values(const std::vector<long>& xs) {
    begin_array();
    for (long x : xs) value(x);
    return end_array();
}

} // namespace recest
