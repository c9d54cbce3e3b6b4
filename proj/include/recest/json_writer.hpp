#pragma once

#include <string>
#include <vector>

namespace recest {

/// Doubles formatted with 17 significant digits ("%.17g") so every value
/// round-trips exactly and output files are byte-stable across runs.
std::string format_double(double x);

/// Minimal JSON emitter. Reports are flat enough that a streaming writer
/// with explicit begin/end calls keeps the formatting under our control
/// (in particular the floating-point representation).
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(double x);
    JsonWriter& value(long x);
    JsonWriter& value(int x) { return value(static_cast<long>(x)); }
    JsonWriter& value(unsigned long long x);
    JsonWriter& value(unsigned long x) { return value(static_cast<unsigned long long>(x)); }
    JsonWriter& value(bool b);
    JsonWriter& value(const std::string& s);
    JsonWriter& value(const char* s) { return value(std::string(s)); }
    JsonWriter& values(const std::vector<double>& xs);
    JsonWriter& values(const std::vector<long>& xs);

    const std::string& str() const noexcept { return out_; }

private:
    void comma_if_needed();

    std::string out_;
    std::vector<bool> need_comma_;
};

} // namespace recest
