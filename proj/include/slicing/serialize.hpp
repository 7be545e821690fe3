#pragma once

// Line-oriented text checkpoint format: every line is `<tag> <values...>`.
// Doubles are written with 17 significant digits so they reload bit-exactly.

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <fmt/format.h>

#include "slicing/rng.hpp"

namespace slicing {

inline constexpr const char* kCheckpointMagic = "slicing-checkpoint";
inline constexpr int kCheckpointVersion = 1;

template <typename T>
std::string format_field(const T& value) {
    if constexpr (std::is_floating_point_v<T>) {
        return fmt::format("{:.17g}", value);
    } else {
        return fmt::format("{}", value);
    }
}

template <typename... Ts>
void write_line(std::ostream& out, const std::string& tag, const Ts&... values) {
    out << tag;
    ((out << ' ' << format_field(values)), ...);
    out << '\n';
}

template <typename T>
void write_vector(std::ostream& out, const std::string& tag, const std::vector<T>& values) {
    out << tag << ' ' << values.size();
    for (const T& v : values) out << ' ' << format_field(v);
    out << '\n';
}

inline double parse_double(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::runtime_error(fmt::format("checkpoint: bad number '{}'", text));
    return v;
}

inline std::istringstream read_tagged(std::istream& in, const std::string& tag) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(fmt::format("checkpoint: missing '{}'", tag));
    std::istringstream is(line);
    std::string got;
    is >> got;
    if (got != tag) throw std::runtime_error(fmt::format("checkpoint: expected '{}', found '{}'", tag, got));
    return is;
}

inline std::vector<std::string> read_fields(std::istream& in, const std::string& tag, std::size_t count) {
    auto is = read_tagged(in, tag);
    std::vector<std::string> fields(count);
    for (auto& f : fields) {
        if (!(is >> f)) throw std::runtime_error(fmt::format("checkpoint: short '{}' line", tag));
    }
    return fields;
}

template <typename T = double>
std::vector<T> read_vector(std::istream& in, const std::string& tag) {
    auto is = read_tagged(in, tag);
    std::size_t n = 0;
    if (!(is >> n)) throw std::runtime_error(fmt::format("checkpoint: '{}' lacks a length", tag));
    std::vector<T> values(n);
    for (auto& v : values) {
        std::string field;
        if (!(is >> field)) throw std::runtime_error(fmt::format("checkpoint: short '{}' vector", tag));
        if constexpr (std::is_floating_point_v<T>) {
            v = static_cast<T>(parse_double(field));
        } else {
            v = static_cast<T>(std::stoll(field));
        }
    }
    return values;
}

inline void write_rng(std::ostream& out, const std::string& tag, const Rng& rng) {
    std::ostringstream state;
    state << rng;
    out << tag << ' ' << state.str() << '\n';
}

inline Rng read_rng(std::istream& in, const std::string& tag) {
    auto is = read_tagged(in, tag);
    Rng rng;
    is >> rng;
    if (is.fail()) throw std::runtime_error(fmt::format("checkpoint: bad RNG state '{}'", tag));
    return rng;
}

inline void write_header(std::ostream& out, const std::string& kind) {
    out << kCheckpointMagic << ' ' << kCheckpointVersion << ' ' << kind << '\n';
}

inline void read_header(std::istream& in, const std::string& kind) {
    std::string magic, got;
    int version = 0;
    in >> magic >> version >> got;
    in.ignore(1);
    if (magic != kCheckpointMagic || version != kCheckpointVersion || got != kind) {
        throw std::runtime_error(fmt::format("checkpoint: expected {} v{} '{}'", kCheckpointMagic,
                                             kCheckpointVersion, kind));
    }
}

}  // namespace slicing
