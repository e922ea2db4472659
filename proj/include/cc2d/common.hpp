#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cc2d {

// Error taxonomy. The CLI maps each category to a one-line machine-parsable
// failure message and a nonzero exit status.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& msg)
        : std::runtime_error(msg), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};
struct DataError : Error {
    explicit DataError(const std::string& m) : Error("data", m) {}
};
// A required upstream artifact (checkpoint, label dir, ...) is missing.
struct StateError : Error {
    explicit StateError(const std::string& m) : Error("state", m) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

// Coordinate convention used everywhere: x = column, y = row, origin at the
// top-left pixel center, sub-pixel values allowed.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

struct SizeHW {
    int h = 0;
    int w = 0;
    bool operator==(const SizeHW&) const = default;
};

}  // namespace cc2d
