#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace btpg {

/// A grid cell, (x = column, y = row), origin top-left.
struct Cell {
    int x = 0;
    int y = 0;
    auto operator<=>(const Cell&) const = default;
};

struct CellHash {
    size_t operator()(const Cell& c) const noexcept {
        return std::hash<int64_t>{}((int64_t(c.x) << 32) ^ uint32_t(c.y));
    }
};

/// Thrown by the text parsers; line is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// 4-connected grid world. Cells are row-major passability flags.
struct GridMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> cells;  // 1 = passable, 0 = blocked

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool in_bounds(Cell c) const { return in_bounds(c.x, c.y); }
    bool passable(int x, int y) const { return in_bounds(x, y) && cells[size_t(y) * width + x]; }
    bool passable(Cell c) const { return passable(c.x, c.y); }
    size_t passable_count() const;
};

/// Parses the MovingAI .map layout: header lines `type`, `height N`, `width M`,
/// `map`, then one row per line. '.' and 'G' are passable; '@', 'T', 'O' blocked.
GridMap parse_map(std::istream& in);
GridMap parse_map(const std::string& text);
GridMap parse_map_file(const std::string& path);

/// Inverse of parse_map; parse_map(serialize_map(m)) == m.
std::string serialize_map(const GridMap& m);

}  // namespace btpg
