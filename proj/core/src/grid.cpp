#include "btpg/grid.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace btpg {

size_t GridMap::passable_count() const {
    return size_t(std::count(cells.begin(), cells.end(), uint8_t(1)));
}

namespace {

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

// Reads "key value" and returns value, or -1 if the key does not match.
long header_value(const std::string& line, const std::string& key) {
    if (line.rfind(key, 0) != 0) return -1;
    std::istringstream ss(line.substr(key.size()));
    long v = -1;
    ss >> v;
    return ss.fail() ? -1 : v;
}

}  // namespace

GridMap parse_map(std::istream& in) {
    std::string line;
    int lineno = 0;
    long width = -1, height = -1;
    bool saw_type = false, saw_map = false;

    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.rfind("type", 0) == 0) {
            saw_type = true;
        } else if (long v = header_value(line, "height"); v >= 0) {
            height = v;
        } else if (long v = header_value(line, "width"); v >= 0) {
            width = v;
        } else if (line == "map") {
            saw_map = true;
            break;
        } else if (!line.empty()) {
            throw ParseError(lineno, "unexpected header line '" + line + "'");
        }
    }
    if (!saw_type) throw ParseError(lineno, "missing 'type' header");
    if (width < 1 || height < 1) throw ParseError(lineno, "missing or invalid width/height");
    if (!saw_map) throw ParseError(lineno, "missing 'map' header");

    GridMap m;
    m.width = int(width);
    m.height = int(height);
    m.cells.reserve(size_t(width) * size_t(height));

    for (int y = 0; y < height; ++y) {
        if (!std::getline(in, line)) throw ParseError(lineno, "truncated input: expected " + std::to_string(height) + " rows, got " + std::to_string(y));
        ++lineno;
        line = strip_cr(line);
        if (long(line.size()) != width)
            throw ParseError(lineno, "row has " + std::to_string(line.size()) + " cells, expected " + std::to_string(width));
        for (char c : line) {
            switch (c) {
                case '.':
                case 'G':
                    m.cells.push_back(1);
                    break;
                case '@':
                case 'T':
                case 'O':
                    m.cells.push_back(0);
                    break;
                default:
                    throw ParseError(lineno, std::string("unknown cell character '") + c + "'");
            }
        }
    }
    return m;
}

GridMap parse_map(const std::string& text) {
    std::istringstream ss(text);
    return parse_map(ss);
}

GridMap parse_map_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open map file: " + path);
    return parse_map(f);
}

std::string serialize_map(const GridMap& m) {
    std::string out = "type octile\nheight " + std::to_string(m.height) + "\nwidth " +
                      std::to_string(m.width) + "\nmap\n";
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) out += m.cells[size_t(y) * m.width + x] ? '.' : '@';
        out += '\n';
    }
    return out;
}

}  // namespace btpg
