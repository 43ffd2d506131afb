#include "btpg/solution.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace btpg {

int MapfSolution::makespan() const {
    int m = 0;
    for (const auto& p : paths) m = std::max(m, int(p.size()) - 1);
    return m;
}

std::string Violation::describe() const {
    std::string k;
    switch (kind) {
        case ViolationKind::OffMap: k = "off-map"; break;
        case ViolationKind::NonAdjacentStep: k = "non-adjacent step"; break;
        case ViolationKind::VertexCollision: k = "vertex collision"; break;
        case ViolationKind::SwapCollision: k = "swap collision"; break;
        case ViolationKind::EmptyPath: k = "empty path"; break;
    }
    std::string s = k + " agent " + std::to_string(agent_a);
    if (agent_b >= 0) s += "/" + std::to_string(agent_b);
    s += " t=" + std::to_string(timestep) + " at (" + std::to_string(where.x) + "," +
         std::to_string(where.y) + ")";
    return s;
}

namespace {

// Parses "(x,y)" from s starting at pos; advances pos past the pair.
Cell parse_pair(const std::string& s, size_t& pos, int lineno) {
    auto fail = [&]() -> ParseError { return ParseError(lineno, "malformed coordinate near '" + s.substr(pos, 12) + "'"); };
    if (pos >= s.size() || s[pos] != '(') throw fail();
    size_t comma = s.find(',', pos);
    size_t close = s.find(')', pos);
    if (comma == std::string::npos || close == std::string::npos || comma > close) throw fail();
    Cell c;
    try {
        size_t used = 0;
        c.x = std::stoi(s.substr(pos + 1, comma - pos - 1), &used);
        if (used != comma - pos - 1) throw fail();
        c.y = std::stoi(s.substr(comma + 1, close - comma - 1), &used);
        if (used != close - comma - 1) throw fail();
    } catch (const std::logic_error&) {
        throw fail();
    }
    pos = close + 1;
    return c;
}

}  // namespace

MapfSolution parse_solution(std::istream& in) {
    std::string line;
    int lineno = 0;
    std::vector<std::pair<int, Path>> entries;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        size_t colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(lineno, "missing ':' after agent id");
        int id;
        try {
            size_t used = 0;
            id = std::stoi(line.substr(0, colon), &used);
            if (used != colon) throw ParseError(lineno, "bad agent id '" + line.substr(0, colon) + "'");
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "bad agent id '" + line.substr(0, colon) + "'");
        }
        if (id < 0) throw ParseError(lineno, "negative agent id");

        Path path;
        size_t pos = colon + 1;
        if (pos >= line.size()) throw ParseError(lineno, "empty path for agent " + std::to_string(id));
        while (pos < line.size()) {
            path.push_back(parse_pair(line, pos, lineno));
            if (pos < line.size()) {
                if (line[pos] != ';') throw ParseError(lineno, "expected ';' between coordinates");
                ++pos;
                if (pos == line.size()) throw ParseError(lineno, "trailing ';'");
            }
        }
        entries.emplace_back(id, std::move(path));
    }

    MapfSolution sol;
    sol.paths.resize(entries.size());
    std::vector<bool> seen(entries.size(), false);
    for (auto& [id, path] : entries) {
        if (id >= int(entries.size()))
            throw ParseError(0, "agent id " + std::to_string(id) + " out of range (missing ids?)");
        if (seen[size_t(id)]) throw ParseError(0, "duplicate agent id " + std::to_string(id));
        seen[size_t(id)] = true;
        sol.paths[size_t(id)] = std::move(path);
    }
    return sol;
}

MapfSolution parse_solution(const std::string& text) {
    std::istringstream ss(text);
    return parse_solution(ss);
}

MapfSolution parse_solution_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open solution file: " + path);
    return parse_solution(f);
}

std::string serialize_solution(const MapfSolution& sol) {
    std::string out;
    for (int a = 0; a < sol.agent_count(); ++a) {
        out += std::to_string(a) + ":";
        const Path& p = sol.paths[size_t(a)];
        for (size_t i = 0; i < p.size(); ++i) {
            if (i) out += ';';
            out += "(" + std::to_string(p[i].x) + "," + std::to_string(p[i].y) + ")";
        }
        out += '\n';
    }
    return out;
}

std::vector<Violation> validate_solution(const GridMap& map, const MapfSolution& sol) {
    std::vector<Violation> out;
    const int n = sol.agent_count();

    for (int a = 0; a < n; ++a) {
        const Path& p = sol.paths[size_t(a)];
        if (p.empty()) {
            out.push_back({ViolationKind::EmptyPath, a, -1, 0, {}});
            continue;
        }
        for (size_t t = 0; t < p.size(); ++t) {
            if (!map.passable(p[t]))
                out.push_back({ViolationKind::OffMap, a, -1, int(t), p[t]});
            if (t > 0) {
                int dx = std::abs(p[t].x - p[t - 1].x), dy = std::abs(p[t].y - p[t - 1].y);
                if (dx + dy > 1)
                    out.push_back({ViolationKind::NonAdjacentStep, a, -1, int(t), p[t]});
            }
        }
    }

    // Pairwise checks while both agents are active.
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const Path& pa = sol.paths[size_t(a)];
            const Path& pb = sol.paths[size_t(b)];
            size_t horizon = std::min(pa.size(), pb.size());
            for (size_t t = 0; t < horizon; ++t) {
                if (pa[t] == pb[t])
                    out.push_back({ViolationKind::VertexCollision, a, b, int(t), pa[t]});
                if (t + 1 < horizon && pa[t] == pb[t + 1] && pa[t + 1] == pb[t] && pa[t] != pa[t + 1])
                    out.push_back({ViolationKind::SwapCollision, a, b, int(t + 1), pa[t]});
            }
        }
    }
    return out;
}

}  // namespace btpg
