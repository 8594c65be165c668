#include "dsice/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "dsice/errors.hpp"

namespace dsice {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> read_csv(const std::string& path, const std::vector<std::string>& columns) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open " + path);
    std::string line;
    int lineno = 0;
    std::vector<int> pos;
    std::size_t width = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (pos.empty()) {
            for (const auto& want : columns) {
                int found = -1;
                for (std::size_t i = 0; i < cells.size(); ++i)
                    if (cells[i] == want) found = static_cast<int>(i);
                if (found < 0) throw ValidationError(path + ":" + std::to_string(lineno) + ": missing column '" + want + "'");
                pos.push_back(found);
            }
            width = cells.size();
            continue;
        }
        if (cells.size() != width)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                                  " fields, found " + std::to_string(cells.size()));
        std::vector<double> row;
        for (std::size_t k = 0; k < pos.size(); ++k) {
            const std::string& s = cells[pos[k]];
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || p != s.data() + s.size())
                throw ValidationError(path + ":" + std::to_string(lineno) + ":" + std::to_string(pos[k] + 1) +
                                      ": bad number '" + s + "' in column '" + columns[k] + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (pos.empty()) throw ValidationError(path + ": no header row");
    return rows;
}

DecadalTargets read_targets(const std::string& path, int last_year, int stride) {
    const auto rows = read_csv(path, {"t", "M_AT", "M_UO", "M_LO", "T_AT", "T_OC"});
    DecadalTargets d;
    int expect = 0;
    for (const auto& r : rows) {
        const int t = static_cast<int>(r[0]);
        if (static_cast<double>(t) != r[0]) throw ValidationError(path + ": non-integer year " + std::to_string(r[0]));
        if (t != expect)
            throw ValidationError(path + ": expected a row for t=" + std::to_string(expect) + ", found t=" + std::to_string(t));
        d.t.push_back(t);
        d.M.push_back({r[1], r[2], r[3]});
        d.T.push_back({r[4], r[5]});
        expect += stride;
    }
    if (expect <= last_year)
        throw ValidationError(path + ": missing row for t=" + std::to_string(expect));
    return d;
}

void write_targets(const DecadalTargets& d, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ValidationError("cannot write " + path);
    std::fprintf(f, "t,M_AT,M_UO,M_LO,T_AT,T_OC\n");
    for (std::size_t i = 0; i < d.t.size(); ++i)
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.t[i], d.M[i].M_AT, d.M[i].M_UO, d.M[i].M_LO,
                     d.T[i].T_AT, d.T[i].T_OC);
    std::fclose(f);
}

std::vector<std::pair<double, double>> read_emissions(const std::string& path) {
    const auto rows = read_csv(path, {"t", "E"});
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) pts.emplace_back(r[0], r[1]);
    if (pts.empty() || pts.front().first != 0.0) throw ValidationError(path + ": emissions must start at t=0");
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i].first > pts[i - 1].first)) throw ValidationError(path + ": years must increase");
    return pts;
}

}  // namespace dsice
