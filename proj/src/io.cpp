#include "cdii/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace cdii {

namespace {

[[noreturn]] void bad(const std::string& path, long line, const std::string& what) {
    throw InvalidInput(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& path, long line, const std::string& tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) bad(path, line, "bad number '" + tok + "'");
    if (!std::isfinite(v)) bad(path, line, "non-finite value '" + tok + "'");
    return v;
}

} // namespace

void write_grid_text(const std::string& path, const ScalarField& f) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw InvalidInput("cannot open for writing: " + path);
    const Grid2D& g = f.grid;
    std::fprintf(fp, "%d %d %.17g %.17g %.17g %.17g\n", g.nx, g.ny, g.hx, g.hy, g.ox, g.oy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i)
            std::fprintf(fp, "%.17g%c", f.at(i, j), i == g.nx - 1 ? '\n' : ' ');
    }
    std::fclose(fp);
}

ScalarField read_grid_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) bad(path, 1, "missing header");
    ++lineno;
    std::istringstream hdr(line);
    std::vector<std::string> toks;
    std::string tok;
    while (hdr >> tok) toks.push_back(tok);
    if (toks.size() != 6) bad(path, lineno, "header needs 6 fields: nx ny hx hy ox oy");

    long nx = std::strtol(toks[0].c_str(), nullptr, 10);
    long ny = std::strtol(toks[1].c_str(), nullptr, 10);
    if (nx < 3 || ny < 3) bad(path, lineno, "need nx >= 3 and ny >= 3");
    double hx = parse_double(path, lineno, toks[2]);
    double hy = parse_double(path, lineno, toks[3]);
    if (!(hx > 0.0) || !(hy > 0.0)) bad(path, lineno, "need hx > 0 and hy > 0");
    double ox = parse_double(path, lineno, toks[4]);
    double oy = parse_double(path, lineno, toks[5]);

    ScalarField f(Grid2D(int(nx), int(ny), hx, hy, ox, oy));
    std::size_t want = f.size(), got = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        while (ls >> tok) {
            if (got >= want) bad(path, lineno, "more than nx*ny values");
            f.v[got++] = parse_double(path, lineno, tok);
        }
    }
    if (got < want)
        bad(path, lineno + 1,
            "expected " + std::to_string(want) + " values, found " + std::to_string(got));
    return f;
}

void write_trace_csv(const std::string& path, const BoundaryTrace& t) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw InvalidInput("cannot open for writing: " + path);
    std::fprintf(fp, "index,value\n");
    for (std::size_t k = 0; k < t.size(); ++k)
        std::fprintf(fp, "%zu,%.17g\n", t.node[k], t.value[k]);
    std::fclose(fp);
}

BoundaryTrace read_trace_csv(const std::string& path, const Grid2D& g) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    BoundaryTrace t(g);
    std::vector<char> seen(t.size(), 0);

    std::string line;
    long lineno = 0;
    std::size_t filled = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "index,value") continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) bad(path, lineno, "expected 'index,value'");
        char* end = nullptr;
        long node = std::strtol(line.c_str(), &end, 10);
        if (end != line.c_str() + comma) bad(path, lineno, "bad index");
        double v = parse_double(path, lineno, line.substr(comma + 1));

        bool found = false;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t.node[k] == std::size_t(node)) {
                if (seen[k]) bad(path, lineno, "duplicate boundary node " + std::to_string(node));
                seen[k] = 1;
                t.value[k] = v;
                found = true;
                ++filled;
                break;
            }
        }
        if (!found) bad(path, lineno, "index " + std::to_string(node) + " is not a boundary node");
    }
    if (filled != t.size())
        bad(path, lineno + 1, "trace covers " + std::to_string(filled) + " of " +
                                  std::to_string(t.size()) + " boundary nodes");
    return t;
}

} // namespace cdii
