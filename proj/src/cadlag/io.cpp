#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"

namespace snlab {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_path_csv(std::ostream& os, const CadlagPath& x, const std::vector<std::string>& extra_comments,
                    const std::string& column_header) {
    os << "# kind=" << (x.kind() == PathKind::Step ? "step" : "pl") << " d=" << x.dim() << '\n';
    for (const auto& c : extra_comments) os << "# " << c << '\n';
    if (!column_header.empty()) os << column_header << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) {
        os << fmt_double(x.times()[i]);
        for (std::size_t c = 0; c < x.dim(); ++c) os << ',' << fmt_double(x.values(c)[i]);
        os << '\n';
    }
}

namespace {

double parse_number(const std::string& s, std::size_t line) {
    if (s.empty()) throw ParseError("empty field", line);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) throw ParseError("malformed number '" + s + "'", line);
    return v;
}

}  // namespace

CadlagPath read_path_csv(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    PathKind kind = PathKind::Step;
    std::size_t dim = 0;
    bool header_seen = false;
    std::vector<double> times;
    std::vector<std::vector<double>> coords;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header_seen) continue;
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                if (tok.rfind("kind=", 0) == 0) {
                    std::string k = tok.substr(5);
                    if (k == "step") kind = PathKind::Step;
                    else if (k == "pl") kind = PathKind::Linear;
                    else throw ParseError("unknown path kind '" + k + "'", lineno);
                } else if (tok.rfind("d=", 0) == 0) {
                    double d = parse_number(tok.substr(2), lineno);
                    if (d != 1.0 && d != 2.0) throw ParseError("dimension must be 1 or 2", lineno);
                    dim = static_cast<std::size_t>(d);
                }
            }
            if (dim == 0) throw ParseError("first line must be '# kind=step|pl d=<dim>'", lineno);
            header_seen = true;
            coords.assign(dim, {});
            continue;
        }
        if (!header_seen) throw ParseError("missing '# kind=... d=...' header", lineno);
        if (std::isalpha(static_cast<unsigned char>(line[0])) && times.empty()) continue;  // column names
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != dim + 1) {
            throw ParseError("expected " + std::to_string(dim + 1) + " fields, got " + std::to_string(fields.size()),
                             lineno);
        }
        times.push_back(parse_number(fields[0], lineno));
        for (std::size_t c = 0; c < dim; ++c) coords[c].push_back(parse_number(fields[c + 1], lineno));
    }
    if (!header_seen) throw ParseError("empty path file", 0);
    try {
        return CadlagPath(std::move(times), std::move(coords), kind);
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("invalid path: ") + e.what(), lineno);
    }
}

CadlagPath read_path_csv_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::ios_base::failure("cannot open " + filename);
    return read_path_csv(in);
}

}  // namespace snlab
