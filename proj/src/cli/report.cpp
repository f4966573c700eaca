#include <cmath>
#include <fstream>
#include <sstream>

#include "snlab/cli.hpp"
#include "snlab/errors.hpp"

namespace snlab {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
        auto a = f.find_first_not_of(" \t\r");
        auto b = f.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

std::vector<double> read_series_csv(std::istream& is) {
    std::vector<double> x;
    std::string line;
    std::size_t lineno = 0, col = 0, width = 0;
    bool first = true;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
        auto f = split_fields(line);
        if (first) {
            first = false;
            width = f.size();
            double dummy;
            if (!parse_double(f[0], dummy) || (f.size() > 1 && !parse_double(f[1], dummy))) {
                col = f.size() - 1;
                for (std::size_t j = 0; j < f.size(); ++j) {
                    if (f[j] == "x" || f[j] == "x2" || f[j] == "value") {
                        col = j;
                        break;
                    }
                }
                continue;
            }
            if (width != 1) throw ParseError("data with several columns needs a header naming column x", lineno);
        }
        if (f.size() != width) {
            throw ParseError("expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()), lineno);
        }
        double v;
        if (!parse_double(f[col], v)) throw ParseError("malformed number '" + f[col] + "'", lineno);
        if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
        x.push_back(v);
    }
    if (x.empty()) throw ParseError("no data rows", 0);
    return x;
}

std::vector<double> read_series_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    return read_series_csv(in);
}

Json estimate_report(const std::vector<double>& x, double kappa) {
    const std::size_t n = x.size();
    if (n < 100) throw PreconditionError("estimate needs at least 100 observations, got " + std::to_string(n));
    const BlockingScheme sch = BlockingScheme::from_exponent(n, kappa);
    const double u = abs_threshold(x, 1.0 - 1.0 / (25.0 * static_cast<double>(sch.r_n)));
    const auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    Json d;
    d["n"] = n;
    d["alpha_hat"] = hill_alpha(x, k);
    d["hill_k"] = k;
    d["an_hat"] = empirical_an(x, n);
    d["r_n"] = sch.r_n;
    d["threshold"] = u;
    d["theta_hat"] = extremal_index_blocks(x, sch, u);
    std::vector<std::size_t> ms;
    for (std::size_t m : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{10}, sch.r_n / 2}) {
        if (m >= 1 && m <= sch.r_n && (ms.empty() || m > ms.back())) ms.push_back(m);
    }
    Json curve = Json::array();
    for (const auto& c : anticluster_diagnostic(x, sch, u, ms)) {
        curve.push_back(Json{{"m", c.m}, {"prob", c.prob}, {"anchors", c.anchors}});
    }
    d["anticluster"] = curve;
    auto ss = sign_switch_diagnostic(x, sch, u);
    d["sign_switch"] = Json{{"violations", ss.violations}, {"exceeding_blocks", ss.exceeding_blocks},
                            {"multi_blocks", ss.multi_blocks}};
    return d;
}

std::string verdict_table(const std::vector<ConvergenceReport>& reports) {
    std::ostringstream os;
    os << "check\tverdict\tvalue\tthreshold\ttolerance\tresult\n";
    bool all = true;
    for (const auto& rep : reports) {
        if (rep.verdicts.empty()) os << rep.check << "\t-\t-\t-\t-\tNOT_APPLICABLE\n";
        for (const auto& v : rep.verdicts) {
            all = all && v.pass;
            os << rep.check << '\t' << v.name << '\t' << fmt_double(v.value) << '\t' << fmt_double(v.threshold) << '\t'
               << (v.tolerance.empty() ? "-" : v.tolerance) << '\t' << (v.pass ? "PASS" : "FAIL") << '\n';
        }
    }
    os << "overall\t" << (all ? "PASS" : "FAIL") << '\n';
    return os.str();
}

}  // namespace snlab
