#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "snlab/cli.hpp"
#include "snlab/errors.hpp"

namespace snlab {

namespace {

struct Value {
    bool is_list = false;
    bool is_string = false;
    std::string text;                // raw scalar or string
    std::vector<std::string> items;  // list items
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// drops a '#' comment outside quotes
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

Value parse_value(const std::string& raw, const std::string& key, std::size_t line) {
    Value v;
    std::string s = trim(raw);
    if (s.empty()) throw ParseError("missing value for '" + key + "'", line);
    if (s.front() == '[') {
        if (s.back() != ']') throw ParseError("unterminated list for '" + key + "'", line);
        v.is_list = true;
        std::string body = trim(s.substr(1, s.size() - 2));
        if (body.empty()) return v;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) throw ParseError("empty list item in '" + key + "'", line);
            v.items.push_back(item);
        }
        return v;
    }
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') throw ParseError("unterminated string for '" + key + "'", line);
        v.is_string = true;
        v.text = s.substr(1, s.size() - 2);
        return v;
    }
    v.text = s;
    return v;
}

double to_number(const std::string& s, const std::string& key, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(d)) {
        throw ParseError("malformed number '" + s + "' for '" + key + "'", line);
    }
    return d;
}

std::uint64_t to_count(const std::string& s, const std::string& key, std::size_t line) {
    // plain digits parse exactly, beyond 2^53 too
    if (!s.empty() && s.size() <= 20 && s.find_first_not_of("0123456789") == std::string::npos) {
        try {
            return std::stoull(s);
        } catch (const std::out_of_range&) {
            throw ParseError("'" + key + "' is out of range: '" + s + "'", line);
        }
    }
    double d = to_number(s, key, line);
    if (d < 0 || d != std::floor(d) || d >= 1.8e19) {
        throw ParseError("'" + key + "' must be a nonnegative integer, got '" + s + "'", line);
    }
    return static_cast<std::uint64_t>(d);
}

double scalar(const Value& v, const std::string& key, std::size_t line) {
    if (v.is_list || v.is_string) throw ParseError("'" + key + "' expects a number", line);
    return to_number(v.text, key, line);
}

std::vector<double> number_list(const Value& v, const std::string& key, std::size_t line) {
    if (!v.is_list) throw ParseError("'" + key + "' expects a list like [1, 2]", line);
    std::vector<double> out;
    for (const auto& it : v.items) out.push_back(to_number(it, key, line));
    return out;
}

std::vector<std::size_t> count_list(const Value& v, const std::string& key, std::size_t line) {
    if (!v.is_list) throw ParseError("'" + key + "' expects a list like [1, 2]", line);
    std::vector<std::size_t> out;
    for (const auto& it : v.items) out.push_back(static_cast<std::size_t>(to_count(it, key, line)));
    return out;
}

std::size_t count(const Value& v, const std::string& key, std::size_t line) {
    if (v.is_list || v.is_string) throw ParseError("'" + key + "' expects an integer", line);
    return static_cast<std::size_t>(to_count(v.text, key, line));
}

struct Entry {
    Value value;
    std::size_t line = 0;
};

const std::set<std::string> kModelKeys{"variant", "alpha", "p", "scale", "phi", "omega", "a1", "b1", "burn_in"};

class Builder {
public:
    explicit Builder(ExperimentConfig& cfg) : cfg_(cfg) {}

    void set(const std::string& section, const std::string& key, const Value& v, std::size_t line) {
        const std::string full = section + "." + key;
        if (section == "model") {
            if (!kModelKeys.count(key)) throw ParseError("unknown key '" + full + "'", line);
            model_[key] = {v, line};
        } else if (section == "run") {
            set_run(key, full, v, line);
        } else if (section == "tolerances") {
            if (!cfg_.tolerances.count(key)) throw ParseError("unknown key '" + full + "'", line);
            double t = scalar(v, full, line);
            if (t < 0) throw ParseError("'" + full + "' must be nonnegative", line);
            cfg_.tolerances[key] = t;
        } else {
            throw ParseError("unknown section '" + section + "'", line);
        }
    }

    void build_model() {
        if (model_.empty()) return;
        std::string variant = model_name(cfg_.model);
        if (model_.count("variant")) {
            const auto& e = model_.at("variant");
            if (e.value.is_list) throw ParseError("'model.variant' expects a name", e.line);
            variant = e.value.text;
        }
        auto num = [&](const char* k, double def) {
            auto it = model_.find(k);
            return it == model_.end() ? def : scalar(it->second.value, std::string("model.") + k, it->second.line);
        };
        auto line_of = [&](const char* k) {
            auto it = model_.find(k);
            return it == model_.end() ? std::size_t{0} : it->second.line;
        };
        auto forbid = [&](std::initializer_list<const char*> keys) {
            for (const char* k : keys) {
                if (model_.count(k)) {
                    throw ParseError("'model." + std::string(k) + "' is not used by variant " + variant, line_of(k));
                }
            }
        };
        auto regvar = [&]() {
            RegVarSpec rv{num("alpha", 0.5), num("p", 1.0), num("scale", 1.0)};
            if (!(rv.alpha > 0.0 && rv.alpha < 2.0)) {
                throw ParseError("'model.alpha' = " + fmt_double(rv.alpha) + " out of range: alpha must lie in (0,2)",
                                 line_of("alpha"));
            }
            if (!(rv.p >= 0.0 && rv.p <= 1.0)) throw ParseError("'model.p' must lie in [0,1]", line_of("p"));
            if (!(rv.scale > 0.0)) throw ParseError("'model.scale' must be positive", line_of("scale"));
            return rv;
        };
        auto garch = [&]() {
            GarchModel g{num("omega", 1e-6), num("a1", 0.5), num("b1", 0.3), 0};
            if (model_.count("burn_in")) {
                const auto& e = model_.at("burn_in");
                g.burn_in = count(e.value, "model.burn_in", e.line);
            }
            if (!(g.omega > 0.0)) throw ParseError("'model.omega' must be positive", line_of("omega"));
            if (!(g.a1 >= 0.0)) throw ParseError("'model.a1' must be nonnegative", line_of("a1"));
            if (!(g.b1 >= 0.0)) throw ParseError("'model.b1' must be nonnegative", line_of("b1"));
            return g;
        };
        if (variant == "iid") {
            forbid({"phi", "omega", "a1", "b1", "burn_in"});
            cfg_.model = IidModel{regvar()};
        } else if (variant == "linear") {
            forbid({"omega", "a1", "b1", "burn_in"});
            std::vector<double> phi{1.0, 0.5};
            if (model_.count("phi")) phi = number_list(model_.at("phi").value, "model.phi", line_of("phi"));
            if (phi.empty()) throw ParseError("'model.phi' must not be empty", line_of("phi"));
            cfg_.model = LinearModel{phi, regvar()};
        } else if (variant == "garch" || variant == "squared_garch") {
            forbid({"alpha", "p", "scale", "phi"});
            GarchModel g = garch();
            if (variant == "garch") {
                cfg_.model = g;
            } else {
                cfg_.model = SquaredGarchModel{g};
            }
        } else {
            throw ParseError("'model.variant' must be iid, linear, garch or squared_garch, got '" + variant + "'",
                             line_of("variant"));
        }
    }

private:
    void set_run(const std::string& key, const std::string& full, const Value& v, std::size_t line) {
        auto& c = cfg_;
        if (key == "n_grid") c.n_grid = count_list(v, full, line);
        else if (key == "replicates") c.replicates = count(v, full, line);
        else if (key == "limit_draws") c.limit_draws = count(v, full, line);
        else if (key == "series_points") c.series_points = count(v, full, line);
        else if (key == "t_grid") c.t_grid = number_list(v, full, line);
        else if (key == "u") c.u = scalar(v, full, line);
        else if (key == "kappa") c.kappa = scalar(v, full, line);
        else if (key == "seed") {
            if (v.is_list || v.is_string) throw ParseError("'run.seed' expects an integer", line);
            c.seed = to_count(v.text, full, line);
        }
        else if (key == "workers") c.workers = static_cast<unsigned>(count(v, full, line));
        else if (key == "triple_mc") c.triple_mc = count(v, full, line);
        else if (key == "contrast_phi") c.contrast_phi = number_list(v, full, line);
        else if (key == "contrast_n") c.contrast_n = count_list(v, full, line);
        else if (key == "contrast_replicates") c.contrast_replicates = count(v, full, line);
        else if (key == "karamata_alpha") c.karamata_alpha = number_list(v, full, line);
        else if (key == "karamata_u") c.karamata_u = number_list(v, full, line);
        else if (key == "karamata_n") c.karamata_n = number_list(v, full, line);
        else if (key == "karamata_mc") c.karamata_mc = count(v, full, line);
        else if (key == "slutsky_alpha") c.slutsky_alpha = scalar(v, full, line);
        else if (key == "slutsky_u") c.slutsky_u = number_list(v, full, line);
        else if (key == "slutsky_eps") c.slutsky_eps = number_list(v, full, line);
        else if (key == "slutsky_n") c.slutsky_n = count(v, full, line);
        else if (key == "slutsky_replicates") c.slutsky_replicates = count(v, full, line);
        else throw ParseError("unknown key '" + full + "'", line);
    }

    ExperimentConfig& cfg_;
    std::map<std::string, Entry> model_;
};

void split_key(const std::string& lhs, std::string& section, std::string& key) {
    auto dot = lhs.find('.');
    if (dot == std::string::npos) throw ParseError("override '" + lhs + "' must be section.key=value", 0);
    section = lhs.substr(0, dot);
    key = lhs.substr(dot + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                              std::optional<std::uint64_t> env_seed, std::optional<std::uint64_t> cli_seed) {
    ExperimentConfig cfg = default_config();
    if (env_seed) cfg.seed = *env_seed;
    Builder b(cfg);
    std::set<std::string> seen;
    std::istringstream is(text);
    std::string raw, section;
    std::size_t line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("malformed section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (section != "model" && section != "run" && section != "tolerances") {
                throw ParseError("unknown section '" + section + "'", line);
            }
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        std::string key = trim(s.substr(0, eq));
        if (section.empty()) {
            // dotted keys are accepted before any section header
            split_key(key, section, key);
            if (section != "model" && section != "run" && section != "tolerances") {
                throw ParseError("unknown section '" + section + "'", line);
            }
        }
        if (key.empty()) throw ParseError("empty key", line);
        if (!seen.insert(section + "." + key).second) throw ParseError("duplicate key '" + section + "." + key + "'", line);
        b.set(section, key, parse_value(s.substr(eq + 1), section + "." + key, line), line);
        if (s.find('.') != std::string::npos && key.find('.') != std::string::npos) {
            throw ParseError("unknown key '" + section + "." + key + "'", line);
        }
    }
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw ParseError("override '" + ov + "' must be section.key=value", 0);
        std::string sec, key;
        split_key(trim(ov.substr(0, eq)), sec, key);
        try {
            b.set(sec, key, parse_value(ov.substr(eq + 1), sec + "." + key, 0), 0);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (command-line override)", 0);
        }
    }
    try {
        b.build_model();
    } catch (const PreconditionError& e) {
        throw ParseError(e.what(), 0);
    }
    if (cli_seed) cfg.seed = *cli_seed;
    try {
        cfg.validate();
    } catch (const PreconditionError& e) {
        throw ParseError(e.what(), 0);
    }
    return cfg;
}

namespace {

// shortest text that parses back to the same double
std::string short_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <class T>
std::string list_text(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>) {
            s += short_double(v[i]);
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s + "]";
}

}  // namespace

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[model]\n";
    os << "variant = " << model_name(c.model) << "\n";
    auto rv = [&](const RegVarSpec& r) {
        os << "alpha = " << short_double(r.alpha) << "\np = " << short_double(r.p) << "\nscale = " << short_double(r.scale)
           << "\n";
    };
    auto gm = [&](const GarchModel& g) {
        os << "omega = " << short_double(g.omega) << "\na1 = " << short_double(g.a1) << "\nb1 = " << short_double(g.b1)
           << "\nburn_in = " << g.burn_in << "\n";
    };
    if (const auto* m = std::get_if<IidModel>(&c.model)) rv(m->rv);
    if (const auto* m = std::get_if<LinearModel>(&c.model)) {
        rv(m->innovation);
        os << "phi = " << list_text(m->coeffs) << "\n";
    }
    if (const auto* m = std::get_if<GarchModel>(&c.model)) gm(*m);
    if (const auto* m = std::get_if<SquaredGarchModel>(&c.model)) gm(m->inner);
    os << "\n[run]\n";
    os << "n_grid = " << list_text(c.n_grid) << "\n";
    os << "replicates = " << c.replicates << "\n";
    os << "limit_draws = " << c.limit_draws << "\n";
    os << "series_points = " << c.series_points << "\n";
    os << "t_grid = " << list_text(c.t_grid) << "\n";
    os << "u = " << short_double(c.u) << "\n";
    os << "kappa = " << short_double(c.kappa) << "\n";
    os << "seed = " << c.seed << "\n";
    os << "workers = " << c.workers << "\n";
    os << "triple_mc = " << c.triple_mc << "\n";
    os << "contrast_phi = " << list_text(c.contrast_phi) << "\n";
    os << "contrast_n = " << list_text(c.contrast_n) << "\n";
    os << "contrast_replicates = " << c.contrast_replicates << "\n";
    os << "karamata_alpha = " << list_text(c.karamata_alpha) << "\n";
    os << "karamata_u = " << list_text(c.karamata_u) << "\n";
    os << "karamata_n = " << list_text(c.karamata_n) << "\n";
    os << "karamata_mc = " << c.karamata_mc << "\n";
    os << "slutsky_alpha = " << short_double(c.slutsky_alpha) << "\n";
    os << "slutsky_u = " << list_text(c.slutsky_u) << "\n";
    os << "slutsky_eps = " << list_text(c.slutsky_eps) << "\n";
    os << "slutsky_n = " << c.slutsky_n << "\n";
    os << "slutsky_replicates = " << c.slutsky_replicates << "\n";
    os << "\n[tolerances]\n";
    for (const auto& [k, v] : c.tolerances) os << k << " = " << short_double(v) << "\n";
    return os.str();
}

}  // namespace snlab
