#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "snlab/errors.hpp"
#include "snlab/lab.hpp"
#include "snlab/rng.hpp"

namespace snlab {

std::map<std::string, double> default_tolerances() {
    return {
        {"fidi_ks", 0.06},
        {"selfnorm_ks", 0.07},
        {"contrast_order_frac", 0.95},
        {"contrast_m1_ratio", 1.0},
        {"karamata_rel", 0.05},
        {"slutsky_max_violations", 0.0},
        {"hill_abs", 0.15},
        {"theta_abs", 0.08},
    };
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.tolerances = default_tolerances();
    return c;
}

double ExperimentConfig::tolerance(const std::string& key) const {
    auto it = tolerances.find(key);
    if (it == tolerances.end()) throw PreconditionError("tolerance '" + key + "' missing from config");
    return it->second;
}

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw PreconditionError("run.n_grid must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw PreconditionError("run.n_grid entries must be at least 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw PreconditionError("run.n_grid must be increasing");
    }
    bool has_one = false;
    for (double t : t_grid) {
        if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("run.t_grid values must lie in [0,1]");
        has_one = has_one || t == 1.0;
    }
    if (!has_one) throw PreconditionError("run.t_grid must include 1");
    if (!(kappa > 0.0 && kappa < 1.0)) throw PreconditionError("run.kappa must lie in (0,1)");
    if (!(u > 0.0)) throw PreconditionError("run.u must be positive");
    if (replicates == 0 || limit_draws == 0 || contrast_replicates == 0 || slutsky_replicates == 0 || karamata_mc == 0) {
        throw PreconditionError("replicate and draw counts must be positive");
    }
    if (slutsky_n < 2) throw PreconditionError("run.slutsky_n must be at least 2");
    if (series_points < 1000) throw PreconditionError("run.series_points must be at least 1000");
    if (triple_mc < 10000) throw PreconditionError("run.triple_mc must be at least 10000");
    if (contrast_phi.empty() || contrast_n.empty()) throw PreconditionError("contrast grid must not be empty");
    for (double a : karamata_alpha) {
        if (!(a > 0.0 && a < 1.0)) throw PreconditionError("run.karamata_alpha values must lie in (0,1)");
    }
    for (double v : karamata_u) {
        if (!(v > 0.0)) throw PreconditionError("run.karamata_u values must be positive");
    }
    for (double v : karamata_n) {
        if (!(v >= 1.0)) throw PreconditionError("run.karamata_n values must be at least 1");
    }
    for (double v : slutsky_u) {
        if (!(v > 0.0)) throw PreconditionError("run.slutsky_u values must be positive");
    }
    for (double v : slutsky_eps) {
        if (!(v > 0.0)) throw PreconditionError("run.slutsky_eps values must be positive");
    }
    std::visit([](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidModel>) m.rv.validate();
        if constexpr (std::is_same_v<T, LinearModel>) m.innovation.validate();
    }, model);
}

bool ConvergenceReport::passed() const {
    for (const auto& v : verdicts) {
        if (!v.pass) return false;
    }
    return true;
}

// ------------------------------------------------------------ serialization

namespace {

void dump_into(std::string& out, const Json& j) {
    switch (j.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += Json(it.key()).dump();
                out += ':';
                dump_into(out, it.value());
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_into(out, j[i]);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float: {
            double v = j.get<double>();
            out += std::isfinite(v) ? fmt_double(v) : "null";
            break;
        }
        default:
            out += j.dump();
    }
}

Json model_json(const ModelSpec& spec) {
    Json m;
    m["variant"] = model_name(spec);
    auto rv_json = [&](const RegVarSpec& rv) {
        m["alpha"] = rv.alpha;
        m["p"] = rv.p;
        m["scale"] = rv.scale;
    };
    if (const auto* iid = std::get_if<IidModel>(&spec)) rv_json(iid->rv);
    if (const auto* lin = std::get_if<LinearModel>(&spec)) {
        rv_json(lin->innovation);
        m["phi"] = lin->coeffs;
    }
    auto garch_json = [&](const GarchModel& g) {
        m["omega"] = g.omega;
        m["a1"] = g.a1;
        m["b1"] = g.b1;
        m["burn_in"] = g.burn_in;
    };
    if (const auto* g = std::get_if<GarchModel>(&spec)) garch_json(*g);
    if (const auto* g = std::get_if<SquaredGarchModel>(&spec)) garch_json(g->inner);
    return m;
}

Json verdict_json(const std::string& check, const Verdict& v) {
    Json j;
    j["check"] = check;
    j["verdict"] = v.name;
    j["pass"] = v.pass;
    j["value"] = v.value;
    j["threshold"] = v.threshold;
    j["tolerance"] = v.tolerance;
    j["detail"] = v.detail;
    return j;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot write " + p.string());
    os << text;
    if (!os) throw std::ios_base::failure("write failed: " + p.string());
}

}  // namespace

std::string dump_json(const Json& j) {
    std::string out;
    dump_into(out, j);
    return out;
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["model"] = model_json(c.model);
    Json r;
    r["n_grid"] = c.n_grid;
    r["replicates"] = c.replicates;
    r["limit_draws"] = c.limit_draws;
    r["series_points"] = c.series_points;
    r["t_grid"] = c.t_grid;
    r["u"] = c.u;
    r["kappa"] = c.kappa;
    r["seed"] = c.seed;
    r["triple_mc"] = c.triple_mc;
    r["contrast_phi"] = c.contrast_phi;
    r["contrast_n"] = c.contrast_n;
    r["contrast_replicates"] = c.contrast_replicates;
    r["karamata_alpha"] = c.karamata_alpha;
    r["karamata_u"] = c.karamata_u;
    r["karamata_n"] = c.karamata_n;
    r["karamata_mc"] = c.karamata_mc;
    r["slutsky_alpha"] = c.slutsky_alpha;
    r["slutsky_u"] = c.slutsky_u;
    r["slutsky_eps"] = c.slutsky_eps;
    r["slutsky_n"] = c.slutsky_n;
    r["slutsky_replicates"] = c.slutsky_replicates;
    j["run"] = r;
    Json t = Json::object();
    for (const auto& [k, v] : c.tolerances) t[k] = v;
    j["tolerances"] = t;
    return j;
}

// ------------------------------------------------------------ suite

SuiteResult run_full_suite(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    cfg.validate();
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "paths", ec);
    if (ec) throw std::ios_base::failure("cannot create bundle directory " + out_dir + ": " + ec.message());

    using Runner = ConvergenceReport (*)(const ExperimentConfig&);
    const std::vector<std::pair<std::string, Runner>> checks{
        {"fidi", run_fidi_convergence},       {"selfnorm", run_selfnorm_convergence},
        {"contrast", run_j1_vs_m1_contrast},  {"karamata", run_karamata_check},
        {"slutsky", run_slutsky_bound_check}, {"diagnostics", run_diagnostics},
    };
    SuiteResult res;
    for (const auto& [name, fn] : checks) {
        if (name == "slutsky" && !(cfg.slutsky_alpha < 1.0)) {
            ConvergenceReport na;
            na.check = name;
            Json row;
            row["check"] = name;
            row["status"] = "not_applicable";
            row["reason"] = "small-jump bound holds for alpha in (0,1)";
            na.rows.push_back(row);
            res.reports.push_back(na);
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        try {
            res.reports.push_back(fn(cfg));
        } catch (const std::exception& e) {
            ConvergenceReport bad;
            bad.check = name;
            Verdict v;
            v.name = name + "_error";
            v.pass = false;
            v.value = std::numeric_limits<double>::quiet_NaN();
            v.threshold = std::numeric_limits<double>::quiet_NaN();
            v.detail = e.what();
            bad.verdicts.push_back(v);
            bad.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            res.reports.push_back(bad);
        }
    }
    for (const auto& rep : res.reports) {
        for (const auto& v : rep.verdicts) {
            if (!v.pass) res.failures.push_back(v.name);
        }
    }

    // report.jsonl
    std::string jsonl;
    for (const auto& rep : res.reports) {
        for (const auto& row : rep.rows) jsonl += dump_json(row) + "\n";
        for (const auto& v : rep.verdicts) jsonl += dump_json(verdict_json(rep.check, v)) + "\n";
    }
    write_file(root / "report.jsonl", jsonl);

    // paths for plotting; failures here are recorded, not fatal
    const std::size_t n = cfg.n_grid.back();
    try {
        std::ostringstream a, b, c;
        auto data = sample_data_pair(cfg, n, stream_seed(cfg.seed, "bundle-path"));
        write_joint_csv(a, data);
        write_file(root / "paths" / "ln_sample.csv", a.str());
        auto x = sample_model(cfg.model, n, stream_seed(cfg.seed, "bundle-path")).values;
        write_path_csv(c, self_normalized_path(x), {"self-normalized path S_[nt]/V_n, n=" + std::to_string(n)},
                       "t,sn");
        write_file(root / "paths" / "selfnorm_sample.csv", c.str());
        write_joint_csv(b, sample_limit_pair(cfg, stream_seed(cfg.seed, "bundle-limit")));
        write_file(root / "paths" / "levy_pair.csv", b.str());
    } catch (const std::ios_base::failure&) {
        throw;
    } catch (const std::exception& e) {
        res.failures.push_back("bundle_paths");
        write_file(root / "paths" / "error.txt", std::string(e.what()) + "\n");
    }

    // summary.txt
    std::ostringstream sm;
    sm << "# suite summary, seed " << cfg.seed << "\n";
    sm << "# M1 convergence is checked through (a) finite-dimensional marginals,\n"
          "# (b) cluster-collapse distances in M1 and J1, (c) the analytic bounds.\n";
    sm << "check\tverdict\tvalue\tthreshold\ttolerance\tresult\n";
    for (const auto& rep : res.reports) {
        if (rep.verdicts.empty()) sm << rep.check << "\t-\t-\t-\t-\tNOT_APPLICABLE\n";
        for (const auto& v : rep.verdicts) {
            sm << rep.check << '\t' << v.name << '\t' << fmt_double(v.value) << '\t' << fmt_double(v.threshold) << '\t'
               << (v.tolerance.empty() ? "-" : v.tolerance) << '\t' << (v.pass ? "PASS" : "FAIL");
            if (!v.pass && !v.detail.empty() && v.tolerance.empty()) sm << '\t' << v.detail;
            sm << '\n';
        }
    }
    sm << "overall\t" << (res.passed() ? "PASS" : "FAIL") << '\n';
    write_file(root / "summary.txt", sm.str());

    // manifest.json (reproduction record) and runtime.json (excluded from comparisons)
    Json cj = config_to_json(cfg);
    std::string ctext = dump_json(cj);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(hash_tag(ctext)));
    Json man;
    man["tool"] = "snlab";
    man["version"] = "1.0.0";
    man["seed"] = cfg.seed;
    man["config_hash"] = hash;
    man["config"] = cj;
    man["compiler"] = __VERSION__;
    man["boost"] = BOOST_LIB_VERSION;
    man["files"] = {"report.jsonl", "summary.txt", "paths/ln_sample.csv", "paths/selfnorm_sample.csv",
                    "paths/levy_pair.csv"};
    write_file(root / "manifest.json", dump_json(man) + "\n");

    Json rt;
    rt["workers"] = cfg.workers;
    Json per = Json::object();
    for (const auto& rep : res.reports) per[rep.check] = rep.runtime_seconds;
    rt["seconds"] = per;
    write_file(root / "runtime.json", dump_json(rt) + "\n");
    return res;
}

}  // namespace snlab
