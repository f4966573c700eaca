#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "snlab/cli.hpp"
#include "snlab/errors.hpp"
#include "snlab/rng.hpp"

namespace snlab {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
    c.out = default_out;
    sub->add_option("-c,--config", c.config, "config file ([model], [run], [tolerances])");
    sub->add_option("-o,--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--seed", c.seed, "base seed (overrides every other source)");
    sub->add_option("overrides", c.overrides, "section.key=value overrides");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("SEED");
    if (!s || !*s) return std::nullopt;
    std::string v(s);
    if (v.find_first_not_of("0123456789") != std::string::npos || v.size() > 20) {
        throw ParseError("environment SEED='" + v + "' is not a nonnegative integer", 0);
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ParseError("environment SEED='" + v + "' is out of range", 0);
    }
}

ExperimentConfig load(const Common& c) {
    std::string text = c.config.empty() ? std::string() : read_text(c.config);
    return parse_config(text, c.overrides, env_seed(), c.seed);
}

void echo_config(std::ostream& out, const ExperimentConfig& cfg) {
    std::istringstream is(config_to_text(cfg));
    std::string line;
    out << "# effective config\n";
    while (std::getline(is, line)) {
        if (!line.empty()) out << "# " << line << '\n';
    }
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot write " + p.string());
    os << text;
    if (!os) throw std::ios_base::failure("write failed: " + p.string());
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw std::ios_base::failure("cannot create " + dir + ": " + ec.message());
    return p;
}

std::string key_values(const Json& j) {
    std::ostringstream os;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it->is_structured()) continue;
        os << it.key() << '=' << (it->is_number_float() ? fmt_double(it->get<double>()) : it->dump()) << '\n';
    }
    return os.str();
}

// ----------------------------------------------------------------- verbs

int cmd_simulate(const Common& c, std::size_t n, std::ostream& out) {
    ExperimentConfig cfg = load(c);
    if (n == 0) n = cfg.n_grid.back();
    echo_config(out, cfg);
    const std::uint64_t s = stream_seed(cfg.seed, "simulate");
    SeriesSample sample = sample_model(cfg.model, n, s);
    JointPathPair ln = sample_data_pair(cfg, n, s);
    fs::path dir = prepare_dir(c.out);
    std::ostringstream a, b;
    write_sample_csv(a, sample);
    write_joint_csv(b, ln);
    write_text(dir / "series.csv", a.str());
    write_text(dir / "ln.csv", b.str());
    write_text(dir / "config.ini", config_to_text(cfg));
    out << "model=" << model_name(cfg.model) << "\nn=" << n << "\nseed=" << cfg.seed
        << "\ntail_index=" << fmt_double(sample.tail_index) << "\nan=" << fmt_double(ln.a_n)
        << "\nb1n=" << fmt_double(ln.b1n) << "\nb2n=" << fmt_double(ln.b2n) << '\n';
    if (!sample.warning.empty()) out << "warning=" << sample.warning << '\n';
    return kExitPass;
}

int cmd_estimate(const Common& c, const std::string& data, bool out_given, std::ostream& out) {
    ExperimentConfig cfg = load(c);
    echo_config(out, cfg);
    std::vector<double> x;
    Json rep;
    if (!data.empty()) {
        x = read_series_csv_file(data);
        rep["source"] = data;
    } else {
        const std::size_t n = std::max<std::size_t>(100000, cfg.n_grid.back());
        x = sample_model(cfg.model, n, stream_seed(cfg.seed, "estimate")).values;
        rep["source"] = "model:" + model_name(cfg.model);
        rep["alpha_true"] = model_tail(cfg.model).alpha;
    }
    const Json est = estimate_report(x, cfg.kappa);
    for (auto it = est.begin(); it != est.end(); ++it) rep[it.key()] = *it;
    out << key_values(rep);
    for (const auto& p : rep["anticluster"]) {
        out << "anticluster m=" << p["m"].dump() << " prob=" << fmt_double(p["prob"].get<double>())
            << " anchors=" << p["anchors"].dump() << '\n';
    }
    const auto& ss = rep["sign_switch"];
    out << "sign_switch violations=" << ss["violations"].dump() << " exceeding_blocks=" << ss["exceeding_blocks"].dump()
        << " multi_blocks=" << ss["multi_blocks"].dump() << '\n';
    if (out_given) write_text(prepare_dir(c.out) / "estimate.json", dump_json(rep) + "\n");
    return kExitPass;
}

int cmd_m1dist(const std::string& fa, const std::string& fb, std::size_t resolution, std::ostream& out,
               std::ostream& err) {
    CadlagPath a = read_path_csv_file(fa);
    CadlagPath b = read_path_csv_file(fb);
    if (a.dim() != b.dim()) {
        throw PreconditionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    if (resolution != 0 && resolution < min_resolution(a, b)) {
        throw PreconditionError("--resolution must be at least " + std::to_string(min_resolution(a, b)));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double j1 = nan, m1 = nan;
    if (a.dim() == 1) {
        m1 = resolution ? m1_distance(a, b, resolution) : m1_distance(a, b);
        if (a.kind() == PathKind::Step && b.kind() == PathKind::Step) {
            j1 = j1_distance(a, b);
        } else {
            err << "note: j1 is defined for step paths only\n";
        }
    } else {
        err << "note: j1 and strong m1 are reported for one-coordinate paths only\n";
    }
    const double wm1 = resolution ? weak_m1_distance(a, b, resolution) : weak_m1_distance(a, b);
    out << "uniform=" << fmt_double(uniform_distance(a, b)) << "\nj1=" << fmt_double(j1) << "\nm1=" << fmt_double(m1)
        << "\nweak_m1=" << fmt_double(wm1) << '\n';
    return kExitPass;
}

int cmd_limits(const Common& c, bool out_given, std::ostream& out) {
    ExperimentConfig cfg = load(c);
    echo_config(out, cfg);
    CharTriple tr = limit_triple(cfg);
    StableParams sp = stable_params(tr);
    out << "triple=" << to_record(tr) << '\n';
    out << "stable=" << to_record(sp) << '\n';
    out << "regime=" << tr.regime() << '\n';
    // Levy exponent at t = 1 against the stable characteristic function
    Json checks = Json::array();
    for (double z : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        std::complex<double> lv = std::exp(levy_exponent(z, tr));
        std::complex<double> cf = charfn_stable(z, sp);
        const double diff = std::abs(lv - cf);
        out << "charfn z=" << fmt_double(z) << " levy=" << fmt_double(lv.real()) << (lv.imag() < 0 ? "" : "+")
            << fmt_double(lv.imag()) << "i stable=" << fmt_double(cf.real()) << (cf.imag() < 0 ? "" : "+")
            << fmt_double(cf.imag()) << "i absdiff=" << fmt_double(diff) << '\n';
        checks.push_back(Json{{"z", z}, {"abs_diff", diff}});
    }
    if (out_given) {
        fs::path dir = prepare_dir(c.out);
        Json j;
        j["config"] = config_to_json(cfg);
        j["triple"] = to_record(tr);
        j["stable"] = to_record(sp);
        j["charfn_check"] = checks;
        write_text(dir / "limits.json", dump_json(j) + "\n");
        std::ostringstream os;
        write_joint_csv(os, sample_limit_pair(cfg, stream_seed(cfg.seed, "limits")));
        write_text(dir / "levy_pair.csv", os.str());
    }
    return kExitPass;
}

int cmd_converge(const Common& c, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load(c);
    echo_config(out, cfg);
    std::vector<ConvergenceReport> reps{run_fidi_convergence(cfg), run_selfnorm_convergence(cfg)};
    fs::path dir = prepare_dir(c.out);
    std::string lines;
    for (const auto& r : reps) {
        for (const auto& row : r.rows) lines += dump_json(row) + "\n";
    }
    write_text(dir / "report.jsonl", lines);
    out << verdict_table(reps);
    bool ok = true;
    for (const auto& r : reps) {
        for (const auto& v : r.verdicts) {
            if (!v.pass) {
                ok = false;
                err << "FAIL " << v.name << '\n';
            }
        }
    }
    return ok ? kExitPass : kExitVerdictFailure;
}

int cmd_suite(const Common& c, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load(c);
    echo_config(out, cfg);
    SuiteResult res = run_full_suite(cfg, c.out);
    out << verdict_table(res.reports);
    out << "bundle=" << c.out << '\n';
    for (const auto& f : res.failures) err << "FAIL " << f << '\n';
    return res.passed() ? kExitPass : kExitVerdictFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heavy-tailed partial sums: simulation, inference and limit checks", "snlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "snlab 1.0.0");

    Common sim_c, est_c, lim_c, conv_c, suite_c;
    std::size_t sim_n = 0, resolution = 0;
    std::string data, fa, fb;

    auto* sim = app.add_subcommand("simulate", "sample the model; write series.csv and ln.csv");
    add_common(sim, sim_c, "sim_out");
    sim->add_option("-n,--n", sim_n, "sample size (default: largest n_grid entry)");

    auto* est = app.add_subcommand("estimate", "tail estimates of a data file or a simulated sample");
    add_common(est, est_c, "estimate_out");
    est->add_option("--data", data, "CSV data file");

    auto* m1 = app.add_subcommand("m1dist", "uniform, J1, M1 and weak M1 distances of two path files");
    m1->add_option("a", fa, "first path CSV")->required();
    m1->add_option("b", fb, "second path CSV")->required();
    m1->add_option("--resolution", resolution, "M1 resolution (default: max(1024, minimum))");

    auto* lim = app.add_subcommand("limits", "characteristic triple and stable parameters of the limit");
    add_common(lim, lim_c, "limits_out");

    auto* conv = app.add_subcommand("converge", "finite-dimensional and self-normalized convergence checks");
    add_common(conv, conv_c, "converge_out");

    auto* suite = app.add_subcommand("suite", "run every check and write the report bundle");
    add_common(suite, suite_c, "bundle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForVersion&) {
        out << "snlab 1.0.0\n";
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << "run 'snlab --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_c, sim_n, out);
        if (est->parsed()) return cmd_estimate(est_c, data, est->count("--out") > 0, out);
        if (m1->parsed()) return cmd_m1dist(fa, fb, resolution, out, err);
        if (lim->parsed()) return cmd_limits(lim_c, lim->count("--out") > 0, out);
        if (conv->parsed()) return cmd_converge(conv_c, out, err);
        if (suite->parsed()) return cmd_suite(suite_c, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << " (residual " << fmt_double(e.residual()) << ")\n";
        return kExitVerdictFailure;
    }
    return kExitUsage;
}

}  // namespace snlab
