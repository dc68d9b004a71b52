#include "dvd/exp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "dvd/diversity.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace dvd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

long long parse_int(const std::string& s) {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("bad boolean '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
}

} // namespace

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split(spec, ',')) {
        const auto dots = part.find("..");
        if (dots != std::string::npos) {
            const auto lo = static_cast<std::uint64_t>(parse_int(part.substr(0, dots)));
            const auto hi = static_cast<std::uint64_t>(parse_int(part.substr(dots + 2)));
            if (hi < lo) throw std::invalid_argument("bad seed range '" + part + "'");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else {
            seeds.push_back(static_cast<std::uint64_t>(parse_int(part)));
        }
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed spec");
    return seeds;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    while (std::getline(ss, raw)) {
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad config line '" + raw + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "env") cfg.env = value;
        else if (key == "out") cfg.out_dir = value;
        else if (key == "seeds") cfg.seeds = parse_seed_spec(value);
        else if (key == "env.hidden") cfg.hidden = static_cast<int>(parse_int(value));
        else if (key == "es.sigma") cfg.es.sigma = parse_double(value);
        else if (key == "es.eta") cfg.es.eta = parse_double(value);
        else if (key == "es.sensings") cfg.es.sensings = static_cast<int>(parse_int(value));
        else if (key == "es.population") cfg.es.population = static_cast<int>(parse_int(value));
        else if (key == "es.iterations") cfg.es.iterations = parse_int(value);
        else if (key == "es.algo") cfg.es.algo = parse_algo(value);
        else if (key == "es.fixed_lambda") {
            if (value == "none") cfg.es.fixed_lambda.reset();
            else cfg.es.fixed_lambda = parse_double(value);
        }
        else if (key == "es.seed") cfg.es.seed = static_cast<std::uint64_t>(parse_int(value));
        else if (key == "es.mirrored") cfg.es.mirrored = parse_bool(value);
        else if (key == "kernel.kind") cfg.es.kernel.kind = parse_kernel(value);
        else if (key == "kernel.length_scale") cfg.es.kernel.length_scale = parse_double(value);
        else if (key == "kernel.rq_alpha") cfg.es.kernel.rq_alpha = parse_double(value);
        else if (key == "embedding.n_states")
            cfg.es.embedding.n_states = static_cast<int>(parse_int(value));
        else if (key == "embedding.strategy") cfg.es.embedding.strategy = parse_strategy(value);
        else if (key == "embedding.update_every")
            cfg.es.embedding.update_every = static_cast<int>(parse_int(value));
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
    return cfg;
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "env = " << cfg.env << "\n";
    out << "out = " << cfg.out_dir << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        out << (i ? "," : "") << cfg.seeds[i];
    out << "\n";
    out << "env.hidden = " << cfg.hidden << "\n";
    out << "es.algo = " << algo_name(cfg.es.algo) << "\n";
    out << "es.sigma = " << fmt_double(cfg.es.sigma) << "\n";
    out << "es.eta = " << fmt_double(cfg.es.eta) << "\n";
    out << "es.sensings = " << cfg.es.sensings << "\n";
    out << "es.population = " << cfg.es.population << "\n";
    out << "es.iterations = " << cfg.es.iterations << "\n";
    out << "es.fixed_lambda = "
        << (cfg.es.fixed_lambda ? fmt_double(*cfg.es.fixed_lambda) : std::string("none")) << "\n";
    out << "es.seed = " << cfg.es.seed << "\n";
    out << "es.mirrored = " << (cfg.es.mirrored ? "true" : "false") << "\n";
    out << "kernel.kind = " << kernel_name(cfg.es.kernel.kind) << "\n";
    out << "kernel.length_scale = " << fmt_double(cfg.es.kernel.length_scale) << "\n";
    out << "kernel.rq_alpha = " << fmt_double(cfg.es.kernel.rq_alpha) << "\n";
    out << "embedding.n_states = " << cfg.es.embedding.n_states << "\n";
    out << "embedding.strategy = " << strategy_name(cfg.es.embedding.strategy) << "\n";
    out << "embedding.update_every = " << cfg.es.embedding.update_every << "\n";
    return out.str();
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::unique_ptr<Task> make_task(const RunConfig& cfg) {
    if (cfg.env == "tabular") return std::make_unique<TabularTask>();
    if (cfg.env == "point") return std::make_unique<PointTask>(PointWallConfig{}, cfg.hidden);
    if (cfg.env == "multimodal")
        return std::make_unique<MultiModalPointTask>(MultiModalPointConfig{}, cfg.hidden);
    throw std::invalid_argument("unknown env '" + cfg.env +
                                "' (valid: tabular, point, multimodal)");
}

std::string jsonl_line(const IterationRecord& rec) {
    ordered_json j;
    j["iter"] = rec.iteration;
    j["rewards"] = rec.per_agent_mean_reward;
    j["best"] = rec.best_reward;
    j["lambda"] = rec.lambda_used;
    j["div"] = rec.diversity;
    if (rec.bandit_signal) j["signal"] = *rec.bandit_signal;
    else j["signal"] = nullptr;
    j["wall_s"] = rec.wall_seconds;
    return j.dump();
}

IterationRecord parse_jsonl_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    IterationRecord rec;
    rec.iteration = j.at("iter").get<long long>();
    rec.per_agent_mean_reward = j.at("rewards").get<std::vector<double>>();
    rec.best_reward = j.at("best").get<double>();
    rec.lambda_used = j.at("lambda").get<double>();
    rec.diversity = j.at("div").get<double>();
    if (!j.at("signal").is_null()) rec.bandit_signal = j.at("signal").get<int>();
    rec.wall_seconds = j.at("wall_s").get<double>();
    return rec;
}

std::vector<IterationRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read '" + path + "'");
    std::vector<IterationRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        records.push_back(parse_jsonl_line(line));
    }
    return records;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty set");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level out of range");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

SummaryReport summarize(const std::vector<std::vector<IterationRecord>>& runs,
                        const std::vector<std::string>& labels) {
    if (runs.empty()) throw std::invalid_argument("summarize: no runs");
    if (labels.size() != runs.size()) throw std::invalid_argument("summarize: label mismatch");
    std::size_t length = runs.front().size();
    for (const auto& r : runs) length = std::min(length, r.size());

    SummaryReport report;
    report.seed_labels = labels;
    for (std::size_t t = 0; t < length; ++t) {
        std::vector<double> best;
        best.reserve(runs.size());
        for (const auto& r : runs) best.push_back(r[t].best_reward);
        report.iterations.push_back(runs.front()[t].iteration);
        report.median_best.push_back(median(best));
        report.q25_best.push_back(quantile(best, 0.25));
        report.q75_best.push_back(quantile(best, 0.75));
    }
    for (const auto& r : runs) {
        report.final_best.push_back(r.empty() ? 0.0 : r.back().best_reward);
        std::vector<double> lambdas;
        lambdas.reserve(r.size());
        for (const auto& rec : r) lambdas.push_back(rec.lambda_used);
        report.lambda_series.push_back(std::move(lambdas));
    }
    return report;
}

std::string summary_csv(const SummaryReport& report) {
    std::ostringstream out;
    out << "iter,median_best,q25_best,q75_best\n";
    for (std::size_t t = 0; t < report.iterations.size(); ++t)
        out << report.iterations[t] << "," << fmt_double(report.median_best[t]) << ","
            << fmt_double(report.q25_best[t]) << "," << fmt_double(report.q75_best[t]) << "\n";
    return out.str();
}

std::string plot_data_json(const SummaryReport& report) {
    ordered_json j;
    j["iteration"] = report.iterations;
    j["median"] = report.median_best;
    j["q25"] = report.q25_best;
    j["q75"] = report.q75_best;
    ordered_json finals = ordered_json::object();
    ordered_json lambdas = ordered_json::object();
    for (std::size_t i = 0; i < report.seed_labels.size(); ++i) {
        finals[report.seed_labels[i]] = report.final_best[i];
        lambdas[report.seed_labels[i]] = report.lambda_series[i];
    }
    j["final_best"] = finals;
    j["lambda"] = lambdas;
    return j.dump(2) + "\n";
}

namespace {

struct CommonFlags {
    std::string config_path;
    std::string env;
    std::string algo;
    std::string seeds;
    std::string out;
    std::string fixed_lambda;
    std::string kernel;
    int n_states = -1;
    std::string strategy;
    long long iterations = -1;
    int population = -1;
    int sensings = -1;
    double sigma = -1.0;
    double eta = -1.0;
    double length_scale = -1.0;
    int update_every = -1;
    int hidden = -1;
};

void add_common_flags(CLI::App& app, CommonFlags& f) {
    app.add_option("--config", f.config_path, "config file (flags override it)");
    app.add_option("--env", f.env, "tabular | point | multimodal");
    app.add_option("--algo", f.algo, "vanilla | nsr | dvd");
    app.add_option("--seeds", f.seeds, "seed spec, e.g. 0..9 or 0,2,5");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--fixed-lambda", f.fixed_lambda, "fixed trade-off in [0,1], or 'none'");
    app.add_option("--kernel", f.kernel, "se | exponential | linear | rq | matern32 | matern52");
    app.add_option("--n-states", f.n_states, "anchor state count");
    app.add_option("--strategy", f.strategy, "random | maxvar | dpp");
    app.add_option("--iterations", f.iterations, "iteration count");
    app.add_option("--population", f.population, "population size M");
    app.add_option("--sensings", f.sensings, "sensings per agent k");
    app.add_option("--sigma", f.sigma, "perturbation scale");
    app.add_option("--eta", f.eta, "learning rate");
    app.add_option("--length-scale", f.length_scale, "kernel length scale");
    app.add_option("--update-every", f.update_every, "anchor refresh period");
    app.add_option("--hidden", f.hidden, "MLP hidden width");
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = load_config_file(f.config_path);
    if (!f.env.empty()) cfg.env = f.env;
    if (!f.algo.empty()) cfg.es.algo = parse_algo(f.algo);
    if (!f.seeds.empty()) cfg.seeds = parse_seed_spec(f.seeds);
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (!f.fixed_lambda.empty()) {
        if (f.fixed_lambda == "none") cfg.es.fixed_lambda.reset();
        else cfg.es.fixed_lambda = parse_double(f.fixed_lambda);
    }
    if (!f.kernel.empty()) cfg.es.kernel.kind = parse_kernel(f.kernel);
    if (f.n_states >= 0) cfg.es.embedding.n_states = f.n_states;
    if (!f.strategy.empty()) cfg.es.embedding.strategy = parse_strategy(f.strategy);
    if (f.iterations >= 0) cfg.es.iterations = f.iterations;
    if (f.population >= 0) cfg.es.population = f.population;
    if (f.sensings >= 0) cfg.es.sensings = f.sensings;
    if (f.sigma >= 0.0) cfg.es.sigma = f.sigma;
    if (f.eta >= 0.0) cfg.es.eta = f.eta;
    if (f.length_scale >= 0.0) cfg.es.kernel.length_scale = f.length_scale;
    if (f.update_every >= 0) cfg.es.embedding.update_every = f.update_every;
    if (f.hidden >= 0) cfg.hidden = f.hidden;
    cfg.es.validate();
    return cfg;
}

std::vector<const char*> to_argv(const std::string& name, const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back(name.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());
    return argv;
}

/// Executes every seed of one cell and writes its logs and summary.
/// Returns the per-seed record series.
std::vector<std::vector<IterationRecord>> run_cell(const RunConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    write_file(dir + "/config.ini", render_config(cfg));
    std::vector<std::vector<IterationRecord>> all;
    std::vector<std::string> labels;
    for (std::uint64_t seed : cfg.seeds) {
        RunConfig seeded = cfg;
        seeded.es.seed = seed;
        const auto task = make_task(seeded);
        const RunResult result = run(seeded.es, *task);
        std::ostringstream lines;
        for (const auto& rec : result.records) lines << jsonl_line(rec) << "\n";
        const std::string label = "seed_" + std::to_string(seed);
        write_file(dir + "/" + label + ".jsonl", lines.str());
        all.push_back(result.records);
        labels.push_back(label);
    }
    write_file(dir + "/summary.csv", summary_csv(summarize(all, labels)));
    return all;
}

int usage_error(const CLI::App& app, const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp") {
        std::cout << app.help();
        return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
}

} // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"execute one experiment across seeds"};
    CommonFlags flags;
    add_common_flags(app, flags);
    RunConfig cfg;
    try {
        auto argv = to_argv("run", args);
        app.parse(static_cast<int>(argv.size()), argv.data());
        cfg = build_config(flags);
        make_task(cfg); // env name check before any work
    } catch (const CLI::ParseError& e) {
        return usage_error(app, e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        run_cell(cfg, cfg.out_dir);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cli_sweep(const std::vector<std::string>& args) {
    CLI::App app{"cross-product sweep over one axis and the seed list"};
    CommonFlags flags;
    add_common_flags(app, flags);
    std::string axis = "kernel";
    std::string values_spec;
    app.add_option("--axis", axis, "kernel | n_states | strategy | fixed_lambda");
    app.add_option("--values", values_spec, "comma-separated axis values (defaults per axis)");

    RunConfig cfg;
    std::vector<std::string> values;
    try {
        auto argv = to_argv("sweep", args);
        app.parse(static_cast<int>(argv.size()), argv.data());
        cfg = build_config(flags);
        make_task(cfg);
        if (!values_spec.empty()) values = split(values_spec, ',');
        else if (axis == "kernel")
            values = {"se", "exponential", "linear", "rq", "matern32", "matern52"};
        else if (axis == "n_states") values = {"5", "10", "20", "50"};
        else if (axis == "strategy") values = {"random", "maxvar", "dpp"};
        else if (axis == "fixed_lambda") values = {"none", "0.5"};
        else throw std::invalid_argument("unknown sweep axis '" + axis + "'");
        // validate every cell before running any
        for (const auto& v : values) {
            RunConfig cell = cfg;
            if (axis == "kernel") cell.es.kernel.kind = parse_kernel(v);
            else if (axis == "n_states")
                cell.es.embedding.n_states = static_cast<int>(parse_int(v));
            else if (axis == "strategy") cell.es.embedding.strategy = parse_strategy(v);
            else if (axis == "fixed_lambda") {
                if (v == "none") cell.es.fixed_lambda.reset();
                else cell.es.fixed_lambda = parse_double(v);
            }
            cell.es.validate();
        }
    } catch (const CLI::ParseError& e) {
        return usage_error(app, e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        fs::create_directories(cfg.out_dir);
        std::ostringstream comparison;
        comparison << "axis,value,median_final_best\n";
        for (const auto& v : values) {
            RunConfig cell = cfg;
            if (axis == "kernel") cell.es.kernel.kind = parse_kernel(v);
            else if (axis == "n_states")
                cell.es.embedding.n_states = static_cast<int>(parse_int(v));
            else if (axis == "strategy") cell.es.embedding.strategy = parse_strategy(v);
            else if (axis == "fixed_lambda") {
                if (v == "none") cell.es.fixed_lambda.reset();
                else cell.es.fixed_lambda = parse_double(v);
            }
            const std::string dir = cfg.out_dir + "/" + axis + "_" + v;
            const auto runs = run_cell(cell, dir);
            std::vector<double> finals;
            for (const auto& r : runs) finals.push_back(r.empty() ? 0.0 : r.back().best_reward);
            comparison << axis << "," << v << "," << fmt_double(median(finals)) << "\n";
        }
        write_file(cfg.out_dir + "/comparison.csv", comparison.str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace {

// The determinant-theory sweep behind the oracle verdict: the SE-kernel
// determinant of an epsilon-scaled population shrinks faster than the
// summed squared pairwise distances, and faster still for M=4 than M=3.
ordered_json first_order_verdict() {
    const KernelSpec spec; // SE, l=1
    Rng rng(20240601);
    std::vector<Eigen::VectorXd> u3, u4;
    for (int i = 0; i < 3; ++i) u3.push_back(rng.normal_vector(4));
    for (int i = 0; i < 4; ++i) u4.push_back(rng.normal_vector(4));

    const std::vector<double> epsilons = {1e-1, 1e-2, 1e-3};
    std::vector<double> det3, approx3, sum_sq3;
    for (double eps : epsilons) {
        std::vector<Eigen::VectorXd> e;
        for (const auto& u : u3) e.push_back(eps * u);
        GramMatrix g = gram(spec, e);
        det3.push_back(det(g));
        approx3.push_back(first_order_det_approx(e, 1.0));
        double s = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j) s += (e[i] - e[j]).squaredNorm();
        sum_sq3.push_back(s);
    }
    const double det_slope =
        (std::log(det3.front()) - std::log(det3.back())) /
        (std::log(epsilons.front()) - std::log(epsilons.back()));

    auto ratio_at = [&](const std::vector<Eigen::VectorXd>& base, double eps) {
        std::vector<Eigen::VectorXd> e;
        for (const auto& u : base) e.push_back(eps * u);
        GramMatrix g = gram(spec, e);
        double s = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = i + 1; j < e.size(); ++j) s += (e[i] - e[j]).squaredNorm();
        return det(g) / s;
    };
    const double ratio_m3 = ratio_at(u3, 1e-3);
    const double ratio_m4 = ratio_at(u4, 1e-3);
    const double m4_over_m3 = ratio_m4 / ratio_m3;

    ordered_json j;
    j["epsilons"] = epsilons;
    j["det_m3"] = det3;
    j["first_order_approx_m3"] = approx3;
    j["sum_sq_dist_m3"] = sum_sq3;
    j["det_slope_m3"] = det_slope;
    j["det_over_dist_m3"] = ratio_m3;
    j["det_over_dist_m4"] = ratio_m4;
    j["m4_over_m3_ratio"] = m4_over_m3;
    j["pass"] = det_slope > 3.7 && m4_over_m3 <= 1e-4;
    return j;
}

} // namespace

int cli_oracle(const std::vector<std::string>& args) {
    CLI::App app{"run the theory oracles and emit a JSON verdict"};
    std::string kernel = "se";
    std::string out_path;
    app.add_option("--kernel", kernel, "kernel for the tabular enumeration");
    app.add_option("--out", out_path, "write the verdict to a file instead of stdout");
    KernelSpec spec;
    try {
        auto argv = to_argv("oracle", args);
        app.parse(static_cast<int>(argv.size()), argv.data());
        spec.kind = parse_kernel(kernel);
        spec.validate();
    } catch (const CLI::ParseError& e) {
        return usage_error(app, e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        ordered_json verdict;

        const TabularOracleReport tab = enumerate_tabular(spec);
        ordered_json jt;
        jt["positive_count"] = tab.positive_count;
        jt["det_optimal"] = tab.det_optimal;
        jt["only_optimal_has_positive_det"] = tab.only_optimal_has_positive_det;
        jt["d_optimal"] = tab.d_optimal;
        jt["d_duplicate"] = tab.d_duplicate;
        jt["distance_prefers_duplicate"] = tab.distance_prefers_duplicate;
        jt["pass"] = tab.positive_count == 5 && tab.det_optimal > 0.0 &&
                     tab.only_optimal_has_positive_det && tab.distance_prefers_duplicate;
        verdict["tabular"] = jt;

        verdict["first_order"] = first_order_verdict();

        Rng rng(7);
        const DiversityReport demo = clustering_demo(3, 4, 10.0, 1e-3, rng);
        ordered_json jc;
        jc["determinant"] = demo.determinant;
        jc["mean_pairwise_distance"] = demo.mean_pairwise_distance;
        jc["min_novelty"] =
            *std::min_element(demo.per_agent_novelty.begin(), demo.per_agent_novelty.end());
        jc["pass"] = demo.determinant < 1e-6 && demo.mean_pairwise_distance > 1.0 &&
                     jc["min_novelty"].get<double>() > 1.0;
        verdict["clustering"] = jc;

        const bool all_pass = verdict["tabular"]["pass"].get<bool>() &&
                              verdict["first_order"]["pass"].get<bool>() &&
                              verdict["clustering"]["pass"].get<bool>();
        verdict["all_pass"] = all_pass;

        const std::string text = verdict.dump(2) + "\n";
        if (out_path.empty()) std::cout << text;
        else write_file(out_path, text);
        return all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cli_report(const std::vector<std::string>& args) {
    CLI::App app{"aggregate a directory of JSONL runs"};
    std::string dir;
    std::string out;
    app.add_option("dir", dir, "directory containing *.jsonl runs")->required();
    app.add_option("--out", out, "output directory (defaults to the input directory)");
    try {
        auto argv = to_argv("report", args);
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return usage_error(app, e);
    }
    if (out.empty()) out = dir;

    std::vector<std::string> files;
    try {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .jsonl files in '" << dir << "'\n";
        return 2;
    }

    try {
        std::vector<std::vector<IterationRecord>> runs;
        std::vector<std::string> labels;
        for (const auto& f : files) {
            runs.push_back(read_jsonl(f));
            labels.push_back(fs::path(f).stem().string());
        }
        const SummaryReport report = summarize(runs, labels);
        fs::create_directories(out);
        write_file(out + "/summary.csv", summary_csv(report));
        write_file(out + "/plot.json", plot_data_json(report));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace dvd
