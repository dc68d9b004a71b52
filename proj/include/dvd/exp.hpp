#ifndef DVD_EXP_HPP
#define DVD_EXP_HPP

#include <memory>
#include <string>
#include <vector>

#include "dvd/es.hpp"

namespace dvd {

/// Everything a reproducible experiment needs: the optimizer settings,
/// the environment binding and the sweep plumbing.
struct RunConfig {
    EsConfig es;
    std::string env = "point"; // tabular | point | multimodal
    int hidden = 16;           // MLP width for the point environments
    std::string out_dir = "runs";
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

/// Flat key=value text with dotted section prefixes (es., kernel.,
/// embedding., env.). parse_config(render_config(c)) == c.
RunConfig parse_config(const std::string& text);
std::string render_config(const RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

/// "0..9", "3" or "0,2,5".
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

/// Throws with the list of valid names on an unknown environment.
std::unique_ptr<Task> make_task(const RunConfig& cfg);

/// One JSONL log line: iter, rewards[], best, lambda, div, signal, wall_s.
std::string jsonl_line(const IterationRecord& rec);
IterationRecord parse_jsonl_line(const std::string& line);
std::vector<IterationRecord> read_jsonl(const std::string& path);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q); // linear interpolation

struct SummaryReport {
    std::vector<long long> iterations;
    std::vector<double> median_best;
    std::vector<double> q25_best;
    std::vector<double> q75_best;
    std::vector<std::string> seed_labels;
    std::vector<double> final_best;                // per seed
    std::vector<std::vector<double>> lambda_series; // per seed
};

SummaryReport summarize(const std::vector<std::vector<IterationRecord>>& runs,
                        const std::vector<std::string>& labels);

std::string summary_csv(const SummaryReport& report);
std::string plot_data_json(const SummaryReport& report);

// CLI entry points; argv excludes the subcommand name. Exit codes:
// 0 success, 1 runtime failure, 2 bad configuration or flags.
int cli_run(const std::vector<std::string>& args);
int cli_sweep(const std::vector<std::string>& args);
int cli_oracle(const std::vector<std::string>& args);
int cli_report(const std::vector<std::string>& args);

} // namespace dvd

#endif
