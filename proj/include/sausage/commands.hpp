#pragma once

#include "sausage/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sausage::cli {

enum ExitCode : int { ok = 0, numerical_failure = 2, usage_error = 3, partial_failure = 4 };

/// Every parameter any command reads. Run records embed the whole struct.
struct RunConfig {
    std::string command;
    std::string experiment;
    std::string family = "c";
    std::string k_range = "1..6";
    std::string j_range;  // empty: 1..4 for alpha, 0..2 otherwise
    int k = 1;
    int m = 0;  // 0: the experiment's natural dimension
    std::string body;  // empty: the experiment's natural body
    std::string orientation = "inward";
    std::string normalization = "both";
    std::string t_values;  // "lo:hi:n" geometric grid or comma list
    int j_max = 4;
    int k_max = 8;
    double eps = 0.45;
    double tol = 1e-13;
    double mismatch_tol = 1e-9;
    int replicas = 512;
    int points = 2048;
    int steps = 512;
    std::uint64_t seed = 1;
    std::string mode = "bridge_corrected";
    bool stratified = false;
    int threads = 1;
    double time_budget = 0.0;
    int curve_points = 256;
    std::string input;
    std::string output;  // empty: stdout
    std::string out_dir = ".";
    std::string format = "csv";
};

nlohmann::json to_json(const RunConfig& cfg);
/// `key = value` lines that reproduce the run when passed back via --config.
std::string to_config_file(const RunConfig& cfg);

/// "a..b" or a single integer.
std::pair<int, int> parse_int_range(const std::string& text);
/// "lo:hi:n" for a geometric grid or a comma-separated list.
std::vector<double> parse_t_values(const std::string& text);

/// Row-wise coefficient table as CSV; unsupported (k, j, body) rows are
/// reported in place. The b family prints both normalizations.
int cmd_coeffs(const RunConfig& cfg, std::ostream& out);

/// Mismatch of the binomial transform between the flat weighted coefficients
/// and the pinned-sausage coefficients at order j, under both orientation
/// hypotheses.
nlohmann::json verify_1d_report(int j, int k_max, const CompactBody& body, double tol);
int cmd_verify_1d(const RunConfig& cfg, std::ostream& out);

/// q-exact, q-mc, z-mc or z-planar: data files plus <name>_summary.json in out_dir.
int cmd_experiment(const RunConfig& cfg, std::ostream& log);

/// CSV dump of Q_{k,3}(t) over a t grid.
int cmd_q_table(const RunConfig& cfg, std::ostream& out);

/// Half-power fit of a CSV or JSON-lines sample file.
int cmd_fit(const RunConfig& cfg, std::ostream& out);

/// Writes a planar body's boundary in the curve file format.
int cmd_export_curve(const RunConfig& cfg, std::ostream& out);

int run(int argc, char** argv);

}  // namespace sausage::cli
