#pragma once

#include "sausage/montecarlo.hpp"
#include "sausage/series_fit.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sausage {

/// One Monte Carlo estimate with the parameters that produced it.
struct McRecord {
    std::string family;  // "Z" or "Q"
    int k = 1;
    int m = 2;
    double t = 0.0;
    MCEstimate estimate;
    BiasMode mode = BiasMode::bridge_corrected;
};

/// One JSON object per line: family, k, m, t, mean, stderr, replicas, steps, seed, mode.
void write_mc_jsonl(std::ostream& out, const McRecord& record);
std::vector<McRecord> read_mc_jsonl(std::istream& in);

/// CSV with header t,value,error.
void write_samples_csv(std::ostream& out, std::span<const Sample> samples);

/// Reads a CSV with a header naming a `t` column and a value column (`value`
/// or `mean`); an optional `sigma` or `stderr` column becomes σ. Other
/// columns are ignored.
std::vector<Sample> read_samples_csv(std::istream& in);

/// Samples from a Monte Carlo stream: v = mean, σ = stderr.
std::vector<Sample> samples_from_mc(std::span<const McRecord> records);

/// Reads either format, choosing JSON lines when the first non-blank
/// character is '{'.
std::vector<Sample> read_samples(std::istream& in);
std::vector<Sample> read_samples_file(const std::string& path);

}  // namespace sausage
