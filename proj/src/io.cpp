#include "sausage/io.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sausage {

using nlohmann::json;

void write_mc_jsonl(std::ostream& out, const McRecord& r) {
    json j = {{"family", r.family},
              {"k", r.k},
              {"m", r.m},
              {"t", r.t},
              {"mean", r.estimate.mean},
              {"stderr", r.estimate.stderr},
              {"replicas", r.estimate.replicas},
              {"steps", r.estimate.steps},
              {"seed", r.estimate.seed},
              {"mode", to_string(r.mode)}};
    out << j.dump() << '\n';
}

std::vector<McRecord> read_mc_jsonl(std::istream& in) {
    std::vector<McRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            McRecord r;
            r.family = j.at("family").get<std::string>();
            r.k = j.at("k").get<int>();
            r.m = j.at("m").get<int>();
            r.t = j.at("t").get<double>();
            r.estimate.mean = j.at("mean").get<double>();
            r.estimate.stderr = j.at("stderr").get<double>();
            r.estimate.replicas = j.at("replicas").get<int>();
            r.estimate.steps = j.at("steps").get<int>();
            r.estimate.seed = j.at("seed").get<std::uint64_t>();
            r.mode = parse_bias_mode(j.at("mode").get<std::string>());
            out.push_back(r);
        } catch (const json::exception& e) {
            throw std::invalid_argument("JSON lines input, line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_samples_csv(std::ostream& out, std::span<const Sample> samples) {
    out << "t,value,error\n" << std::setprecision(17);
    for (const auto& s : samples) out << s.t << ',' << s.v << ',' << s.sigma << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
}

}  // namespace

std::vector<Sample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("CSV input is empty");
    const auto header = split_csv(line);
    int t_col = -1, v_col = -1, s_col = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        if (header[i] == "t") t_col = i;
        if (header[i] == "value" || header[i] == "mean") v_col = i;
        if (header[i] == "sigma" || header[i] == "stderr" || header[i] == "error") s_col = i;
    }
    if (t_col < 0 || v_col < 0) throw std::invalid_argument("CSV header needs a t column and a value or mean column");

    std::vector<Sample> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        const int needed = std::max({t_col, v_col, s_col}) + 1;
        if (static_cast<int>(cells.size()) < needed) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": too few columns");
        }
        try {
            Sample s;
            s.t = std::stod(cells[t_col]);
            s.v = std::stod(cells[v_col]);
            if (s_col >= 0) s.sigma = std::stod(cells[s_col]);
            out.push_back(s);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": not a number");
        }
    }
    return out;
}

std::vector<Sample> samples_from_mc(std::span<const McRecord> records) {
    std::vector<Sample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.t, r.estimate.mean, r.estimate.stderr});
    return out;
}

std::vector<Sample> read_samples(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    std::istringstream again(text);
    if (first != std::string::npos && text[first] == '{') {
        const auto records = read_mc_jsonl(again);
        return samples_from_mc(records);
    }
    return read_samples_csv(again);
}

std::vector<Sample> read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return read_samples(in);
}

}  // namespace sausage
