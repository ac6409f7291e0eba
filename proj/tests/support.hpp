// Shared helpers for the test suites. Everything here is test-only and
// independent of the solver paths it is used to check.
#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "taes/core.hpp"
#include "taes/rng.hpp"

namespace testutil {

// Gamma(shape) for integer shape, as a sum of unit exponentials.
inline double gamma_int(taes::RandomStream& rng, int shape) {
    double sum = 0.0;
    for (int i = 0; i < shape; ++i) sum += -std::log(1.0 - rng.uniform01());
    return sum;
}

inline std::vector<double> dirichlet(taes::RandomStream& rng, std::size_t k, int shape = 1) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) {
        x = gamma_int(rng, shape);
        sum += x;
    }
    for (auto& x : v) x /= sum;
    return v;
}

// Dirichlet draw floored away from zero, renormalized: strictly positive.
inline taes::Distribution random_strict_distribution(taes::RandomStream& rng, std::size_t k,
                                                     int shape = 2, double floor = 0.01) {
    std::vector<double> v = dirichlet(rng, k, shape);
    double sum = 0.0;
    for (auto& x : v) {
        x = std::max(x, floor);
        sum += x;
    }
    for (auto& x : v) x /= sum;
    return taes::Distribution(v);
}

// Experience model whose derived distribution equals `probs` exactly
// (counts proportional to probs, no smoothing).
inline taes::ExperienceModel model_from_probs(const taes::EmotionSpace& space,
                                              const std::string& id,
                                              const std::vector<double>& probs,
                                              double scale = 1000.0) {
    std::vector<double> counts(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) counts[i] = probs[i] * scale;
    return taes::ExperienceModel(space, id, 0.0, counts);
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("csv: no column named " + name);
    }

    double number(std::size_t row, const std::string& name) const {
        return std::stod(rows.at(row).at(col(name)));
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline Csv read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path.string());
    Csv csv;
    std::string line;
    if (std::getline(in, line)) csv.header = split_csv_line(line);
    while (std::getline(in, line))
        if (!line.empty()) csv.rows.push_back(split_csv_line(line));
    return csv;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline double tv(const std::vector<double>& a, const std::vector<double>& b) {
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return 0.5 * l1;
}

}  // namespace testutil
