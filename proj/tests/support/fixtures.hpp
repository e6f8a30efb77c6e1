#pragma once

#include "twinspace/common.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

inline std::string data_path(const std::string& name)
{
    return std::string(TWINSPACE_TEST_DATA) + "/" + name;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline twinspace::Matrix gaussian(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng, double sd = 1.0)
{
    std::normal_distribution<double> g(0.0, sd);
    twinspace::Matrix m(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) m(i, j) = g(rng);
    }
    return m;
}

// Small integers so that exact distance ties are common.
inline twinspace::Matrix integer_grid(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng, int range = 3)
{
    std::uniform_int_distribution<int> u(0, range);
    twinspace::Matrix m(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) m(i, j) = u(rng);
    }
    return m;
}

inline std::vector<int> random_labels(int n, int k, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> u(1, k);
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i < k ? i + 1 : u(rng);
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

} // namespace fixtures
