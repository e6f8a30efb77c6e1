#include "twinspace/cluster/distance.hpp"

#include "twinspace/error.hpp"

#include <cmath>
#include <sstream>

namespace twinspace::cluster {

const char* to_string(Metric m)
{
    switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::maximum: return "maximum";
    }
    return "?";
}

Metric metric_from_string(const std::string& s)
{
    if (s == "euclidean") return Metric::euclidean;
    if (s == "manhattan") return Metric::manhattan;
    if (s == "maximum") return Metric::maximum;
    throw Error("unknown distance metric '" + s + "'");
}

DistanceMatrix::DistanceMatrix(Matrix d, std::string metric_id)
    : d_(std::move(d)), metric_id_(std::move(metric_id))
{
    if (d_.rows() != d_.cols()) throw Error("distance matrix must be square");
    if (!d_.allFinite()) throw Error("distance matrix contains non-finite values");
    for (Eigen::Index a = 0; a < d_.rows(); ++a) {
        if (std::abs(d_(a, a)) > 1e-12) {
            throw Error("distance matrix diagonal is not zero at row " + std::to_string(a + 1));
        }
        d_(a, a) = 0.0;
        for (Eigen::Index b = a + 1; b < d_.cols(); ++b) {
            if (std::abs(d_(a, b) - d_(b, a)) > 1e-9) {
                throw Error("distance matrix is not symmetric at (" + std::to_string(a + 1) + "," +
                            std::to_string(b + 1) + ")");
            }
            const double v = 0.5 * (d_(a, b) + d_(b, a));
            if (v < 0.0) throw Error("distance matrix has negative entries");
            d_(a, b) = d_(b, a) = v;
        }
    }
}

DistanceMatrix pairwise_distances(const Matrix& coords, Metric metric)
{
    if (coords.rows() < 2) throw Error("at least two observations are required");
    if (!coords.allFinite()) throw Error("coordinates contain non-finite values");
    const auto n = coords.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const auto diff = (coords.row(a) - coords.row(b)).array().abs();
            double v = 0.0;
            switch (metric) {
            case Metric::euclidean: v = std::sqrt(diff.square().sum()); break;
            case Metric::manhattan: v = diff.sum(); break;
            case Metric::maximum: v = diff.maxCoeff(); break;
            }
            d(a, b) = d(b, a) = v;
        }
    }
    return DistanceMatrix(std::move(d), to_string(metric));
}

DistanceMatrix parse_distance_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ParseError("row " + std::to_string(rows.size() + 1) +
                                     " contains a non-numeric distance",
                                 rows.size() + 1);
            }
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) {
            throw ParseError("row " + std::to_string(i + 1) + " has " +
                                 std::to_string(rows[i].size()) + " fields, expected " +
                                 std::to_string(n),
                             static_cast<std::size_t>(i + 1));
        }
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = rows[i][j];
    }
    return DistanceMatrix(std::move(d), "precomputed");
}

} // namespace twinspace::cluster
