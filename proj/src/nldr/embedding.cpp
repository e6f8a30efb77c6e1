#include "twinspace/nldr/embedding.hpp"

#include "twinspace/error.hpp"

namespace twinspace::nldr {

nlohmann::json to_json(const Embedding& e)
{
    nlohmann::json j;
    j["method"] = e.method_id;
    j["params"] = e.params;
    j["seed"] = e.seed;
    j["degenerate"] = e.degenerate;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.coords.rows(); ++i) {
        rows.push_back({e.coords(i, 0), e.coords(i, 1)});
    }
    j["coords"] = std::move(rows);
    return j;
}

Embedding embedding_from_json(const nlohmann::json& j)
{
    Embedding e;
    e.method_id = j.at("method").get<std::string>();
    e.params = j.value("params", std::map<std::string, double>{});
    e.seed = j.value("seed", std::uint64_t{0});
    e.degenerate = j.value("degenerate", false);
    const auto& rows = j.at("coords");
    e.coords.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw Error("embedding rows must have two coordinates");
        e.coords(static_cast<Eigen::Index>(i), 0) = rows[i][0].get<double>();
        e.coords(static_cast<Eigen::Index>(i), 1) = rows[i][1].get<double>();
    }
    return e;
}

} // namespace twinspace::nldr
