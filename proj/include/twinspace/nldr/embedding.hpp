#pragma once

#include "twinspace/common.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace twinspace::nldr {

struct Embedding {
    std::string method_id;
    Matrix coords; // n x 2
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    bool degenerate = false;
};

nlohmann::json to_json(const Embedding& e);
Embedding embedding_from_json(const nlohmann::json& j);

} // namespace twinspace::nldr
