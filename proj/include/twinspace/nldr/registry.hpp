#pragma once

#include "twinspace/cluster/distance.hpp"
#include "twinspace/nldr/embedding.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace twinspace::nldr {

// A method receives the coordinate matrix and the matching distance matrix.
using Method = std::function<Embedding(const Matrix& coords, const cluster::DistanceMatrix& d,
                                       std::uint64_t seed, JobControl* ctl)>;

class NldrRegistry {
public:
    // Starts with the built-ins "tsne" and "mds".
    NldrRegistry();

    void add(const std::string& name, Method method);
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

    // Dispatches and checks that the result is a finite n x 2 layout.
    Embedding run(const std::string& name, const Matrix& coords, const cluster::DistanceMatrix& d,
                  std::uint64_t seed = 0, JobControl* ctl = nullptr) const;

private:
    std::map<std::string, Method> methods_;
};

} // namespace twinspace::nldr
