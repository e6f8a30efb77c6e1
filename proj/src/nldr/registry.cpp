#include "twinspace/nldr/registry.hpp"

#include "twinspace/error.hpp"
#include "twinspace/nldr/mds.hpp"
#include "twinspace/nldr/tsne.hpp"

namespace twinspace::nldr {

NldrRegistry::NldrRegistry()
{
    methods_["tsne"] = [](const Matrix&, const cluster::DistanceMatrix& d, std::uint64_t seed,
                          JobControl* ctl) {
        TsneOptions opts;
        opts.seed = seed;
        return tsne(d, opts, nullptr, ctl);
    };
    methods_["mds"] = [](const Matrix&, const cluster::DistanceMatrix& d, std::uint64_t seed,
                         JobControl*) {
        Embedding e = classical_mds(d);
        e.seed = seed;
        return e;
    };
}

void NldrRegistry::add(const std::string& name, Method method)
{
    if (name.empty()) throw Error("method name must not be empty");
    if (methods_.count(name)) throw Error("method '" + name + "' is already registered");
    methods_.emplace(name, std::move(method));
}

bool NldrRegistry::contains(const std::string& name) const
{
    return methods_.count(name) > 0;
}

std::vector<std::string> NldrRegistry::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, fn] : methods_) out.push_back(name);
    return out;
}

Embedding NldrRegistry::run(const std::string& name, const Matrix& coords,
                            const cluster::DistanceMatrix& d, std::uint64_t seed,
                            JobControl* ctl) const
{
    const auto it = methods_.find(name);
    if (it == methods_.end()) {
        std::string known;
        for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
        throw NotFound("unknown embedding method '" + name + "' (registered: " + known + ")");
    }
    Embedding e = it->second(coords, d, seed, ctl);
    if (e.coords.rows() != d.n() || e.coords.cols() != 2) {
        throw Error("method '" + name + "' returned a " + std::to_string(e.coords.rows()) + " x " +
                    std::to_string(e.coords.cols()) + " layout, expected " +
                    std::to_string(d.n()) + " x 2");
    }
    if (!e.coords.allFinite()) throw Error("method '" + name + "' returned non-finite coordinates");
    if (e.method_id.empty()) e.method_id = name;
    return e;
}

} // namespace twinspace::nldr
