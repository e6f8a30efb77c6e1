#include "twinspace/cluster/hclust.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <tuple>
#include <unordered_map>

namespace twinspace::cluster {

const char* to_string(Linkage l)
{
    switch (l) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
    case Linkage::ward: return "ward.D2";
    }
    return "?";
}

Linkage linkage_from_string(const std::string& s)
{
    if (s == "single") return Linkage::single;
    if (s == "complete") return Linkage::complete;
    if (s == "average") return Linkage::average;
    if (s == "ward" || s == "ward.D2") return Linkage::ward;
    throw Error("unknown linkage '" + s + "'");
}

std::uint64_t MergeTree::hash() const
{
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(n));
    for (const auto& m : merges) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &m.height, sizeof bits);
        mix(static_cast<std::uint64_t>(m.left));
        mix(static_cast<std::uint64_t>(m.right));
        mix(bits);
    }
    return h;
}

std::vector<std::vector<int>> ClusterSolution::members() const
{
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < cluster_of.size(); ++i) {
        out[static_cast<std::size_t>(cluster_of[i] - 1)].push_back(static_cast<int>(i));
    }
    return out;
}

namespace {

// Candidate merge ordering: distance first, then the node-id pair.
struct PairKey {
    double dist;
    int lo;
    int hi;

    bool operator<(const PairKey& o) const
    {
        return std::tie(dist, lo, hi) < std::tie(o.dist, o.lo, o.hi);
    }
};

} // namespace

MergeTree hclust(const DistanceMatrix& d, Linkage linkage)
{
    const int n = static_cast<int>(d.n());
    if (n < 2) throw Error("hierarchical clustering needs at least two observations");

    // Working dissimilarities indexed by slot; ward keeps squared values.
    Matrix work = d.matrix();
    if (linkage == Linkage::ward) work = work.cwiseProduct(work);

    std::vector<int> node(n), size(n, 1), nn(n, -1);
    std::vector<char> active(n, 1);
    std::iota(node.begin(), node.end(), 1);

    auto key = [&](int s, int t) {
        return PairKey{work(s, t), std::min(node[s], node[t]), std::max(node[s], node[t])};
    };
    auto refresh = [&](int s) {
        nn[s] = -1;
        for (int t = 0; t < n; ++t) {
            if (t == s || !active[t]) continue;
            if (nn[s] < 0 || key(s, t) < key(s, nn[s])) nn[s] = t;
        }
    };
    for (int s = 0; s < n; ++s) refresh(s);

    MergeTree tree;
    tree.n = n;
    tree.linkage_id = to_string(linkage);
    tree.merges.reserve(static_cast<std::size_t>(n - 1));

    for (int step = 1; step < n; ++step) {
        int best = -1;
        for (int s = 0; s < n; ++s) {
            if (!active[s] || nn[s] < 0) continue;
            if (best < 0 || key(s, nn[s]) < key(best, nn[best])) best = s;
        }
        int a = best;
        int b = nn[best];
        if (b < a) std::swap(a, b);

        const double h = linkage == Linkage::ward ? std::sqrt(work(a, b)) : work(a, b);
        tree.merges.push_back({std::min(node[a], node[b]), std::max(node[a], node[b]), h});

        const double na = size[a];
        const double nb = size[b];
        for (int x = 0; x < n; ++x) {
            if (!active[x] || x == a || x == b) continue;
            double v = 0.0;
            switch (linkage) {
            case Linkage::single: v = std::min(work(x, a), work(x, b)); break;
            case Linkage::complete: v = std::max(work(x, a), work(x, b)); break;
            case Linkage::average: v = (na * work(x, a) + nb * work(x, b)) / (na + nb); break;
            case Linkage::ward: {
                const double nx = size[x];
                v = ((na + nx) * work(x, a) + (nb + nx) * work(x, b) - nx * work(a, b)) /
                    (na + nb + nx);
                break;
            }
            }
            work(x, a) = work(a, x) = v;
        }
        active[b] = 0;
        size[a] += size[b];
        node[a] = n + step;

        for (int x = 0; x < n; ++x) {
            if (!active[x] || x == a) continue;
            if (nn[x] == a || nn[x] == b) {
                refresh(x);
            } else if (key(x, a) < key(x, nn[x])) {
                nn[x] = a;
            }
        }
        refresh(a);
    }
    return tree;
}

ClusterSolution make_solution(const std::vector<int>& labels)
{
    ClusterSolution sol;
    std::unordered_map<int, int> relabel;
    sol.cluster_of.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = relabel.emplace(l, static_cast<int>(relabel.size()) + 1);
        sol.cluster_of.push_back(it->second);
    }
    sol.k = static_cast<int>(relabel.size());
    sol.settings.k = sol.k;
    return sol;
}

ClusterSolution cut_tree(const MergeTree& t, int k)
{
    if (k < 1 || k > t.n) {
        throw Error("number of clusters " + std::to_string(k) + " outside 1.." + std::to_string(t.n));
    }
    // Union-find over node ids; parent[id] for ids 1..2n-1.
    std::vector<int> parent(static_cast<std::size_t>(2 * t.n), 0);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int s = 0; s < t.n - k; ++s) {
        const auto& m = t.merges[static_cast<std::size_t>(s)];
        const int id = t.n + s + 1;
        parent[find(m.left)] = id;
        parent[find(m.right)] = id;
    }
    std::vector<int> labels(static_cast<std::size_t>(t.n));
    for (int i = 0; i < t.n; ++i) labels[i] = find(i + 1);
    ClusterSolution sol = make_solution(labels);
    sol.settings.linkage_id = t.linkage_id;
    return sol;
}

std::vector<int> dendrogram_order(const MergeTree& t)
{
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(t.n));
    if (t.n == 1) return {1};
    std::vector<int> stack{2 * t.n - 1};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (id <= t.n) {
            order.push_back(id);
            continue;
        }
        const auto& m = t.merges[static_cast<std::size_t>(id - t.n - 1)];
        stack.push_back(m.right);
        stack.push_back(m.left);
    }
    return order;
}

} // namespace twinspace::cluster
