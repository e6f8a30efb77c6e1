#include "doctest.h"

#include "oracles/oracles.hpp"
#include "support/fixtures.hpp"

#include "twinspace/cluster/distance.hpp"
#include "twinspace/error.hpp"
#include "twinspace/nldr/mds.hpp"
#include "twinspace/nldr/registry.hpp"
#include "twinspace/nldr/tsne.hpp"

#include <cmath>
#include <numeric>

using namespace twinspace;
using namespace twinspace::nldr;
using cluster::DistanceMatrix;
using cluster::Metric;
using cluster::pairwise_distances;

namespace {

Matrix two_blobs(std::mt19937_64& rng, double gap)
{
    Matrix x = fixtures::gaussian(10, 4, rng, 0.5);
    for (int i = 5; i < 10; ++i) x(i, 0) += gap;
    return x;
}

double max_pair_error(const Matrix& a, const Matrix& b)
{
    double err = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.rows(); ++j) {
            err = std::max(err, std::abs((a.row(i) - a.row(j)).norm() - (b.row(i) - b.row(j)).norm()));
        }
    }
    return err;
}

} // namespace

TEST_SUITE("nldr") {

TEST_CASE("perplexity calibration")
{
    const auto two = perplexity_calibration({3.0, 3.0}, 2.0);
    CHECK(two.probabilities[0] == doctest::Approx(0.5));
    CHECK(two.probabilities[1] == doctest::Approx(0.5));
    const auto five = perplexity_calibration({2, 2, 2, 2, 2}, 5.0);
    for (double p : five.probabilities) CHECK(p == doctest::Approx(0.2));

    const auto near = perplexity_calibration({1.0, 10.0}, 1.2);
    CHECK(near.probabilities[0] > 0.9);
    CHECK(std::abs(near.entropy - std::log2(1.2)) < 1e-5);
    const auto ref = oracle::calibrate({1.0, 10.0}, 1.2);
    CHECK(near.probabilities[0] == doctest::Approx(ref.p[0]).epsilon(1e-5));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> d(20);
        for (double& v : d) v = u(rng);
        const double perp = 2.0 + rep % 15;
        const auto c = perplexity_calibration(d, perp);
        CHECK(std::abs(std::exp2(c.entropy) - perp) / perp < 1e-4);
        CHECK(std::accumulate(c.probabilities.begin(), c.probabilities.end(), 0.0) == doctest::Approx(1.0));
        const auto o = oracle::calibrate(d, perp);
        for (std::size_t j = 0; j < d.size(); ++j) CHECK(std::abs(c.probabilities[j] - o.p[j]) < 1e-4);
    }
    CHECK_THROWS_AS(perplexity_calibration({1, 2}, 0.5), Error);
    CHECK_THROWS_AS(perplexity_calibration({1, 2}, 3.0), Error);
}

TEST_CASE("joint probabilities are normalized")
{
    std::mt19937_64 rng(4);
    const auto d = pairwise_distances(fixtures::gaussian(25, 3, rng), Metric::euclidean);
    const Matrix p = joint_probabilities(d, 5.0);
    CHECK(std::abs(p.sum() - 1.0) < 1e-10);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(p.diagonal().isZero(0.0));
}

TEST_CASE("t-SNE separates blobs and is deterministic")
{
    std::mt19937_64 rng(8);
    const auto d = pairwise_distances(two_blobs(rng, 20.0), Metric::euclidean);
    TsneOptions opts;
    opts.seed = 4;
    const auto a = tsne(d, opts);
    const auto b = tsne(d, opts);
    CHECK(a.coords == b.coords);
    CHECK(a.coords.rows() == 10);
    CHECK(a.params.at("perplexity") == doctest::Approx(3.0));
    const Eigen::RowVector2d c1 = a.coords.topRows(5).colwise().mean();
    const Eigen::RowVector2d c2 = a.coords.bottomRows(5).colwise().mean();
    double spread = 0;
    for (int i = 0; i < 10; ++i) spread = std::max(spread, (a.coords.row(i) - (i < 5 ? c1 : c2)).norm());
    CHECK((c1 - c2).norm() > 3 * spread);

    CHECK_THROWS_AS(tsne(pairwise_distances(fixtures::gaussian(3, 2, rng), Metric::euclidean)), Error);
}

TEST_CASE("t-SNE KL does not increase after exaggeration")
{
    std::mt19937_64 rng(12);
    const auto d = pairwise_distances(fixtures::gaussian(30, 5, rng), Metric::euclidean);
    TsneOptions opts;
    opts.seed = 2;
    const Matrix p = joint_probabilities(d, effective_perplexity(opts, 30));
    std::map<int, double> kl;
    tsne(d, opts, nullptr, nullptr, [&](int it, const Matrix& y) {
        if (it == 250 || it == 1000) kl[it] = kl_divergence(p, y);
    });
    REQUIRE(kl.size() == 2);
    CHECK(kl[1000] <= kl[250]);
}

TEST_CASE("t-SNE is permutation equivariant with id-seeded initialization")
{
    std::mt19937_64 rng(13);
    const Matrix x = fixtures::gaussian(12, 3, rng);
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix y(12, 3);
    std::vector<std::uint64_t> ids(12), pids(12);
    for (int i = 0; i < 12; ++i) {
        y.row(i) = x.row(perm[i]);
        ids[i] = i + 1;
        pids[i] = perm[i] + 1;
    }
    TsneOptions opts;
    opts.seed = 9;
    const auto a = tsne(pairwise_distances(x, Metric::euclidean), opts, &ids);
    const auto b = tsne(pairwise_distances(y, Metric::euclidean), opts, &pids);
    for (int i = 0; i < 12; ++i) CHECK((b.coords.row(i) - a.coords.row(perm[i])).norm() < 1e-6);
}

TEST_CASE("t-SNE cancellation")
{
    std::mt19937_64 rng(1);
    const auto d = pairwise_distances(fixtures::gaussian(10, 2, rng), Metric::euclidean);
    JobControl ctl;
    ctl.cancel = true;
    CHECK_THROWS_AS(tsne(d, {}, nullptr, &ctl), Cancelled);
}

TEST_CASE("classical MDS")
{
    Matrix tri(3, 2);
    tri << 0, 0, 1, 0, 0, 1;
    const auto e = classical_mds(pairwise_distances(tri, Metric::euclidean));
    CHECK(max_pair_error(e.coords, tri) < 1e-9);
    CHECK_FALSE(e.degenerate);

    const auto same = classical_mds(DistanceMatrix(Matrix::Zero(4, 4), "euclidean"));
    CHECK(same.coords.isZero(0.0));
    CHECK(same.degenerate);

    Matrix ln(5, 1);
    ln << 0, 1, 3, 4, 9;
    const auto l = classical_mds(pairwise_distances(ln, Metric::euclidean));
    CHECK(l.coords.col(1).cwiseAbs().maxCoeff() < 1e-8);

    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix pts = fixtures::gaussian(8 + rep, 2, rng, 5.0);
        const auto m = classical_mds(pairwise_distances(pts, Metric::euclidean));
        CHECK(max_pair_error(m.coords, pts) < 1e-8);
    }
    CHECK_THROWS_AS(classical_mds(DistanceMatrix(Matrix::Zero(2, 2), "x")), Error);
}

TEST_CASE("registry")
{
    NldrRegistry reg;
    CHECK(reg.contains("tsne"));
    CHECK(reg.contains("mds"));
    std::mt19937_64 rng(2);
    const Matrix x = fixtures::gaussian(8, 3, rng);
    const auto d = pairwise_distances(x, Metric::euclidean);
    CHECK(reg.run("mds", x, d).method_id == "mds");
    CHECK(reg.run("tsne", x, d, 3).method_id == "tsne");
    CHECK_THROWS_WITH_AS(reg.run("nope", x, d), doctest::Contains("mds"), NotFound);

    reg.add("lle", [](const Matrix& coords, const DistanceMatrix&, std::uint64_t seed, JobControl*) {
        Embedding e;
        e.method_id = "lle";
        e.coords = coords.leftCols(2);
        e.seed = seed;
        return e;
    });
    const auto plug = reg.run("lle", x, d, 5);
    CHECK(plug.coords == x.leftCols(2));
    CHECK(plug.seed == 5);

    reg.add("broken", [](const Matrix& coords, const DistanceMatrix&, std::uint64_t, JobControl*) {
        Embedding e;
        e.coords = coords;
        return e;
    });
    CHECK_THROWS_AS(reg.run("broken", x, d), Error);
    reg.add("nan", [](const Matrix& coords, const DistanceMatrix&, std::uint64_t, JobControl*) {
        Embedding e;
        e.coords = Matrix::Constant(coords.rows(), 2, NAN);
        return e;
    });
    CHECK_THROWS_AS(reg.run("nan", x, d), Error);

    const auto doc = to_json(reg.run("mds", x, d));
    const auto back = embedding_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.method_id == "mds");
    CHECK(back.coords.rows() == 8);
}

} // TEST_SUITE
