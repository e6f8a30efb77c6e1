#include "doctest.h"

#include "oracles/oracles.hpp"
#include "support/fixtures.hpp"

#include "twinspace/cluster/distance.hpp"
#include "twinspace/cluster/hclust.hpp"
#include "twinspace/cluster/hull.hpp"
#include "twinspace/cluster/stats.hpp"
#include "twinspace/error.hpp"

#include <numeric>

using namespace twinspace;
using namespace twinspace::cluster;

namespace {

Matrix line(std::initializer_list<double> xs)
{
    Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return m;
}

oracle::Link to_oracle(Linkage l)
{
    switch (l) {
    case Linkage::single: return oracle::Link::single;
    case Linkage::complete: return oracle::Link::complete;
    case Linkage::average: return oracle::Link::average;
    case Linkage::ward: return oracle::Link::ward;
    }
    return oracle::Link::single;
}

const Linkage kAll[] = {Linkage::single, Linkage::complete, Linkage::average, Linkage::ward};

} // namespace

TEST_SUITE("cluster") {

TEST_CASE("metrics")
{
    Matrix pts(2, 2);
    pts << 0, 0, 3, 4;
    CHECK(pairwise_distances(pts, Metric::euclidean)(0, 1) == 5.0);
    CHECK(pairwise_distances(pts, Metric::manhattan)(0, 1) == 7.0);
    CHECK(pairwise_distances(pts, Metric::maximum)(0, 1) == 4.0);
    CHECK_THROWS_AS(pairwise_distances(line({1}), Metric::euclidean), Error);
    CHECK_THROWS_AS(pairwise_distances(line({1, NAN}), Metric::euclidean), Error);
    CHECK(metric_from_string("manhattan") == Metric::manhattan);
}

TEST_CASE("precomputed distance validation")
{
    const auto d = parse_distance_csv("0,1,2\n1,0,3\n2,3,0\n");
    CHECK(d.n() == 3);
    CHECK(d(2, 1) == 3.0);
    CHECK_THROWS_AS(parse_distance_csv("0,1\n2,0\n"), Error);
    CHECK_THROWS_AS(parse_distance_csv("1,1\n1,0\n"), Error);
    CHECK_THROWS_AS(parse_distance_csv("0,-1\n-1,0\n"), Error);
    CHECK_THROWS_AS(parse_distance_csv("0,1,2\n1,0\n"), Error);
}

TEST_CASE("small linkage examples")
{
    const auto d = pairwise_distances(line({0, 1, 10}), Metric::euclidean);
    const auto s = hclust(d, Linkage::single);
    CHECK(s.merges[0].height == 1.0);
    CHECK(s.merges[1].height == 9.0);
    CHECK(s.merges[0].left == 1);
    CHECK(s.merges[0].right == 2);
    CHECK(s.merges[1].left == 3);
    CHECK(s.merges[1].right == 4);
    CHECK(hclust(d, Linkage::average).merges[1].height == 9.5);

    const auto cut = cut_tree(s, 2);
    CHECK(cut.cluster_of == std::vector<int>{1, 1, 2});
    CHECK(cut_tree(s, 1).cluster_of == std::vector<int>{1, 1, 1});
    CHECK(cut_tree(s, 3).cluster_of == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(cut_tree(s, 0), Error);
    CHECK_THROWS_AS(cut_tree(s, 4), Error);

    const auto order = dendrogram_order(s);
    CHECK(std::abs(std::find(order.begin(), order.end(), 1) - std::find(order.begin(), order.end(), 2)) == 1);

    const auto two = hclust(pairwise_distances(line({0, 2.5}), Metric::euclidean), Linkage::ward);
    REQUIRE(two.merges.size() == 1);
    CHECK(two.merges[0].height == 2.5);
    CHECK(dendrogram_order(two) == std::vector<int>{1, 2});
}

TEST_CASE("hclust matches the brute-force Lance-Williams reference including ties")
{
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 150; ++rep) {
        const int n = 2 + rep % 9;
        const Matrix x = rep % 2 ? fixtures::integer_grid(n, 1 + rep % 4, rng) : fixtures::gaussian(n, 1 + rep % 4, rng);
        const auto d = pairwise_distances(x, Metric::euclidean);
        for (Linkage l : kAll) {
            const auto tree = hclust(d, l);
            const auto ref = oracle::lance_williams(d.matrix(), to_oracle(l));
            REQUIRE(tree.merges.size() == ref.steps.size());
            for (std::size_t s = 0; s < ref.steps.size(); ++s) {
                CHECK(tree.merges[s].left == ref.steps[s].left);
                CHECK(tree.merges[s].right == ref.steps[s].right);
                CHECK(tree.merges[s].height == ref.steps[s].height);
            }
            for (int k = 1; k <= n; ++k) {
                CHECK(oracle::same_partition(cut_tree(tree, k).cluster_of, ref.partitions[n - k]));
            }
        }
    }
}

TEST_CASE("heights agree with linkage definitions on generic data")
{
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 3 + rep % 8;
        const Matrix x = fixtures::gaussian(n, 3, rng);
        const auto d = pairwise_distances(x, Metric::euclidean);
        for (Linkage l : kAll) {
            const auto tree = hclust(d, l);
            const auto ref = oracle::definitional_heights(x, to_oracle(l));
            for (std::size_t s = 0; s < ref.size(); ++s) {
                CHECK(tree.merges[s].height == doctest::Approx(ref[s]).epsilon(1e-9));
                if (s > 0) CHECK(tree.merges[s].height >= tree.merges[s - 1].height - 1e-12);
            }
        }
    }
}

TEST_CASE("single linkage heights are the minimum spanning tree")
{
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 2 + rep % 11;
        const auto d = pairwise_distances(fixtures::gaussian(n, 2, rng), Metric::manhattan);
        const auto tree = hclust(d, Linkage::single);
        const auto mst = oracle::mst_weights(d.matrix());
        for (std::size_t s = 0; s < mst.size(); ++s) CHECK(tree.merges[s].height == mst[s]);
    }
}

TEST_CASE("cuts are nested and trees are well formed")
{
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 12;
        const auto d = pairwise_distances(fixtures::gaussian(n, 3, rng), Metric::euclidean);
        for (Linkage l : kAll) {
            const auto tree = hclust(d, l);
            std::vector<int> used(2 * n, 0);
            for (std::size_t s = 0; s < tree.merges.size(); ++s) {
                const auto& m = tree.merges[s];
                CHECK(m.left < m.right);
                CHECK(m.right < n + 1 + static_cast<int>(s));
                ++used[m.left];
                ++used[m.right];
            }
            CHECK(*std::max_element(used.begin(), used.end()) == 1);
            for (int k = 1; k < n; ++k) {
                const auto fine = cut_tree(tree, k + 1);
                const auto coarse = cut_tree(tree, k);
                CHECK(oracle::refines(fine.cluster_of, coarse.cluster_of));
                CHECK(fine.k == k + 1);
                int expected = 1;
                for (int c : fine.cluster_of) {
                    CHECK(c <= expected);
                    if (c == expected) ++expected;
                }
            }
            auto order = dendrogram_order(tree);
            std::sort(order.begin(), order.end());
            std::vector<int> ids(n);
            std::iota(ids.begin(), ids.end(), 1);
            CHECK(order == ids);
        }
    }
}

TEST_CASE("clustering is invariant under reordering")
{
    std::mt19937_64 rng(44);
    const int n = 10;
    const Matrix x = fixtures::gaussian(n, 2, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix y(n, 2);
    for (int i = 0; i < n; ++i) y.row(i) = x.row(perm[i]);
    for (Linkage l : kAll) {
        const auto a = cut_tree(hclust(pairwise_distances(x, Metric::euclidean), l), 3);
        const auto b = cut_tree(hclust(pairwise_distances(y, Metric::euclidean), l), 3);
        std::vector<int> back(n);
        for (int i = 0; i < n; ++i) back[perm[i]] = b.cluster_of[i];
        CHECK(oracle::same_partition(a.cluster_of, back));
    }
}

TEST_CASE("merge tree hash changes with structure only")
{
    std::mt19937_64 rng(2);
    const auto d = pairwise_distances(fixtures::gaussian(9, 2, rng), Metric::euclidean);
    CHECK(hclust(d, Linkage::ward).hash() == hclust(d, Linkage::ward).hash());
    CHECK(hclust(d, Linkage::ward).hash() != hclust(d, Linkage::single).hash());
}

TEST_CASE("benchmarks, radius and diameter")
{
    const auto d = pairwise_distances(line({0, 1, 2}), Metric::euclidean);
    const auto one = make_solution({1, 1, 1});
    const auto bench = benchmark_points(one, d);
    CHECK(bench == std::vector<int>{1});
    CHECK(cluster_radius(one, d, bench)[0] == 1.0);
    CHECK(cluster_diameter(one, d)[0] == 2.0);

    const auto pair = pairwise_distances(line({0, 10}), Metric::euclidean);
    const auto p1 = make_solution({1, 1});
    CHECK(benchmark_points(p1, pair) == std::vector<int>{0});
    CHECK(cluster_radius(p1, pair, {0})[0] == 10.0);

    const auto split = make_solution({1, 2});
    CHECK(benchmark_points(split, pair) == std::vector<int>{0, 1});
    CHECK(cluster_radius(split, pair, {0, 1}) == std::vector<double>{0.0, 0.0});
    CHECK(cluster_diameter(split, pair) == std::vector<double>{0.0, 0.0});

    std::mt19937_64 rng(55);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 2 + rep % 40;
        const int k = 1 + rep % std::min(n, 5);
        const Matrix x = rep % 2 ? fixtures::integer_grid(n, 2, rng, 2) : fixtures::gaussian(n, 3, rng);
        const auto dist = pairwise_distances(x, Metric::euclidean);
        const auto sol = make_solution(fixtures::random_labels(n, k, rng));
        const auto summary = summarize(sol, dist);
        for (int c = 1; c <= sol.k; ++c) {
            const auto ref = oracle::exhaustive_cluster(dist.matrix(), sol.cluster_of, c);
            const auto& s = summary[c - 1];
            CHECK(s.benchmark == ref.benchmark);
            CHECK(s.radius == ref.radius);
            CHECK(s.diameter == ref.diameter);
            CHECK(s.radius <= s.diameter);
            CHECK(s.diameter <= 2 * s.radius + 1e-12);
        }
    }
}

TEST_CASE("validity statistics on the four-point line")
{
    const Matrix x = line({0, 1, 10, 11});
    const auto d = pairwise_distances(x, Metric::euclidean);
    const auto sol = make_solution({1, 1, 2, 2});
    CHECK(std::abs(ch_index(x, sol) - 200.0) < 1e-10);
    CHECK(std::abs(wb_ratio(d, sol) - 0.1) < 1e-10);
    const auto sil = silhouette(d, sol);
    CHECK(std::abs(sil.width[0] - (1.0 - 1.0 / 10.5)) < 1e-10);

    CHECK_THROWS_AS(ch_index(x, make_solution({1, 1, 1, 1})), Error);
    CHECK_THROWS_AS(ch_index(x, make_solution({1, 2, 3, 4})), Error);
    CHECK_THROWS_AS(wb_ratio(d, make_solution({1, 2, 3, 4})), Error);
    CHECK(wb_ratio(d, make_solution({1, 1, 2, 3})) == doctest::Approx(1.0 / ((10 + 11 + 9 + 10 + 1) / 5.0)));

    const Matrix twin = line({0, 0, 50, 50});
    const auto dt = pairwise_distances(twin, Metric::euclidean);
    CHECK(std::isinf(ch_index(twin, sol)));
    CHECK(wb_ratio(dt, sol) == 0.0);
    for (double w : silhouette(dt, sol).width) CHECK(w == 1.0);

    const auto single = silhouette(d, make_solution({1, 1, 1, 2}));
    CHECK(single.width[3] == 0.0);
}

TEST_CASE("validity statistics match direct formulas")
{
    std::mt19937_64 rng(66);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 4 + rep % 17;
        const int k = 2 + rep % std::min(n - 2, 4);
        const Matrix x = fixtures::gaussian(n, 3, rng);
        const auto d = pairwise_distances(x, Metric::euclidean);
        const auto sol = make_solution(fixtures::random_labels(n, k, rng));
        CHECK(ch_index(x, sol) == doctest::Approx(oracle::ch_direct(x, sol.cluster_of)).epsilon(1e-10));
        CHECK(wb_ratio(d, sol) == doctest::Approx(oracle::wb_direct(d.matrix(), sol.cluster_of)).epsilon(1e-10));
        const auto sil = silhouette(d, sol);
        const auto ref = oracle::silhouette_direct(d.matrix(), sol.cluster_of);
        for (int i = 0; i < n; ++i) CHECK(sil.width[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    }
}

TEST_CASE("stats sweep")
{
    std::mt19937_64 rng(77);
    const Matrix x = fixtures::gaussian(12, 2, rng);
    const auto d = pairwise_distances(x, Metric::euclidean);
    const auto tree = hclust(d, Linkage::ward);
    const auto rows = stats_sweep(tree, d, x);
    REQUIRE(rows.size() == 7);
    CHECK(rows.front().k == 2);
    CHECK(rows.back().k == 8);
    for (const auto& r : rows) {
        const auto sol = cut_tree(tree, r.k);
        CHECK(r.ch_index == ch_index(x, sol));
        CHECK(r.wb_ratio == wb_ratio(d, sol));
        const auto b = benchmark_points(sol, d);
        CHECK(r.min_benchmark_separation == min_benchmark_separation(d, b));
        const auto radii = cluster_radius(sol, d, b);
        CHECK(r.max_radius == *std::max_element(radii.begin(), radii.end()));
    }

    const Matrix small = fixtures::gaussian(5, 2, rng);
    const auto ds = pairwise_distances(small, Metric::euclidean);
    const auto rs = stats_sweep(hclust(ds, Linkage::average), ds, small);
    REQUIRE(rs.size() == 3);
    CHECK(rs.back().k == 4);
}

TEST_CASE("well separated clusters have radii below benchmark separation")
{
    std::mt19937_64 rng(88);
    Matrix x(40, 2);
    for (int i = 0; i < 40; ++i) {
        x.row(i) = fixtures::gaussian(1, 2, rng, 0.3);
        x(i, 0) += 20.0 * (i % 4);
    }
    const auto d = pairwise_distances(x, Metric::euclidean);
    const auto rows = stats_sweep(hclust(d, Linkage::ward), d, x);
    CHECK(rows[2].k == 4);
    CHECK(rows[2].max_radius < rows[2].min_benchmark_separation);
}

TEST_CASE("distance breakdown")
{
    std::mt19937_64 rng(99);
    const int n = 15;
    const auto d = pairwise_distances(fixtures::gaussian(n, 2, rng), Metric::euclidean);
    const auto sol = make_solution(fixtures::random_labels(n, 3, rng));
    for (int c = 1; c <= 3; ++c) {
        const long m = std::count(sol.cluster_of.begin(), sol.cluster_of.end(), c);
        const auto br = distance_breakdown(d, sol, c);
        CHECK(br.within.total == m * (m - 1) / 2);
        CHECK(br.between.total == m * (n - m));
        CHECK(br.overall.total == n * (n - 1) / 2);
        CHECK(br.within.counts.size() == kBreakdownBins);
        CHECK(br.within.edges == br.overall.edges);
        CHECK(br.overall.edges.back() == d.matrix().maxCoeff());
        CHECK(std::accumulate(br.overall.counts.begin(), br.overall.counts.end(), 0L) == br.overall.total);
    }
    const auto all = make_solution(std::vector<int>(n, 1));
    const auto whole = distance_breakdown(d, all, 1);
    CHECK(whole.between.total == 0);
    CHECK(whole.within.counts == whole.overall.counts);
    CHECK_THROWS_AS(distance_breakdown(d, sol, 4), Error);

    const auto lone = make_solution([&] {
        std::vector<int> l(n, 1);
        l[0] = 2;
        return l;
    }());
    // labels follow first occurrence, so the lone observation is cluster 1
    CHECK(distance_breakdown(d, lone, 1).within.total == 0);
    CHECK(distance_breakdown(d, lone, 2).within.total == (n - 1) * (n - 2) / 2);
}

TEST_CASE("solution comparison")
{
    std::mt19937_64 rng(111);
    const int n = 20;
    const auto d = pairwise_distances(fixtures::gaussian(n, 3, rng), Metric::euclidean);
    const auto tree = hclust(d, Linkage::ward);
    const auto a = cut_tree(tree, 3);
    const auto b = cut_tree(tree, 4);
    const Eigen::MatrixXi t = compare_solutions(a, b);
    CHECK(t.sum() == n);
    int split_rows = 0;
    for (int i = 0; i < t.rows(); ++i) {
        const int nz = (t.row(i).array() > 0).count();
        CHECK(nz >= 1);
        if (nz == 2) ++split_rows;
        CHECK(t.row(i).sum() == std::count(a.cluster_of.begin(), a.cluster_of.end(), i + 1));
    }
    CHECK(split_rows == 1);
    for (int j = 0; j < t.cols(); ++j) CHECK(t.col(j).sum() == std::count(b.cluster_of.begin(), b.cluster_of.end(), j + 1));

    const Eigen::MatrixXi same = compare_solutions(b, b);
    CHECK(same.diagonal().sum() == n);
    const Eigen::MatrixXi one = compare_solutions(cut_tree(tree, 1), b);
    CHECK(one.rows() == 1);
    CHECK_THROWS_AS(compare_solutions(a, make_solution({1, 2})), Error);
}

TEST_CASE("convex hulls")
{
    const auto sq = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
    CHECK(sq.size() == 4);
    CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size() == 2);
    CHECK(convex_hull({{3, 3}}).size() == 1);

    std::mt19937_64 rng(123);
    const Matrix pts = fixtures::gaussian(100, 2, rng);
    std::vector<Point2> input;
    for (int i = 0; i < 100; ++i) input.push_back({pts(i, 0), pts(i, 1)});
    const auto hull = convex_hull(input);
    std::vector<std::pair<double, double>> poly;
    for (const auto& p : hull) poly.emplace_back(p.x, p.y);
    for (const auto& p : input) CHECK(oracle::inside_ccw(poly, p.x, p.y));

    const auto grouped = convex_hulls(pts, std::vector<int>(100, 2));
    REQUIRE(grouped.count(2) == 1);
    CHECK(grouped.at(2) == hull);
}

} // TEST_SUITE
