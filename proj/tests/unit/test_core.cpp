#include "doctest.h"

#include "oracles/oracles.hpp"
#include "support/fixtures.hpp"

#include "twinspace/core/coords.hpp"
#include "twinspace/core/dataset.hpp"
#include "twinspace/core/scores.hpp"
#include "twinspace/error.hpp"

#include <cmath>

using namespace twinspace;
using namespace twinspace::core;

TEST_SUITE("core") {

TEST_CASE("parse numeric and categorical columns")
{
    const auto ds = parse_dataset("a,b\n1,2\n3,4");
    CHECK(ds.n_rows() == 2);
    CHECK(ds.column("a").numeric);
    CHECK(ds.column("b").numeric);
    CHECK(ds.column("b").values[1] == 4.0);

    const auto mixed = parse_dataset("a,b\n1,x\n2,y\n");
    CHECK(mixed.column("a").numeric);
    CHECK_FALSE(mixed.column("b").numeric);
    CHECK(mixed.column("b").text[1] == "y");
}

TEST_CASE("missing cells and quoting")
{
    const auto ds = parse_dataset("a,\"b,c\"\r\nNA,\"x \"\"q\"\"\"\n2,\n");
    CHECK(std::isnan(ds.column("a").values[0]));
    CHECK(ds.column("a").numeric);
    CHECK(ds.column("b,c").text[0] == "x \"q\"");
    CHECK(is_missing_token(""));
    CHECK(is_missing_token("NA"));
}

TEST_CASE("ragged rows report the row number")
{
    try {
        parse_dataset("a,b\n1\n2,3");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()) == "row 1 has 1 fields, expected 2");
        CHECK(e.row() == 1);
    }
    CHECK_THROWS_AS(parse_dataset("a,a\n1,2"), Error);
    CHECK_THROWS_AS(parse_dataset("a,b\n"), Error);
}

TEST_CASE("role assignment")
{
    const auto ds = parse_dataset(fixtures::read_file(fixtures::data_path("bikes.csv")));
    RoleSpec roles;
    for (int i = 1; i <= 8; ++i) roles.clustering.push_back("A" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) roles.linked.push_back("L" + std::to_string(i));
    roles.label = "id";
    roles.flags = {"type"};
    const auto sd = assign_roles(ds, roles);
    CHECK(sd.clustering.cols() == 8);
    CHECK(sd.linked.cols() == 6);
    CHECK(sd.extras.cols() == 1);
    CHECK(sd.extras_names[0] == "X1");
    CHECK(sd.labels->at(0) == "obs01");
    CHECK_FALSE(sd.clustering.hasNaN());
    CHECK_FALSE(sd.linked.hasNaN());

    RoleSpec overlap = roles;
    overlap.linked.push_back("A1");
    CHECK_THROWS_AS(assign_roles(ds, overlap), Error);
    RoleSpec empty = roles;
    empty.clustering.clear();
    CHECK_THROWS_AS(assign_roles(ds, empty), Error);
    RoleSpec unknown = roles;
    unknown.linked.push_back("nope");
    CHECK_THROWS_AS(assign_roles(ds, unknown), Error);

    RoleSpec minimal;
    minimal.linked = {"L1"};
    for (const auto& c : ds.columns()) {
        if (c.numeric && c.name != "L1") minimal.clustering.push_back(c.name);
    }
    const auto all = assign_roles(ds, minimal);
    CHECK(all.linked.cols() == 1);
    CHECK(all.extras.cols() == 0);
}

TEST_CASE("median imputation")
{
    const double na = std::nan("");
    Matrix m(3, 2);
    m << 1, 5, na, 6, 3, 7;
    const Matrix out = impute_missing(m, {"x", "y"});
    CHECK(out(1, 0) == 2.0);
    CHECK(out.col(1) == m.col(1));
    CHECK(impute_missing(out) == out);

    Matrix bad(2, 1);
    bad << na, na;
    CHECK_THROWS_WITH_AS(impute_missing(bad, {"z"}), doctest::Contains("'z'"), Error);
}

TEST_CASE("center and scale")
{
    Matrix m(2, 1);
    m << 1, 3;
    const auto cs = center_scale_coords(m, true, true);
    CHECK(cs.values(0, 0) == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
    CHECK(cs.values(1, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(center_scale_coords(m, false, false).values == m);

    Matrix constant(2, 1);
    constant << 5, 5;
    CHECK_THROWS_WITH_AS(center_scale_coords(constant, false, true, Space::clustering, {"c"}),
                         doctest::Contains("'c'"), Error);

    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix x = fixtures::gaussian(15, 4, rng, 3.0).array() + 7.0;
        const Matrix y = center_scale_coords(x, true, true).values;
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            const double mean = y.col(j).mean();
            CHECK(std::abs(mean) < 1e-12);
            const double sd = std::sqrt((y.col(j).array() - mean).square().sum() / (y.rows() - 1));
            CHECK(std::abs(sd - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("pull coordinates")
{
    Matrix one(1, 1);
    one << 2;
    Matrix cov1(1, 1);
    cov1 << 4;
    CHECK(pull_coords(one, CovarianceSpec(cov1, Vector::Zero(1))).values(0, 0) == doctest::Approx(1.0));

    Matrix y(1, 2);
    y << 2, 3;
    Vector z(2);
    z << 1, 1;
    const auto t = pull_coords(y, CovarianceSpec(Matrix::Identity(2, 2), z));
    CHECK(t.values(0, 0) == 1.0);
    CHECK(t.values(0, 1) == 2.0);

    std::mt19937_64 rng(3);
    const Matrix x = fixtures::gaussian(10, 3, rng);
    const auto id = pull_coords(x, CovarianceSpec(Matrix::Identity(3, 3), Vector::Zero(3)));
    CHECK((id.values - x).cwiseAbs().maxCoeff() < 1e-12);

    Matrix singular(2, 2);
    singular << 1, 1, 1, 1;
    CHECK_THROWS_AS(CovarianceSpec(singular, Vector::Zero(2)), Error);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(CovarianceSpec(asym, Vector::Zero(2)), Error);
}

TEST_CASE("chi2 score")
{
    Matrix y(2, 2);
    y << 3, 4, 0, 0;
    const auto s = chi2_score(y, CovarianceSpec(Matrix::Identity(2, 2), Vector::Zero(2)));
    CHECK(s.values[0] == doctest::Approx(25.0));
    CHECK(s.values[1] == 0.0);

    Matrix d(1, 2);
    d << 2, 1;
    Matrix cov(2, 2);
    cov << 4, 0, 0, 1;
    CHECK(chi2_score(d, CovarianceSpec(cov, Vector::Zero(2))).values[0] == doctest::Approx(2.0));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> var(0.1, 5.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Eigen::Index p = 1 + rep % 6;
        Matrix c = Matrix::Zero(p, p);
        for (Eigen::Index j = 0; j < p; ++j) c(j, j) = var(rng);
        const Vector ref = fixtures::gaussian(p, 1, rng);
        const Matrix x = fixtures::gaussian(8, p, rng, 2.0);
        const CovarianceSpec spec(c, ref);
        const auto pulled = pull_coords(x, spec);
        const auto chi = chi2_score(x, spec);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            CHECK(std::abs(pulled.values.row(i).squaredNorm() - chi.values[i]) < 1e-10);
        }
    }
}

TEST_CASE("external score")
{
    const auto s = external_score({1, 2, 3}, "Residual", 3);
    CHECK(s.name == "Residual");
    CHECK(s.values[2] == 3.0);
    CHECK_NOTHROW(external_score({2, 2, 2}, "c", 3));
    CHECK_THROWS_AS(external_score({1, 2}, "r", 3), Error);
    CHECK_THROWS_WITH_AS(external_score({1, INFINITY, 2}, "r", 3), doctest::Contains("2"), Error);
}

TEST_CASE("quantile bins")
{
    ScoreVector s{"s", {1, 2, 3, 4, 5, 6, 7, 8}};
    const auto b = quantile_bins(s, 4);
    CHECK(b.bin_of == std::vector<int>{1, 1, 2, 2, 3, 3, 4, 4});
    REQUIRE(b.boundaries.size() == 3);
    CHECK(b.boundaries[0] == doctest::Approx(2.75));
    CHECK(b.boundaries[1] == doctest::Approx(4.5));
    CHECK(b.boundaries[2] == doctest::Approx(6.25));

    const auto flat = quantile_bins(ScoreVector{"s", {3, 3, 3, 3}}, 3);
    CHECK(flat.bin_of == std::vector<int>{1, 1, 1, 1});
    CHECK_THROWS_AS(quantile_bins(s, 1), Error);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 30; ++rep) {
        ScoreVector r{"r", {}};
        const int n = 10 + rep;
        for (int i = 0; i < n; ++i) r.values.push_back(g(rng));
        const int k = 2 + rep % 5;
        const auto bins = quantile_bins(r, k);
        for (int i = 1; i < k; ++i) {
            CHECK(bins.boundaries[i - 1] == doctest::Approx(oracle::quantile7(r.values, double(i) / k)));
        }
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int c) { return r.values[a] < r.values[c]; });
        std::vector<int> sizes(k, 0);
        for (int i = 0; i < n; ++i) {
            ++sizes[bins.bin_of[order[i]] - 1];
            if (i > 0) CHECK(bins.bin_of[order[i - 1]] <= bins.bin_of[order[i]]);
        }
        CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    }
}

TEST_CASE("crossed groups")
{
    std::vector<std::string> f1, f2;
    for (int i = 0; i < 12; ++i) {
        f1.push_back(i % 2 ? "b" : "a");
        f2.push_back(std::to_string(i % 3));
    }
    const auto g = cross_groups({f1, f2});
    CHECK(g.n_groups() == 6);
    CHECK(g.group_names.front() == "a/0");
    CHECK(g.group_names.back() == "b/2");
    CHECK(g.group_names[g.group_of[5] - 1] == "b/2");

    CHECK(cross_groups({{"x", "x"}}).n_groups() == 1);

    std::vector<std::string> many;
    for (int i = 0; i < 14; ++i) many.push_back("g" + std::to_string(i));
    CHECK_THROWS_WITH_AS(cross_groups({many}), doctest::Contains("13"), Error);
}

} // TEST_SUITE
