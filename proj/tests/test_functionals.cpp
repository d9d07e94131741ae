#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "jnkit/functionals.hpp"
#include "jnkit/weights.hpp"
#include "oracle.hpp"

using namespace jnkit;
using testing::grid_fn;
using testing::weight_fn;

namespace {

std::vector<double> positive(std::mt19937_64& rng, std::size_t count) {
    std::lognormal_distribution<double> d(0.0, 0.7);
    std::vector<double> v(count);
    for (auto& x : v) x = d(rng);
    return v;
}

Functional random_table(std::mt19937_64& rng, const GridConfig& cfg) {
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::vector<std::vector<double>> levels(cfg.depth + 1);
    for (int k = 0; k <= cfg.depth; ++k) {
        levels[k].resize(std::size_t{1} << (cfg.dim * k));
        for (auto& x : levels[k]) x = u(rng);
    }
    return Functional::table(cfg, std::move(levels));
}

// sup_t t (w({g > t}) / w(Q))^{1/r}, attained as t increases to a value of g.
double weak_norm(const std::vector<double>& g, const std::vector<double>& w, const std::vector<std::size_t>& idx,
                 double r) {
    double total = 0;
    for (auto i : idx) total += w[i];
    double best = 0;
    for (auto i : idx) {
        double mass = 0;
        for (auto j : idx)
            if (g[j] >= g[i]) mass += w[j];
        best = std::max(best, g[i] * std::pow(mass / total, 1.0 / r));
    }
    return best;
}

}  // namespace

TEST_CASE("D_r norm agrees with exhaustive antichain enumeration") {
    std::mt19937_64 rng(71);
    for (int dim : {1, 2}) {
        for (int J = 1; J <= (dim == 1 ? 4 : 2); ++J) {
            const auto cfg = GridConfig::make(dim, J);
            for (int trial = 0; trial < 6; ++trial) {
                const auto wv = positive(rng, cfg.cells());
                const auto w = weight_fn(wv, dim);
                const auto a = random_table(rng, cfg);
                for (double r : {1.0, 2.0, 3.5}) {
                    const auto got = dr_norm_estimate(a, &w, r, DyadicCube::root());
                    const auto af = [&](const oracle::Cube& c) {
                        return a(DyadicCube::from_flat(dim, c.level, static_cast<std::size_t>(c.y * (1L << c.level) + c.x)));
                    };
                    CHECK_REL_TOL(got.value, oracle::dr_norm(dim, J, wv, af, r, {0, 0, 0}), 1e-12);
                    CHECK(got.value >= 1.0);
                    CHECK_FALSE(got.infinite);
                }
            }
        }
    }
}

TEST_CASE("measure quotients have norm exactly one") {
    std::mt19937_64 rng(72);
    for (int dim : {1, 2}) {
        const auto cfg = GridConfig::make(dim, dim == 1 ? 8 : 4);
        const auto mu = weight_fn(positive(rng, cfg.cells()), dim);
        const auto w = weight_fn(positive(rng, cfg.cells()), dim);
        for (double r : {1.0, 2.0, 4.0}) {
            const auto a = Functional::measure_quotient(cfg, &mu, &w, r, 3.0);
            for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
                double m = 0, wm = 0;
                for (auto i : q.cells(cfg)) {
                    m += mu[i];
                    wm += w[i];
                }
                CHECK_REL(a(q), 3.0 * std::pow(m / wm, 1.0 / r));
            });
            // sum_P mu(P) <= mu(R): every antichain telescopes.
            CHECK_REL(dr_norm_estimate(a, &w, r, DyadicCube::root()).value, 1.0);
        }
    }
}

TEST_CASE("D_r norm flags a functional vanishing above mass") {
    const auto cfg = GridConfig::make(1, 2);
    const auto a = Functional::table(cfg, {{1.0}, {0.0, 1.0}, {1.0, 1.0, 1.0, 1.0}});
    const auto n = dr_norm_estimate(a, nullptr, 2.0, DyadicCube::root());
    CHECK(n.infinite);
    CHECK(n.witness.level == 1);
    const auto flat = Functional::table(cfg, {{1.0}, {1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}});
    // Lebesgue, a = 1: the finest level gives sum |P| = |R|, so the norm is 1.
    CHECK_REL(dr_norm_estimate(flat, nullptr, 2.0, DyadicCube::root()).value, 1.0);
    const auto heavy = Functional::table(cfg, {{1.0}, {1.0, 1.0}, {2.0, 2.0, 2.0, 2.0}});
    CHECK_REL(dr_norm_estimate(heavy, nullptr, 2.0, DyadicCube::root()).value, 2.0);
}

TEST_CASE("oscillation functional meets the hypothesis with equality") {
    const auto f = testing::spec_fn("martingale seed=5 amplitude=1", 1, 8);
    const auto a = Functional::oscillation(f);
    for_each_cube(f.config(), DyadicCube::root(), [&](const DyadicCube& q) {
        CHECK(std::abs(a(q) - oracle::mean_abs_dev(testing::values(f), oracle::cells(1, 8, oracle::from_lib(q)))) < 1e-12);
    });
    CHECK_REL(poincare_hypothesis_ratio(f, a, DyadicCube::root()), 1.0);
    CHECK_REL(poincare_hypothesis_ratio(f, a.scaled(2.0), DyadicCube::root()), 0.5);
}

TEST_CASE("Poincare record against a direct weak-norm computation") {
    std::mt19937_64 rng(73);
    for (int dim : {1, 2}) {
        const int J = dim == 1 ? 8 : 4;
        const auto f = testing::spec_fn("martingale seed=21 amplitude=1", dim, J);
        const auto wv = positive(rng, f.config().cells());
        const auto w = weight_fn(wv, dim);
        const auto mu = gradient_density(f);
        auto a = Functional::measure_quotient(f.config(), &mu, &w, 2.0);
        a = a.scaled(poincare_hypothesis_ratio(f, a, DyadicCube::root()));
        const auto rec = verify_poincare(f, a, w, 2.0, DyadicCube::root());
        const auto v = testing::values(f);
        const double mean = oracle::mean(v, oracle::cells(dim, J, {0, 0, 0}));
        std::vector<double> g(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = std::abs(v[i] - mean);
        CHECK_REL_TOL(rec.lhs, weak_norm(g, wv, oracle::cells(dim, J, {0, 0, 0}), 2.0), 1e-12);
        CHECK(rec.factors.size() == 4);
        CHECK_REL(rec.factors[1].value, oracle::ainfty(dim, J, wv));
        CHECK(rec.factor_product() > 0.0);
        CHECK(rec.lhs / rec.factor_product() <= 1.0);
    }
}

TEST_CASE("Poincare rejects inputs outside the hypothesis") {
    const auto f = grid_fn({0, 0, 0, 8});
    const auto w = weight_fn({1, 1, 1, 1});
    const auto small = Functional::oscillation(f).scaled(0.5);
    CHECK_THROWS_AS(verify_poincare(f, small, w, 2.0, DyadicCube::root()), DomainError);
    const auto zero = Functional::table(f.config(), {{0.0}, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}});
    CHECK_THROWS_AS(verify_poincare(f, zero, w, 2.0, DyadicCube::root()), DomainError);
    const auto other = weight_fn(std::vector<double>(8, 1.0));
    CHECK_THROWS_AS(verify_poincare(f, Functional::oscillation(f), other, 2.0, DyadicCube::root()), DomainError);
}

TEST_CASE("gradient density") {
    const auto c = grid_fn(std::vector<double>(16, 5.0), 2);
    for (double v : testing::values(gradient_density(c))) CHECK(v == 1.0);
    const auto g = gradient_density(grid_fn({0, 0, 0, 8}));
    const std::vector<double> expect{1, 1, 1 + 8.0 / 9, 1 + 8.0 / 9};
    for (std::size_t i = 0; i < 4; ++i) CHECK_REL(g[i], expect[i]);
    CHECK(g.is_weight());
}
