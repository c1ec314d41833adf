#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "funcov/paired_test.hpp"
#include "funcov/simulate.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace funcov;
using Catch::Approx;

namespace {

// exchangeable within-pair scores: symmetric bivariate normal per column
PairedScores exchangeable_pairs(std::size_t n, std::size_t k, double rho,
                                std::uint64_t seed) {
    rng::Engine eng(rng::derive(seed, {0x55}));
    Eigen::MatrixXd a(n, k), b(n, k);
    const double cross = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const auto [z1, z2] = rng::normal_pair(eng);
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z1;
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rho * z1 + cross * z2;
        }
    return PairedScores(std::move(a), std::move(b));
}

} // namespace

TEST_CASE("phi hat") {
    SECTION("perfect dependence: phi equals theta") {
        const auto s = testutil::random_scores(9, 3, 21);
        const PairedScores ps(s, s);
        const Eigen::MatrixXd phi = phi_hat(ps);
        const ScoreCovariance c = score_covariance(s);
        CHECK((phi - c.theta).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("hand-worked degenerate example") {
        Eigen::MatrixXd s1(2, 1), s2(2, 1);
        s1 << 1, -1;
        s2 << 1, 1; // zero dispersion in group 2
        const Eigen::MatrixXd phi = phi_hat(PairedScores(s1, s2));
        CHECK(phi(0, 0) == 0.0);
    }

    SECTION("independent groups: phi concentrates near zero") {
        const auto a = testutil::random_scores(20000, 2, 31);
        const auto b = testutil::random_scores(20000, 2, 32);
        const Eigen::MatrixXd phi = phi_hat(PairedScores(a, b));
        // entries are means of products with variance <= 9/I for standard
        // normal scores; 0.07 is a 3-standard-error band
        CHECK(phi.cwiseAbs().maxCoeff() < 0.07);
    }

    SECTION("variance-of-difference identity") {
        rng::Engine eng(5);
        for (int r = 0; r < 100; ++r) {
            const std::size_t n = 2 + rng::uniform_index(eng, 10);
            const std::size_t k = 1 + rng::uniform_index(eng, 4);
            const auto a = testutil::random_scores(n, k, 4000 + r);
            const auto b = testutil::random_scores(n, k, 5000 + r);
            const PairedScores ps(a, b);
            const Eigen::MatrixXd phi = phi_hat(ps);
            const ScoreCovariance c1 = score_covariance(a);
            const ScoreCovariance c2 = score_covariance(b);

            // theta1 + theta2 - 2 phi equals the variance of the difference
            // of centered score products (hence it is non-negative)
            Eigen::MatrixXd ca = a.rowwise() - c1.mean.transpose();
            Eigen::MatrixXd cb = b.rowwise() - c2.mean.transpose();
            for (std::size_t p = 0; p < k; ++p)
                for (std::size_t q = p; q < k; ++q) {
                    const Eigen::Index ep = static_cast<Eigen::Index>(p);
                    const Eigen::Index eq = static_cast<Eigen::Index>(q);
                    const double lhs =
                        c1.theta(ep, eq) + c2.theta(ep, eq) - 2.0 * phi(ep, eq);
                    Eigen::VectorXd diff(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        const Eigen::Index ei = static_cast<Eigen::Index>(i);
                        diff[ei] = ca(ei, ep) * ca(ei, eq) - cb(ei, ep) * cb(ei, eq);
                    }
                    const double mean = diff.mean();
                    const double rhs = (diff.array() - mean).square().sum() /
                                       static_cast<double>(n);
                    CHECK(lhs == Approx(rhs).margin(1e-10 * std::max(1.0, rhs)));
                    CHECK(lhs >= -1e-10);
                }
        }
    }

    SECTION("shape mismatch") {
        CHECK_THROWS_AS(PairedScores(testutil::random_scores(4, 2, 1),
                                     testutil::random_scores(5, 2, 2)),
                        input_error);
        CHECK_THROWS_AS(PairedScores(testutil::random_scores(1, 2, 1),
                                     testutil::random_scores(1, 2, 2)),
                        input_error);
    }
}

TEST_CASE("paired max statistic") {
    SECTION("identical groups give zero") {
        const auto s = testutil::random_scores(7, 3, 41);
        CHECK(statistic_paired(PairedScores(s, s)).value == 0.0);
    }

    SECTION("matches the nested-loop reference bit for bit") {
        rng::Engine eng(11);
        for (int r = 0; r < 300; ++r) {
            const std::size_t n = 2 + rng::uniform_index(eng, 9);
            const std::size_t k = 1 + rng::uniform_index(eng, 4);
            const auto a = testutil::random_scores(n, k, 6000 + r);
            const auto b = testutil::random_scores(n, k, 7000 + r);
            const MaxStat ours = statistic_paired(PairedScores(a, b));
            const oracle::MaxEntry ref =
                oracle::statistic_paired(testutil::to_rows(a), testutil::to_rows(b));
            REQUIRE(ours.value == ref.value);
            REQUIRE(ours.p == ref.p);
            REQUIRE(ours.q == ref.q);
        }
    }

    SECTION("zero phi and equal sizes reduce to the independent statistic") {
        rng::Engine eng(13);
        for (int r = 0; r < 200; ++r) {
            const std::size_t n = 2 + rng::uniform_index(eng, 10);
            const std::size_t k = 1 + rng::uniform_index(eng, 4);
            const auto a = testutil::random_scores(n, k, 8000 + r);
            const auto b = testutil::random_scores(n, k, 9000 + r);
            const ScoreCovariance c1 = score_covariance(a);
            const ScoreCovariance c2 = score_covariance(b);
            const double paired =
                statistic_paired_with_phi(c1, c2,
                                          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                                static_cast<Eigen::Index>(k)))
                    .value;
            const double indep = statistic_independent(c1, c2).value;
            if (std::isinf(paired)) {
                CHECK(std::isinf(indep));
            } else {
                CHECK(paired == Approx(indep).epsilon(1e-12));
            }
        }
    }

    SECTION("swapping group roles leaves the statistic unchanged") {
        const auto a = testutil::random_scores(9, 3, 51);
        const auto b = testutil::random_scores(9, 3, 52);
        CHECK(statistic_paired(PairedScores(a, b)).value ==
              statistic_paired(PairedScores(b, a)).value);
    }
}

TEST_CASE("paired permutation p-value") {
    SECTION("identical groups give p = 1") {
        const auto s = testutil::random_scores(10, 3, 61);
        const PermutationPvalue r = permutation_pvalue_paired(PairedScores(s, s), 99, 3);
        CHECK(r.p == 1.0);
    }

    SECTION("deterministic across thread counts") {
        const PairedScores ps = exchangeable_pairs(20, 3, 0.6, 71);
        const PermutationPvalue a = permutation_pvalue_paired(ps, 301, 4, 1);
        const PermutationPvalue b = permutation_pvalue_paired(ps, 301, 4, 5);
        CHECK(a.p == b.p);
        REQUIRE(a.null_stats == b.null_stats);
    }

    SECTION("null p-values are approximately uniform") {
        std::vector<double> pvals;
        for (int r = 0; r < 500; ++r) {
            const PairedScores ps =
                exchangeable_pairs(30, 3, 0.5, 100000u + static_cast<unsigned>(r));
            pvals.push_back(permutation_pvalue_paired(ps, 99, 555u + r).p);
        }
        CHECK(testutil::ks_uniform(pvals) <= 0.07);
    }
}

TEST_CASE("paired test pipeline") {
    SECTION("identical paired samples") {
        auto [g1, g2] = gen_paired({.rho = 0.5, .delta = 0.0, .n_pairs = 12,
                                    .n_grid = 40, .noise_var = 0.25, .seed = 19});
        TestOptions opt;
        opt.permutations = 49;
        FunctionalSample copy = g1;
        const TestResult r = test_paired(g1, copy, opt);
        CHECK(r.statistic == 0.0);
        CHECK(*r.p_permutation == 1.0);
        CHECK_FALSE(r.p_asymptotic.has_value());
    }

    SECTION("pair alignment is by id, not by row order") {
        auto [g1, g2] = gen_paired({.rho = 0.8, .delta = 0.3, .n_pairs = 10,
                                    .n_grid = 40, .noise_var = 0.25, .seed = 23});
        TestOptions opt;
        opt.permutations = 99;
        opt.seed = 9;
        const TestResult base = test_paired(g1, g2, opt);

        // reverse group 2's rows (ids travel with the rows)
        FunctionalSample shuffled = g2;
        const Eigen::Index n = g2.n_curves();
        for (Eigen::Index i = 0; i < n; ++i) {
            shuffled.values.row(i) = g2.values.row(n - 1 - i);
            shuffled.pair[static_cast<std::size_t>(i)] =
                g2.pair[static_cast<std::size_t>(n - 1 - i)];
        }
        const TestResult moved = test_paired(g1, shuffled, opt);
        CHECK(moved.statistic == Approx(base.statistic).epsilon(1e-9));
    }

    SECTION("unmatched and duplicate pair ids") {
        auto [g1, g2] = gen_paired({.rho = 0.5, .delta = 0.0, .n_pairs = 6,
                                    .n_grid = 30, .noise_var = 0.25, .seed = 29});
        TestOptions opt;
        opt.permutations = 9;
        FunctionalSample bad = g2;
        bad.pair[2] = "nonexistent";
        CHECK_THROWS_WITH(test_paired(g1, bad, opt),
                          Catch::Matchers::ContainsSubstring("unmatched pair id"));
        FunctionalSample dup = g2;
        dup.pair[2] = dup.pair[3];
        CHECK_THROWS_WITH(test_paired(g1, dup, opt),
                          Catch::Matchers::ContainsSubstring("duplicate pair id"));
        FunctionalSample nolabels = g2;
        nolabels.pair.clear();
        CHECK_THROWS_WITH(test_paired(g1, nolabels, opt),
                          Catch::Matchers::ContainsSubstring("pair_id"));
    }
}
