#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "swarmdec/error.hpp"
#include "swarmdec/hypergeom.hpp"

using namespace swarmdec;

TEST_CASE("pmf examples") {
    CHECK(pmf(10, 0, 4, 0) == 1.0);
    // 100 of the 210 four-subsets hold exactly two of five marked agents.
    CHECK(pmf(10, 5, 4, 2) == doctest::Approx(100.0 / 210.0).epsilon(1e-14));
    CHECK(pmf(10, 5, 4, 2) == doctest::Approx(0.4761904762).epsilon(1e-10));
    CHECK(pmf(101, 101, 7, 7) == 1.0);
    CHECK(pmf(10, 3, 4, 4) == 0.0);
}

TEST_CASE("pmf rejects invalid arguments") {
    CHECK_THROWS_AS(pmf(10, 11, 4, 0), DomainError);
    CHECK_THROWS_AS(pmf(10, -1, 4, 0), DomainError);
    CHECK_THROWS_AS(pmf(10, 5, 11, 0), DomainError);
    CHECK_THROWS_AS(pmf(10, 5, 0, 0), DomainError);
    CHECK_THROWS_AS(pmf(10, 5, 4, 5), DomainError);
    CHECK_THROWS_AS(pmf(10, 5, 4, -1), DomainError);
}

TEST_CASE("pmf_table examples") {
    const PmfTable t = pmf_table(10, 5, 4);
    REQUIRE(t.probabilities.size() == 5);
    const double expected[] = {5.0 / 210, 50.0 / 210, 100.0 / 210, 50.0 / 210, 5.0 / 210};
    for (int k = 0; k <= 4; ++k) CHECK(t[k] == doctest::Approx(expected[k]).epsilon(1e-14));
    CHECK(t[0] == doctest::Approx(0.0238095).epsilon(1e-6));

    const PmfTable full = pmf_table(7, 7, 7);
    for (int k = 0; k < 7; ++k) CHECK(full[k] == 0.0);
    CHECK(full[7] == 1.0);
}

TEST_CASE("pmf_bruteforce") {
    CHECK(pmf_bruteforce(10, 5, 4, 2) == 100.0 / 210.0);
    CHECK(pmf_bruteforce(5, 5, 3, 3) == 1.0);
    CHECK_THROWS_AS(pmf_bruteforce(25, 5, 3, 1), SizeError);
    // Frozen from subset enumeration: counts 6, 90, 300, 300, 90, 6 of C(12,5)=792.
    const double counts[] = {6, 90, 300, 300, 90, 6};
    for (int k = 0; k <= 5; ++k) {
        CHECK(std::abs(pmf(12, 6, 5, k) - pmf_bruteforce(12, 6, 5, k)) <= 1e-12);
        CHECK(pmf_bruteforce(12, 6, 5, k) == doctest::Approx(counts[k] / 792.0).epsilon(1e-15));
    }
}

TEST_CASE("pmf_bruteforce agrees with an independent permutation walk") {
    for (int n : {6, 9, 12}) {
        for (int big_k = 0; big_k <= n; ++big_k) {
            for (int k = 0; k <= 3; ++k) {
                CHECK(pmf_bruteforce(n, big_k, 3, k) == oracle::hypergeom_by_permutation(n, big_k, 3, k));
            }
        }
    }
}

TEST_CASE("oracle equivalence for N <= 16") {
    for (int n = 1; n <= 16; ++n) {
        for (int g = 1; g <= n; ++g) {
            for (int big_k = 0; big_k <= n; ++big_k) {
                for (int k = 0; k <= g; ++k) {
                    REQUIRE(std::abs(pmf(n, big_k, g, k) - pmf_bruteforce(n, big_k, g, k)) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("normalization, support, symmetry and mean") {
    for (int n = 3; n <= 301; n += (n < 70 ? 1 : 7)) {
        for (int g : {3, 5, 7}) {
            if (g > n) continue;
            for (int big_k = 0; big_k <= n; ++big_k) {
                const PmfTable t = pmf_table(n, big_k, g);
                double mean = 0.0;
                for (int k = 0; k <= g; ++k) {
                    const double p = t[k];
                    REQUIRE(p >= 0.0);
                    REQUIRE(p <= 1.0);
                    mean += k * p;
                    const bool in_support = k >= std::max(0, g - (n - big_k)) && k <= std::min(g, big_k);
                    if (!in_support) REQUIRE(p == 0.0);
                    REQUIRE(p == pmf(n, n - big_k, g, g - k));
                }
                REQUIRE(std::abs(t.sum() - 1.0) <= 1e-12);
                REQUIRE(std::abs(mean - static_cast<double>(g) * big_k / n) <= 1e-10);
            }
        }
    }
}

TEST_CASE("log-space branch matches exact binomials at N = 101") {
    // C(101, 7) and its factors fit in 64 bits, so the oracle is exact.
    for (int big_k = 0; big_k <= 101; ++big_k) {
        for (int k = 0; k <= 7; ++k) {
            const double exact = static_cast<double>(oracle::binom(big_k, k) * oracle::binom(101 - big_k, 7 - k)) /
                                 static_cast<double>(oracle::binom(101, 7));
            CHECK(pmf(101, big_k, 7, k) == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}
