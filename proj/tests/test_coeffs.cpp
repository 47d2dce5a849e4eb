#include <doctest.h>

#include <cmath>
#include <complex>

#include "kaclab/coeffs.hpp"

using namespace kaclab::coeffs;
using cplx = std::complex<double>;

namespace {

const char* kAllLaws[] = {"gaussian-complex", "gaussian-real", "rademacher",
                          "uniform-real", "two-point(0.2)", "two-point(0.5)"};

}  // namespace

TEST_SUITE_BEGIN("coeffs");

TEST_CASE("make_law sets exact pseudo-moments") {
    auto rad = make_law("rademacher");
    CHECK(rad.pseudo_moment == cplx(1.0, 0.0));
    CHECK(rad.fourth_abs_moment == 1.0);

    auto gc = make_law("gaussian-complex");
    CHECK(gc.pseudo_moment == cplx(0.0, 0.0));
    CHECK(gc.is_complex);

    auto uni = make_law("uniform-real");
    CHECK(uni.pseudo_moment == cplx(1.0, 0.0));

    auto tp = make_law("two-point", 0.2);
    CHECK(tp.pseudo_moment == cplx(1.0, 0.0));
    CHECK(tp.id == "two-point(0.2)");
    CHECK(tp.fourth_abs_moment == doctest::Approx(0.64 / 0.2 + 0.04 / 0.8));
}

TEST_CASE("make_law rejects bad input") {
    CHECK_THROWS_AS(make_law("cauchy"), std::invalid_argument);
    CHECK_THROWS_AS(make_law("two-point"), std::invalid_argument);
    CHECK_THROWS_AS(make_law("two-point", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_law("two-point", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(parse_law("two-point(1.5)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_law("two-point(x)"), std::invalid_argument);
}

TEST_CASE("parse_law canonicalizes ids") {
    CHECK(parse_law("two-point(0.20)").id == "two-point(0.2)");
    CHECK(parse_law("rademacher").id == "rademacher");
}

TEST_CASE("rademacher support and determinism") {
    auto law = make_law("rademacher");
    RngStream s1(123, 7), s2(123, 7);
    auto a = sample_coeffs(law, 4, s1);
    auto b = sample_coeffs(law, 4, s2);
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i] == cplx(1.0, 0.0) || a[i] == cplx(-1.0, 0.0)));
        CHECK(a[i] == b[i]);  // bit-exact replay
    }
}

TEST_CASE("uniform-real support bound") {
    auto law = make_law("uniform-real");
    RngStream s(9, 0);
    for (int i = 0; i < 10000; ++i) {
        cplx x = law.sample(s);
        CHECK(x.imag() == 0.0);
        CHECK(std::abs(x.real()) <= std::sqrt(3.0));
    }
}

TEST_CASE("normalization invariants at T = 1e6 for every law") {
    const long long T = 1000000;
    for (const char* id : kAllLaws) {
        CAPTURE(id);
        auto law = parse_law(id);
        RngStream s(2026, 41);
        cplx mean = 0.0, pseudo = 0.0;
        double second = 0.0;
        for (long long i = 0; i < T; ++i) {
            cplx x = law.sample(s);
            mean += x;
            pseudo += x * x;
            second += std::norm(x);
        }
        mean /= static_cast<double>(T);
        pseudo /= static_cast<double>(T);
        second /= static_cast<double>(T);
        double tol_mean = 5.0 / std::sqrt(static_cast<double>(T));
        double tol_second = 5.0 * std::sqrt(law.fourth_abs_moment) /
                            std::sqrt(static_cast<double>(T));
        CHECK(std::abs(mean) <= tol_mean);
        CHECK(std::abs(second - 1.0) <= tol_second);
        CHECK(std::abs(pseudo - law.pseudo_moment) <= tol_second);
    }
}

TEST_CASE("gaussian-complex large-sample moments") {
    auto law = make_law("gaussian-complex");
    const int n = 1000000;
    RngStream s(5150, 0);
    auto xs = sample_coeffs(law, n, s);
    cplx mean = 0.0;
    double second = 0.0;
    for (const auto& x : xs) {
        mean += x;
        second += std::norm(x);
    }
    mean /= static_cast<double>(xs.size());
    second /= static_cast<double>(xs.size());
    CHECK(std::abs(mean) <= 5e-3);
    CHECK(std::abs(second - 1.0) <= 5e-3);
}

TEST_CASE("distinct streams are uncorrelated") {
    const long long T = 1000000;
    for (const char* id : {"gaussian-real", "rademacher"}) {
        CAPTURE(id);
        auto law = parse_law(id);
        RngStream s0(77, 0), s1(77, 1);
        double sum0 = 0, sum1 = 0, sum01 = 0, sq0 = 0, sq1 = 0;
        for (long long i = 0; i < T; ++i) {
            double a = law.sample(s0).real();
            double b = law.sample(s1).real();
            sum0 += a;
            sum1 += b;
            sum01 += a * b;
            sq0 += a * a;
            sq1 += b * b;
        }
        double n = static_cast<double>(T);
        double cov = sum01 / n - (sum0 / n) * (sum1 / n);
        double corr = cov / std::sqrt((sq0 / n - (sum0 / n) * (sum0 / n)) *
                                      (sq1 / n - (sum1 / n) * (sum1 / n)));
        CHECK(std::abs(corr) <= 5.0 / std::sqrt(n));
    }
}

TEST_CASE("counter replay is bit-exact mid-stream") {
    RngStream s(11, 22);
    for (int i = 0; i < 100; ++i) s.next_u64();
    std::uint64_t counter = s.counter();
    std::uint64_t a = s.next_u64();
    RngStream replay(11, 22, counter);
    CHECK(replay.next_u64() == a);
}

TEST_CASE("sample_coeffs rejects n < 1") {
    auto law = make_law("rademacher");
    RngStream s(1, 0);
    CHECK_THROWS_AS(sample_coeffs(law, 0, s), std::invalid_argument);
}

TEST_SUITE_END();
