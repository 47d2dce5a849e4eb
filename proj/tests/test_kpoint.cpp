#include <doctest.h>

#include <cmath>
#include <complex>

#include "kaclab/coeffs.hpp"
#include "kaclab/kpoint.hpp"

using namespace kaclab;
using namespace kaclab::kpoint;
using kacsim::PointConfiguration;
using kaclab::coeffs::RngStream;
using cplx = std::complex<double>;

namespace {

PointConfiguration random_config(RngStream& s, int npts, double window) {
    PointConfiguration c;
    c.window_R = window;
    for (int i = 0; i < npts; ++i) {
        double r = window * std::sqrt(s.next_unit());
        double a = 6.283185307179586 * s.next_unit();
        c.points.push_back(std::polar(r, a));
    }
    return c;
}

// Enumeration with no pruning: every point is a candidate for every slot.
double t_phi_unpruned(const PointConfiguration& config, const TestFunction& phi) {
    std::vector<std::vector<int>> all(static_cast<std::size_t>(phi.k));
    for (auto& lst : all) {
        for (int i = 0; i < static_cast<int>(config.points.size()); ++i) lst.push_back(i);
    }
    return sum_over_distinct_tuples(config.points, all,
                                    [&](const std::vector<cplx>& t) { return phi.eval(t); });
}

}  // namespace

TEST_SUITE_BEGIN("kpoint");

TEST_CASE("battery structure") {
    auto b1 = phi_battery(1, 4.0);
    REQUIRE(b1.size() == 3);
    for (const auto& f : b1) {
        REQUIRE(f.k == 1);
        const auto& bump = f.factors[0];
        CHECK(std::abs(bump.center) + bump.radius <= 4.0);
        CHECK(f.eval({bump.center}) == 1.0);  // peak value
        cplx outside = bump.center + cplx(bump.radius + 0.01, 0);
        CHECK(f.eval({outside}) == 0.0);
    }

    auto b2 = phi_battery(2, 4.0);
    REQUIRE(b2.size() == 4);
    double seps[4];
    for (std::size_t i = 0; i < 4; ++i) {
        seps[i] = std::abs(b2[i].factors[0].center - b2[i].factors[1].center);
        for (const auto& bump : b2[i].factors) CHECK(std::abs(bump.center) + bump.radius <= 4.0);
    }
    CHECK(seps[0] == doctest::Approx(0.5));
    CHECK(seps[3] == doctest::Approx(4.0));

    auto b3 = phi_battery(3, 4.0);
    REQUIRE(b3.size() == 1);
    REQUIRE(b3[0].factors.size() == 3);

    CHECK_THROWS_AS(phi_battery(4, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(phi_battery(1, 3.0), std::invalid_argument);
}

TEST_CASE("battery descriptor json mentions every member") {
    auto b = phi_battery(2, 4.0);
    std::string desc = battery_descriptor_json(b);
    CHECK(desc.find(battery_version()) != std::string::npos);
    for (const auto& f : b) CHECK(desc.find(f.id) != std::string::npos);
}

TEST_CASE("t_phi on empty and singleton configurations") {
    auto phi2 = phi_battery(2, 4.0)[0];
    PointConfiguration empty{{}, 4.0};
    CHECK(t_phi(empty, phi2) == 0.0);
    PointConfiguration one{{cplx(0.1, 0)}, 4.0};
    CHECK(t_phi(one, phi2) == 0.0);  // no distinct ordered pair
}

TEST_CASE("t_phi on a pair sums both orderings") {
    auto phi2 = phi_battery(2, 4.0)[1];  // separation 1
    cplx a(-0.4, 0.1), b(0.55, -0.2);
    PointConfiguration config{{a, b}, 4.0};
    double expect = phi2.eval({a, b}) + phi2.eval({b, a});
    CHECK(expect > 0.0);
    CHECK(t_phi(config, phi2) == expect);
}

TEST_CASE("repeated slots count as distinct elements") {
    auto phi2 = phi_battery(2, 4.0)[0];
    cplx a = phi2.factors[0].center;  // also inside factor 1? separation 0.5, radius 1: yes
    PointConfiguration config{{a, a}, 4.0};
    double expect = 2.0 * phi2.eval({a, a});
    CHECK(t_phi(config, phi2) == expect);
    CHECK(expect > 0.0);
}

TEST_CASE("t_phi rejects supports outside the window") {
    TestFunction phi;
    phi.k = 1;
    phi.factors = {{cplx(3.5, 0), 1.0}};
    phi.id = "too_big";
    PointConfiguration config{{cplx(0, 0)}, 4.0};
    CHECK_THROWS_AS(t_phi(config, phi), std::invalid_argument);
}

TEST_CASE("factorial moments") {
    PointConfiguration config{{cplx(0.5, 0), cplx(-0.5, 0.5), cplx(0, -1)}, 4.0};
    CHECK(factorial_moment(config, 1, 2.0) == 3);
    CHECK(factorial_moment(config, 2, 2.0) == 6);
    CHECK(factorial_moment(config, 3, 2.0) == 6);
    CHECK(factorial_moment(config, 4, 2.0) == 0);  // k > Z
}

TEST_CASE("factorial moment equals the sharp-indicator tuple sum") {
    RngStream s(404, 4);
    for (int rep = 0; rep < 200; ++rep) {
        auto config = random_config(s, static_cast<int>(s.next_u64() % 9), 4.0);
        double R = 1.0 + 3.0 * s.next_unit();
        for (int k = 1; k <= 3; ++k) {
            std::vector<std::vector<int>> all(static_cast<std::size_t>(k));
            for (auto& lst : all)
                for (int i = 0; i < static_cast<int>(config.points.size()); ++i) lst.push_back(i);
            double sharp = sum_over_distinct_tuples(
                config.points, all, [&](const std::vector<cplx>& tuple) {
                    for (const auto& z : tuple)
                        if (std::abs(z) > R) return 0.0;
                    return 1.0;
                });
            CHECK(sharp == static_cast<double>(factorial_moment(config, k, R)));
        }
    }
}

TEST_CASE("permutation of an unchanged factor multiset preserves t_phi") {
    TestFunction phi;
    phi.k = 2;
    phi.factors = {{cplx(-0.25, 0), 1.0}, {cplx(0.25, 0), 1.0}};
    TestFunction swapped = phi;
    std::swap(swapped.factors[0], swapped.factors[1]);
    RngStream s(21, 0);
    for (int rep = 0; rep < 100; ++rep) {
        auto config = random_config(s, 6, 4.0);
        double a = t_phi(config, phi), b = t_phi(config, swapped);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("enlarging a bump radius never decreases t_phi") {
    RngStream s(22, 0);
    for (int rep = 0; rep < 100; ++rep) {
        auto config = random_config(s, 7, 4.0);
        TestFunction small;
        small.k = 2;
        small.factors = {{cplx(-0.5, 0), 0.8}, {cplx(0.7, 0.2), 0.6}};
        TestFunction big = small;
        big.factors[1].radius = 1.1;
        CHECK(t_phi(config, big) >= t_phi(config, small) - 1e-12);
    }
}

TEST_CASE("t_phi bounded by the covering factorial moment") {
    RngStream s(23, 0);
    for (int rep = 0; rep < 100; ++rep) {
        auto config = random_config(s, 8, 4.0);
        for (const auto& phi : phi_battery(2, 4.0)) {
            double cover = 0.0;
            for (const auto& b : phi.factors) cover = std::max(cover, std::abs(b.center) + b.radius);
            CHECK(t_phi(config, phi) <=
                  static_cast<double>(factorial_moment(config, phi.k, cover)) + 1e-12);
        }
    }
}

TEST_CASE("support pruning is exact on 1000 random configurations") {
    RngStream s(24, 0);
    auto battery1 = phi_battery(1, 4.0);
    auto battery2 = phi_battery(2, 4.0);
    auto battery3 = phi_battery(3, 4.0);
    for (int rep = 0; rep < 1000; ++rep) {
        auto config = random_config(s, static_cast<int>(s.next_u64() % 10), 4.0);
        const TestFunction* phi;
        switch (rep % 3) {
            case 0: phi = &battery1[rep % battery1.size()]; break;
            case 1: phi = &battery2[rep % battery2.size()]; break;
            default: phi = &battery3[0]; break;
        }
        CHECK(t_phi(config, *phi) == t_phi_unpruned(config, *phi));
    }
}

TEST_CASE("estimate basics") {
    auto phi = phi_battery(1, 4.0)[0];
    PointConfiguration config{{cplx(0.2, 0.1), cplx(-0.4, 0.3)}, 4.0};
    std::vector<kacsim::PointConfiguration> constant(50, config);
    auto est = estimate(constant, phi);
    CHECK(est.trials == 50);
    CHECK(est.stderr_ <= 1e-13);  // identical inputs up to summation roundoff
    CHECK(est.mean == doctest::Approx(t_phi(config, phi)).epsilon(1e-14));
    CHECK(est.k == 1);
    CHECK(est.phi_id == phi.id);

    CHECK_THROWS_AS(estimate({config}, phi), std::invalid_argument);
}

TEST_SUITE_END();
