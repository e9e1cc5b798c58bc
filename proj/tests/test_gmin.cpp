#include <catch2/catch_amalgamated.hpp>

#include <cmf/core.hpp>
#include <cmf/search.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace cmf;
using Catch::Approx;

TEST_CASE("unit vectors are selectable from the origin") {
    REQUIRE(gmin({1, 0}, 100.0) == 0.0);
    REQUIRE(gmin({0, 1}, 100.0) == 0.0);
}

TEST_CASE("region distance reference values") {
    double d11 = gmin({1, 1}, 100.0);
    REQUIRE(d11 * d11 == Approx(2.0).margin(1e-6));

    double d21 = gmin({2, 1}, 100.0);
    REQUIRE(d21 * d21 == Approx(18.282).epsilon(5e-3));

    double d31 = gmin({3, 1}, 100.0);
    REQUIRE(d31 * d31 == Approx(82.321).epsilon(5e-3));
}

TEST_CASE("region distance beyond the cap returns the sentinel") {
    REQUIRE(std::isinf(gmin({3, 1}, 5.0)));
}

TEST_CASE("region distance argument guards") {
    REQUIRE_THROWS_AS(gmin({0, 0}, 10.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gmin({2, 4}, 10.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gmin({1, 1}, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gmin({1, 1}, -1.0), std::invalid_argument);
}

TEST_CASE("region distance ignores signs") {
    REQUIRE(gmin({3, -2}, 100.0) == gmin({3, 2}, 100.0));
    REQUIRE(gmin({-1, 1}, 100.0) == gmin({1, 1}, 100.0));
}

TEST_CASE("minimal table holds exactly the unit vectors") {
    GminTable t = build_gmin_table(1.0);
    REQUIRE(t.entries.size() == 2);
    REQUIRE(t.entries[0].ecv == Ecv{1, 0});
    REQUIRE(t.entries[1].ecv == Ecv{0, 1});
    REQUIRE(t.entries[0].gmin_sq == 0.0);
    REQUIRE(t.entries[1].gmin_sq == 0.0);
    REQUIRE(t.coverage_gsq == 1.0);
}

TEST_CASE("table rows up to cap 150") {
    GminTable t = build_gmin_table(150.0);
    REQUIRE(t.coverage_gsq == 150.0);
    REQUIRE(t.entries.size() == 9);

    const Ecv want[9] = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2},
                         {3, 1}, {1, 3}, {3, 2}, {2, 3}};
    const double want_sq[9] = {0.0, 0.0, 2.0, 18.282, 18.282,
                               82.321, 82.321, 130.325, 130.325};
    for (int i = 0; i < 9; ++i) {
        REQUIRE(t.entries[i].k == i + 1);
        REQUIRE(t.entries[i].ecv == want[i]);
        if (want_sq[i] == 0.0)
            REQUIRE(t.entries[i].gmin_sq == 0.0);
        else
            REQUIRE(t.entries[i].gmin_sq == Approx(want_sq[i]).epsilon(5e-3));
    }
    REQUIRE(std::is_sorted(t.entries.begin(), t.entries.end(),
                           [](const auto& a, const auto& b) { return a.gmin_sq < b.gmin_sq; }));
}

TEST_CASE("permutation twins share one region distance") {
    GminTable t = build_gmin_table(150.0);
    REQUIRE(t.lookup_gmin_sq({2, 1}) == t.lookup_gmin_sq({1, 2}));
    REQUIRE(t.lookup_gmin_sq({3, 2}) == t.lookup_gmin_sq({2, 3}));

    // recomputed from scratch in either order, not just copied
    for (Ecv e : {Ecv{2, 1}, Ecv{3, 1}, Ecv{3, 2}}) {
        double a = gmin(e, 20.0);
        double b = gmin({e.a2, e.a1}, 20.0);
        REQUIRE(a == Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("table serialization") {
    GminTable t = build_gmin_table(20.0);
    std::ostringstream os;
    t.to_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    REQUIRE(line == "k,a1,a2,gmin_sq");
    std::getline(is, line);
    REQUIRE(line == "1,1,0,0.000000");
    std::getline(is, line);
    REQUIRE(line == "2,0,1,0.000000");
    std::getline(is, line);
    REQUIRE(line == "3,1,1,2.000000");
}

TEST_CASE("region distance lower-bounds every winning channel") {
    GminTable t = build_gmin_table(300.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> mag(0.0, std::sqrt(150.0));
    for (int i = 0; i < 2000; ++i) {
        ScaledChannel g{mag(rng), mag(rng)};
        if (g.norm_sq() > 300.0 || g.norm_sq() == 0.0) continue;
        RelayDecision d = solve_optimal(g, t);
        double bound = t.lookup_gmin_sq(d.ecv);
        REQUIRE(bound <= g.norm_sq() * (1.0 + 1e-9) + 1e-9);
    }
}
