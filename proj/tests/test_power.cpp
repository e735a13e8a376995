#include <catch2/catch_amalgamated.hpp>

#include "chirprange/power.hpp"

using namespace chirprange;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("duty-cycled budget of the default front end", "[power]") {
    const PowerBreakdown b = duty_cycle_power(default_components(), 3.6, 0.001, 1.0);

    REQUIRE(b.components.size() == 4);
    CHECK(b.duty_cycle == 0.001);

    // 1 ms wake per second: P_active = V * I * d * 1000 nW, passive covers the
    // remaining 999 ms.
    CHECK(b.components[0].name == "LDO + MEMS");
    CHECK_THAT(b.components[0].active_nw, WithinAbs(407.16, 1e-9));
    CHECK_THAT(b.components[0].passive_nw, WithinAbs(107.892, 1e-9));
    CHECK(b.components[1].name == "OPAMP 1");
    CHECK_THAT(b.components[1].active_nw, WithinAbs(293.4, 1e-9));
    CHECK(b.components[1].passive_nw == 0.0);
    CHECK_THAT(b.components[2].active_nw, WithinAbs(293.4, 1e-9));
    CHECK(b.components[3].name == "ADC (nRF52)");
    CHECK_THAT(b.components[3].active_nw, WithinAbs(1080.0, 1e-9));
    CHECK_THAT(b.components[3].passive_nw, WithinAbs(6833.16, 1e-9));

    CHECK_THAT(b.active_total_nw, WithinAbs(2073.96, 1e-9));
    CHECK_THAT(b.passive_total_nw, WithinAbs(6941.052, 1e-9));
    CHECK_THAT(b.grand_total_nw, WithinAbs(9015.012, 1e-9));
}

TEST_CASE("always-on budget has no passive share", "[power]") {
    const PowerBreakdown b = duty_cycle_power(default_components(), 3.6, 1.0, 1.0);
    CHECK(b.duty_cycle == 1.0);
    CHECK(b.passive_total_nw == 0.0);
    CHECK_THAT(b.active_total_nw, WithinRel(3.6 * (113.1 + 81.5 + 81.5 + 300.0) * 1000.0, 1e-12));
}

TEST_CASE("power model rejects broken inputs", "[power]") {
    const auto parts = default_components();
    CHECK_THROWS_AS(duty_cycle_power(parts, 0.0, 0.001, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(duty_cycle_power(parts, 3.6, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(duty_cycle_power(parts, 3.6, 2.0, 1.0), std::invalid_argument);

    std::vector<ComponentBudget> bad{{"X", -1.0, 0.0}};
    CHECK_THROWS_AS(duty_cycle_power(bad, 3.6, 0.001, 1.0), std::invalid_argument);
    bad[0] = {"X", 1.0, -0.1};
    CHECK_THROWS_AS(duty_cycle_power(bad, 3.6, 0.001, 1.0), std::invalid_argument);
}

TEST_CASE("coin-cell life caps at shelf life", "[power]") {
    const double total = duty_cycle_power(default_components(), 3.6, 0.001, 1.0).grand_total_nw;

    // ~2.5 uA average would stretch a CR2032 past a decade; chemistry quits first.
    const double raw = battery_life(total, kCr2032CapacityMah, 3.6, 1000.0);
    CHECK(raw > 10.2);
    CHECK(raw < 10.3);
    CHECK(battery_life(total, kCr2032CapacityMah, 3.6) == kDefaultShelfLifeYears);

    CHECK(battery_life(0.0, kCr2032CapacityMah, 3.6) == kDefaultShelfLifeYears);

    // Uncapped life is inversely proportional to the draw.
    const double one = battery_life(total, kCr2032CapacityMah, 3.6, 1e9);
    const double two = battery_life(2.0 * total, kCr2032CapacityMah, 3.6, 1e9);
    CHECK_THAT(two, WithinRel(one / 2.0, 1e-12));

    CHECK_THROWS_AS(battery_life(total, 0.0, 3.6), std::invalid_argument);
    CHECK_THROWS_AS(battery_life(total, 225.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(battery_life(total, 225.0, 3.6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(battery_life(-1.0, 225.0, 3.6), std::invalid_argument);
}

TEST_CASE("power constants", "[power]") {
    CHECK(kDefaultSupplyVoltage == 3.6);
    CHECK(kHoursPerYear == 8766.0);
    CHECK(kCr2032CapacityMah == 225.0);
    CHECK(kDefaultShelfLifeYears == 8.5);
}
