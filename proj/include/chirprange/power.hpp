#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chirprange {

// Measured node hardware currents (microamps) in active vs power-down state.
struct ComponentBudget {
    std::string name;
    double active_current_ua = 0.0;
    double passive_current_ua = 0.0;
};

struct ComponentPower {
    std::string name;
    double active_nw = 0.0;
    double passive_nw = 0.0;
    double total_nw = 0.0;
};

struct PowerBreakdown {
    std::vector<ComponentPower> components;
    double active_total_nw = 0.0;
    double passive_total_nw = 0.0;
    double grand_total_nw = 0.0;
    double duty_cycle = 0.0;
};

inline constexpr double kDefaultSupplyVoltage = 3.6;   // V, back-solved from the budget rows
inline constexpr double kHoursPerYear = 8766.0;        // 24 * 365.25
inline constexpr double kCr2032CapacityMah = 225.0;
inline constexpr double kDefaultShelfLifeYears = 8.5;

// Acoustic front end plus the sampling ADC of the receiving node.
inline std::vector<ComponentBudget> default_components() {
    return {
        {"LDO + MEMS", 113.1, 0.03},
        {"OPAMP 1", 81.5, 0.0},
        {"OPAMP 2", 81.5, 0.0},
        {"ADC (nRF52)", 300.0, 1.9},
    };
}

// Duty-cycled budget: each component draws its active current for
// active_time out of every period and its power-down current otherwise.
// V * I[uA] is microwatts, so scale by 1000 to report nanowatts.
inline PowerBreakdown duty_cycle_power(const std::vector<ComponentBudget>& components,
                                       double supply_voltage, double active_time_s,
                                       double period_s) {
    if (!(supply_voltage > 0.0))
        throw std::invalid_argument("duty_cycle_power: voltage must be > 0");
    if (!(active_time_s > 0.0) || !(active_time_s <= period_s))
        throw std::invalid_argument("duty_cycle_power: need 0 < active_time <= period");
    PowerBreakdown out;
    out.duty_cycle = active_time_s / period_s;
    for (const auto& c : components) {
        if (c.active_current_ua < 0.0 || c.passive_current_ua < 0.0)
            throw std::invalid_argument("duty_cycle_power: negative current for " + c.name);
        ComponentPower p;
        p.name = c.name;
        p.active_nw = supply_voltage * c.active_current_ua * out.duty_cycle * 1000.0;
        p.passive_nw = supply_voltage * c.passive_current_ua * (1.0 - out.duty_cycle) * 1000.0;
        p.total_nw = p.active_nw + p.passive_nw;
        out.active_total_nw += p.active_nw;
        out.passive_total_nw += p.passive_nw;
        out.grand_total_nw += p.total_nw;
        out.components.push_back(std::move(p));
    }
    return out;
}

// Years of operation from a coin cell, capped at its shelf life. The average
// current is total_power / V; nW / V = nA, hence the 1000 to reach uA.
inline double battery_life(double total_power_nw, double capacity_mah, double supply_voltage,
                           double shelf_life_years = kDefaultShelfLifeYears) {
    if (!(capacity_mah > 0.0) || !(supply_voltage > 0.0) || !(shelf_life_years > 0.0))
        throw std::invalid_argument("battery_life: inputs must be > 0");
    if (total_power_nw < 0.0)
        throw std::invalid_argument("battery_life: power must be >= 0");
    const double current_ua = total_power_nw / supply_voltage / 1000.0;
    if (current_ua <= 0.0) return shelf_life_years;
    const double raw_years = capacity_mah * 1000.0 / current_ua / kHoursPerYear;
    return std::min(raw_years, shelf_life_years);
}

}  // namespace chirprange
