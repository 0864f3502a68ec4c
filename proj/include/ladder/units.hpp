#pragma once

#include <numbers>

// Public interfaces take frequencies as f = ω/2π (GHz for carriers, MHz for
// Rabi frequencies and anharmonicities, MHz/ns for chirp rates) and times in ns.
// Internally everything is angular: rad/ns and rad/ns².
namespace ladder::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double ghz_to_rad_per_ns(double f_ghz) noexcept { return two_pi * f_ghz; }
constexpr double mhz_to_rad_per_ns(double f_mhz) noexcept { return two_pi * f_mhz * 1e-3; }
constexpr double rad_per_ns_to_mhz(double w) noexcept { return w / two_pi * 1e3; }

// α/2π in MHz/ns -> α in rad/ns².
constexpr double chirp_to_rad_per_ns2(double alpha_mhz_per_ns) noexcept {
    return two_pi * alpha_mhz_per_ns * 1e-3;
}
constexpr double rad_per_ns2_to_chirp(double alpha) noexcept { return alpha / two_pi * 1e3; }

}  // namespace ladder::units
