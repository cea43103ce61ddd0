#pragma once

#include <string>
#include <string_view>

#include "wildfire/error.hpp"

namespace wildfire::units {

enum class Speed { kFeetPerMinute, kKilometersPerHour, kMilesPerHour };
enum class Time { kMinute, kHour };
enum class Length { kFoot, kMeter, kKilometer };

inline constexpr double kFootInMeters = 0.3048;

/// ft/min per unit of `u`.
constexpr double feet_per_minute(Speed u) {
  switch (u) {
    case Speed::kFeetPerMinute: return 1.0;
    case Speed::kKilometersPerHour: return 1000.0 / kFootInMeters / 60.0;  // 54.6806649...
    case Speed::kMilesPerHour: return 5280.0 / 60.0;
  }
  return 1.0;
}

constexpr double hours(Time u) { return u == Time::kHour ? 1.0 : 1.0 / 60.0; }

constexpr double meters(Length u) {
  switch (u) {
    case Length::kFoot: return kFootInMeters;
    case Length::kMeter: return 1.0;
    case Length::kKilometer: return 1000.0;
  }
  return 1.0;
}

inline double convert_speed(double value, Speed from, Speed to) {
  if (from == to) return value;
  return value * feet_per_minute(from) / feet_per_minute(to);
}

/// Factor taking a fuel-chain rate in ft/min to plane `length` units per hour.
constexpr double ft_per_min_to_plane_per_hour(Length length) {
  return kFootInMeters * 60.0 / meters(length);
}

inline Speed parse_speed(std::string_view s) {
  if (s == "ft/min") return Speed::kFeetPerMinute;
  if (s == "km/h") return Speed::kKilometersPerHour;
  if (s == "mph") return Speed::kMilesPerHour;
  throw InvalidInput("unit", "unknown speed unit '" + std::string(s) + "' (allowed: ft/min, km/h, mph)");
}

inline Time parse_time(std::string_view s) {
  if (s == "min") return Time::kMinute;
  if (s == "h") return Time::kHour;
  throw InvalidInput("unit", "unknown time unit '" + std::string(s) + "' (allowed: min, h)");
}

inline Length parse_length(std::string_view s) {
  if (s == "ft") return Length::kFoot;
  if (s == "m") return Length::kMeter;
  if (s == "km") return Length::kKilometer;
  throw InvalidInput("length_unit", "unknown length unit '" + std::string(s) + "' (allowed: ft, m, km)");
}

}  // namespace wildfire::units
