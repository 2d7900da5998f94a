#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace thermoarena {

/// Wall-clock timestamp of a simulation step. Minute resolution.
struct Timestamp {
  int year = 2021;
  int month = 1;  // 1-12
  int day = 1;    // 1-31
  int hour = 0;   // 0-23
  int minute = 0;

  auto operator<=>(const Timestamp&) const = default;

  /// ISO-like `YYYY-MM-DDTHH:MM`.
  std::string to_string() const;
  static Timestamp parse(const std::string& text);

  std::chrono::sys_seconds to_sys() const;
  static Timestamp from_sys(std::chrono::sys_seconds t);

  /// 1 = Monday ... 7 = Sunday.
  int iso_weekday() const;

  Timestamp plus_seconds(std::int64_t seconds) const { return from_sys(to_sys() + std::chrono::seconds(seconds)); }
};

inline bool is_leap_year(int year) { return std::chrono::year{year}.is_leap(); }

}  // namespace thermoarena
