#include "thermoarena/calendar.hpp"

#include <cstdio>

#include "thermoarena/errors.hpp"

namespace thermoarena {

using namespace std::chrono;

std::string Timestamp::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d", year, month, day, hour, minute);
  return buf;
}

Timestamp Timestamp::parse(const std::string& text) {
  Timestamp t;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d", &t.year, &t.month, &t.day, &t.hour, &t.minute) != 5)
    throw Error("bad timestamp '" + text + "'");
  return t;
}

sys_seconds Timestamp::to_sys() const {
  const sys_days d{std::chrono::year{year} / static_cast<unsigned>(month) / static_cast<unsigned>(day)};
  return d + hours{hour} + minutes{minute};
}

Timestamp Timestamp::from_sys(sys_seconds t) {
  const auto d = floor<days>(t);
  const year_month_day ymd{d};
  const auto rem = duration_cast<minutes>(t - d).count();
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(rem / 60),
          static_cast<int>(rem % 60)};
}

int Timestamp::iso_weekday() const {
  const sys_days d{std::chrono::year{year} / static_cast<unsigned>(month) / static_cast<unsigned>(day)};
  return static_cast<int>(weekday{d}.iso_encoding());
}

}  // namespace thermoarena
