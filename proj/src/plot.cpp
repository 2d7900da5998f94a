#include "thermoarena/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace thermoarena::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf) == "-0.00" ? "0.00" : buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish(double margin = 0.05) {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = margin * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

/// Chart frame with linear scales.
class Frame {
 public:
  Frame(Range x, Range y) : x_(x), y_(y) {}

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void open(std::ostringstream& s, const Axes& axes, bool x_ticks = true) const {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(axes.title)
      << "</text>\n";
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    s << "<path d=\"M" << num(x0) << ' ' << num(y1) << " V" << num(y0) << " H" << num(x1)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double v = y_.lo + (y_.hi - y_.lo) * i / 5.0;
      s << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << tick(v)
        << "</text>\n";
      s << "<line x1=\"" << num(x0) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(py(v))
        << "\" stroke=\"#e0e0e0\"/>\n";
    }
    if (x_ticks)
      for (int i = 0; i <= 5; ++i) {
        const double v = x_.lo + (x_.hi - x_.lo) * i / 5.0;
        s << "<text x=\"" << num(px(v)) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">" << tick(v)
          << "</text>\n";
      }
    s << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">"
      << escape(axes.x_label) << "</text>\n";
    s << "<text transform=\"translate(18 " << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(axes.y_label) << "</text>\n";
  }

  static void legend(std::ostringstream& s, int index, const std::string& label, const char* colour, bool dashed = false) {
    const double x = kWidth - kRight + 15, y = kTop + 10 + 18 * index;
    s << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20) << "\" y2=\"" << num(y)
      << "\" stroke=\"" << colour << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    s << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">" << escape(label) << "</text>\n";
  }

 private:
  static std::string tick(double v) {
    char buf[32];
    const double a = std::abs(v);
    std::snprintf(buf, sizeof buf, a != 0.0 && (a < 0.01 || a >= 1e5) ? "%.2e" : a < 10 ? "%.3g" : "%.0f", v);
    return std::string(buf) == "-0" ? "0" : buf;
  }

  Range x_, y_;
};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

}  // namespace

std::string line_chart(const std::vector<Series>& series, const Axes& axes) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double x : s.x) xr.add(x);
    for (double y : s.y) yr.add(y);
  }
  xr.finish(0.0);
  yr.finish();
  Frame f(xr, yr);
  std::ostringstream s;
  f.open(s, axes);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& ser = series[i];
    s << "<polyline fill=\"none\" stroke=\"" << colour(i) << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k)
      s << (k ? " " : "") << num(f.px(ser.x[k])) << ',' << num(f.py(ser.y[k]));
    s << "\"/>\n";
    Frame::legend(s, static_cast<int>(i), ser.label, colour(i));
  }
  s << "</svg>\n";
  return s.str();
}

std::string grouped_bars(const std::vector<std::string>& groups, const std::vector<std::string>& series,
                         const std::vector<std::vector<double>>& values, const Axes& axes) {
  Range xr;
  xr.lo = 0.0;
  xr.hi = static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  Range yr;
  yr.add(0.0);
  for (const auto& row : values)
    for (double v : row) yr.add(v);
  yr.finish();
  Frame f(xr, yr);
  std::ostringstream s;
  f.open(s, axes, false);
  const double slot = (f.px(1.0) - f.px(0.0));
  const double bar = 0.8 * slot / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    s << "<text x=\"" << num(f.px(g + 0.5)) << "\" y=\"" << num(kHeight - kBottom + 18) << "\" text-anchor=\"middle\">"
      << escape(groups[g]) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (k >= values.size() || g >= values[k].size() || !std::isfinite(values[k][g])) continue;
      const double v = values[k][g];
      const double x = f.px(static_cast<double>(g)) + 0.1 * slot + bar * static_cast<double>(k);
      const double top = std::min(f.py(v), f.py(0.0));
      const double h = std::abs(f.py(v) - f.py(0.0));
      s << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(bar) << "\" height=\"" << num(h)
        << "\" fill=\"" << colour(k) << "\"/>\n";
    }
  }
  for (std::size_t k = 0; k < series.size(); ++k) Frame::legend(s, static_cast<int>(k), series[k], colour(k));
  s << "</svg>\n";
  return s.str();
}

std::string temperature_trace(const std::vector<experiments::TraceRow>& rows, const std::string& title) {
  std::vector<std::string> zones;
  std::map<std::string, Series> by_zone;
  Series outdoor{"outdoor", {}, {}};
  struct Band {
    int from, to;
    double low, high;
  };
  std::vector<Band> bands;
  Range xr, yr;
  int last_step = -1;
  for (const auto& r : rows) {
    if (!by_zone.count(r.zone)) {
      zones.push_back(r.zone);
      by_zone[r.zone].label = r.zone;
    }
    auto& ser = by_zone[r.zone];
    ser.x.push_back(r.step);
    ser.y.push_back(r.zone_temp_c);
    xr.add(r.step);
    yr.add(r.zone_temp_c);
    yr.add(r.outdoor_c);
    yr.add(r.comfort_low);
    yr.add(r.comfort_high);
    if (r.step != last_step) {
      outdoor.x.push_back(r.step);
      outdoor.y.push_back(r.outdoor_c);
      if (!bands.empty() && bands.back().low == r.comfort_low && bands.back().high == r.comfort_high)
        bands.back().to = r.step;
      else
        bands.push_back({r.step, r.step, r.comfort_low, r.comfort_high});
      last_step = r.step;
    }
  }
  xr.finish(0.0);
  yr.finish();
  Frame f(xr, yr);
  std::ostringstream s;
  f.open(s, {title, "step", "temperature (degC)"});
  for (const auto& b : bands)
    for (double v : {b.low, b.high})
      s << "<line x1=\"" << num(f.px(b.from)) << "\" y1=\"" << num(f.py(v)) << "\" x2=\"" << num(f.px(b.to))
        << "\" y2=\"" << num(f.py(v)) << "\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  auto polyline = [&](const Series& ser, const char* c, double width) {
    s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"" << num(width) << "\" points=\"";
    for (std::size_t k = 0; k < ser.x.size(); ++k) s << (k ? " " : "") << num(f.px(ser.x[k])) << ',' << num(f.py(ser.y[k]));
    s << "\"/>\n";
  };
  polyline(outdoor, "#999999", 1.0);
  Frame::legend(s, 0, "outdoor", "#999999");
  for (std::size_t i = 0; i < zones.size(); ++i) {
    polyline(by_zone[zones[i]], colour(i), 1.5);
    Frame::legend(s, static_cast<int>(i + 1), zones[i], colour(i));
  }
  Frame::legend(s, static_cast<int>(zones.size() + 1), "comfort", "black", true);
  s << "</svg>\n";
  return s.str();
}

// --- CSV input ---------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string(), "file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size())
      throw ConfigError(path.string(), "row " + std::to_string(t.rows.size() + 2) + " has " +
                                           std::to_string(fields.size()) + " fields, header has " +
                                           std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.rows.empty()) throw ConfigError(path.string(), "no data rows");
  return t;
}

void expect_header(const Table& t, const std::vector<std::string>& prefix, const std::filesystem::path& path) {
  if (t.header.size() < prefix.size() || !std::equal(prefix.begin(), prefix.end(), t.header.begin()))
    throw ConfigError(path.string(), "unexpected header");
}

double to_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(path.string(), "non-numeric field '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::filesystem::path& path) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(path.string(), "non-integer field '" + s + "'");
  return v;
}

const std::vector<std::string> kMetricsHeader = {"run_id", "phase", "episode", "mean_reward",
                                                 "mean_power_w", "comfort_violation_pct", "mean_violation_degc"};
const std::vector<std::string> kTraceHeader = {"step", "datetime", "outdoor_c", "zone", "zone_temp_c",
                                               "heating_sp", "cooling_sp", "power_w", "reward"};
const std::vector<std::string> kCrossHeader = {"train_climate", "eval_climate", "mean_reward", "sd_reward"};

}  // namespace

MetricsFile read_metrics_csv(const std::filesystem::path& path) {
  const auto t = read_table(path);
  expect_header(t, kMetricsHeader, path);
  MetricsFile m;
  m.run_id = t.rows.front()[0];
  for (const auto& r : t.rows)
    m.rows.push_back({r[1], to_int(r[2], path),
                      {to_double(r[3], path), to_double(r[4], path), to_double(r[5], path), to_double(r[6], path), 0}});
  return m;
}

std::vector<experiments::TraceRow> read_trace_csv(const std::filesystem::path& path) {
  const auto t = read_table(path);
  expect_header(t, kTraceHeader, path);
  const bool bounds = t.header.size() >= 11;
  std::vector<experiments::TraceRow> rows;
  for (const auto& r : t.rows) {
    experiments::TraceRow row;
    row.step = to_int(r[0], path);
    try {
      row.time = Timestamp::parse(r[1]);
    } catch (const std::exception&) {
      throw ConfigError(path.string(), "bad datetime '" + r[1] + "'");
    }
    row.outdoor_c = to_double(r[2], path);
    row.zone = r[3];
    row.zone_temp_c = to_double(r[4], path);
    row.heating_sp = to_double(r[5], path);
    row.cooling_sp = to_double(r[6], path);
    row.power_w = to_double(r[7], path);
    row.reward = to_double(r[8], path);
    if (bounds) {
      row.comfort_low = to_double(r[9], path);
      row.comfort_high = to_double(r[10], path);
    } else {
      // older traces: infer the office schedule from the date
      const auto range = env::comfort_range_for(row.time, building::Preset::five_zone);
      row.comfort_low = range.low;
      row.comfort_high = range.high;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CrossEvalRow> read_crosseval_csv(const std::filesystem::path& path) {
  const auto t = read_table(path);
  expect_header(t, kCrossHeader, path);
  std::vector<CrossEvalRow> rows;
  for (const auto& r : t.rows) rows.push_back({r[0], r[1], to_double(r[2], path), to_double(r[3], path)});
  return rows;
}

Kind detect_kind(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ConfigError(path.string(), "file is empty");
  if (line.rfind("run_id,phase,", 0) == 0) return Kind::rewards;
  if (line.rfind("train_climate,eval_climate,", 0) == 0) return Kind::crosseval;
  if (line.rfind("step,datetime,", 0) == 0) return Kind::trace;
  throw ConfigError(path.string(), "unrecognised CSV header");
}

std::string rewards_chart(const MetricsFile& metrics) {
  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (const auto& r : metrics.rows) {
    auto [it, fresh] = index.emplace(r.phase, series.size());
    if (fresh) series.push_back({r.phase, {}, {}});
    series[it->second].x.push_back(r.episode);
    series[it->second].y.push_back(r.metrics.mean_reward);
  }
  return line_chart(series, {"Mean reward per episode (" + metrics.run_id + ")", "episode", "mean reward"});
}

std::string crosseval_chart(const std::vector<CrossEvalRow>& rows) {
  std::vector<std::string> groups, series;
  auto slot = [](std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    if (it != v.end()) return static_cast<std::size_t>(it - v.begin());
    v.push_back(s);
    return v.size() - 1;
  };
  for (const auto& r : rows) {
    slot(groups, r.eval_climate);
    slot(series, r.train_climate);
  }
  std::vector<std::vector<double>> values(series.size(), std::vector<double>(groups.size(), std::nan("")));
  for (const auto& r : rows) values[slot(series, r.train_climate)][slot(groups, r.eval_climate)] = r.mean_reward;
  for (auto& s : series) s = "trained " + s;
  return grouped_bars(groups, series, values, {"Mean evaluation reward by climate", "evaluation climate", "mean reward"});
}

std::string render(const std::filesystem::path& input) {
  switch (detect_kind(input)) {
    case Kind::rewards: return rewards_chart(read_metrics_csv(input));
    case Kind::crosseval: return crosseval_chart(read_crosseval_csv(input));
    case Kind::trace: return temperature_trace(read_trace_csv(input), "Zone temperatures");
  }
  throw ConfigError(input.string(), "unsupported input");
}

}  // namespace thermoarena::plot
