#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "thermoarena/experiments.hpp"

namespace thermoarena::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Line chart, one polyline per series.
std::string line_chart(const std::vector<Series>& series, const Axes& axes);

/// values[s][g]: bar for series s within group g.
std::string grouped_bars(const std::vector<std::string>& groups, const std::vector<std::string>& series,
                         const std::vector<std::vector<double>>& values, const Axes& axes);

/// Zone temperatures over time with the comfort bounds as dashed horizontal rules.
std::string temperature_trace(const std::vector<experiments::TraceRow>& rows, const std::string& title);

// --- inputs ----------------------------------------------------------------

struct CrossEvalRow {
  std::string train_climate;
  std::string eval_climate;
  double mean_reward = 0.0;
  double sd_reward = 0.0;
};

struct MetricsFile {
  std::string run_id;
  std::vector<experiments::LogRow> rows;
};

/// Readers throw ConfigError naming the file on missing, empty or malformed input.
MetricsFile read_metrics_csv(const std::filesystem::path& path);
std::vector<experiments::TraceRow> read_trace_csv(const std::filesystem::path& path);
std::vector<CrossEvalRow> read_crosseval_csv(const std::filesystem::path& path);

enum class Kind { rewards, crosseval, trace };

/// Picks the chart type from the CSV header.
Kind detect_kind(const std::filesystem::path& path);

/// Reward curves per training phase (evaluation rows drawn as separate series).
std::string rewards_chart(const MetricsFile& metrics);
std::string crosseval_chart(const std::vector<CrossEvalRow>& rows);

/// Reads `input` and renders the matching chart.
std::string render(const std::filesystem::path& input);

}  // namespace thermoarena::plot
