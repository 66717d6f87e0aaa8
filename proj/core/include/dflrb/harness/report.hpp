#pragma once

#include <string>
#include <vector>

#include "dflrb/harness/sweep.hpp"

namespace dflrb::harness {

struct SummaryRow {
  std::string problem;
  std::string method;
  std::string attack;
  double epsilon = 0.0;
  std::string metric;
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  int trials = 0;
};

// Mean and quartiles over trials per (problem, method, attack, epsilon,
// metric), in first-appearance order. Quartiles interpolate linearly between
// order statistics (the common "type 7" rule).
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

// Spearman rank correlation with average ranks for ties. Inputs must have
// equal size >= 2; returns 0 when either side is constant.
double spearman_correlation(const std::vector<double>& a,
                            const std::vector<double>& b);

struct RankCorrelationRow {
  std::string problem;
  std::string attack;
  double epsilon = 0.0;
  std::string metric;  // the regret metric the correlation is computed on
  double spearman = 0.0;
  int n_methods = 0;
};

// For each attack and epsilon > 0: Spearman correlation across methods
// between the clean (epsilon = 0) regret metric and its degradation (mean at
// epsilon minus clean mean). Uses rre where present, abs_re otherwise.
std::vector<RankCorrelationRow> rank_correlations(
    const std::vector<ResultRow>& rows);

void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path);
std::vector<ResultRow> read_results_csv(const std::string& path);
void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path);
// Line-plot data: problem,metric,attack,method,epsilon,value (trial mean).
void write_lineplot_csv(const std::vector<SummaryRow>& rows,
                        const std::string& path);
void write_rank_correlation_csv(const std::vector<RankCorrelationRow>& rows,
                                const std::string& path);
void write_failures_csv(const std::vector<CellFailure>& failures,
                        const std::string& path);

// Static mean-vs-epsilon line plot for one (problem, metric, attack), one
// polyline per method.
void write_svg_lineplot(const std::vector<SummaryRow>& rows,
                        const std::string& problem, const std::string& metric,
                        const std::string& attack, const std::string& path);

// Writes results.csv, summary.csv, lineplot.csv, rank_correlation.csv, and
// failures.csv (only when non-empty) under out_dir; with_svg additionally
// renders lineplot_<metric>_<attack>.svg for the headline regret metric.
void write_all_reports(const ExperimentResult& result,
                       const std::string& out_dir, bool with_svg);

}  // namespace dflrb::harness
