#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "dflrb/harness/report.hpp"

using namespace dflrb;
using namespace dflrb::harness;

namespace fs = std::filesystem;

namespace {

ResultRow row(const std::string& problem, const std::string& method,
              const std::string& attack, double eps, int trial,
              const std::string& metric, double value) {
  return {problem, method, attack, eps, trial, metric, value};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

bool rows_equal(const std::vector<ResultRow>& a,
                const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].problem != b[i].problem || a[i].method != b[i].method ||
        a[i].attack != b[i].attack || a[i].epsilon != b[i].epsilon ||
        a[i].trial != b[i].trial || a[i].metric != b[i].metric ||
        a[i].value != b[i].value)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("summarize: type-7 quartiles over trials") {
  std::vector<ResultRow> rows;
  // One group, four trials, values deliberately unsorted.
  rows.push_back(row("p", "m", "pf", 0.1, 0, "abs_re", 4.0));
  rows.push_back(row("p", "m", "pf", 0.1, 1, "abs_re", 1.0));
  rows.push_back(row("p", "m", "pf", 0.1, 2, "abs_re", 3.0));
  rows.push_back(row("p", "m", "pf", 0.1, 3, "abs_re", 2.0));
  const std::vector<SummaryRow> s = summarize(rows);
  REQUIRE(s.size() == 1);
  CHECK(s[0].problem == "p");
  CHECK(s[0].method == "m");
  CHECK(s[0].attack == "pf");
  CHECK(s[0].epsilon == 0.1);
  CHECK(s[0].metric == "abs_re");
  CHECK(s[0].trials == 4);
  CHECK(s[0].mean == 2.5);
  CHECK(s[0].q1 == 1.75);
  CHECK(s[0].median == 2.5);
  CHECK(s[0].q3 == 3.25);

  // Degenerate sizes: one value collapses everything, two interpolate.
  const std::vector<SummaryRow> one =
      summarize({row("p", "m", "pf", 0.0, 0, "fe", 7.5)});
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean == 7.5);
  CHECK(one[0].q1 == 7.5);
  CHECK(one[0].median == 7.5);
  CHECK(one[0].q3 == 7.5);

  const std::vector<SummaryRow> two = summarize(
      {row("p", "m", "pf", 0.0, 0, "fe", 5.0), row("p", "m", "pf", 0.0, 1, "fe", 3.0)});
  REQUIRE(two.size() == 1);
  CHECK(two[0].mean == 4.0);
  CHECK(two[0].q1 == 3.5);
  CHECK(two[0].median == 4.0);
  CHECK(two[0].q3 == 4.5);
}

TEST_CASE("summarize: groups form in first-appearance order") {
  std::vector<ResultRow> rows;
  rows.push_back(row("p", "m2", "pf", 0.0, 0, "abs_re", 1.0));
  rows.push_back(row("p", "m1", "pf", 0.0, 0, "abs_re", 2.0));
  rows.push_back(row("p", "m2", "df", 0.0, 0, "abs_re", 5.0));
  rows.push_back(row("p", "m2", "pf", 0.1, 0, "abs_re", 6.0));
  rows.push_back(row("p", "m2", "pf", 0.0, 1, "abs_re", 3.0));  // joins group 0
  const std::vector<SummaryRow> s = summarize(rows);
  REQUIRE(s.size() == 4);
  CHECK(s[0].method == "m2");
  CHECK(s[0].attack == "pf");
  CHECK(s[0].epsilon == 0.0);
  CHECK(s[0].trials == 2);
  CHECK(s[0].mean == 2.0);
  CHECK(s[1].method == "m1");
  CHECK(s[2].attack == "df");
  CHECK(s[3].epsilon == 0.1);
}

TEST_CASE("spearman: monotone, ties, constants, input guards") {
  CHECK(spearman_correlation({1.0, 2.0, 3.0, 4.0}, {10.0, 20.0, 30.0, 40.0}) ==
        1.0);
  CHECK(spearman_correlation({1.0, 2.0, 3.0, 4.0}, {8.0, 6.0, 4.0, 2.0}) ==
        -1.0);
  // Rank correlation only cares about order, not scale.
  CHECK(spearman_correlation({1.0, 10.0, 100.0}, {0.1, 0.2, 0.3}) == 1.0);
  // Ties get average ranks: a = [1,1,2] has ranks [1.5,1.5,3].
  CHECK(spearman_correlation({1.0, 1.0, 2.0}, {1.0, 2.0, 3.0}) ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(spearman_correlation({5.0, 5.0, 5.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(spearman_correlation({1.0, 2.0}, {4.0, 4.0}) == 0.0);
  CHECK_THROWS_AS(spearman_correlation({1.0}, {2.0}), ConfigError);
  CHECK_THROWS_AS(spearman_correlation({1.0, 2.0}, {1.0, 2.0, 3.0}),
                  ConfigError);
}

TEST_CASE("rank correlations: clean regret versus degradation") {
  std::vector<ResultRow> rows;
  // Problem p reports rre, so abs_re must be ignored for it. Degradation
  // (mean at epsilon minus clean mean) is ordered exactly like the clean
  // regret, so the correlation is +1.
  const std::vector<std::string> methods = {"m1", "m2", "m3", "m4"};
  const std::vector<double> clean = {0.1, 0.2, 0.3, 0.4};
  const std::vector<double> attacked = {0.15, 0.35, 0.55, 0.75};
  for (std::size_t m = 0; m < methods.size(); ++m) {
    rows.push_back(row("p", methods[m], "pf", 0.0, 0, "rre", clean[m]));
    rows.push_back(row("p", methods[m], "pf", 0.1, 0, "rre", attacked[m]));
    rows.push_back(row("p", methods[m], "pf", 0.0, 0, "abs_re", 9.0));
    rows.push_back(row("p", methods[m], "pf", 0.1, 0, "abs_re", 9.0 - 0.1 * m));
  }
  // Problem q has no rre rows: falls back to abs_re. Its degradation order
  // is reversed, so the correlation is -1. Method d has no clean baseline
  // and is left out of the group.
  rows.push_back(row("q", "a", "pf", 0.0, 0, "abs_re", 1.0));
  rows.push_back(row("q", "b", "pf", 0.0, 0, "abs_re", 2.0));
  rows.push_back(row("q", "c", "pf", 0.0, 0, "abs_re", 3.0));
  rows.push_back(row("q", "a", "pf", 0.05, 0, "abs_re", 4.0));
  rows.push_back(row("q", "b", "pf", 0.05, 0, "abs_re", 3.5));
  rows.push_back(row("q", "c", "pf", 0.05, 0, "abs_re", 3.0));
  rows.push_back(row("q", "d", "pf", 0.05, 0, "abs_re", 9.0));
  // Problem r has a single method: too small for a correlation.
  rows.push_back(row("r", "solo", "pf", 0.0, 0, "rre", 1.0));
  rows.push_back(row("r", "solo", "pf", 0.1, 0, "rre", 2.0));

  const std::vector<RankCorrelationRow> out = rank_correlations(rows);
  REQUIRE(out.size() == 2);
  CHECK(out[0].problem == "p");
  CHECK(out[0].attack == "pf");
  CHECK(out[0].epsilon == 0.1);
  CHECK(out[0].metric == "rre");
  CHECK(out[0].spearman == 1.0);
  CHECK(out[0].n_methods == 4);
  CHECK(out[1].problem == "q");
  CHECK(out[1].epsilon == 0.05);
  CHECK(out[1].metric == "abs_re");
  CHECK(out[1].spearman == -1.0);
  CHECK(out[1].n_methods == 3);
}

TEST_CASE("results csv: lossless round trip and parse errors") {
  const std::vector<ResultRow> rows = {
      row("knapsack-60", "spo", "pf", 0.1, 0, "abs_re", 1.0 / 3.0),
      row("knapsack-60", "spo", "df", 0.0, 7, "rre", 1e-17),
      row("p", "m", "pf", 0.15, 2, "fe", -2.5),
      row("p", "m", "pf", 0.15, 3, "mse_fooled_frac", 0.0),
  };
  const std::string path = "report_roundtrip.csv";
  write_results_csv(rows, path);
  CHECK(rows_equal(read_results_csv(path), rows));
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_results_csv("no_such_results.csv"), ConfigError);
  auto write_text = [&](const std::string& text) {
    std::ofstream f(path);
    f << text;
  };
  write_text("problem,method\n");
  CHECK_THROWS_AS(read_results_csv(path), ConfigError);
  write_text("problem,method,attack,epsilon,trial,metric,value\na,b,c\n");
  CHECK_THROWS_AS(read_results_csv(path), ConfigError);
  write_text("problem,method,attack,epsilon,trial,metric,value\n"
             "p,m,pf,zero,0,abs_re,1\n");
  CHECK_THROWS_AS(read_results_csv(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("summary, lineplot and rank correlation csv formats") {
  const SummaryRow s{"p", "m", "pf", 0.1, "abs_re", 2.5, 1.75, 2.5, 3.25, 4};
  const std::string path = "report_fmt.csv";

  write_summary_csv({s}, path);
  std::vector<std::string> lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "problem,method,attack,epsilon,metric,mean,q1,median,q3,trials");
  CHECK(lines[1] == "p,m,pf,0.1,abs_re,2.5,1.75,2.5,3.25,4");

  write_lineplot_csv({s}, path);
  lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "problem,metric,attack,method,epsilon,value");
  CHECK(lines[1] == "p,abs_re,pf,m,0.1,2.5");

  write_rank_correlation_csv({{"p", "pf", 0.1, "rre", -0.5, 8}}, path);
  lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "problem,attack,epsilon,metric,spearman,n_methods");
  CHECK(lines[1] == "p,pf,0.1,rre,-0.5,8");
  std::remove(path.c_str());
}

TEST_CASE("failures csv: quotes free-text error messages") {
  const std::string path = "report_failures.csv";
  std::vector<CellFailure> failures;
  failures.push_back({"map", "train", "", -1.0, 0, -1, "diverged, badly"});
  failures.push_back({"spo", "abs_re", "pf", 0.1, 2, -1, "plain"});
  write_failures_csv(failures, path);
  const std::vector<std::string> lines = lines_of(slurp(path));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "method,stage,attack,epsilon,trial,instance,error");
  CHECK(lines[1] == "map,train,,-1,0,-1,\"diverged, badly\"");
  CHECK(lines[2] == "spo,abs_re,pf,0.1,2,-1,plain");
  std::remove(path.c_str());
}

TEST_CASE("svg lineplot: one polyline per method") {
  std::vector<ResultRow> rows;
  for (int t = 0; t < 2; ++t)
    for (const char* m : {"spo", "dbb"})
      for (double eps : {0.0, 0.05, 0.1})
        rows.push_back(row("p", m, "pf", eps, t, "abs_re", eps * 10 + t));
  const std::vector<SummaryRow> summary = summarize(rows);
  const std::string path = "report_plot.svg";
  write_svg_lineplot(summary, "p", "abs_re", "pf", path);
  const std::string svg = slurp(path);
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_of(svg, "<polyline") == 2);
  CHECK(svg.find(">spo</text>") != std::string::npos);
  CHECK(svg.find(">dbb</text>") != std::string::npos);
  CHECK(svg.find("epsilon") != std::string::npos);
  std::remove(path.c_str());

  CHECK_THROWS_AS(write_svg_lineplot(summary, "p", "rre", "pf", path),
                  ConfigError);
}

TEST_CASE("write_all_reports: full bundle, failures only when present") {
  ExperimentResult result;
  result.problem_name = "p";
  for (int t = 0; t < 2; ++t)
    for (const char* m : {"spo", "dbb"})
      for (double eps : {0.0, 0.1})
        for (const char* metric : {"abs_re", "rre"})
          result.rows.push_back(
              row("p", m, "pf", eps, t, metric, eps + (m[0] == 's' ? 0.1 : 0.3)));

  const fs::path clean_dir = "report_out_clean";
  write_all_reports(result, clean_dir.string(), true);
  CHECK(fs::exists(clean_dir / "results.csv"));
  CHECK(fs::exists(clean_dir / "summary.csv"));
  CHECK(fs::exists(clean_dir / "lineplot.csv"));
  CHECK(fs::exists(clean_dir / "rank_correlation.csv"));
  CHECK(!fs::exists(clean_dir / "failures.csv"));
  CHECK(fs::exists(clean_dir / "lineplot_rre_pf.svg"));
  CHECK(rows_equal(read_results_csv((clean_dir / "results.csv").string()),
                   result.rows));

  result.report.failures.push_back(
      {"spo", "train", "", -1.0, 1, -1, "diverged"});
  const fs::path failed_dir = "report_out_failed";
  write_all_reports(result, failed_dir.string(), false);
  CHECK(fs::exists(failed_dir / "failures.csv"));
  CHECK(!fs::exists(failed_dir / "lineplot_rre_pf.svg"));

  fs::remove_all(clean_dir);
  fs::remove_all(failed_dir);
}
