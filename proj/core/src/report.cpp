#include "dflrb/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "csv_fmt.hpp"
#include "dflrb/errors.hpp"

namespace dflrb::harness {
namespace {

std::ofstream open_out(const std::string& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw ConfigError(std::string(what) + ": cannot open " + path);
  return out;
}

void check_written(const std::ofstream& out, const char* what) {
  if (!out) throw ConfigError(std::string(what) + ": write failed");
}

// Minimal CSV quoting for free-text fields (error messages).
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

// Linear interpolation between order statistics at position (n-1)q.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = static_cast<double>(n - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return v[a] < v[b] || (v[a] == v[b] && a < b);
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (const ResultRow& row : rows) {
    const std::string key = row.problem + '\x1f' + row.method + '\x1f' +
                            row.attack + '\x1f' + format_double(row.epsilon) +
                            '\x1f' + row.metric;
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      out.push_back({row.problem, row.method, row.attack, row.epsilon,
                     row.metric, 0, 0, 0, 0, 0});
      values.emplace_back();
    }
    values[it->second].push_back(row.value);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> v = values[g];
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    out[g].trials = static_cast<int>(v.size());
    out[g].mean = sum / static_cast<double>(v.size());
    out[g].q1 = quantile_sorted(v, 0.25);
    out[g].median = quantile_sorted(v, 0.5);
    out[g].q3 = quantile_sorted(v, 0.75);
  }
  return out;
}

double spearman_correlation(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ConfigError("spearman_correlation: need two equal-length series");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

std::vector<RankCorrelationRow> rank_correlations(
    const std::vector<ResultRow>& rows) {
  const std::vector<SummaryRow> summary = summarize(rows);

  // The regret metric per problem: rre where emitted, abs_re otherwise.
  std::map<std::string, std::string> metric_for;
  for (const SummaryRow& s : summary)
    if (s.metric == "rre") metric_for[s.problem] = "rre";
  for (const SummaryRow& s : summary)
    if (s.metric == "abs_re" && metric_for.count(s.problem) == 0)
      metric_for[s.problem] = "abs_re";

  // Clean baseline per (problem, method): the epsilon = 0 mean (identical
  // across attacks by construction; first row wins).
  std::map<std::string, double> clean;
  for (const SummaryRow& s : summary) {
    auto it = metric_for.find(s.problem);
    if (it == metric_for.end() || s.metric != it->second || s.epsilon != 0.0)
      continue;
    clean.emplace(s.problem + '\x1f' + s.method, s.mean);
  }

  std::vector<RankCorrelationRow> out;
  std::vector<std::string> seen;
  for (const SummaryRow& anchor : summary) {
    const auto mit = metric_for.find(anchor.problem);
    if (mit == metric_for.end() || anchor.metric != mit->second ||
        anchor.epsilon == 0.0)
      continue;
    const std::string group_key = anchor.problem + '\x1f' + anchor.attack +
                                  '\x1f' + format_double(anchor.epsilon);
    if (std::find(seen.begin(), seen.end(), group_key) != seen.end()) continue;
    seen.push_back(group_key);

    std::vector<double> clean_v, degradation_v;
    for (const SummaryRow& s : summary) {
      if (s.problem != anchor.problem || s.attack != anchor.attack ||
          s.epsilon != anchor.epsilon || s.metric != mit->second)
        continue;
      const auto cit = clean.find(s.problem + '\x1f' + s.method);
      if (cit == clean.end()) continue;
      clean_v.push_back(cit->second);
      degradation_v.push_back(s.mean - cit->second);
    }
    if (clean_v.size() < 2) continue;
    out.push_back({anchor.problem, anchor.attack, anchor.epsilon, mit->second,
                   spearman_correlation(clean_v, degradation_v),
                   static_cast<int>(clean_v.size())});
  }
  return out;
}

void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path) {
  std::ofstream out = open_out(path, "write_results_csv");
  out << "problem,method,attack,epsilon,trial,metric,value\n";
  for (const ResultRow& r : rows)
    out << r.problem << ',' << r.method << ',' << r.attack << ','
        << format_double(r.epsilon) << ',' << r.trial << ',' << r.metric << ','
        << format_double(r.value) << '\n';
  check_written(out, "write_results_csv");
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_results_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "problem,method,attack,epsilon,trial,metric,value")
    throw ConfigError("read_results_csv: " + path + " has an unexpected header");
  std::vector<ResultRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 7)
      throw ConfigError("read_results_csv: " + path + " line " +
                        std::to_string(line_no) + ": expected 7 columns");
    try {
      rows.push_back({cells[0], cells[1], cells[2], std::stod(cells[3]),
                      std::stoi(cells[4]), cells[5], std::stod(cells[6])});
    } catch (const std::exception&) {
      throw ConfigError("read_results_csv: " + path + " line " +
                        std::to_string(line_no) + ": bad numeric field");
    }
  }
  return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path) {
  std::ofstream out = open_out(path, "write_summary_csv");
  out << "problem,method,attack,epsilon,metric,mean,q1,median,q3,trials\n";
  for (const SummaryRow& s : rows)
    out << s.problem << ',' << s.method << ',' << s.attack << ','
        << format_double(s.epsilon) << ',' << s.metric << ','
        << format_double(s.mean) << ',' << format_double(s.q1) << ','
        << format_double(s.median) << ',' << format_double(s.q3) << ','
        << s.trials << '\n';
  check_written(out, "write_summary_csv");
}

void write_lineplot_csv(const std::vector<SummaryRow>& rows,
                        const std::string& path) {
  std::ofstream out = open_out(path, "write_lineplot_csv");
  out << "problem,metric,attack,method,epsilon,value\n";
  for (const SummaryRow& s : rows)
    out << s.problem << ',' << s.metric << ',' << s.attack << ',' << s.method
        << ',' << format_double(s.epsilon) << ',' << format_double(s.mean)
        << '\n';
  check_written(out, "write_lineplot_csv");
}

void write_rank_correlation_csv(const std::vector<RankCorrelationRow>& rows,
                                const std::string& path) {
  std::ofstream out = open_out(path, "write_rank_correlation_csv");
  out << "problem,attack,epsilon,metric,spearman,n_methods\n";
  for (const RankCorrelationRow& r : rows)
    out << r.problem << ',' << r.attack << ',' << format_double(r.epsilon)
        << ',' << r.metric << ',' << format_double(r.spearman) << ','
        << r.n_methods << '\n';
  check_written(out, "write_rank_correlation_csv");
}

void write_failures_csv(const std::vector<CellFailure>& failures,
                        const std::string& path) {
  std::ofstream out = open_out(path, "write_failures_csv");
  out << "method,stage,attack,epsilon,trial,instance,error\n";
  for (const CellFailure& f : failures)
    out << f.method << ',' << f.stage << ',' << f.attack << ','
        << format_double(f.epsilon) << ',' << f.trial << ',' << f.instance
        << ',' << csv_quote(f.error) << '\n';
  check_written(out, "write_failures_csv");
}

void write_svg_lineplot(const std::vector<SummaryRow>& rows,
                        const std::string& problem, const std::string& metric,
                        const std::string& attack, const std::string& path) {
  struct Series {
    std::string method;
    std::vector<std::pair<double, double>> points;  // (epsilon, mean)
  };
  std::vector<Series> series;
  double x_max = 0.0, y_max = 0.0;
  for (const SummaryRow& s : rows) {
    if (s.problem != problem || s.metric != metric || s.attack != attack)
      continue;
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& sr) { return sr.method == s.method; });
    if (it == series.end()) {
      series.push_back({s.method, {}});
      it = series.end() - 1;
    }
    it->points.emplace_back(s.epsilon, s.mean);
    x_max = std::max(x_max, s.epsilon);
    y_max = std::max(y_max, s.mean);
  }
  if (series.empty())
    throw ConfigError("write_svg_lineplot: no rows for " + problem + "/" +
                      metric + "/" + attack);
  for (Series& sr : series) std::sort(sr.points.begin(), sr.points.end());
  if (x_max <= 0.0) x_max = 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
  constexpr int kColors = 10;
  const double left = 70, right = 180, top = 40, bottom = 50;
  const double pw = 420, ph = 320;
  const double width = left + pw + right, height = top + ph + bottom;
  auto sx = [&](double x) { return left + x / x_max * pw; };
  auto sy = [&](double y) { return top + ph - y / y_max * ph; };

  std::ofstream out = open_out(path, "write_svg_lineplot");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"20\" text-anchor=\"middle\""
      << " font-size=\"14\">" << problem << " " << metric << " (" << attack
      << " attack)</text>\n";
  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\""
      << left + pw << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  // x ticks at observed epsilons
  std::vector<double> xticks;
  for (const auto& pt : series[0].points) xticks.push_back(pt.first);
  for (double x : xticks) {
    out << "<line x1=\"" << sx(x) << "\" y1=\"" << top + ph << "\" x2=\""
        << sx(x) << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(x)
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph + 38
      << "\" text-anchor=\"middle\" font-size=\"12\">epsilon</text>\n";
  // y ticks
  for (int t = 0; t <= 4; ++t) {
    const double y = y_max * t / 4.0;
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(y) << "\" x2=\""
        << left << "\" y2=\"" << sy(y) << "\" stroke=\"black\"/>\n";
    std::ostringstream lbl;
    lbl.precision(3);
    lbl << y;
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(y) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << lbl.str()
        << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kColors];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points)
      out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : series[s].points)
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = top + 14 + 16 * static_cast<double>(s);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4
        << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly
        << "\" font-size=\"11\">" << series[s].method << "</text>\n";
  }
  out << "</svg>\n";
  check_written(out, "write_svg_lineplot");
}

void write_all_reports(const ExperimentResult& result,
                       const std::string& out_dir, bool with_svg) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_results_csv(result.rows, (dir / "results.csv").string());
  const std::vector<SummaryRow> summary = summarize(result.rows);
  write_summary_csv(summary, (dir / "summary.csv").string());
  write_lineplot_csv(summary, (dir / "lineplot.csv").string());
  write_rank_correlation_csv(rank_correlations(result.rows),
                             (dir / "rank_correlation.csv").string());
  if (!result.report.failures.empty())
    write_failures_csv(result.report.failures, (dir / "failures.csv").string());
  if (with_svg) {
    std::string metric = "abs_re";
    for (const SummaryRow& s : summary)
      if (s.metric == "rre") {
        metric = "rre";
        break;
      }
    std::vector<std::string> attacks_seen;
    for (const SummaryRow& s : summary)
      if (std::find(attacks_seen.begin(), attacks_seen.end(), s.attack) ==
          attacks_seen.end())
        attacks_seen.push_back(s.attack);
    for (const std::string& attack : attacks_seen)
      write_svg_lineplot(
          summary, result.problem_name, metric, attack,
          (dir / ("lineplot_" + metric + "_" + attack + ".svg")).string());
  }
}

}  // namespace dflrb::harness
