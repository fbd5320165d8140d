#include "gem/harness.hpp"

#include "gem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gem {

namespace {

using nlohmann::json;

constexpr std::array<Solution, 4> kCanonicalOrder = {Solution::AdChat, Solution::GiR,
                                                     Solution::GirR, Solution::GirP};
constexpr const char* kAbsentCell = "—";  // matches the omitted-CTR rendering

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fmt2(*v) : kAbsentCell; }

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::optional<double> mean_defined(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

const SolutionSummary* find_summary(const RunSnapshot& snapshot, Solution solution) {
  for (const auto& s : snapshot.summaries) {
    if (s.solution == solution) return &s;
  }
  return nullptr;
}

}  // namespace

BenchReport aggregate(const std::vector<RunSnapshot>& snapshots) {
  if (snapshots.empty()) throw PreconditionError("aggregate: no snapshots");

  BenchReport report;
  report.dataset_name = snapshots.front().dataset_name;
  report.snapshot_count = static_cast<int>(snapshots.size());
  // union of judge models in first-appearance order: a re-judged snapshot
  // contributes its extra judge column with means over the snapshots that
  // carry it
  for (const auto& snap : snapshots) {
    for (const auto& j : snap.judges) {
      if (std::find(report.judges.begin(), report.judges.end(), j) == report.judges.end()) {
        report.judges.push_back(j);
      }
    }
  }
  report.primary_judge = report.judges.empty() ? std::string() : report.judges.front();

  for (auto solution : kCanonicalOrder) {
    std::vector<const SolutionSummary*> present;
    for (const auto& snap : snapshots) {
      if (const auto* s = find_summary(snap, solution)) present.push_back(s);
    }
    if (present.empty()) continue;

    auto cell_mean = [&](auto getter) {
      std::vector<std::optional<double>> values;
      for (const auto* s : present) values.push_back(getter(*s));
      return mean_defined(values);
    };

    BenchReport::QuantRow qrow;
    qrow.solution = solution;
    qrow.scores.response_flow =
        cell_mean([](const SolutionSummary& s) { return s.quant.response_flow; });
    qrow.scores.response_coherence =
        cell_mean([](const SolutionSummary& s) { return s.quant.response_coherence; });
    qrow.scores.ad_flow = cell_mean([](const SolutionSummary& s) { return s.quant.ad_flow; });
    qrow.scores.ad_coherence =
        cell_mean([](const SolutionSummary& s) { return s.quant.ad_coherence; });
    qrow.scores.injection_rate =
        cell_mean([](const SolutionSummary& s) { return s.quant.injection_rate; });
    qrow.scores.ctr = cell_mean([](const SolutionSummary& s) { return s.quant.ctr; });
    // a solution whose queries all failed has no defined metric; keep the row
    // so the exclusions section explains it
    try {
      qrow.overall = quantitative_overall(qrow.scores);
    } catch (const PreconditionError&) {
      qrow.overall = 0.0;
    }
    report.quantitative.push_back(qrow);

    BenchReport::QualRow lrow;
    lrow.solution = solution;
    std::vector<double> defined;
    for (std::size_t m = 0; m < kAllJudgeMetrics.size(); ++m) {
      lrow.metrics[m] = cell_mean([&](const SolutionSummary& s) -> std::optional<double> {
        auto it = s.qual_by_judge.find(report.primary_judge);
        if (it == s.qual_by_judge.end()) return std::nullopt;
        return it->second[m];
      });
      if (lrow.metrics[m]) defined.push_back(*lrow.metrics[m]);
    }
    lrow.overall = defined.empty() ? 0.0 : qualitative_overall(defined);
    report.qualitative.push_back(lrow);

    BenchReport::JudgeRow jrow;
    jrow.solution = solution;
    for (const auto& judge_model : report.judges) {
      std::array<std::optional<double>, 6> cells;
      std::vector<double> judge_defined;
      for (std::size_t m = 0; m < kAllJudgeMetrics.size(); ++m) {
        cells[m] = cell_mean([&](const SolutionSummary& s) -> std::optional<double> {
          auto it = s.qual_by_judge.find(judge_model);
          if (it == s.qual_by_judge.end()) return std::nullopt;
          return it->second[m];
        });
        if (cells[m]) judge_defined.push_back(*cells[m]);
      }
      jrow.overall_by_judge.push_back(
          judge_defined.empty() ? std::nullopt
                                : std::optional<double>(qualitative_overall(judge_defined)));
    }
    report.multi_judge.push_back(std::move(jrow));

    BenchReport::CostRow crow;
    crow.solution = solution;
    auto mi = cell_mean([](const SolutionSummary& s) { return s.mean_ittft; });
    auto mo = cell_mean([](const SolutionSummary& s) { return s.mean_ottft; });
    crow.cost = make_cost_report(mi.value_or(0.0), mo.value_or(0.0));
    report.cost.push_back(crow);

    BenchReport::ExclusionRow erow;
    erow.solution = solution;
    for (const auto* s : present) {
      erow.excluded += s->excluded;
      erow.total += s->total;
      erow.unparseable_verdicts += s->unparseable_verdicts;
    }
    report.exclusions.push_back(erow);
  }
  return report;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown") return ReportFormat::markdown;
  if (s == "json") return ReportFormat::json;
  throw PreconditionError("unknown report format \"" + s + "\"");
}

std::string render_markdown(const BenchReport& report) {
  std::ostringstream out;
  out << "# Benchmark report: " << report.dataset_name << "\n\n";
  out << "Snapshots aggregated: " << report.snapshot_count << "\n\n";

  out << "## Quantitative\n\n";
  out << "| Solution | RF | RC | AF | AC | IR | CTR | Overall |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : report.quantitative) {
    out << "| " << to_string(row.solution) << " | " << cell(row.scores.response_flow) << " | "
        << cell(row.scores.response_coherence) << " | " << cell(row.scores.ad_flow) << " | "
        << cell(row.scores.ad_coherence) << " | " << cell(row.scores.injection_rate) << " | "
        << cell(row.scores.ctr) << " | " << fmt2(row.overall) << " |\n";
  }

  out << "\n## Qualitative (judge: " << report.primary_judge << ")\n\n";
  out << "| Solution | Accuracy | Naturalness | Personality | Trust | Notice | Click | "
         "Overall |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : report.qualitative) {
    out << "| " << to_string(row.solution) << " |";
    for (const auto& m : row.metrics) out << " " << cell(m) << " |";
    out << " " << fmt2(row.overall) << " |\n";
  }

  out << "\n## Qualitative overall by judge\n\n";
  out << "| Solution |";
  for (const auto& j : report.judges) out << " " << j << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.judges.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& row : report.multi_judge) {
    out << "| " << to_string(row.solution) << " |";
    for (const auto& v : row.overall_by_judge) out << " " << cell(v) << " |";
    out << "\n";
  }

  out << "\n## Cost\n\n";
  out << "| Solution | ITTFT | OTTFT | Overall |\n";
  out << "|---|---|---|---|\n";
  for (const auto& row : report.cost) {
    out << "| " << to_string(row.solution) << " | " << fmt2(row.cost.ittft) << " | "
        << fmt2(row.cost.ottft) << " | " << fmt2(row.cost.overall) << " |\n";
  }

  out << "\n## Exclusions\n\n";
  out << "| Solution | Excluded queries | Total queries | Unparseable verdicts |\n";
  out << "|---|---|---|---|\n";
  for (const auto& row : report.exclusions) {
    out << "| " << to_string(row.solution) << " | " << row.excluded << " | " << row.total
        << " | " << row.unparseable_verdicts << " |\n";
  }
  return out.str();
}

std::string render_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "table,solution,column,value\n";
  auto emit = [&out](const char* table, Solution s, const std::string& column,
                     const std::string& value) {
    out << table << "," << to_string(s) << "," << column << "," << value << "\n";
  };

  for (const auto& row : report.quantitative) {
    emit("quantitative", row.solution, "RF", cell(row.scores.response_flow));
    emit("quantitative", row.solution, "RC", cell(row.scores.response_coherence));
    emit("quantitative", row.solution, "AF", cell(row.scores.ad_flow));
    emit("quantitative", row.solution, "AC", cell(row.scores.ad_coherence));
    emit("quantitative", row.solution, "IR", cell(row.scores.injection_rate));
    emit("quantitative", row.solution, "CTR", cell(row.scores.ctr));
    emit("quantitative", row.solution, "Overall", fmt2(row.overall));
  }
  for (const auto& row : report.qualitative) {
    for (std::size_t m = 0; m < kAllJudgeMetrics.size(); ++m) {
      emit("qualitative", row.solution, to_string(kAllJudgeMetrics[m]), cell(row.metrics[m]));
    }
    emit("qualitative", row.solution, "Overall", fmt2(row.overall));
  }
  for (const auto& row : report.multi_judge) {
    for (std::size_t j = 0; j < report.judges.size(); ++j) {
      emit("multi_judge", row.solution, report.judges[j], cell(row.overall_by_judge[j]));
    }
  }
  for (const auto& row : report.cost) {
    emit("cost", row.solution, "ITTFT", fmt2(row.cost.ittft));
    emit("cost", row.solution, "OTTFT", fmt2(row.cost.ottft));
    emit("cost", row.solution, "Overall", fmt2(row.cost.overall));
  }
  for (const auto& row : report.exclusions) {
    emit("exclusions", row.solution, "Excluded", std::to_string(row.excluded));
    emit("exclusions", row.solution, "Total", std::to_string(row.total));
    emit("exclusions", row.solution, "UnparseableVerdicts",
         std::to_string(row.unparseable_verdicts));
  }
  return out.str();
}

json render_json(const BenchReport& report) {
  auto opt = [](const std::optional<double>& v) {
    return v ? json(round2(*v)) : json(nullptr);
  };

  json quant = json::array();
  for (const auto& row : report.quantitative) {
    quant.push_back(json{{"solution", to_string(row.solution)},
                         {"RF", opt(row.scores.response_flow)},
                         {"RC", opt(row.scores.response_coherence)},
                         {"AF", opt(row.scores.ad_flow)},
                         {"AC", opt(row.scores.ad_coherence)},
                         {"IR", opt(row.scores.injection_rate)},
                         {"CTR", opt(row.scores.ctr)},
                         {"Overall", round2(row.overall)}});
  }
  json qual = json::array();
  for (const auto& row : report.qualitative) {
    json r{{"solution", to_string(row.solution)}, {"Overall", round2(row.overall)}};
    for (std::size_t m = 0; m < kAllJudgeMetrics.size(); ++m) {
      r[to_string(kAllJudgeMetrics[m])] = opt(row.metrics[m]);
    }
    qual.push_back(std::move(r));
  }
  json multi = json::array();
  for (const auto& row : report.multi_judge) {
    json r{{"solution", to_string(row.solution)}};
    for (std::size_t j = 0; j < report.judges.size(); ++j) {
      r[report.judges[j]] = opt(row.overall_by_judge[j]);
    }
    multi.push_back(std::move(r));
  }
  json cost = json::array();
  for (const auto& row : report.cost) {
    cost.push_back(json{{"solution", to_string(row.solution)},
                        {"ITTFT", round2(row.cost.ittft)},
                        {"OTTFT", round2(row.cost.ottft)},
                        {"Overall", round2(row.cost.overall)}});
  }
  json exclusions = json::array();
  for (const auto& row : report.exclusions) {
    exclusions.push_back(json{{"solution", to_string(row.solution)},
                              {"excluded", row.excluded},
                              {"total", row.total},
                              {"unparseable_verdicts", row.unparseable_verdicts}});
  }
  return json{{"dataset", report.dataset_name},
              {"snapshot_count", report.snapshot_count},
              {"primary_judge", report.primary_judge},
              {"judges", report.judges},
              {"quantitative", std::move(quant)},
              {"qualitative", std::move(qual)},
              {"multi_judge", std::move(multi)},
              {"cost", std::move(cost)},
              {"exclusions", std::move(exclusions)}};
}

namespace {

// Overall columns must satisfy their defining identities at emission time,
// whatever produced the report object.
void verify_overall_identities(const BenchReport& report) {
  for (const auto& row : report.quantitative) {
    int defined = 0;
    for (const auto& v : {row.scores.response_flow, row.scores.response_coherence,
                          row.scores.ad_flow, row.scores.ad_coherence,
                          row.scores.injection_rate, row.scores.ctr}) {
      if (v) ++defined;
    }
    if (defined == 0) continue;
    if (std::fabs(row.overall - quantitative_overall(row.scores)) > 1e-9) {
      throw DataError("report violates the quantitative overall identity for " +
                      to_string(row.solution));
    }
  }
  for (const auto& row : report.qualitative) {
    std::vector<double> defined;
    for (const auto& m : row.metrics) {
      if (m) defined.push_back(*m);
    }
    if (defined.empty()) continue;
    if (std::fabs(row.overall - qualitative_overall(defined)) > 1e-9) {
      throw DataError("report violates the qualitative overall identity for " +
                      to_string(row.solution));
    }
  }
  for (const auto& row : report.cost) {
    if (std::fabs(row.cost.overall - cost_overall(row.cost.ittft, row.cost.ottft)) > 1e-9) {
      throw DataError("report violates the cost overall identity for " +
                      to_string(row.solution));
    }
  }
}

}  // namespace

std::filesystem::path emit_report(const BenchReport& report, ReportFormat format,
                                  const std::filesystem::path& path) {
  verify_overall_identities(report);
  std::filesystem::create_directories(path);
  std::filesystem::path file;
  std::string content;
  switch (format) {
    case ReportFormat::markdown:
      file = path / "report.md";
      content = render_markdown(report);
      break;
    case ReportFormat::csv:
      file = path / "report.csv";
      content = render_csv(report);
      break;
    case ReportFormat::json:
      file = path / "report.json";
      content = render_json(report).dump(2) + "\n";
      break;
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write report " + file.string());
  out << content;
  return file;
}

}  // namespace gem
