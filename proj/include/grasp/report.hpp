#pragma once

// Accuracy tables: one row per subject, "mean (±std)" per paradigm and
// pipeline, plus an average row (mean and sample std of the subject means).

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasp/evaluate.hpp"

namespace grasp {

enum class ReportFormat { Csv, Markdown, JsonLines };

inline ReportFormat report_format_from(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  if (s == "jsonl" || s == "json-lines") return ReportFormat::JsonLines;
  fail(ErrorKind::InvalidConfig, "unknown report format '" + s + "'");
}

struct TableRow {
  std::string subject;
  std::string paradigm;
  Summary conventional;
  Summary proposed;
};

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string format_cell(const Summary& s) { return fixed4(s.mean) + " (±" + fixed4(s.std) + ")"; }

inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

namespace detail {

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

inline const TableRow* find_row(std::span<const TableRow> rows, const std::string& subject, const std::string& paradigm) {
  for (const auto& r : rows)
    if (r.subject == subject && r.paradigm == paradigm) return &r;
  return nullptr;
}

}  // namespace detail

inline std::string render_table(std::span<const TableRow> rows, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Csv) {
    out = "subject,paradigm,pipeline,mean,std\n";
    for (const auto& r : rows) {
      out += r.subject + "," + r.paradigm + ",conventional," + fixed4(r.conventional.mean) + "," + fixed4(r.conventional.std) + "\n";
      out += r.subject + "," + r.paradigm + ",proposed," + fixed4(r.proposed.mean) + "," + fixed4(r.proposed.std) + "\n";
    }
    return out;
  }
  if (format == ReportFormat::JsonLines) {
    for (const auto& r : rows) {
      nlohmann::json j{{"subject", r.subject},
                       {"paradigm", r.paradigm},
                       {"conventional", {{"mean", round4(r.conventional.mean)}, {"std", round4(r.conventional.std)}}},
                       {"proposed", {{"mean", round4(r.proposed.mean)}, {"std", round4(r.proposed.std)}}},
                       {"delta_mean", round4(r.proposed.mean - r.conventional.mean)}};
      out += j.dump() + "\n";
    }
    return out;
  }

  std::vector<std::string> subjects, paradigms;
  for (const auto& r : rows) {
    detail::push_unique(subjects, r.subject);
    detail::push_unique(paradigms, r.paradigm);
  }
  out = "| |";
  for (const auto& p : paradigms) out += " " + p + " Conventional | " + p + " Proposed |";
  out += "\n|---|";
  for (std::size_t i = 0; i < paradigms.size(); ++i) out += "---|---|";
  out += "\n";
  for (const auto& s : subjects) {
    out += "| " + s + " |";
    for (const auto& p : paradigms) {
      const TableRow* r = detail::find_row(rows, s, p);
      out += r ? " " + format_cell(r->conventional) + " | " + format_cell(r->proposed) + " |" : " n/a | n/a |";
    }
    out += "\n";
  }
  out += "| Average (±Std.) |";
  for (const auto& p : paradigms) {
    std::vector<double> conv, prop;
    for (const auto& r : rows)
      if (r.paradigm == p) {
        conv.push_back(r.conventional.mean);
        prop.push_back(r.proposed.mean);
      }
    out += " " + format_cell(summarize(conv)) + " | " + format_cell(summarize(prop)) + " |";
  }
  out += "\n";
  return out;
}

inline TableRow table_row(const ComparisonReport& report, const std::string& subject, const std::string& paradigm) {
  return {subject, paradigm, report.conventional.summary(), report.proposed.summary()};
}

inline std::string render_report(const ComparisonReport& report, const std::string& subject,
                                 const std::string& paradigm, ReportFormat format) {
  const TableRow row = table_row(report, subject, paradigm);
  return render_table(std::span<const TableRow>(&row, 1), format);
}

/// One JSON line per pipeline with the summed confusion counts.
inline std::string render_confusions(const ComparisonReport& report, const std::string& subject,
                                     const std::string& paradigm) {
  std::string out;
  for (const CvReport* r : {&report.conventional, &report.proposed}) {
    nlohmann::json j{{"subject", subject}, {"paradigm", paradigm}, {"pipeline", r->pipeline}, {"confusion", r->confusion}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace grasp
