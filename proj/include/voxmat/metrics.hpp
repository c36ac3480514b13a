#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "voxmat/pipeline.hpp"
#include "voxmat/task.hpp"

namespace voxmat {
namespace metrics {

// Per-candidate outcome: which objectives it satisfied and the magnitude of
// each relative error.
struct CandidateOutcome {
  std::vector<bool> satisfied;
  std::vector<double> rel_errors;
};

struct RunSummary {
  std::string task_id;
  std::string method;
  std::uint64_t seed = 0;
  bool success = false;
  std::vector<CandidateOutcome> candidates;
  int iterations = 0;
  int evaluations = 0;
  double wall_clock_s = 0.0;
};

inline RunSummary summarize_run(const RunResult& run) {
  RunSummary s;
  s.task_id = run.task_id;
  s.method = run.method;
  s.seed = run.seed;
  s.success = run.success;
  s.iterations = run.iterations;
  s.evaluations = run.evaluations;
  s.wall_clock_s = run.wall_clock_s;
  for (const auto& rec : run.history) {
    CandidateOutcome c;
    c.satisfied = rec.satisfied;
    for (double e : rec.signed_errors) c.rel_errors.push_back(std::abs(e));
    s.candidates.push_back(std::move(c));
  }
  return s;
}

inline std::size_t satisfied_count(const CandidateOutcome& c) {
  return static_cast<std::size_t>(
      std::count(c.satisfied.begin(), c.satisfied.end(), true));
}

// Fraction of runs containing at least one fully valid candidate.
inline double success_rate(const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("success_rate: no runs");
  std::size_t hits = 0;
  for (const auto& r : runs) {
    for (const auto& c : r.candidates) {
      if (!c.satisfied.empty() && satisfied_count(c) == c.satisfied.size()) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(runs.size());
}

// Fraction of all candidates (pooled across runs) satisfying at least half of
// the objectives, boundary inclusive.
inline double constraint_satisfaction_rate(const std::vector<RunSummary>& runs) {
  std::size_t total = 0, hits = 0;
  for (const auto& r : runs) {
    for (const auto& c : r.candidates) {
      ++total;
      if (2 * satisfied_count(c) >= c.satisfied.size()) ++hits;
    }
  }
  if (total == 0) throw std::invalid_argument("constraint_satisfaction_rate: no candidates");
  return static_cast<double>(hits) / static_cast<double>(total);
}

inline double mean_error_of(const CandidateOutcome& c) {
  double sum = 0.0;
  for (double e : c.rel_errors) sum += e;
  return sum / static_cast<double>(c.rel_errors.size());
}

// Per run, the minimum over candidates of the mean per-objective relative
// error; averaged across runs.
inline double mean_relative_error(const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("mean_relative_error: no runs");
  double total = 0.0;
  for (const auto& r : runs) {
    if (r.candidates.empty())
      throw std::invalid_argument("mean_relative_error: run without candidates");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : r.candidates) best = std::min(best, mean_error_of(c));
    total += best;
  }
  return total / static_cast<double>(runs.size());
}

// Per run, the best fraction of simultaneously satisfied objectives over all
// candidates; averaged across runs, in percent.
inline double best_property_match(const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("best_property_match: no runs");
  double total = 0.0;
  for (const auto& r : runs) {
    double best = 0.0;
    for (const auto& c : r.candidates) {
      if (c.satisfied.empty()) continue;
      best = std::max(best, static_cast<double>(satisfied_count(c)) /
                                static_cast<double>(c.satisfied.size()));
    }
    total += best;
  }
  return total / static_cast<double>(runs.size()) * 100.0;
}

// Composite quality score on [0, 100] with weights 20/40/30/10 for success,
// property match, constraint satisfaction and precision.
inline double quality_score(bool success, double bpm_fraction, double csr_fraction,
                            double mre) {
  return 20.0 * (success ? 1.0 : 0.0) + 40.0 * bpm_fraction +
         30.0 * csr_fraction + 10.0 * (1.0 - std::min(mre, 1.0));
}

// Per-run quality score from that run's own candidate pool.
inline double run_quality_score(const RunSummary& run) {
  double bpm = 0.0;
  double best_mre = std::numeric_limits<double>::infinity();
  std::size_t csr_hits = 0;
  for (const auto& c : run.candidates) {
    if (!c.satisfied.empty())
      bpm = std::max(bpm, static_cast<double>(satisfied_count(c)) /
                              static_cast<double>(c.satisfied.size()));
    best_mre = std::min(best_mre, mean_error_of(c));
    if (2 * satisfied_count(c) >= c.satisfied.size()) ++csr_hits;
  }
  const double csr = run.candidates.empty()
                         ? 0.0
                         : static_cast<double>(csr_hits) /
                               static_cast<double>(run.candidates.size());
  if (!std::isfinite(best_mre)) best_mre = 1.0;
  return quality_score(run.success, bpm, csr, best_mre);
}

struct ReportRow {
  std::string task_id;
  std::string method;
  int runs = 0;
  double sr = 0.0;
  double csr = 0.0;
  double mre = 0.0;
  double bpm = 0.0;
  double qs = 0.0;
  double mean_iterations = 0.0;
  double mean_evaluations = 0.0;
  double mean_wall_clock_s = 0.0;
};

// One row per (task, method), lexicographic order. SR/CSR/MRE/BPM follow
// their pooled definitions; QS is the mean of per-run quality scores.
inline std::vector<ReportRow> aggregate_report(
    const std::vector<RunSummary>& summaries) {
  std::map<std::pair<std::string, std::string>, std::vector<RunSummary>> groups;
  for (const auto& s : summaries) groups[{s.task_id, s.method}].push_back(s);

  std::vector<ReportRow> rows;
  for (const auto& [key, runs] : groups) {
    ReportRow row;
    row.task_id = key.first;
    row.method = key.second;
    row.runs = static_cast<int>(runs.size());
    row.sr = success_rate(runs);
    row.csr = constraint_satisfaction_rate(runs);
    row.mre = mean_relative_error(runs);
    row.bpm = best_property_match(runs);
    double qs = 0.0, iters = 0.0, evals = 0.0, wall = 0.0;
    for (const auto& r : runs) {
      qs += run_quality_score(r);
      iters += r.iterations;
      evals += r.evaluations;
      wall += r.wall_clock_s;
    }
    const double n = static_cast<double>(runs.size());
    row.qs = qs / n;
    row.mean_iterations = iters / n;
    row.mean_evaluations = evals / n;
    row.mean_wall_clock_s = wall / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "task_id,method,runs,sr,csr,mre,bpm,qs,mean_iter,mean_evaluations,"
         "mean_wall_clock_s\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.6f,%.6f,%.6f,%.4f,%.4f,%.4f,%.4f,%.3f\n",
                  r.task_id.c_str(), r.method.c_str(), r.runs, r.sr, r.csr,
                  r.mre, r.bpm, r.qs, r.mean_iterations, r.mean_evaluations,
                  r.mean_wall_clock_s);
    out << buf;
  }
  return out.str();
}

inline std::string report_text(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%-32s %-8s %5s %7s %7s %8s %7s %7s %7s %9s\n",
                "task", "method", "runs", "SR", "CSR", "MRE", "BPM", "QS",
                "Iter", "Time(s)");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%-32s %-8s %5d %6.1f%% %6.1f%% %8.4f %6.1f%% %7.2f %7.2f %9.2f\n",
                  r.task_id.c_str(), r.method.c_str(), r.runs, 100.0 * r.sr,
                  100.0 * r.csr, r.mre, r.bpm, r.qs, r.mean_iterations,
                  r.mean_wall_clock_s);
    out << buf;
  }
  return out.str();
}

// Signed relative error formatted the way the result tables print it: one
// decimal, explicit sign.
inline std::string format_err_percent(double value, double target) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.1f", signed_error(value, target));
  return std::string(buf);
}

// One-sided paired sign test: p-value for observing at least `wins` successes
// out of `wins + losses` fair coin flips (ties are discarded beforehand).
inline double sign_test_p_value(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(n - k + 1.0);
    p += std::exp(log_choose - n * std::log(2.0));
  }
  return std::min(p, 1.0);
}

}  // namespace metrics
}  // namespace voxmat
