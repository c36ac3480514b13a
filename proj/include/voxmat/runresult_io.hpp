#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "voxmat/metrics.hpp"
#include "voxmat/pipeline.hpp"
#include "voxmat/task.hpp"

namespace voxmat {

// Line-delimited run record: one eval line per evaluated candidate, fields in
// fixed order, then a single summary line. Wall-clock time is deliberately
// not part of this file so identical sweeps rewrite it byte-identically; the
// timing sidecar carries it instead.
inline std::string runresult_to_jsonl(const RunResult& run) {
  std::ostringstream out;
  for (const auto& rec : run.history) {
    nlohmann::ordered_json j;
    j["type"] = "eval";
    j["eval_index"] = rec.eval_index;
    j["generation"] = rec.generation;
    j["x"] = rec.x.coords;
    nlohmann::ordered_json props = nlohmann::ordered_json::object();
    for (Property p : {Property::E, Property::G, Property::nu, Property::kappa,
                       Property::sigma, Property::vf, Property::Wp})
      if (rec.properties.has(p)) props[to_string(p)] = rec.properties.get(p);
    j["properties"] = props;
    j["signed_errors"] = rec.signed_errors;
    j["satisfied"] = rec.satisfied;
    j["utility"] = rec.utility;
    j["feasible"] = rec.feasible;
    j["clamped"] = rec.clamped;
    j["eval_failed"] = rec.eval_failed;
    out << j.dump() << "\n";
  }
  nlohmann::ordered_json s;
  s["type"] = "summary";
  s["task_id"] = run.task_id;
  s["method"] = run.method;
  s["seed"] = run.seed;
  s["success"] = run.success;
  s["status"] = run.status;
  s["iterations"] = run.iterations;
  s["evaluations"] = run.evaluations;
  s["final_weights"] = run.final_weights;
  s["final_eta"] = run.final_eta;
  s["archive_size"] = run.archive.size();
  out << s.dump() << "\n";
  return out.str();
}

// Reads back what runresult_to_jsonl wrote, for re-aggregation. Only the
// fields the metrics need are reconstructed.
inline metrics::RunSummary runsummary_from_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run file: " + path.string());
  metrics::RunSummary summary;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    const std::string type = j.value("type", "");
    if (type == "eval") {
      metrics::CandidateOutcome c;
      for (bool b : j.at("satisfied").get<std::vector<bool>>())
        c.satisfied.push_back(b);
      for (double e : j.at("signed_errors").get<std::vector<double>>())
        c.rel_errors.push_back(std::abs(e));
      summary.candidates.push_back(std::move(c));
    } else if (type == "summary") {
      summary.task_id = j.at("task_id").get<std::string>();
      summary.method = j.at("method").get<std::string>();
      summary.seed = j.at("seed").get<std::uint64_t>();
      summary.success = j.at("success").get<bool>();
      summary.iterations = j.at("iterations").get<int>();
      summary.evaluations = j.at("evaluations").get<int>();
    }
  }
  return summary;
}

// Human-readable run report: archive front table ranked by scalar utility,
// best trade-off candidate, iteration count and convergence status. Ends with
// the terminal token on its own line.
inline std::string run_report_text(const RunResult& run, const TaskSpec& spec,
                                   const SaesConfig& cfg) {
  std::ostringstream out;
  out << "run " << run.task_id << " method=" << run.method
      << " seed=" << run.seed << "\n";
  for (const auto& note : run.feasibility.notes) out << "note: " << note << "\n";

  std::vector<std::size_t> order(run.archive.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> utility(run.archive.size());
  std::vector<double> unit_weights(spec.objectives.size(), 1.0);
  for (std::size_t i = 0; i < run.archive.size(); ++i)
    utility[i] = record_utility(run.archive[i], unit_weights, cfg);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return utility[a] < utility[b]; });

  out << "archive front (" << run.archive.size() << " members)\n";
  out << "rank  id    utility";
  for (const auto& o : spec.objectives) out << "  " << to_string(o.property);
  out << "\n";
  char buf[64];
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& rec = run.archive[order[r]];
    std::snprintf(buf, sizeof(buf), "%4zu  %-4d  %8.5f", r + 1, rec.eval_index,
                  utility[order[r]]);
    out << buf;
    for (const auto& o : spec.objectives) {
      std::snprintf(buf, sizeof(buf), "  %.6g", rec.properties.get(o.property));
      out << buf;
    }
    out << "\n";
  }
  if (!order.empty()) {
    const auto& best = run.archive[order.front()];
    out << "best trade-off: id " << best.eval_index << " (utility "
        << utility[order.front()] << ")\n";
  } else {
    out << "best trade-off: none (archive empty)\n";
  }
  out << "iterations: " << run.iterations
      << "  evaluations: " << run.evaluations << "\n";
  out << "status: " << run.status << (run.success ? " (success)" : "") << "\n";
  out << "TERMINATE\n";
  return out.str();
}

}  // namespace voxmat
