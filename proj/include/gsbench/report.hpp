#pragma once

#include <filesystem>

#include "gsbench/campaign.hpp"
#include "gsbench/io.hpp"
#include "gsbench/projector.hpp"

namespace gsbench {

// running-best series: iteration,score,best_score (empty score on failures)
inline std::string running_best_csv(const CampaignArchive& archive) {
  if (archive.records.empty()) throw ValidationError("cannot report an empty archive");
  std::string out = "iteration,score,best_score\n";
  const auto best = archive.running_best();
  for (std::size_t i = 0; i < archive.records.size(); ++i) {
    const auto& r = archive.records[i];
    out += std::to_string(r.iteration);
    out += ',';
    if (r.score) out += format_real(*r.score);
    out += ',';
    out += std::isfinite(best[i]) ? format_real(best[i]) : "";
    out += '\n';
  }
  return out;
}

// projector trace: block_index,energy,total_weight
inline std::string blocks_csv(const RunTrace& trace) {
  if (trace.block_energies.empty()) throw ValidationError("cannot export an empty trace");
  std::string out = "block_index,energy,total_weight\n";
  for (std::size_t i = 0; i < trace.block_energies.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_real(trace.block_energies[i]);
    out += ',';
    out += format_real(trace.total_weight_history[i]);
    out += '\n';
  }
  return out;
}

inline RunTrace blocks_from_csv(const std::string& text) {
  RunTrace trace;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("block_index,", 0) != 0)
    throw ValidationError("blocks CSV must start with a block_index header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string idx, energy, weight;
    if (!std::getline(ls, idx, ',') || !std::getline(ls, energy, ',') ||
        !std::getline(ls, weight, ','))
      throw ValidationError("bad blocks CSV line: " + line);
    try {
      trace.block_energies.push_back(std::stod(energy));
      trace.total_weight_history.push_back(std::stod(weight));
    } catch (const std::exception&) {
      throw ValidationError("bad blocks CSV line: " + line);
    }
  }
  if (trace.block_energies.empty()) throw ValidationError("blocks CSV has no data rows");
  return trace;
}

inline json trace_summary_json(const RunTrace& trace, long long cost) {
  const std::size_t n = trace.block_energies.size();
  return {{"pe_mean", trace.pe_mean},
          {"pe_std", trace.pe_std},
          {"live_score", trace.live_score},
          {"lambda", trace.lambda},
          {"stochastic_cost", cost},
          {"blocks", static_cast<long long>(n)},
          {"pe_start_index", static_cast<long long>(n - (n + 1) / 2)},
          {"budget_truncated", trace.budget_truncated}};
}

// VQE evaluation trace: eval_index,energy
inline std::string evaluations_csv(const std::vector<std::pair<int, double>>& trace) {
  if (trace.empty()) throw ValidationError("cannot export an empty evaluation trace");
  std::string out = "eval_index,energy\n";
  for (const auto& [idx, e] : trace) {
    out += std::to_string(idx);
    out += ',';
    out += format_real(e);
    out += '\n';
  }
  return out;
}

// DMRG sweep trace: stage,sweep,energy,max_bond,elapsed_s
inline std::string sweeps_csv(const std::vector<SweepRecord>& trace) {
  std::string out = "stage,sweep,energy,max_bond,elapsed_s\n";
  for (const auto& r : trace) {
    out += std::to_string(r.stage);
    out += ',';
    out += std::to_string(r.sweep);
    out += ',';
    out += format_real(r.energy);
    out += ',';
    out += std::to_string(static_cast<long long>(r.max_bond));
    out += ',';
    out += format_real(r.elapsed_s);
    out += '\n';
  }
  return out;
}

}  // namespace gsbench
