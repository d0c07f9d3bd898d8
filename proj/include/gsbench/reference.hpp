#pragma once

#include <filesystem>

#include "gsbench/dmrg.hpp"
#include "gsbench/io.hpp"
#include "gsbench/json_io.hpp"
#include "gsbench/mutual_information.hpp"
#include "gsbench/rng.hpp"

namespace gsbench {

// Frozen high-accuracy reference: ground energy plus the pairwise
// mutual-information matrix, content-addressed by a fingerprint of the
// (spec, protocol) pair.
struct ReferenceBundle {
  double energy = 0.0;
  RealMatrix mi;
  std::string fingerprint;
  json provenance;  // spec + protocol echo
};

inline std::string reference_fingerprint(const SpinChainSpec& spec, const DmrgProtocol& protocol) {
  json j = {{"spec", spec_to_json(spec)}, {"protocol", dmrg_protocol_to_json(protocol)}};
  return fnv1a64_hex(j.dump());
}

inline ReferenceBundle make_reference(const SpinChainSpec& spec, const DmrgProtocol& protocol,
                                      Budget budget) {
  protocol.validate();
  if (protocol.stages.back().method != DmrgStage::Method::dmrg2)
    throw ValidationError("reference protocols must end with a dmrg2 stage");
  auto run = run_dmrg(spec, protocol, budget);
  if (run.sweep_trace.empty())
    throw EvaluationError("reference budget too small to finish the first sweep");
  ReferenceBundle bundle;
  bundle.energy = run.final_energy;
  bundle.mi = mutual_information(run.state);
  bundle.fingerprint = reference_fingerprint(spec, protocol);
  bundle.provenance = {{"spec", spec_to_json(spec)}, {"protocol", dmrg_protocol_to_json(protocol)}};
  return bundle;
}

// Bundle directory layout: meta.json + mi.csv (diagonal written as nan).
inline void save_reference(const ReferenceBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json meta = {{"energy", bundle.energy},
               {"fingerprint", bundle.fingerprint},
               {"provenance", bundle.provenance},
               {"sites", static_cast<long long>(bundle.mi.rows())}};
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
  write_text_file(dir / "mi.csv", matrix_to_csv(bundle.mi));
}

inline ReferenceBundle load_reference(const std::filesystem::path& dir) {
  json meta = json::parse(read_text_file(dir / "meta.json"));
  check_keys(meta, {"energy", "fingerprint", "provenance", "sites"}, "reference meta");
  ReferenceBundle bundle;
  bundle.energy = require_key(meta, "energy", "reference meta").get<double>();
  bundle.fingerprint = require_key(meta, "fingerprint", "reference meta").get<std::string>();
  bundle.provenance = get_or(meta, "provenance", json::object());
  bundle.mi = matrix_from_csv(read_text_file(dir / "mi.csv"));
  if (bundle.mi.rows() != bundle.mi.cols())
    throw ValidationError("reference MI matrix must be square");
  return bundle;
}

}  // namespace gsbench
