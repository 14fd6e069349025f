#pragma once

#include <string>

#include <json.hpp>

#include "hattree/certificates.hpp"
#include "hattree/cheeger.hpp"
#include "hattree/serialize.hpp"
#include "hattree/spectral.hpp"
#include "hattree/walk_metrics.hpp"

namespace hattree {

inline nlohmann::json spectral_json(const SpectralReport& r) {
  nlohmann::json j{
      {"lambda1", r.lambda1},
      {"residual", r.residual},
      {"solver", r.solver == SolverKind::dense ? "dense" : "iterative"},
      {"iterations", r.iterations},
      {"tolerance", r.tolerance},
  };
  if (!r.component_witness.empty()) j["component_witness"] = r.component_witness;
  return j;
}

inline nlohmann::json cheeger_json(const CheegerReport& r) {
  return {
      {"value", r.value},
      {"witness", r.witness},
      {"method", r.method == CheegerMethod::exact ? "exact" : "sweep"},
      {"cut_weight", r.cut_weight},
      {"mass", r.witness_mass},
  };
}

inline nlohmann::json certificate_json(const CertificateReport& r) {
  return {
      {"claim", r.claim}, {"lhs", r.lhs},   {"rhs", r.rhs},
      {"margin", r.margin}, {"pass", r.pass}, {"tolerance", r.tolerance},
      {"h", r.h},         {"k", r.k},       {"seed", r.seed},
      {"trials", r.trials},
  };
}

inline nlohmann::json mixing_json(const MixingReport& r) {
  nlohmann::json j{
      {"epsilon", r.epsilon},
      {"t_mix", r.t_mix},
      {"method", r.method == MixMethod::exact ? "exact" : "monte_carlo"},
      {"start_policy", r.start_policy},
      {"relaxation_time", r.relaxation_time},
      {"cap_reached", r.cap_reached},
      {"t_max", r.t_max},
      {"kernel", r.kernel},
  };
  if (r.method == MixMethod::monte_carlo) {
    j["seed"] = r.seed;
    j["walkers"] = r.walkers;
    j["note"] = r.note;
  }
  return j;
}

inline std::string trajectory_csv(const MixingReport& r) {
  std::string out = "t,tv\n";
  for (const auto& [t, tv] : r.tv_trajectory)
    out += std::to_string(t) + "," + detail::format_double(tv) + "\n";
  return out;
}

inline nlohmann::json distance_json(const DistanceStats& s) {
  nlohmann::json j{
      {"diameter", s.diameter},
      {"avg_sq_distance", s.avg_sq_distance},
      {"mode", s.mode == StatMode::exact ? "exact" : "sampled"},
  };
  if (s.mode == StatMode::sampled) {
    j["sample_pairs"] = s.sample_pairs;
    j["seed"] = s.seed;
    j["std_error"] = s.std_error;
  }
  return j;
}

}  // namespace hattree
