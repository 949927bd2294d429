#pragma once

#include <string>

#include <json.hpp>

#include "lorgh/error.hpp"

namespace lorgh {

// Every declared tolerance of the experiment tables, in one place. Values can be
// overridden from a JSON object with the same keys (see tolerances_from_json).
struct Tolerances {
  double axiom = 1e-9;             // validate_lorentz and identity residuals
  double identity_residual = 1e-9; // recovery and harvest identities, two-sided
  double lattice_ratio_lo = 0.3;   // dist_minus(R_2n) / dist_minus(R_n)
  double lattice_ratio_hi = 0.7;
  double contrast_decay = 0.95;    // growing s at fixed n: last/first must stay above this
  double dm2_lo = 1.8, dm2_hi = 2.2;
  double dm3_lo = 2.6, dm3_hi = 3.4;
  double measure_rel = 0.15;       // mu_{2,delta} against tau^2/2
  double omega_abs = 1e-12;
  double reconstruction_median = 0.15;
  double reconstruction_cut = 0.2;  // pairs with sigma >= cut * max sigma
  double noldus_rel = 0.05;         // intrinsified Noldus metric against Euclidean
  double slice_rel = 0.05;          // intrinsified d_S against Euclidean
  double slice_cut = 0.2;           // pairs at separation >= cut * max separation
  double pole_rel = 0.10;           // d_S against 2 sqrt(t) in the conformal-pole model
  double precompact_eps_ratio = 2;  // an eps-approximant must satisfy dist_minus < ratio * eps
};

inline nlohmann::json to_json(const Tolerances& t) {
  return {{"axiom", t.axiom},
          {"identity_residual", t.identity_residual},
          {"lattice_ratio_lo", t.lattice_ratio_lo},
          {"lattice_ratio_hi", t.lattice_ratio_hi},
          {"contrast_decay", t.contrast_decay},
          {"dm2_lo", t.dm2_lo},
          {"dm2_hi", t.dm2_hi},
          {"dm3_lo", t.dm3_lo},
          {"dm3_hi", t.dm3_hi},
          {"measure_rel", t.measure_rel},
          {"omega_abs", t.omega_abs},
          {"reconstruction_median", t.reconstruction_median},
          {"reconstruction_cut", t.reconstruction_cut},
          {"noldus_rel", t.noldus_rel},
          {"slice_rel", t.slice_rel},
          {"slice_cut", t.slice_cut},
          {"pole_rel", t.pole_rel},
          {"precompact_eps_ratio", t.precompact_eps_ratio}};
}

inline Tolerances tolerances_from_json(const nlohmann::json& j) {
  Tolerances t;
  auto get = [&](const char* key, double& v) {
    if (j.contains(key)) v = j.at(key).get<double>();
  };
  get("axiom", t.axiom);
  get("identity_residual", t.identity_residual);
  get("lattice_ratio_lo", t.lattice_ratio_lo);
  get("lattice_ratio_hi", t.lattice_ratio_hi);
  get("contrast_decay", t.contrast_decay);
  get("dm2_lo", t.dm2_lo);
  get("dm2_hi", t.dm2_hi);
  get("dm3_lo", t.dm3_lo);
  get("dm3_hi", t.dm3_hi);
  get("measure_rel", t.measure_rel);
  get("omega_abs", t.omega_abs);
  get("reconstruction_median", t.reconstruction_median);
  get("reconstruction_cut", t.reconstruction_cut);
  get("noldus_rel", t.noldus_rel);
  get("slice_rel", t.slice_rel);
  get("slice_cut", t.slice_cut);
  get("pole_rel", t.pole_rel);
  get("precompact_eps_ratio", t.precompact_eps_ratio);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!to_json(t).contains(it.key())) throw InvalidArgument("unknown tolerance key: " + it.key());
  return t;
}

}  // namespace lorgh
