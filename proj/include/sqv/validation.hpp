#pragma once

// The cross-model acceptance checks: twelve numerical criteria with pinned
// configurations and tolerances, each returning a pass/fail verdict plus a
// deterministic details string (safe to embed in byte-compared reports; wall
// times are kept out of the details for that reason). A thirteenth check —
// byte-identical outputs across reruns and worker counts — needs two full
// passes over output files and lives with the callers that own them.

#include <string>
#include <vector>

#include "sqv/exec.hpp"

namespace sqv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double elapsed_seconds = 0.0;  // informational; excluded from reports
};

struct ValidationSummary {
  std::vector<CriterionResult> criteria;
  bool all_pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return !criteria.empty();
  }
};

CriterionResult criterion_unitarity();                             // 1
CriterionResult criterion_asymptotes();                            // 2
CriterionResult criterion_gate_quadrature();                       // 3
CriterionResult criterion_vacuum_calibration(const ExecPolicy&);   // 4
CriterionResult criterion_corr4_mc(const ExecPolicy&);             // 5
CriterionResult criterion_spectrum_equivalence(const ExecPolicy&); // 6
CriterionResult criterion_energy_equivalence();                    // 7
CriterionResult criterion_corr4_identities();                      // 8
CriterionResult criterion_high_gain_agreement();                   // 9
CriterionResult criterion_flux_scaling();                          // 10
CriterionResult criterion_sfg_cross_model(const ExecPolicy&);      // 11
CriterionResult criterion_mode_energy(const ExecPolicy&);          // 12

// all twelve, in order
ValidationSummary run_validation(const ExecPolicy& exec);

}  // namespace sqv
