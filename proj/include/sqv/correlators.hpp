#pragma once
// Result containers shared by the closed-form and Monte Carlo correlator
// paths. Two-term breakdowns keep the pairwise ("pair") and accidental
// ("background") pathways separately retrievable:
//   quantum closed form : pair = coherent,   background = incoherent
//   stochastic field    : pair = correlated, background = uncorrelated

#include <Eigen/Dense>
#include <vector>

#include "sqv/probes.hpp"

namespace sqv {

enum class Provenance {
  QtClosedForm,
  SfClosedForm,
  SfMonteCarlo,
  SfRenormalizedClosed,
  SfRenormalizedMc,
};

struct Corr2Result {
  std::vector<ProbePair> pairs;
  Eigen::ArrayXcd values;
  Eigen::ArrayXd stderrs;  // empty for closed forms
  Provenance provenance = Provenance::QtClosedForm;
};

struct Corr4Tensor {
  std::vector<ProbeQuad> quads;
  Eigen::ArrayXcd values;      // total
  Eigen::ArrayXcd pair_term;   // empty for Monte Carlo estimates
  Eigen::ArrayXcd background;  // empty for Monte Carlo estimates
  Eigen::ArrayXd stderrs;      // empty for closed forms
  Provenance provenance = Provenance::QtClosedForm;
  int xi = 1;
};

}  // namespace sqv
