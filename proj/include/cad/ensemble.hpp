#pragma once

#include <span>
#include <vector>

#include "cad/model.hpp"

namespace cad {

struct VoteResult {
  int label = 0;
  /// Mean member p_positive; diagnostic only, the label comes from hard votes.
  double p_positive = 0.5;
  std::vector<Prediction> members;
  bool tie = false;
};

/// Trains every member on d with a shared standardizer (fitted on d when not
/// supplied). Member i is seeded with derive_seed(hp.seed, i).
TrainedModel train_voting(const Dataset& d, const VotingParams& hp, std::optional<ScalingParams> scaling = std::nullopt);

/// Strict majority of member labels. Even splits go to the tie-break: with
/// `confidence`, the side whose supporters sit further from 0.5 on average
/// wins (exact equality falls back to the fixed label).
VoteResult combine_votes(std::span<const Prediction> members, const TieBreak& tie_break);

/// Validates and votes on a raw-unit record. Throws ConfigError for non-voting models.
VoteResult vote(const TrainedModel& ensemble, const PatientRecord& record);
VoteResult vote_scaled(const TrainedModel& ensemble, std::span<const double> x);

} // namespace cad
