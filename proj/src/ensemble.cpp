#include "cad/ensemble.hpp"

#include <cmath>

#include "cad/errors.hpp"
#include "cad/rng.hpp"

namespace cad {

namespace {

template <typename E> [[noreturn]] void rethrow_as(const E& e, const std::string& who) {
  throw E(who + ": " + e.what());
}

} // namespace

TrainedModel train_voting(const Dataset& d, const VotingParams& hp, std::optional<ScalingParams> scaling) {
  ModelSpec spec{hp};
  validate(spec);
  if (d.empty()) throw DataError("voting: empty training set");
  if (!scaling) scaling = fit_standardizer(d);

  VotingModel ensemble;
  ensemble.tie_break = hp.tie_break;
  TrainingMeta meta{spec, d.size(), {}};
  for (std::size_t i = 0; i < hp.members.size(); ++i) {
    const auto member_spec = with_seed(hp.members[i], derive_seed(hp.seed, i));
    const std::string who = "member " + std::to_string(i) + " (" + std::string(to_string(member_spec.kind())) + ")";
    try {
      auto member = train_model(d, member_spec, scaling);
      for (const auto& w : member.meta.warnings) meta.warnings.push_back(who + ": " + w);
      ensemble.members.push_back(std::move(member));
    } catch (const DataError& e) {
      rethrow_as(e, who);
    } catch (const ConfigError& e) {
      rethrow_as(e, who);
    } catch (const TrainingError& e) {
      rethrow_as(e, who);
    }
  }
  return TrainedModel{std::move(ensemble), d.schema, std::move(scaling), std::move(meta)};
}

VoteResult combine_votes(std::span<const Prediction> members, const TieBreak& tie_break) {
  if (members.empty()) throw ConfigError("vote: no members");
  VoteResult r;
  r.members.assign(members.begin(), members.end());
  std::size_t ones = 0;
  double p_sum = 0;
  std::array<double, 2> confidence{0, 0};
  for (const auto& m : members) {
    ones += m.label == 1 ? 1 : 0;
    p_sum += m.p_positive;
    confidence[m.label == 1 ? 1 : 0] += std::abs(m.p_positive - 0.5);
  }
  const auto n = members.size();
  const auto zeros = n - ones;
  r.p_positive = p_sum / static_cast<double>(n);
  if (2 * ones > n) {
    r.label = 1;
  } else if (2 * zeros > n) {
    r.label = 0;
  } else {
    r.tie = true;
    // equal supporter counts, so comparing sums compares means
    if (tie_break.mode == TieBreak::Mode::confidence && confidence[0] != confidence[1]) {
      r.label = confidence[1] > confidence[0] ? 1 : 0;
    } else {
      r.label = tie_break.fixed_label;
    }
  }
  return r;
}

VoteResult vote_scaled(const TrainedModel& ensemble, std::span<const double> x) {
  const auto* v = std::get_if<VotingModel>(&ensemble.payload);
  if (!v) throw ConfigError("vote: model is not a voting ensemble");
  std::vector<Prediction> preds;
  preds.reserve(v->members.size());
  for (const auto& m : v->members) preds.push_back(predict_scaled(m, x));
  return combine_votes(preds, v->tie_break);
}

VoteResult vote(const TrainedModel& ensemble, const PatientRecord& record) {
  validate_record(ensemble.schema, record);
  return vote_scaled(ensemble, to_model_space(ensemble, record.values));
}

} // namespace cad
