#include "cad/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cad/errors.hpp"
#include "cad/rng.hpp"

namespace cad {

namespace {

double normal(Rng& rng, double mean, double sd) {
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double bernoulli(Rng& rng, double p) { return rng.uniform01() < p ? 1.0 : 0.0; }

double clamp_round(double v, double lo, double hi, double step) {
  // divide by the integer inverse so 0.1 steps print as 4.6, not 4.6000000000000005
  v = step < 1 ? std::round(v / step) / std::round(1 / step) : std::round(v / step) * step;
  return std::clamp(v, lo, hi);
}

struct ClassProfile {
  double age_mean, dm, htn, bp_mean, fbs_log_mean, esr_log_mean, k_mean, ef_mean;
  // typical, atypical, nonanginal; remainder is "no chest pain"
  double pain[3];
  double tinversion;
  // probability of any wall motion abnormality, then mean extent given one
  double rwma, rwma_extent;
};

constexpr ClassProfile kCad{61.5, 0.37, 0.66, 131.5, 4.78, 2.85, 4.24, 44.5, {0.70, 0.17, 0.03}, 0.36, 0.30, 2.2};
constexpr ClassProfile kNormal{52.5, 0.13, 0.41, 125.0, 4.58, 2.55, 4.20, 54.0, {0.14, 0.62, 0.12}, 0.14, 0.04, 1.3};

PatientRecord draw(Rng& rng, const ClassProfile& c, int label, std::size_t noise) {
  PatientRecord r;
  r.label = label;
  auto& v = r.values;
  v.push_back(clamp_round(normal(rng, c.age_mean, 9.5), 30, 86, 1));
  v.push_back(bernoulli(rng, c.dm));
  v.push_back(bernoulli(rng, c.htn));
  v.push_back(clamp_round(normal(rng, c.bp_mean, 17.5), 90, 190, 5));
  const double u = rng.uniform01();
  const int pain = u < c.pain[0] ? 0 : u < c.pain[0] + c.pain[1] ? 1 : u < c.pain[0] + c.pain[1] + c.pain[2] ? 2 : 3;
  v.push_back(pain == 0 ? 1.0 : 0.0);
  v.push_back(pain == 1 ? 1.0 : 0.0);
  v.push_back(pain == 2 ? 1.0 : 0.0);
  v.push_back(bernoulli(rng, c.tinversion));
  v.push_back(clamp_round(std::exp(normal(rng, c.fbs_log_mean, 0.33)), 62, 400, 1));
  v.push_back(clamp_round(std::exp(normal(rng, c.esr_log_mean, 0.7)), 1, 90, 1));
  // a few haemolysed or renal samples give potassium its long tails
  const double k_sd = rng.uniform01() < 0.04 ? 1.3 : 0.4;
  v.push_back(clamp_round(normal(rng, c.k_mean, k_sd), 3.0, 6.6, 0.1));
  v.push_back(clamp_round(normal(rng, c.ef_mean, 7.5), 15, 60, 5));
  double region = 0;
  if (rng.uniform01() < c.rwma) region = clamp_round(normal(rng, c.rwma_extent, 1.0), 1, 4, 1);
  v.push_back(region);
  for (std::size_t i = 0; i < noise; ++i) v.push_back(std::round(rng.uniform01() * 1000.0) / 10.0);
  return r;
}

} // namespace

Dataset make_fixture(const FixtureOptions& options) {
  if (options.records < 2) throw ConfigError("fixture: need at least 2 records");
  if (!(options.positive_fraction > 0.0 && options.positive_fraction < 1.0))
    throw ConfigError("fixture: positive_fraction must lie in (0, 1)");
  Dataset d;
  d.schema = cad12_schema();
  for (std::size_t i = 0; i < options.noise_features; ++i) {
    FeatureSpec f;
    f.name = "Noise" + std::to_string(i + 1);
    f.kind = FeatureKind::numeric;
    f.lo = 0;
    f.hi = 100;
    d.schema.features.push_back(f);
  }
  const auto n = options.records;
  auto positives = static_cast<std::size_t>(std::llround(static_cast<double>(n) * options.positive_fraction));
  positives = std::clamp<std::size_t>(positives, 1, n - 1);

  Rng rng(options.seed);
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(positives), 1);
  rng.shuffle(labels);
  for (int label : labels) d.records.push_back(draw(rng, label == 1 ? kCad : kNormal, label, options.noise_features));
  d.provenance = "fixture(records=" + std::to_string(n) + ",seed=" + std::to_string(options.seed) + ")";
  return d;
}

} // namespace cad
