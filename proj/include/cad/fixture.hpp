#pragma once

#include <cstdint>

#include "cad/dataset.hpp"

namespace cad {

struct FixtureOptions {
  std::size_t records = 300;
  /// Share of CAD (label 1) records; the count is rounded to the nearest integer.
  double positive_fraction = 0.72;
  std::uint64_t seed = 20240101;
  /// Extra uninformative numeric columns (Noise1, Noise2, ...) appended to the schema.
  std::size_t noise_features = 0;
};

/// Seeded synthetic cohort conforming to the 12-feature schema. Class-conditional
/// marginals loosely follow the reference cohort summary; values are
/// rounded the way clinical records are (whole years, mmHg in steps of 5, ...).
Dataset make_fixture(const FixtureOptions& options = {});

} // namespace cad
