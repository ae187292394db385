#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risbeam/subsolvers.hpp"

namespace risbeam::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Exhaustive phase sweep of the worst-case SINR ratio; supports N = 1 and
/// N = 2 systems (one- or two-dimensional grid at `step_deg`).
double brute_force_comm_sweep(const FractionalSystem& sys, double step_deg);

/// Exhaustive phase sweep of the worst-case illumination score for N = 1 or
/// N = 2 radar systems.
double brute_force_radar_sweep(const RadarRisSystem& sys, double step_deg);

/// Small-instance verification suite: sandwich bounds of the Dinkelbach
/// relaxation against brute-force phase sweeps, randomization quality, the
/// radar-RIS SDP bound and the lifted-form identities.
std::vector<CheckResult> run_oracle_suite(std::uint64_t seed);

}  // namespace risbeam::verify
