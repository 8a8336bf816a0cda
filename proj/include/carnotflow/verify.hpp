#pragma once

#include <string>
#include <vector>

#include "carnotflow/game.hpp"

namespace carnotflow {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Group axioms, dilation automorphism, gauge homogeneity, bracket closure on
// R^2, H^1, H^2, E^4; 1000 random samples each.
SuiteReport verify_algebra(std::uint64_t seed);

// Structure-assumption sweeps, envelope brute force, homogeneity, ellipticity,
// linear growth for MCF and PIL.
SuiteReport verify_operators(std::uint64_t seed);

// Constructive-response inequality over every branch of the case analysis,
// for MCF and PIL, K in {1,2,5}, R0 in {1,5}, eps in {1e-2,1e-3,1e-4}.
SuiteReport verify_adversary(std::uint64_t seed);

// Lipschitz-in-space / Lipschitz-in-time ratio stability across eps on
// smooth-bump data.
SuiteReport verify_regularity(int threads);

// Exact-solution self-consistency, radius measurement, and dpp-vs-bruteforce
// agreement on random configurations.
SuiteReport verify_oracle(std::uint64_t seed, int threads);

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int threads);

}  // namespace carnotflow
