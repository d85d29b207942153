#pragma once

#include "airydim/ensemble.hpp"

// The two replica ensembles the Monte Carlo checks share. Both are cached
// under AIRYDIM_MC_CACHE, so only the first test run pays for them.
namespace airydim::testing {

inline constexpr std::uint64_t kSeed = 2025;
inline constexpr std::int64_t kN = 2000;
inline constexpr std::size_t kReplicas = 20000;

// Point-to-point: s in [-0.05, 2] at N = 2000 (R = 252 offsets per unit).
inline stats::EnsembleSpec p2p_spec(int threads) {
  stats::EnsembleSpec s;
  s.mode = lpp::SweepMode::PointToPoint;
  s.N = kN;
  s.offsets = {-12, 504};
  s.master_seed = kSeed;
  s.replicas = kReplicas;
  s.threads = threads;
  return s;
}

// Line-to-point: Airy1 times in [-1.5, 1.5] (400 offsets per unit).
inline stats::EnsembleSpec l2p_spec(int threads) {
  stats::EnsembleSpec s = p2p_spec(threads);
  s.mode = lpp::SweepMode::LineToPoint;
  s.offsets = {-600, 600};
  return s;
}

inline const stats::Ensemble& shared_p2p(int threads = 0) {
  static const stats::Ensemble e = stats::cached_ensemble(p2p_spec(threads), AIRYDIM_MC_CACHE);
  return e;
}

inline const stats::Ensemble& shared_l2p(int threads = 0) {
  static const stats::Ensemble e = stats::cached_ensemble(l2p_spec(threads), AIRYDIM_MC_CACHE);
  return e;
}

}  // namespace airydim::testing
