#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <span>
#include <vector>

namespace rudu::selfplay {

inline constexpr double kMaxReward = 1.0;

/// Nearest-rank percentile: sorted ascending, index ceil(alpha / 100 * n) - 1.
/// Returns 0 for an empty buffer so that any positive reward ranks +1.
double percentile_threshold(std::span<const double> rewards, double alpha);

/// Reshapes a bounded episode reward into +1 / -1 against a threshold:
/// +1 above it or at the maximum reward, -1 below it, fair coin on a tie.
int rank_against(double reward, double threshold, std::mt19937_64& rng);

/// rank_against(reward, percentile_threshold(buffer, alpha), rng)
int ranked_reward(double reward, std::span<const double> buffer, double alpha,
                  std::mt19937_64& rng);

/// B is the frozen snapshot used for ranking; B' keeps accumulating every
/// finished episode (FIFO, capped) and is copied into B at iteration end.
class RewardBuffers {
 public:
  explicit RewardBuffers(std::size_t capacity = 100);

  void record(double reward);  // into B'
  void commit();               // B = B'
  double threshold(double alpha) const;

  std::size_t capacity() const { return capacity_; }
  const std::vector<double>& ranking() const { return ranking_; }
  const std::deque<double>& staging() const { return staging_; }

  /// Restores both buffers from a saved B' (checkpoint sidecar).
  void restore(std::span<const double> staged);

 private:
  std::size_t capacity_;
  std::deque<double> staging_;
  std::vector<double> ranking_;
};

}  // namespace rudu::selfplay
