#include "rudu/selfplay/ranked_reward.hpp"

#include <algorithm>
#include <cmath>

#include "rudu/error.hpp"

namespace rudu::selfplay {

double percentile_threshold(std::span<const double> rewards, double alpha) {
  require(alpha > 0.0 && alpha < 100.0, "percentile must be in (0, 100)");
  if (rewards.empty()) return 0.0;
  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(alpha / 100.0 * static_cast<double>(sorted.size())));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

int rank_against(double reward, double threshold, std::mt19937_64& rng) {
  if (reward > threshold || reward >= kMaxReward) return 1;
  if (reward < threshold) return -1;
  return std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
}

int ranked_reward(double reward, std::span<const double> buffer, double alpha,
                  std::mt19937_64& rng) {
  return rank_against(reward, percentile_threshold(buffer, alpha), rng);
}

RewardBuffers::RewardBuffers(std::size_t capacity) : capacity_(capacity) {
  require(capacity >= 1, "reward buffer capacity must be >= 1");
}

void RewardBuffers::record(double reward) {
  staging_.push_back(reward);
  while (staging_.size() > capacity_) staging_.pop_front();
}

void RewardBuffers::commit() { ranking_.assign(staging_.begin(), staging_.end()); }

double RewardBuffers::threshold(double alpha) const { return percentile_threshold(ranking_, alpha); }

void RewardBuffers::restore(std::span<const double> staged) {
  staging_.clear();
  for (double r : staged) record(r);
  commit();
}

}  // namespace rudu::selfplay
