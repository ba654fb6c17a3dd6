#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aquarl/environment.hpp"

namespace aquarl {

// Dense state-action value table, zero-initialized.
class QTable {
public:
    QTable(int states, int actions);

    double at(int state, int action) const { return values_[index(state, action)]; }
    void set(int state, int action, double v) { values_[index(state, action)] = v; }
    int state_count() const { return states_; }
    int action_count() const { return actions_; }

    int argmax(int state) const;      // lowest index wins ties
    double max_value(int state) const;

    const std::vector<double>& values() const { return values_; }

private:
    int index(int state, int action) const { return state * actions_ + action; }

    int states_;
    int actions_;
    std::vector<double> values_;
};

using Policy = std::vector<int>;

Policy greedy_policy(const QTable& q);

struct TrainConfig {
    double alpha = 0.1;        // learning rate
    double gamma = 0.8;        // discount factor
    double epsilon0 = 0.9;     // initial exploration probability
    double t_epsilon = 6000.0; // exploration phase duration [episodes]
    int max_episodes = 30000;
    std::uint64_t seed = 1;
    int stop_patience = 50; // consecutive unchanged-policy episodes to stop
    // Robbins-Monro 1/visit-count learning rate instead of constant alpha;
    // used by the oracle-equivalence tests only.
    bool visit_count_alpha = false;

    void validate() const;
};

// Exploration probability for episode i: clamp(epsilon0 * exp(-i/t_epsilon)).
// Non-increasing in i, bounded in [0, epsilon0].
double epsilon_schedule(int episode, const TrainConfig& cfg);

// One temporal-difference update:
//   Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
// A terminal next state (s_next < 0) bootstraps zero. Returns the new entry.
double td_update(QTable& q, int state, int action, double reward, int next_state,
                 const TrainConfig& cfg);

struct EpisodeLog {
    int episode = 0;
    double episode_return = 0.0;
    double epsilon = 0.0;
    int policy_changes = 0;
};

struct TrainResult {
    QTable q;
    Policy policy;
    std::vector<EpisodeLog> log;
    int episodes = 0;       // episodes actually run
    bool converged = false; // false: max_episodes hit with the policy changing
};

// Episodic epsilon-greedy Q-learning. Stops once the greedy policy is
// unchanged for stop_patience consecutive episodes, or at max_episodes.
// Fully deterministic for a fixed seed.
TrainResult train(const Environment& env, const TrainConfig& cfg);

// Q* by sweeping Q(s,a) <- r(s,a) + gamma * max Q(s',.) until the largest
// change drops below tolerance. Testing oracle for the TD fixed point.
QTable value_iteration_oracle(const Environment& env, double gamma,
                              double tolerance);

// Greedy episode replay through the MDP transitions.
struct Rollout {
    std::vector<int> states;  // visited live states, starting at the initial
    std::vector<int> actions; // one per step
    std::vector<double> rewards;
    double total_reward = 0.0;
};

Rollout rollout(const Environment& env, const Policy& policy,
                int max_steps = 1000000);

// Versioned CSV (state, action, value) serialization; loads reject
// mismatched shapes or versions.
void save_qtable_csv(const QTable& q, const std::string& path);
QTable load_qtable_csv(const std::string& path);
void save_policy_csv(const Policy& policy, const std::string& path);
Policy load_policy_csv(const std::string& path);

} // namespace aquarl
