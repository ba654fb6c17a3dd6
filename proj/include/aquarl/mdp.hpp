#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aquarl/environment.hpp"
#include "aquarl/growth_model.hpp"

namespace aquarl {

// (weight, age) discretization of the growth state space.
struct Grid {
    double w_min = 6.0;   // [g]
    double w_max = 400.0; // [g]
    double dw = 10.0;     // weight resolution [g]
    int dt = 7;           // time resolution [days]
    int horizon = 70;     // culture duration [days]

    int weight_bins() const; // bins centered at w_min + k*dw
    int time_bins() const;   // live bins covering days [0, horizon)
    int state_count() const; // weight_bins() * time_bins()
    double weight_center(int weight_bin) const;
    int bin_day(int time_bin) const;

    void validate() const;
};

// A live (weight_bin, time_bin) pair, or the terminal marker once the fish
// age reaches the horizon.
struct StateId {
    int weight_bin = -1;
    int time_bin = -1;

    static StateId terminal() { return {}; }
    bool is_terminal() const { return time_bin < 0; }
    bool operator==(const StateId&) const = default;
};

// Weight snaps to the nearest bin center (half up), day to its dt block;
// out-of-range weights clamp to the boundary bins, day >= horizon is terminal.
StateId discretize(double weight, int day, const Grid& grid);

// Discrete feeding levels, optionally crossed with temperature levels (tank
// mode). Action indices enumerate feeding-major: a = f_idx*n_temp + t_idx.
struct ActionSpace {
    std::vector<double> feeding_levels;     // strictly increasing, within [0, 1]
    std::vector<double> temperature_levels; // empty in cage mode

    static ActionSpace cage(int n_feed = 10, double f_lo = 0.01, double f_hi = 1.0);
    static ActionSpace tank(int n_feed = 10, double f_lo = 0.01, double f_hi = 1.0,
                            int n_temp = 12, double t_lo = 29.6, double t_hi = 30.7);

    bool has_temperature() const { return !temperature_levels.empty(); }
    int size() const;
    double feed(int action) const;
    double temperature(int action) const; // tank mode only

    void validate() const;
};

enum class RewardShape { L2, L2L1, L1 };

RewardShape reward_shape_from_string(const std::string& name);
std::string to_string(RewardShape shape);

struct RewardSpec {
    RewardShape shape = RewardShape::L2;
    double lambda = 0.5;
};

// Tracking reward; always <= 0. Rejects w_desired <= 0.
double reward(double weight, double w_desired, double feed_rate,
              const RewardSpec& spec);

struct Transition {
    StateId next;
    double reward = 0.0;
    bool done = false;
};

enum class Mode { Cage, Tank };

Mode mode_from_string(const std::string& name);
std::string to_string(Mode mode);

// Total ration mass for a per-day (weight, feed rate) sequence:
// sum of f * rm_fraction * w over the listed days.
double total_feed(const std::vector<std::pair<double, double>>& weight_and_rate,
                  const GrowthParams& p);

// Greedy deployment trace of a policy on the continuous plant.
struct PolicyTrajectory {
    std::vector<double> daily_weight;      // size horizon + 1
    std::vector<double> daily_feed_rate;   // size horizon, rate applied that day
    std::vector<double> daily_temperature; // size horizon
    std::vector<double> step_rewards;      // one per dt-block
    double total_reward = 0.0;
    bool starved = false;
};

// Immutable episodic environment: the growth simulator quantized onto the
// grid. All (state, action) transitions are precomputed at construction, so
// env_step is a table lookup and the instance is freely shared across
// threads. In cage mode the water temperature is the fixed ambient value;
// in tank mode it comes from the action.
class EnvContext final : public Environment {
public:
    EnvContext(Mode mode, Grid grid, ActionSpace actions, RewardSpec reward_spec,
               EnvConditions ambient, GrowthParams params,
               std::vector<double> reference_daily, double w0,
               Integrator integ = {});

    // Typed transition; state must be live and action in range.
    Transition env_step(StateId state, int action) const;

    // Flat Environment view used by the trainer and the VI solver.
    int state_count() const override { return grid_.state_count(); }
    int action_count() const override { return actions_.size(); }
    int initial_state() const override { return initial_state_; }
    EnvStep step(int state, int action) const override;

    int flat_index(StateId s) const; // -1 for terminal
    StateId state_at(int flat) const;

    // Simulates the continuous plant from w0, reading the action for each
    // dt-block from the policy at the discretized current state. Rewards are
    // evaluated exactly as during training (on the discretized next state).
    PolicyTrajectory rollout_policy(const std::vector<int>& policy) const;

    const Grid& grid() const { return grid_; }
    const ActionSpace& actions() const { return actions_; }
    const RewardSpec& reward_spec() const { return reward_spec_; }
    const GrowthParams& params() const { return params_; }
    const EnvConditions& ambient() const { return ambient_; }
    const Integrator& integrator() const { return integ_; }
    Mode mode() const { return mode_; }
    double initial_weight() const { return w0_; }
    double reference_at(int day) const; // clamped to the last sample

private:
    EnvConditions conditions_for(int action) const;

    Mode mode_;
    Grid grid_;
    ActionSpace actions_;
    RewardSpec reward_spec_;
    EnvConditions ambient_;
    GrowthParams params_;
    std::vector<double> reference_;
    double w0_;
    Integrator integ_;
    int initial_state_;
    std::vector<int> next_;      // state*actions + a -> flat next (-1 terminal)
    std::vector<double> reward_; // state*actions + a -> reward
};

// Reference trajectories move as CSV with header "day,weight_g". Sparse day
// samples are densified by linear interpolation onto the daily grid.
std::vector<double> load_reference_csv(const std::string& path, int horizon);
void write_reference_csv(const std::string& path,
                         const std::vector<double>& daily_weights);

} // namespace aquarl
