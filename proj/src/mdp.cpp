#include "aquarl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aquarl/csv.hpp"

namespace aquarl {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

int snap_weight_bin(double weight, const Grid& grid) {
    const int k = static_cast<int>(
        std::floor((weight - grid.w_min) / grid.dw + 0.5));
    return std::clamp(k, 0, grid.weight_bins() - 1);
}

} // namespace

int Grid::weight_bins() const {
    return static_cast<int>(std::floor((w_max - w_min) / dw + 0.5)) + 1;
}

int Grid::time_bins() const { return (horizon - 1) / dt + 1; }

int Grid::state_count() const { return weight_bins() * time_bins(); }

double Grid::weight_center(int weight_bin) const {
    return w_min + weight_bin * dw;
}

int Grid::bin_day(int time_bin) const { return time_bin * dt; }

void Grid::validate() const {
    require(w_min > 0.0, "grid: w_min must be positive");
    require(w_min < w_max, "grid: w_min must be below w_max");
    require(dw > 0.0, "grid: dw must be positive");
    require(dt >= 1, "grid: dt must be at least one day");
    require(horizon >= 1, "grid: horizon must be at least one day");
}

StateId discretize(double weight, int day, const Grid& grid) {
    require(day >= 0, "discretize: day must be non-negative");
    if (day >= grid.horizon) return StateId::terminal();
    return StateId{snap_weight_bin(weight, grid), day / grid.dt};
}

ActionSpace ActionSpace::cage(int n_feed, double f_lo, double f_hi) {
    ActionSpace s;
    s.feeding_levels.reserve(n_feed);
    for (int i = 0; i < n_feed; ++i)
        s.feeding_levels.push_back(
            n_feed == 1 ? f_lo : f_lo + i * (f_hi - f_lo) / (n_feed - 1));
    s.validate();
    return s;
}

ActionSpace ActionSpace::tank(int n_feed, double f_lo, double f_hi, int n_temp,
                              double t_lo, double t_hi) {
    ActionSpace s = cage(n_feed, f_lo, f_hi);
    s.temperature_levels.reserve(n_temp);
    for (int i = 0; i < n_temp; ++i)
        s.temperature_levels.push_back(
            n_temp == 1 ? t_lo : t_lo + i * (t_hi - t_lo) / (n_temp - 1));
    s.validate();
    return s;
}

int ActionSpace::size() const {
    const int nt = has_temperature()
                       ? static_cast<int>(temperature_levels.size())
                       : 1;
    return static_cast<int>(feeding_levels.size()) * nt;
}

double ActionSpace::feed(int action) const {
    const int nt = has_temperature()
                       ? static_cast<int>(temperature_levels.size())
                       : 1;
    return feeding_levels.at(static_cast<std::size_t>(action / nt));
}

double ActionSpace::temperature(int action) const {
    require(has_temperature(), "action space: no temperature axis in cage mode");
    const int nt = static_cast<int>(temperature_levels.size());
    return temperature_levels.at(static_cast<std::size_t>(action % nt));
}

void ActionSpace::validate() const {
    require(!feeding_levels.empty(), "action space: no feeding levels");
    for (std::size_t i = 0; i < feeding_levels.size(); ++i) {
        require(feeding_levels[i] >= 0.0 && feeding_levels[i] <= 1.0,
                "action space: feeding level outside [0, 1]");
        if (i > 0)
            require(feeding_levels[i] > feeding_levels[i - 1],
                    "action space: feeding levels must be strictly increasing");
    }
    for (std::size_t i = 1; i < temperature_levels.size(); ++i)
        require(temperature_levels[i] > temperature_levels[i - 1],
                "action space: temperature levels must be strictly increasing");
}

RewardShape reward_shape_from_string(const std::string& name) {
    if (name == "L2") return RewardShape::L2;
    if (name == "L2&L1") return RewardShape::L2L1;
    if (name == "L1") return RewardShape::L1;
    throw std::invalid_argument("unknown reward shape: " + name +
                                " (expected L2, L2&L1 or L1)");
}

std::string to_string(RewardShape shape) {
    switch (shape) {
    case RewardShape::L2: return "L2";
    case RewardShape::L2L1: return "L2&L1";
    case RewardShape::L1: return "L1";
    }
    return "?";
}

Mode mode_from_string(const std::string& name) {
    if (name == "cage") return Mode::Cage;
    if (name == "tank") return Mode::Tank;
    throw std::invalid_argument("unknown mode: " + name +
                                " (expected cage or tank)");
}

std::string to_string(Mode mode) {
    return mode == Mode::Cage ? "cage" : "tank";
}

double reward(double weight, double w_desired, double feed_rate,
              const RewardSpec& spec) {
    require(w_desired > 0.0, "reward: desired weight must be positive");
    require(feed_rate >= 0.0 && feed_rate <= 1.0,
            "reward: feed rate must be in [0, 1]");
    const double e = (weight - w_desired) / w_desired;
    switch (spec.shape) {
    case RewardShape::L2: return -(e * e) - spec.lambda * feed_rate * feed_rate;
    case RewardShape::L2L1: return -(e * e) - spec.lambda * std::abs(feed_rate);
    case RewardShape::L1:
        return -std::abs(e) - spec.lambda * std::abs(feed_rate);
    }
    throw std::invalid_argument("reward: unknown shape");
}

double total_feed(const std::vector<std::pair<double, double>>& weight_and_rate,
                  const GrowthParams& p) {
    double sum = 0.0;
    for (const auto& [w, f] : weight_and_rate) {
        require(w > 0.0, "total feed: weight must be positive");
        require(f >= 0.0 && f <= 1.0, "total feed: rate must be in [0, 1]");
        sum += f * p.rm_fraction * w;
    }
    return sum;
}

EnvContext::EnvContext(Mode mode, Grid grid, ActionSpace actions,
                       RewardSpec reward_spec, EnvConditions ambient,
                       GrowthParams params, std::vector<double> reference_daily,
                       double w0, Integrator integ)
    : mode_(mode),
      grid_(grid),
      actions_(std::move(actions)),
      reward_spec_(reward_spec),
      ambient_(ambient),
      params_(params),
      reference_(std::move(reference_daily)),
      w0_(w0),
      integ_(integ) {
    grid_.validate();
    actions_.validate();
    params_.validate();
    require(w0_ > 0.0, "env: w0 must be positive");
    require(!reference_.empty(), "env: reference trajectory is empty");
    require(mode_ == Mode::Tank || !actions_.has_temperature(),
            "env: cage mode has no temperature axis");
    require(mode_ == Mode::Cage || actions_.has_temperature(),
            "env: tank mode needs temperature levels");
    require(reward_spec_.lambda >= 0.0, "env: lambda must be non-negative");

    const StateId s0 = discretize(w0_, 0, grid_);
    initial_state_ = flat_index(s0);

    const int ns = grid_.state_count();
    const int na = actions_.size();
    const int nw = grid_.weight_bins();
    next_.assign(static_cast<std::size_t>(ns) * na, -1);
    reward_.assign(static_cast<std::size_t>(ns) * na, 0.0);

    for (int tb = 0; tb < grid_.time_bins(); ++tb) {
        const int day = grid_.bin_day(tb);
        const int day_next = day + grid_.dt;
        const double w_desired = reference_at(std::min(day_next, grid_.horizon));
        for (int wb = 0; wb < nw; ++wb) {
            const FishState from{grid_.weight_center(wb), day};
            for (int a = 0; a < na; ++a) {
                const double f = actions_.feed(a);
                const StepResult res = aquarl::step(from, f, conditions_for(a),
                                                    params_, grid_.dt, integ_);
                const std::size_t idx =
                    static_cast<std::size_t>(tb * nw + wb) * na + a;
                if (res.starved) {
                    next_[idx] = -1;
                    reward_[idx] = reward(res.state.weight, w_desired, f,
                                          reward_spec_);
                    continue;
                }
                const StateId to = discretize(res.state.weight, day_next, grid_);
                next_[idx] = flat_index(to);
                const int wb_next = snap_weight_bin(res.state.weight, grid_);
                reward_[idx] = reward(grid_.weight_center(wb_next), w_desired, f,
                                      reward_spec_);
            }
        }
    }
}

EnvConditions EnvContext::conditions_for(int action) const {
    EnvConditions env = ambient_;
    if (mode_ == Mode::Tank) env.temperature = actions_.temperature(action);
    return env;
}

int EnvContext::flat_index(StateId s) const {
    if (s.is_terminal()) return -1;
    return s.time_bin * grid_.weight_bins() + s.weight_bin;
}

StateId EnvContext::state_at(int flat) const {
    if (flat < 0) return StateId::terminal();
    const int nw = grid_.weight_bins();
    return StateId{flat % nw, flat / nw};
}

double EnvContext::reference_at(int day) const {
    const int last = static_cast<int>(reference_.size()) - 1;
    return reference_[static_cast<std::size_t>(std::clamp(day, 0, last))];
}

Transition EnvContext::env_step(StateId state, int action) const {
    require(!state.is_terminal(), "env_step: state is terminal");
    const EnvStep r = step(flat_index(state), action);
    return Transition{state_at(r.next), r.reward, r.done};
}

EnvStep EnvContext::step(int state, int action) const {
    require(state >= 0 && state < state_count(), "env step: state out of range");
    require(action >= 0 && action < action_count(),
            "env step: action out of range");
    const std::size_t idx =
        static_cast<std::size_t>(state) * action_count() + action;
    return EnvStep{next_[idx], reward_[idx], next_[idx] < 0};
}

PolicyTrajectory EnvContext::rollout_policy(const std::vector<int>& policy) const {
    require(static_cast<int>(policy.size()) == state_count(),
            "rollout: policy does not cover the state space");

    PolicyTrajectory out;
    out.daily_weight.reserve(static_cast<std::size_t>(grid_.horizon) + 1);
    out.daily_weight.push_back(w0_);

    FishState fish{w0_, 0};
    while (fish.day < grid_.horizon && !out.starved) {
        const StateId s = discretize(fish.weight, fish.day, grid_);
        const int a = policy[static_cast<std::size_t>(flat_index(s))];
        const double f = actions_.feed(a);
        const EnvConditions env = conditions_for(a);
        const int day_next = fish.day + grid_.dt;

        for (int d = 0; d < grid_.dt; ++d) {
            const StepResult res = aquarl::step(fish, f, env, params_, 1, integ_);
            const bool record = fish.day < grid_.horizon;
            fish = res.state;
            if (record) {
                out.daily_feed_rate.push_back(f);
                out.daily_temperature.push_back(env.temperature);
                if (fish.day <= grid_.horizon)
                    out.daily_weight.push_back(fish.weight);
            }
            if (res.starved) {
                out.starved = true;
                break;
            }
        }

        const double w_desired = reference_at(std::min(day_next, grid_.horizon));
        const double w_eval =
            out.starved ? fish.weight
                        : grid_.weight_center(snap_weight_bin(fish.weight, grid_));
        out.step_rewards.push_back(reward(w_eval, w_desired, f, reward_spec_));
        out.total_reward += out.step_rewards.back();
    }

    // A starved run keeps its arrays horizon-sized so metrics stay defined.
    while (out.daily_weight.size() < static_cast<std::size_t>(grid_.horizon) + 1)
        out.daily_weight.push_back(integ_.weight_floor);
    while (out.daily_feed_rate.size() < static_cast<std::size_t>(grid_.horizon)) {
        out.daily_feed_rate.push_back(0.0);
        out.daily_temperature.push_back(ambient_.temperature);
    }
    return out;
}

std::vector<double> load_reference_csv(const std::string& path, int horizon) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || split_csv_line(lines[0]) !=
                             std::vector<std::string>{"day", "weight_g"})
        throw std::runtime_error("reference csv: expected header day,weight_g in " +
                                 path);

    std::vector<std::pair<int, double>> samples;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != 2)
            throw std::runtime_error("reference csv: bad row " + lines[i]);
        const int day = std::stoi(cells[0]);
        const double w = std::stod(cells[1]);
        if (!samples.empty() && day <= samples.back().first)
            throw std::runtime_error("reference csv: days must be increasing");
        if (w <= 0.0)
            throw std::runtime_error("reference csv: weights must be positive");
        samples.emplace_back(day, w);
    }
    if (samples.empty()) throw std::runtime_error("reference csv: no samples");
    if (samples.front().first > 0)
        throw std::runtime_error("reference csv: must start at day 0");
    if (samples.back().first < horizon)
        throw std::runtime_error("reference csv: does not cover the horizon (" +
                                 std::to_string(horizon) + " days)");

    std::vector<double> daily(static_cast<std::size_t>(horizon) + 1, 0.0);
    std::size_t seg = 0;
    for (int d = 0; d <= horizon; ++d) {
        while (seg + 1 < samples.size() && samples[seg + 1].first < d) ++seg;
        const auto& [d0, w0] = samples[seg];
        if (d == d0 || seg + 1 == samples.size()) {
            daily[static_cast<std::size_t>(d)] = w0;
            continue;
        }
        const auto& [d1, w1] = samples[seg + 1];
        const double t = static_cast<double>(d - d0) / (d1 - d0);
        daily[static_cast<std::size_t>(d)] = w0 + t * (w1 - w0);
    }
    return daily;
}

void write_reference_csv(const std::string& path,
                         const std::vector<double>& daily_weights) {
    std::vector<std::string> lines;
    lines.reserve(daily_weights.size() + 1);
    lines.emplace_back("day,weight_g");
    for (std::size_t d = 0; d < daily_weights.size(); ++d)
        lines.push_back(std::to_string(d) + "," + format_number(daily_weights[d]));
    write_lines(path, lines);
}

} // namespace aquarl
