#include "aquarl/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "aquarl/csv.hpp"
#include "aquarl/growth_model.hpp"

namespace aquarl {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Hand-rolled draws: std:: distributions are implementation-defined, these
// keep artifacts byte-identical everywhere.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_below(std::mt19937_64& rng, int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(rng()) * static_cast<unsigned>(n)) >> 64);
}

std::string full_precision(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

QTable::QTable(int states, int actions)
    : states_(states),
      actions_(actions),
      values_(static_cast<std::size_t>(states) * actions, 0.0) {
    require(states >= 0 && actions >= 1, "qtable: bad shape");
}

int QTable::argmax(int state) const {
    int best = 0;
    double best_v = at(state, 0);
    for (int a = 1; a < actions_; ++a) {
        const double v = at(state, a);
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

double QTable::max_value(int state) const { return at(state, argmax(state)); }

Policy greedy_policy(const QTable& q) {
    Policy p(static_cast<std::size_t>(q.state_count()));
    for (int s = 0; s < q.state_count(); ++s) p[static_cast<std::size_t>(s)] = q.argmax(s);
    return p;
}

void TrainConfig::validate() const {
    require(alpha > 0.0 && alpha <= 1.0, "train config: alpha must be in (0, 1]");
    require(gamma >= 0.0 && gamma <= 1.0, "train config: gamma must be in [0, 1]");
    require(epsilon0 >= 0.0 && epsilon0 <= 1.0,
            "train config: epsilon0 must be in [0, 1]");
    require(t_epsilon > 0.0, "train config: t_epsilon must be positive");
    require(max_episodes >= 1, "train config: max_episodes must be positive");
    require(stop_patience >= 1, "train config: stop_patience must be positive");
}

double epsilon_schedule(int episode, const TrainConfig& cfg) {
    require(episode >= 0, "epsilon schedule: episode must be non-negative");
    const double e = cfg.epsilon0 * std::exp(-episode / cfg.t_epsilon);
    return std::clamp(e, 0.0, 1.0);
}

double td_update(QTable& q, int state, int action, double reward, int next_state,
                 const TrainConfig& cfg) {
    const double bootstrap = next_state < 0 ? 0.0 : q.max_value(next_state);
    const double current = q.at(state, action);
    const double updated =
        current + cfg.alpha * (reward + cfg.gamma * bootstrap - current);
    if (!std::isfinite(updated))
        throw NonFiniteError("td update: Q entry became non-finite");
    q.set(state, action, updated);
    return updated;
}

TrainResult train(const Environment& env, const TrainConfig& cfg) {
    cfg.validate();
    const int ns = env.state_count();
    const int na = env.action_count();
    require(ns >= 1 && na >= 1, "train: empty environment");
    require(env.initial_state() >= 0 && env.initial_state() < ns,
            "train: bad initial state");

    TrainResult out{QTable(ns, na), {}, {}, 0, false};
    std::mt19937_64 rng(cfg.seed);

    // Row argmaxes are maintained incrementally; a full recompute per step
    // would dominate the run time.
    std::vector<int> argmax(static_cast<std::size_t>(ns), 0);
    Policy prev_policy = argmax;
    std::vector<int> visits;
    if (cfg.visit_count_alpha)
        visits.assign(static_cast<std::size_t>(ns) * na, 0);

    const int max_episode_steps = 10 * ns + 1000;
    int stable_episodes = 0;

    for (int episode = 0; episode < cfg.max_episodes; ++episode) {
        const double eps = epsilon_schedule(episode, cfg);
        double episode_return = 0.0;

        int s = env.initial_state();
        for (int steps = 0; steps < max_episode_steps; ++steps) {
            int a;
            if (uniform01(rng) < eps)
                a = uniform_below(rng, na);
            else
                a = argmax[static_cast<std::size_t>(s)];

            const EnvStep r = env.step(s, a);
            episode_return += r.reward;

            TrainConfig step_cfg = cfg;
            if (cfg.visit_count_alpha) {
                int& count = visits[static_cast<std::size_t>(s) * na + a];
                ++count;
                step_cfg.alpha = 1.0 / count;
            }
            td_update(out.q, s, a, r.reward, r.next, step_cfg);
            argmax[static_cast<std::size_t>(s)] = out.q.argmax(s);

            if (r.done) break;
            s = r.next;
        }

        int changes = 0;
        for (int i = 0; i < ns; ++i)
            if (argmax[static_cast<std::size_t>(i)] !=
                prev_policy[static_cast<std::size_t>(i)])
                ++changes;
        prev_policy = argmax;

        out.log.push_back(EpisodeLog{episode, episode_return, eps, changes});
        out.episodes = episode + 1;

        if (changes == 0) {
            if (++stable_episodes >= cfg.stop_patience) {
                out.converged = true;
                break;
            }
        } else {
            stable_episodes = 0;
        }
    }

    out.policy = greedy_policy(out.q);
    return out;
}

QTable value_iteration_oracle(const Environment& env, double gamma,
                              double tolerance) {
    const int ns = env.state_count();
    const int na = env.action_count();
    QTable q(ns, na);

    const int max_sweeps = 1000000;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < ns; ++s) {
            for (int a = 0; a < na; ++a) {
                const EnvStep r = env.step(s, a);
                const double target =
                    r.reward + (r.next < 0 ? 0.0 : gamma * q.max_value(r.next));
                delta = std::max(delta, std::abs(target - q.at(s, a)));
                q.set(s, a, target);
            }
        }
        if (delta < tolerance) break;
    }
    return q;
}

Rollout rollout(const Environment& env, const Policy& policy, int max_steps) {
    require(static_cast<int>(policy.size()) == env.state_count(),
            "rollout: policy does not cover the state space");
    Rollout out;
    int s = env.initial_state();
    out.states.push_back(s);
    for (int steps = 0; steps < max_steps; ++steps) {
        const int a = policy[static_cast<std::size_t>(s)];
        const EnvStep r = env.step(s, a);
        out.actions.push_back(a);
        out.rewards.push_back(r.reward);
        out.total_reward += r.reward;
        if (r.done) break;
        s = r.next;
        out.states.push_back(s);
    }
    return out;
}

void save_qtable_csv(const QTable& q, const std::string& path) {
    std::vector<std::string> lines;
    lines.reserve(static_cast<std::size_t>(q.state_count()) * q.action_count() + 2);
    lines.push_back("# aquarl-qtable v1 states=" + std::to_string(q.state_count()) +
                    " actions=" + std::to_string(q.action_count()));
    lines.emplace_back("state,action,value");
    for (int s = 0; s < q.state_count(); ++s)
        for (int a = 0; a < q.action_count(); ++a)
            lines.push_back(std::to_string(s) + "," + std::to_string(a) + "," +
                            full_precision(q.at(s, a)));
    write_lines(path, lines);
}

QTable load_qtable_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    int ns = 0;
    int na = 0;
    if (lines.empty() ||
        std::sscanf(lines[0].c_str(), "# aquarl-qtable v1 states=%d actions=%d",
                    &ns, &na) != 2)
        throw std::runtime_error("qtable csv: bad or missing version header in " +
                                 path);
    if (lines.size() < 2 || lines[1] != "state,action,value")
        throw std::runtime_error("qtable csv: missing column header");

    QTable q(ns, na);
    std::size_t row = 2;
    for (int s = 0; s < ns; ++s) {
        for (int a = 0; a < na; ++a, ++row) {
            if (row >= lines.size())
                throw std::runtime_error("qtable csv: truncated table");
            const auto cells = split_csv_line(lines[row]);
            if (cells.size() != 3 || std::stoi(cells[0]) != s ||
                std::stoi(cells[1]) != a)
                throw std::runtime_error("qtable csv: unexpected row " +
                                         lines[row]);
            q.set(s, a, std::stod(cells[2]));
        }
    }
    return q;
}

void save_policy_csv(const Policy& policy, const std::string& path) {
    std::vector<std::string> lines;
    lines.reserve(policy.size() + 2);
    lines.push_back("# aquarl-policy v1 states=" +
                    std::to_string(policy.size()));
    lines.emplace_back("state,action");
    for (std::size_t s = 0; s < policy.size(); ++s)
        lines.push_back(std::to_string(s) + "," + std::to_string(policy[s]));
    write_lines(path, lines);
}

Policy load_policy_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    int ns = 0;
    if (lines.empty() ||
        std::sscanf(lines[0].c_str(), "# aquarl-policy v1 states=%d", &ns) != 1)
        throw std::runtime_error("policy csv: bad or missing version header in " +
                                 path);
    if (lines.size() < 2 || lines[1] != "state,action")
        throw std::runtime_error("policy csv: missing column header");

    Policy policy(static_cast<std::size_t>(ns));
    for (int s = 0; s < ns; ++s) {
        const std::size_t row = static_cast<std::size_t>(s) + 2;
        if (row >= lines.size())
            throw std::runtime_error("policy csv: truncated table");
        const auto cells = split_csv_line(lines[row]);
        if (cells.size() != 2 || std::stoi(cells[0]) != s)
            throw std::runtime_error("policy csv: unexpected row " + lines[row]);
        policy[static_cast<std::size_t>(s)] = std::stoi(cells[1]);
    }
    return policy;
}

} // namespace aquarl
