#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aquarl/growth_model.hpp"
#include "aquarl/mdp.hpp"
#include "aquarl/metrics.hpp"
#include "aquarl/qlearn.hpp"

namespace aquarl {

// Everything one seeded run needs. Every field has a default equal to the
// published setup where one is stated; the rest are documented choices.
struct ExperimentConfig {
    Mode mode = Mode::Tank;
    Grid grid{};

    int feeding_levels = 10;
    double feed_min = 0.01;
    double feed_max = 1.0;
    int temperature_levels = 12;
    double temp_min = 29.6;
    double temp_max = 30.7;

    RewardSpec reward{};
    TrainConfig train{};
    // max_episodes when the config does not pin one: cages 15000, tanks 30000.
    std::optional<int> max_episodes;

    EnvConditions ambient{29.7, 0.3, 0.0}; // cage water; tanks take T from actions
    GrowthParams params{};
    Integrator integrator{};
    double w0 = 6.0;

    std::string reference_csv;    // empty: generate from the model
    double reference_feed = 1.0;  // generated-reference ration
    double reference_temp = 33.0; // generated-reference water temperature

    std::string out_dir;                            // empty: keep results in memory
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    // Applies one "key = value" override; throws std::invalid_argument on an
    // unknown key or unparseable value.
    void apply(const std::string& key, const std::string& value);
    void validate() const;

    TrainConfig resolved_train(std::uint64_t seed) const;
    ActionSpace make_action_space() const;
    std::vector<double> make_reference() const;
    EnvContext make_env() const;
    EnvContext make_env(const std::vector<double>& reference) const;
};

// Flat "key = value" config file ('#' comments, blank lines ignored).
ExperimentConfig load_config(const std::string& path);
void apply_overrides(ExperimentConfig& cfg,
                     const std::map<std::string, std::string>& overrides);

// Every accepted config key with its default and a one-line description;
// the CLI prints this from --help.
struct ConfigKeyDoc {
    std::string key;
    std::string default_value;
    std::string help;
};
std::vector<ConfigKeyDoc> config_key_docs();

struct RunOutput {
    EvalReport report;
    TrainResult training;
    PolicyTrajectory trajectory;
    std::vector<std::string> artifacts; // files written (empty without out_dir)
};

// Trains with cfg.train.seed, rolls out the greedy policy, evaluates it
// against the reference, and (with out_dir set) writes training_log.csv,
// trajectory.csv, qtable.csv, policy.csv and report.csv.
RunOutput run(const ExperimentConfig& cfg);

// Evaluates an existing Q-table (no training) through the same pipeline.
RunOutput evaluate(const ExperimentConfig& cfg, const QTable& q);

// Named axes crossed into a run grid. Empty axes stay at the base config.
struct SweepSpec {
    std::vector<double> dw_values;
    std::vector<int> dt_values;
    std::vector<RewardShape> reward_shapes;
    std::vector<double> alpha_values;
    std::vector<double> gamma_values;
    std::vector<double> t_epsilon_values;
    int max_cells = 512;
    int jobs = 0; // 0: hardware concurrency

    long long cell_count() const;
};

struct SweepCell {
    double dw = 0.0;
    int dt = 0;
    RewardShape reward_shape = RewardShape::L2;
    double alpha = 0.0;
    double gamma = 0.0;
    double t_epsilon = 0.0;
    EvalReport mean_report;        // over the seeds that succeeded
    double converged_fraction = 0.0;
    int seeds_run = 0;
    std::string error; // first per-seed failure, if any
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::vector<std::string> axis_names; // swept axes, canonical order
};

// One run per cell per seed, cells in parallel; per-cell failures are
// recorded in the row and the sweep continues. With out_dir set, per-run
// artifacts land in out_dir/cell<i>_seed<s>/ and the table in sweep.csv.
SweepResult sweep(const SweepSpec& spec, const ExperimentConfig& base);

std::string sweep_csv_header(const SweepResult& result);
std::string sweep_csv_row(const SweepResult& result, const SweepCell& cell);

} // namespace aquarl
