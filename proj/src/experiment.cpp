#include "aquarl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "aquarl/csv.hpp"

namespace aquarl {

namespace {

namespace fs = std::filesystem;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == value.size() && !value.empty(),
            "config: bad number for '" + key + "': " + value);
    return d;
}

int parse_int(const std::string& key, const std::string& value) {
    const double d = parse_double(key, value);
    require(d == std::floor(d) && std::abs(d) < 2e9,
            "config: '" + key + "' must be an integer");
    return static_cast<int>(d);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == value.size() && !value.empty(),
            "config: bad seed for '" + key + "': " + value);
    return v;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& value) {
    std::vector<std::uint64_t> seeds;
    std::string item;
    for (const char c : value + ",") {
        if (c == ',') {
            if (!item.empty()) seeds.push_back(parse_u64("seeds", item));
            item.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            item += c;
        }
    }
    require(!seeds.empty(), "config: seeds list is empty");
    return seeds;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
    std::string out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(seeds[i]);
    }
    return out;
}

void write_training_log(const std::string& path,
                        const std::vector<EpisodeLog>& log) {
    std::vector<std::string> lines;
    lines.reserve(log.size() + 1);
    lines.emplace_back("episode,return,epsilon,policy_changes");
    for (const EpisodeLog& e : log)
        lines.push_back(csv_join({std::to_string(e.episode),
                                  format_number(e.episode_return),
                                  format_number(e.epsilon),
                                  std::to_string(e.policy_changes)}));
    write_lines(path, lines);
}

void write_trajectory(const std::string& path, const PolicyTrajectory& traj,
                      const std::vector<double>& reference, int horizon) {
    std::vector<std::string> lines;
    lines.reserve(static_cast<std::size_t>(horizon) + 2);
    lines.emplace_back("day,weight_g,ref_weight_g,feed_rate,temperature_c");
    for (int d = 0; d <= horizon; ++d) {
        const std::size_t di = static_cast<std::size_t>(d);
        const std::size_t ai = static_cast<std::size_t>(std::min(d, horizon - 1));
        lines.push_back(csv_join({std::to_string(d),
                                  format_number(traj.daily_weight[di]),
                                  format_number(reference[di]),
                                  format_number(traj.daily_feed_rate[ai]),
                                  format_number(traj.daily_temperature[ai])}));
    }
    write_lines(path, lines);
}

EvalReport make_report(const ExperimentConfig& cfg,
                       const std::vector<double>& reference,
                       const PolicyTrajectory& traj, int episodes,
                       bool converged) {
    std::vector<std::pair<double, double>> ration;
    ration.reserve(static_cast<std::size_t>(cfg.grid.horizon));
    for (int d = 0; d < cfg.grid.horizon; ++d)
        ration.emplace_back(traj.daily_weight[static_cast<std::size_t>(d)],
                            traj.daily_feed_rate[static_cast<std::size_t>(d)]);

    EvalReport report;
    report.mape = mape(traj.daily_weight, reference);
    report.mae = mae(traj.daily_weight, reference);
    report.rmse = rmse(traj.daily_weight, reference);
    report.total_feed = total_feed(ration, cfg.params);
    report.final_weight = traj.daily_weight.back();
    report.fcr = report.final_weight > cfg.w0
                     ? fcr(report.total_feed, report.final_weight, cfg.w0)
                     : std::numeric_limits<double>::quiet_NaN();
    report.episodes_to_converge = episodes;
    report.converged = converged;
    return report;
}

std::vector<std::string> write_artifacts(const ExperimentConfig& cfg,
                                         const RunOutput& out,
                                         const std::vector<double>& reference,
                                         bool with_training) {
    if (cfg.out_dir.empty()) return {};
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    const auto path = [&](const char* name) {
        return (fs::path(cfg.out_dir) / name).string();
    };

    if (with_training) {
        write_training_log(path("training_log.csv"), out.training.log);
        written.push_back(path("training_log.csv"));
        save_qtable_csv(out.training.q, path("qtable.csv"));
        written.push_back(path("qtable.csv"));
    }
    save_policy_csv(out.training.policy, path("policy.csv"));
    written.push_back(path("policy.csv"));
    write_trajectory(path("trajectory.csv"), out.trajectory, reference,
                     cfg.grid.horizon);
    written.push_back(path("trajectory.csv"));
    write_lines(path("report.csv"),
                {eval_report_csv_header(), eval_report_csv_row(out.report)});
    written.push_back(path("report.csv"));
    return written;
}

} // namespace

void ExperimentConfig::apply(const std::string& raw_key,
                             const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    require(!key.empty(), "config: empty key");

    if (key == "mode") mode = mode_from_string(value);
    else if (key == "w_min") grid.w_min = parse_double(key, value);
    else if (key == "w_max") grid.w_max = parse_double(key, value);
    else if (key == "dw") grid.dw = parse_double(key, value);
    else if (key == "dt") grid.dt = parse_int(key, value);
    else if (key == "horizon") grid.horizon = parse_int(key, value);
    else if (key == "feeding_levels") feeding_levels = parse_int(key, value);
    else if (key == "feed_min") feed_min = parse_double(key, value);
    else if (key == "feed_max") feed_max = parse_double(key, value);
    else if (key == "temperature_levels") temperature_levels = parse_int(key, value);
    else if (key == "temp_min") temp_min = parse_double(key, value);
    else if (key == "temp_max") temp_max = parse_double(key, value);
    else if (key == "reward") reward.shape = reward_shape_from_string(value);
    else if (key == "lambda") reward.lambda = parse_double(key, value);
    else if (key == "alpha") train.alpha = parse_double(key, value);
    else if (key == "gamma") train.gamma = parse_double(key, value);
    else if (key == "epsilon0") train.epsilon0 = parse_double(key, value);
    else if (key == "t_epsilon") train.t_epsilon = parse_double(key, value);
    else if (key == "max_episodes") max_episodes = parse_int(key, value);
    else if (key == "stop_patience") train.stop_patience = parse_int(key, value);
    else if (key == "seed") train.seed = parse_u64(key, value);
    else if (key == "seeds") seeds = parse_seed_list(value);
    else if (key == "ambient_temperature") ambient.temperature = parse_double(key, value);
    else if (key == "dissolved_oxygen") ambient.dissolved_oxygen = parse_double(key, value);
    else if (key == "uia") ambient.uia = parse_double(key, value);
    else if (key == "w0") w0 = parse_double(key, value);
    else if (key == "sub_step") integrator.sub_step = parse_double(key, value);
    else if (key == "weight_floor") integrator.weight_floor = parse_double(key, value);
    else if (key == "reference") reference_csv = value == "generated" ? "" : value;
    else if (key == "reference_feed") reference_feed = parse_double(key, value);
    else if (key == "reference_temp") reference_temp = parse_double(key, value);
    else if (key == "out_dir") out_dir = value;
    else if (key == "m") params.m = parse_double(key, value);
    else if (key == "n") params.n = parse_double(key, value);
    else if (key == "h") params.h = parse_double(key, value);
    else if (key == "b") params.b = parse_double(key, value);
    else if (key == "a") params.a = parse_double(key, value);
    else if (key == "k_min") params.k_min = parse_double(key, value);
    else if (key == "j") params.j = parse_double(key, value);
    else if (key == "kappa") params.kappa = parse_double(key, value);
    else if (key == "t_opt") params.t_opt = parse_double(key, value);
    else if (key == "t_min") params.t_min = parse_double(key, value);
    else if (key == "t_max") params.t_max = parse_double(key, value);
    else if (key == "uia_crit") params.uia_crit = parse_double(key, value);
    else if (key == "uia_max") params.uia_max = parse_double(key, value);
    else if (key == "do_crit") params.do_crit = parse_double(key, value);
    else if (key == "do_min") params.do_min = parse_double(key, value);
    else if (key == "rho") params.rho = parse_double(key, value);
    else if (key == "rm_fraction") params.rm_fraction = parse_double(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void ExperimentConfig::validate() const {
    grid.validate();
    params.validate();
    require(feeding_levels >= 1, "config: feeding_levels must be at least 1");
    require(feed_min >= 0.0 && feed_max <= 1.0 && feed_min <= feed_max,
            "config: feeding range must satisfy 0 <= feed_min <= feed_max <= 1");
    if (mode == Mode::Tank) {
        require(temperature_levels >= 1,
                "config: tank mode needs temperature levels");
        require(temp_min <= temp_max,
                "config: temperature range must be ordered");
    }
    require(reward.lambda >= 0.0, "config: lambda must be non-negative");
    require(w0 > 0.0, "config: w0 must be positive");
    require(reference_feed >= 0.0 && reference_feed <= 1.0,
            "config: reference_feed must be in [0, 1]");
    require(integrator.sub_step > 0.0 && integrator.sub_step <= 1.0,
            "config: sub_step must be in (0, 1]");
    require(integrator.weight_floor > 0.0,
            "config: weight_floor must be positive");
    require(!seeds.empty(), "config: seeds list is empty");
    resolved_train(train.seed).validate();
}

TrainConfig ExperimentConfig::resolved_train(std::uint64_t seed) const {
    TrainConfig t = train;
    t.seed = seed;
    t.max_episodes =
        max_episodes.value_or(mode == Mode::Cage ? 15000 : 30000);
    return t;
}

ActionSpace ExperimentConfig::make_action_space() const {
    if (mode == Mode::Cage)
        return ActionSpace::cage(feeding_levels, feed_min, feed_max);
    return ActionSpace::tank(feeding_levels, feed_min, feed_max,
                             temperature_levels, temp_min, temp_max);
}

std::vector<double> ExperimentConfig::make_reference() const {
    if (!reference_csv.empty())
        return load_reference_csv(reference_csv, grid.horizon);
    ReferenceSchedule sched;
    sched.feed_rate = reference_feed;
    sched.env = EnvConditions{reference_temp, ambient.dissolved_oxygen,
                              ambient.uia};
    return generate_reference(w0, grid.horizon, params, sched, integrator);
}

EnvContext ExperimentConfig::make_env() const { return make_env(make_reference()); }

EnvContext ExperimentConfig::make_env(const std::vector<double>& reference) const {
    return EnvContext(mode, grid, make_action_space(), reward, ambient, params,
                      reference, w0, integrator);
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    const std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(i + 1) +
                                        " is not key = value: " + lines[i]);
        cfg.apply(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

void apply_overrides(ExperimentConfig& cfg,
                     const std::map<std::string, std::string>& overrides) {
    for (const auto& [key, value] : overrides) cfg.apply(key, value);
}

std::vector<ConfigKeyDoc> config_key_docs() {
    const ExperimentConfig d;
    return {
        {"mode", to_string(d.mode), "aquaculture system: cage or tank"},
        {"w_min", format_number(d.grid.w_min), "state-space weight lower bound [g]"},
        {"w_max", format_number(d.grid.w_max), "state-space weight upper bound [g]"},
        {"dw", format_number(d.grid.dw), "weight resolution [g]"},
        {"dt", format_number(d.grid.dt), "time resolution [days]"},
        {"horizon", format_number(d.grid.horizon), "culture duration [days]"},
        {"feeding_levels", format_number(d.feeding_levels), "number of feeding actions"},
        {"feed_min", format_number(d.feed_min), "lowest feeding rate"},
        {"feed_max", format_number(d.feed_max), "highest feeding rate"},
        {"temperature_levels", format_number(d.temperature_levels), "number of temperature actions (tank)"},
        {"temp_min", format_number(d.temp_min), "lowest temperature action [degC]"},
        {"temp_max", format_number(d.temp_max), "highest temperature action [degC]"},
        {"reward", to_string(d.reward.shape), "reward shape: L2, L2&L1 or L1"},
        {"lambda", format_number(d.reward.lambda), "feeding regularization weight"},
        {"alpha", format_number(d.train.alpha), "learning rate"},
        {"gamma", format_number(d.train.gamma), "discount factor"},
        {"epsilon0", format_number(d.train.epsilon0), "initial exploration probability"},
        {"t_epsilon", format_number(d.train.t_epsilon), "exploration phase duration [episodes]"},
        {"max_episodes", "15000 (cage) / 30000 (tank)", "training episode cap"},
        {"stop_patience", format_number(d.train.stop_patience), "unchanged-policy episodes to stop"},
        {"seed", std::to_string(d.train.seed), "RNG seed for a single run"},
        {"seeds", join_seeds(d.seeds), "seed list for sweeps"},
        {"ambient_temperature", format_number(d.ambient.temperature), "cage water temperature [degC]"},
        {"dissolved_oxygen", format_number(d.ambient.dissolved_oxygen), "water DO [mg/l]"},
        {"uia", format_number(d.ambient.uia), "water un-ionized ammonia [mg/l]"},
        {"w0", format_number(d.w0), "stocking weight [g]"},
        {"sub_step", format_number(d.integrator.sub_step), "Euler sub-step [days]"},
        {"weight_floor", format_number(d.integrator.weight_floor), "starvation weight floor [g]"},
        {"reference", "generated", "'generated' or a day,weight_g CSV path"},
        {"reference_feed", format_number(d.reference_feed), "generated-reference feeding rate"},
        {"reference_temp", format_number(d.reference_temp), "generated-reference temperature [degC]"},
        {"out_dir", "(unset)", "artifact output directory"},
        {"m", format_number(d.params.m), "anabolism body-weight exponent"},
        {"n", format_number(d.params.n), "catabolism body-weight exponent"},
        {"h", format_number(d.params.h), "food consumption coefficient"},
        {"b", format_number(d.params.b), "food assimilation efficiency"},
        {"a", format_number(d.params.a), "assimilated fraction lost"},
        {"k_min", format_number(d.params.k_min), "fasting catabolism base"},
        {"j", format_number(d.params.j), "catabolism temperature slope"},
        {"kappa", format_number(d.params.kappa), "temperature response shape"},
        {"t_opt", format_number(d.params.t_opt), "optimal temperature [degC]"},
        {"t_min", format_number(d.params.t_min), "minimum temperature [degC]"},
        {"t_max", format_number(d.params.t_max), "maximum temperature [degC]"},
        {"uia_crit", format_number(d.params.uia_crit), "critical UIA [mg/l]"},
        {"uia_max", format_number(d.params.uia_max), "maximum UIA [mg/l]"},
        {"do_crit", format_number(d.params.do_crit), "critical DO [mg/l]"},
        {"do_min", format_number(d.params.do_min), "minimum DO [mg/l]"},
        {"rho", format_number(d.params.rho), "photoperiod factor"},
        {"rm_fraction", format_number(d.params.rm_fraction), "maximal daily ration fraction"},
    };
}

RunOutput run(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<double> reference = cfg.make_reference();
    const EnvContext env = cfg.make_env(reference);

    RunOutput out{{}, train(env, cfg.resolved_train(cfg.train.seed)), {}, {}};
    out.trajectory = env.rollout_policy(out.training.policy);
    out.report = make_report(cfg, reference, out.trajectory,
                             out.training.episodes, out.training.converged);
    out.artifacts = write_artifacts(cfg, out, reference, true);
    return out;
}

RunOutput evaluate(const ExperimentConfig& cfg, const QTable& q) {
    cfg.validate();
    const std::vector<double> reference = cfg.make_reference();
    const EnvContext env = cfg.make_env(reference);
    require(q.state_count() == env.state_count() &&
                q.action_count() == env.action_count(),
            "evaluate: Q-table shape does not match the configuration");

    RunOutput out{{}, TrainResult{q, greedy_policy(q), {}, 0, true}, {}, {}};
    out.trajectory = env.rollout_policy(out.training.policy);
    out.report = make_report(cfg, reference, out.trajectory, 0, true);
    out.artifacts = write_artifacts(cfg, out, reference, false);
    return out;
}

long long SweepSpec::cell_count() const {
    const auto dim = [](std::size_t n) {
        return static_cast<long long>(std::max<std::size_t>(n, 1));
    };
    return dim(dw_values.size()) * dim(dt_values.size()) *
           dim(reward_shapes.size()) * dim(alpha_values.size()) *
           dim(gamma_values.size()) * dim(t_epsilon_values.size());
}

SweepResult sweep(const SweepSpec& spec, const ExperimentConfig& base) {
    base.validate();
    require(spec.cell_count() <= spec.max_cells,
            "sweep: cell count exceeds the configured cap");

    SweepResult result;
    if (!spec.dw_values.empty()) result.axis_names.emplace_back("dw");
    if (!spec.dt_values.empty()) result.axis_names.emplace_back("dt");
    if (!spec.reward_shapes.empty()) result.axis_names.emplace_back("reward");
    if (!spec.alpha_values.empty()) result.axis_names.emplace_back("alpha");
    if (!spec.gamma_values.empty()) result.axis_names.emplace_back("gamma");
    if (!spec.t_epsilon_values.empty())
        result.axis_names.emplace_back("t_epsilon");

    const auto or_default = [](const auto& values, auto fallback) {
        using T = std::decay_t<decltype(fallback)>;
        if (values.empty()) return std::vector<T>{fallback};
        return std::vector<T>(values.begin(), values.end());
    };
    const std::vector<double> dws = or_default(spec.dw_values, base.grid.dw);
    const std::vector<int> dts = or_default(spec.dt_values, base.grid.dt);
    const std::vector<RewardShape> shapes =
        or_default(spec.reward_shapes, base.reward.shape);
    const std::vector<double> alphas =
        or_default(spec.alpha_values, base.train.alpha);
    const std::vector<double> gammas =
        or_default(spec.gamma_values, base.train.gamma);
    const std::vector<double> tepss =
        or_default(spec.t_epsilon_values, base.train.t_epsilon);

    for (const double dw : dws)
        for (const int dt : dts)
            for (const RewardShape shape : shapes)
                for (const double alpha : alphas)
                    for (const double gamma : gammas)
                        for (const double teps : tepss) {
                            SweepCell cell;
                            cell.dw = dw;
                            cell.dt = dt;
                            cell.reward_shape = shape;
                            cell.alpha = alpha;
                            cell.gamma = gamma;
                            cell.t_epsilon = teps;
                            result.cells.push_back(cell);
                        }

    const auto run_cell = [&](std::size_t index) {
        SweepCell& cell = result.cells[index];
        EvalReport sum;
        int converged = 0;
        int ok = 0;
        for (const std::uint64_t seed : base.seeds) {
            ExperimentConfig cfg = base;
            cfg.grid.dw = cell.dw;
            cfg.grid.dt = cell.dt;
            cfg.reward.shape = cell.reward_shape;
            cfg.train.alpha = cell.alpha;
            cfg.train.gamma = cell.gamma;
            cfg.train.t_epsilon = cell.t_epsilon;
            cfg.train.seed = seed;
            if (!base.out_dir.empty())
                cfg.out_dir = (fs::path(base.out_dir) /
                               ("cell" + std::to_string(index) + "_seed" +
                                std::to_string(seed)))
                                  .string();
            try {
                const RunOutput out = run(cfg);
                sum.mape += out.report.mape;
                sum.mae += out.report.mae;
                sum.rmse += out.report.rmse;
                sum.total_feed += out.report.total_feed;
                sum.final_weight += out.report.final_weight;
                sum.fcr += out.report.fcr;
                sum.episodes_to_converge += out.report.episodes_to_converge;
                converged += out.report.converged ? 1 : 0;
                ++ok;
            } catch (const std::exception& e) {
                if (cell.error.empty()) cell.error = e.what();
            }
        }
        cell.seeds_run = ok;
        if (ok > 0) {
            cell.mean_report.mape = sum.mape / ok;
            cell.mean_report.mae = sum.mae / ok;
            cell.mean_report.rmse = sum.rmse / ok;
            cell.mean_report.total_feed = sum.total_feed / ok;
            cell.mean_report.final_weight = sum.final_weight / ok;
            cell.mean_report.fcr = sum.fcr / ok;
            cell.mean_report.episodes_to_converge = static_cast<int>(std::llround(
                static_cast<double>(sum.episodes_to_converge) / ok));
            cell.converged_fraction = static_cast<double>(converged) / ok;
            cell.mean_report.converged = converged == ok;
        }
    };

    const int hardware = static_cast<int>(std::thread::hardware_concurrency());
    const int jobs = std::clamp(spec.jobs > 0 ? spec.jobs : hardware, 1,
                                static_cast<int>(result.cells.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < result.cells.size();
                 i = next.fetch_add(1))
                run_cell(i);
        });
    for (std::thread& w : workers) w.join();

    if (!base.out_dir.empty()) {
        fs::create_directories(base.out_dir);
        std::vector<std::string> lines{sweep_csv_header(result)};
        for (const SweepCell& cell : result.cells)
            lines.push_back(sweep_csv_row(result, cell));
        write_lines((fs::path(base.out_dir) / "sweep.csv").string(), lines);
    }
    return result;
}

std::string sweep_csv_header(const SweepResult& result) {
    std::vector<std::string> cols = result.axis_names;
    for (const char* c : {"episodes", "mape_pct", "mae_g", "rmse_g",
                          "total_feed_g", "final_weight_g", "fcr",
                          "converged_fraction", "seeds", "error"})
        cols.emplace_back(c);
    return csv_join(cols);
}

std::string sweep_csv_row(const SweepResult& result, const SweepCell& cell) {
    std::vector<std::string> cols;
    for (const std::string& axis : result.axis_names) {
        if (axis == "dw") cols.push_back(format_number(cell.dw));
        else if (axis == "dt") cols.push_back(std::to_string(cell.dt));
        else if (axis == "reward") cols.push_back(to_string(cell.reward_shape));
        else if (axis == "alpha") cols.push_back(format_number(cell.alpha));
        else if (axis == "gamma") cols.push_back(format_number(cell.gamma));
        else cols.push_back(format_number(cell.t_epsilon));
    }
    const EvalReport& r = cell.mean_report;
    cols.push_back(std::to_string(r.episodes_to_converge));
    cols.push_back(format_number(r.mape));
    cols.push_back(format_number(r.mae));
    cols.push_back(format_number(r.rmse));
    cols.push_back(format_number(r.total_feed));
    cols.push_back(format_number(r.final_weight));
    cols.push_back(format_number(r.fcr));
    cols.push_back(format_number(cell.converged_fraction));
    cols.push_back(std::to_string(cell.seeds_run));
    cols.push_back(cell.error);
    return csv_join(cols);
}

} // namespace aquarl
