#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aquarl/csv.hpp"
#include "aquarl/experiment.hpp"

namespace {

using namespace aquarl;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string config_key_footer() {
    std::string out = "Config keys (also accepted as --set key=value):\n";
    for (const ConfigKeyDoc& doc : config_key_docs()) {
        out += "  " + doc.key;
        out.append(doc.key.size() < 20 ? 20 - doc.key.size() : 1, ' ');
        out += doc.help + " [default: " + doc.default_value + "]\n";
    }
    return out;
}

ExperimentConfig load_base_config(const std::string& config_path,
                                  const std::vector<std::string>& sets) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = load_config(config_path);
        } catch (const std::runtime_error& e) {
            // An unreadable config file is a usage error, not a runtime one.
            throw std::invalid_argument(e.what());
        }
    }
    for (const std::string& kv : sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + kv);
        cfg.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("AQUARL_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        return std::stoull(raw);
    } catch (const std::exception&) {
        throw std::invalid_argument("AQUARL_SEED is not a valid seed: " +
                                    std::string(raw));
    }
}

void print_run_summary(const ExperimentConfig& cfg, const RunOutput& out) {
    const EvalReport& r = out.report;
    std::cout << "mode            " << to_string(cfg.mode) << "\n"
              << "seed            " << cfg.train.seed << "\n"
              << "episodes        " << r.episodes_to_converge
              << (r.converged ? "" : "  (no convergence)") << "\n"
              << "final weight    " << format_number(r.final_weight) << " g\n"
              << "total feed      " << format_number(r.total_feed) << " g\n"
              << "FCR             " << format_number(r.fcr) << "\n"
              << "MAPE            " << format_number(r.mape) << " %\n"
              << "MAE             " << format_number(r.mae) << " g\n"
              << "RMSE            " << format_number(r.rmse) << " g\n";
    for (const std::string& path : out.artifacts)
        std::cerr << "wrote " << path << "\n";
}

std::vector<double> parse_double_list(const std::string& raw) {
    std::vector<double> out;
    std::string item;
    for (const char c : raw + ",") {
        if (c == ',') {
            if (!item.empty()) out.push_back(std::stod(item));
            item.clear();
        } else {
            item += c;
        }
    }
    return out;
}

int run_simulate(const std::string& config_path,
                 const std::vector<std::string>& sets, int days, double feed,
                 std::optional<double> temp) {
    ExperimentConfig cfg = load_base_config(config_path, sets);
    cfg.params.validate();
    if (days < 1) throw std::invalid_argument("simulate: --days must be >= 1");

    EnvConditions env = cfg.ambient;
    env.temperature = temp.value_or(cfg.reference_temp);
    FishState fish{cfg.w0, 0};
    std::cout << "day,weight_g\n";
    for (int d = 1; d <= days; ++d) {
        const StepResult res = step(fish, feed, env, cfg.params, 1, cfg.integrator);
        fish = res.state;
        std::cout << d << "," << format_number(fish.weight) << "\n";
        if (res.starved) {
            std::cerr << "fish starved at day " << d << "\n";
            break;
        }
    }
    return kExitOk;
}

int run_reference(const std::string& config_path,
                  const std::vector<std::string>& sets, const std::string& from,
                  const std::string& out_file) {
    ExperimentConfig cfg = load_base_config(config_path, sets);
    cfg.params.validate();

    std::vector<double> daily;
    if (!from.empty()) {
        daily = load_reference_csv(from, cfg.grid.horizon);
    } else {
        ReferenceSchedule sched;
        sched.feed_rate = cfg.reference_feed;
        sched.env = EnvConditions{cfg.reference_temp,
                                  cfg.ambient.dissolved_oxygen, cfg.ambient.uia};
        daily = generate_reference(cfg.w0, cfg.grid.horizon, cfg.params, sched,
                                   cfg.integrator);
    }

    if (!out_file.empty()) {
        write_reference_csv(out_file, daily);
        std::cerr << "wrote " << out_file << "\n";
    } else {
        std::cout << "day,weight_g\n";
        for (std::size_t d = 0; d < daily.size(); ++d)
            std::cout << d << "," << format_number(daily[d]) << "\n";
    }
    std::cerr << "days " << daily.size() - 1 << ", final weight "
              << format_number(daily.back()) << " g\n";
    return kExitOk;
}

int run_train(const std::string& config_path,
              const std::vector<std::string>& sets,
              std::optional<std::uint64_t> seed, const std::string& out_dir) {
    ExperimentConfig cfg = load_base_config(config_path, sets);
    if (!seed) seed = env_seed();
    if (!seed)
        throw std::invalid_argument(
            "train: --seed (or AQUARL_SEED) is required");
    cfg.train.seed = *seed;
    cfg.out_dir = out_dir;
    cfg.validate();

    const RunOutput out = run(cfg);
    print_run_summary(cfg, out);
    return kExitOk;
}

int run_evaluate(const std::string& config_path,
                 const std::vector<std::string>& sets,
                 const std::string& qtable_path, const std::string& out_dir) {
    ExperimentConfig cfg = load_base_config(config_path, sets);
    cfg.out_dir = out_dir;
    cfg.validate();

    const QTable q = load_qtable_csv(qtable_path);
    const RunOutput out = evaluate(cfg, q);
    print_run_summary(cfg, out);
    return kExitOk;
}

int run_sweep(const std::string& config_path,
              const std::vector<std::string>& sets,
              std::optional<std::uint64_t> seed, const std::string& out_dir,
              const std::string& dw_list, const std::string& dt_list,
              const std::string& reward_list, const std::string& alpha_list,
              const std::string& gamma_list, const std::string& teps_list,
              bool seeds_from_config, int jobs) {
    ExperimentConfig cfg = load_base_config(config_path, sets);
    if (!seed) seed = env_seed();
    if (!seed)
        throw std::invalid_argument(
            "sweep: --seed (or AQUARL_SEED) is required");
    cfg.train.seed = *seed;
    if (!seeds_from_config) {
        cfg.seeds.clear();
        for (std::uint64_t i = 0; i < 10; ++i) cfg.seeds.push_back(*seed + i);
    }
    cfg.out_dir = out_dir;
    cfg.validate();

    SweepSpec spec;
    spec.jobs = jobs;
    spec.dw_values = parse_double_list(dw_list);
    for (const double v : parse_double_list(dt_list))
        spec.dt_values.push_back(static_cast<int>(v));
    if (!reward_list.empty()) {
        std::string item;
        for (const char c : reward_list + ",") {
            if (c == ',') {
                if (!item.empty())
                    spec.reward_shapes.push_back(reward_shape_from_string(item));
                item.clear();
            } else {
                item += c;
            }
        }
    }
    spec.alpha_values = parse_double_list(alpha_list);
    spec.gamma_values = parse_double_list(gamma_list);
    spec.t_epsilon_values = parse_double_list(teps_list);

    const SweepResult result = sweep(spec, cfg);
    std::cout << sweep_csv_header(result) << "\n";
    for (const SweepCell& cell : result.cells)
        std::cout << sweep_csv_row(result, cell) << "\n";
    std::cerr << result.cells.size() << " cells x " << cfg.seeds.size()
              << " seeds done\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aquarl: fish growth simulation and Q-learning feeding control"};
    app.require_subcommand(1);
    app.footer(config_key_footer());

    std::string config_path;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "key = value config file")
        ->capture_default_str();
    app.add_option("--set", sets, "config override key=value (repeatable)");

    auto* simulate = app.add_subcommand(
        "simulate", "integrate the growth model under a fixed ration");
    int days = 120;
    double feed = 1.0;
    std::optional<double> temp;
    simulate->add_option("--days", days, "days to simulate")->capture_default_str();
    simulate->add_option("--feed", feed, "relative feeding rate in [0,1]")
        ->capture_default_str();
    simulate->add_option("--temp", temp, "water temperature [degC]");

    auto* reference = app.add_subcommand(
        "reference", "generate or inspect the desired growth trajectory");
    std::string ref_from;
    std::string ref_out;
    reference->add_option("--from", ref_from, "existing day,weight_g CSV to inspect");
    reference->add_option("--out", ref_out, "write CSV here instead of stdout");

    auto* train_cmd =
        app.add_subcommand("train", "train a feeding policy and evaluate it");
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    train_cmd->add_option("--seed", seed, "RNG seed (or set AQUARL_SEED)");
    train_cmd->add_option("--out-dir", out_dir, "artifact directory")->required();

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "roll out a saved Q-table without training");
    std::string qtable_path;
    std::string eval_out_dir;
    evaluate_cmd->add_option("--qtable", qtable_path, "qtable.csv to load")
        ->required();
    evaluate_cmd->add_option("--out-dir", eval_out_dir, "artifact directory");

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "cross-product sensitivity sweep over config axes");
    std::optional<std::uint64_t> sweep_seed;
    std::string sweep_out_dir;
    std::string dw_list, dt_list, reward_list, alpha_list, gamma_list, teps_list;
    bool seeds_from_config = false;
    int jobs = 0;
    sweep_cmd->add_option("--seed", sweep_seed,
                          "base seed; runs use seed..seed+9 (or AQUARL_SEED)");
    sweep_cmd->add_option("--out-dir", sweep_out_dir, "artifact directory")
        ->required();
    sweep_cmd->add_option("--dw", dw_list, "comma list of weight resolutions");
    sweep_cmd->add_option("--dt", dt_list, "comma list of time resolutions");
    sweep_cmd->add_option("--reward", reward_list, "comma list of reward shapes");
    sweep_cmd->add_option("--alpha", alpha_list, "comma list of learning rates");
    sweep_cmd->add_option("--gamma", gamma_list, "comma list of discount factors");
    sweep_cmd->add_option("--t-epsilon", teps_list,
                          "comma list of exploration durations");
    sweep_cmd->add_flag("--seeds-from-config", seeds_from_config,
                        "use the config 'seeds' list instead of seed..seed+9");
    sweep_cmd->add_option("--jobs", jobs, "parallel cells (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed())
            return run_simulate(config_path, sets, days, feed, temp);
        if (reference->parsed())
            return run_reference(config_path, sets, ref_from, ref_out);
        if (train_cmd->parsed())
            return run_train(config_path, sets, seed, out_dir);
        if (evaluate_cmd->parsed())
            return run_evaluate(config_path, sets, qtable_path, eval_out_dir);
        if (sweep_cmd->parsed())
            return run_sweep(config_path, sets, sweep_seed, sweep_out_dir,
                             dw_list, dt_list, reward_list, alpha_list,
                             gamma_list, teps_list, seeds_from_config, jobs);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
