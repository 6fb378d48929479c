// Experiment driver for the shared-storage pool simulator: data generation,
// agent training, evaluation, threshold sweeps and ablation reports.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "sesim/report.hpp"

namespace fs = std::filesystem;
using namespace sesim;

namespace {

std::string resolve_data_path(const std::string& path) {
    if (fs::path(path).is_absolute() || fs::exists(path)) return path;
    if (const char* dir = std::getenv("SESIM_DATA_DIR"))
        return (fs::path(dir) / path).string();
    return path;
}

SesConfig load_config_opt(const std::string& path) {
    if (path.empty()) return SesConfig{};
    return load_ses_config(resolve_data_path(path));
}

Scenario load_scenario_arg(const std::string& path) {
    std::string p = resolve_data_path(path);
    if (fs::is_directory(p)) p = (fs::path(p) / "scenario.manifest").string();
    return load_scenario(p);
}

std::string ckpt_name(int case_number, const std::string& agent, std::uint64_t seed) {
    std::ostringstream ss;
    ss << "case" << case_number << "_" << agent << "_seed" << seed << ".ckpt";
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shared energy storage pool simulator and trainer"};
    app.require_subcommand(1);

    // ---- gen-data ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic scenario");
    GenParams gp;
    std::string gen_out = "data";
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--seed", gp.seed);
    gen->add_option("--prosumers", gp.n_prosumers);
    gen->add_option("--days", gp.days);
    gen->add_option("--mismatch-frac", gp.mismatch_frac);
    gen->add_option("--demand-low", gp.mean_demand_low, "kWh/day band");
    gen->add_option("--demand-high", gp.mean_demand_high);
    gen->add_option("--pv-peak", gp.pv_peak_kw);
    gen->add_option("--ess-capacity", gp.ess_capacity_kwh);
    gen->add_option("--ess-power", gp.ess_power_kw);

    // ---- train ---------------------------------------------------------------
    auto* tr = app.add_subcommand("train", "train an agent, write checkpoint + curve");
    std::string tr_scenario, tr_out = ".", tr_agent = "cnepr", tr_config;
    TrainConfig tc;
    tr->add_option("--scenario", tr_scenario)->required();
    tr->add_option("--case", tc.case_number, "ablation case 1-4");
    tr->add_option("--seed", tc.seed);
    tr->add_option("--episodes", tc.episodes);
    tr->add_option("--agent", tr_agent, "cnepr|td3|random");
    tr->add_option("--config", tr_config, "SES config file (key=value)");
    tr->add_option("--out", tr_out, "output directory");

    // ---- eval ----------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "run the full lifecycle under a checkpoint");
    std::string ev_scenario, ev_ckpt, ev_out = ".", ev_config, ev_agent = "cnepr";
    int ev_case = 1;
    std::uint64_t ev_seed = 1;
    ev->add_option("--scenario", ev_scenario)->required();
    ev->add_option("--ckpt", ev_ckpt, "checkpoint file (omit for a random policy)");
    ev->add_option("--case", ev_case);
    ev->add_option("--seed", ev_seed);
    ev->add_option("--agent", ev_agent, "cnepr|td3|random");
    ev->add_option("--config", ev_config);
    ev->add_option("--out", ev_out);

    // ---- sweep-xi --------------------------------------------------------------
    auto* sx = app.add_subcommand("sweep-xi", "contract-threshold sweep, 0%..90%");
    std::string sx_scenario, sx_ckpt, sx_out = "sweep_xi.csv", sx_config;
    std::uint64_t sx_seed = 1;
    sx->add_option("--scenario", sx_scenario)->required();
    sx->add_option("--ckpt", sx_ckpt)->required();
    sx->add_option("--seed", sx_seed);
    sx->add_option("--config", sx_config);
    sx->add_option("--out", sx_out);

    // ---- sweep-triggers ----------------------------------------------------------
    auto* st = app.add_subcommand("sweep-triggers", "virtual-trigger threshold surface");
    std::string st_scenario, st_ckpt, st_out = "sweep_triggers.csv", st_config;
    std::uint64_t st_seed = 1;
    st->add_option("--scenario", st_scenario)->required();
    st->add_option("--ckpt", st_ckpt)->required();
    st->add_option("--seed", st_seed);
    st->add_option("--config", st_config);
    st->add_option("--out", st_out);

    // ---- ablation ------------------------------------------------------------
    auto* ab = app.add_subcommand("ablation", "cases 1-4 comparison from checkpoints");
    std::string ab_scenario, ab_dir = ".", ab_out = "ablation.csv", ab_config;
    std::vector<std::uint64_t> ab_seeds{1};
    ab->add_option("--scenario", ab_scenario)->required();
    ab->add_option("--ckpt-dir", ab_dir, "directory with case{N}_cnepr_seed{S}.ckpt files");
    ab->add_option("--seeds", ab_seeds)->delimiter(',');
    ab->add_option("--config", ab_config);
    ab->add_option("--out", ab_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            fs::create_directories(gen_out);
            Scenario sc = generate_synthetic(gp);
            write_scenario(sc, gen_out);
            std::cout << "wrote scenario: " << gp.n_prosumers << " prosumers, " << gp.days
                      << " days, seed " << gp.seed << " -> " << gen_out << "\n";
        } else if (*tr) {
            Scenario sc = load_scenario_arg(tr_scenario);
            SesConfig cfg = load_config_opt(tr_config);
            tc.kind = parse_agent_kind(tr_agent);
            fs::create_directories(tr_out);
            TrainResult res = train(sc, cfg, tc);
            const std::string stem =
                (fs::path(tr_out) / ckpt_name(tc.case_number, tr_agent, tc.seed)).string();
            if (tc.kind != AgentKind::Random) res.agent.save(stem);
            write_curve_csv(res.episode_returns, stem + ".curve.csv");
            std::cout << "trained " << tr_agent << " case " << tc.case_number << " seed "
                      << tc.seed << "; last-100 mean return "
                      << [&] {
                             double s = 0.0;
                             std::size_t n = std::min<std::size_t>(100, res.episode_returns.size());
                             for (std::size_t i = res.episode_returns.size() - n;
                                  i < res.episode_returns.size(); ++i)
                                 s += res.episode_returns[i];
                             return s / static_cast<double>(n);
                         }()
                      << " $/day\n";
        } else if (*ev) {
            Scenario sc = load_scenario_arg(ev_scenario);
            SesConfig cfg = load_config_opt(ev_config);
            fs::create_directories(ev_out);

            std::unique_ptr<Policy> policy;
            Td3Agent agent;
            if (!ev_ckpt.empty()) {
                agent = Td3Agent::load(resolve_data_path(ev_ckpt));
                policy = std::make_unique<AgentPolicy>(agent);
            } else {
                policy = std::make_unique<RandomPolicy>(ev_seed);
            }
            RunSummary run = run_case(sc, cfg, CaseConfig::from_case(ev_case), *policy);
            const std::uint64_t h = config_hash(cfg);
            write_daily_csv(run, ev_seed, h, (fs::path(ev_out) / "daily.csv").string());
            write_matching_csv(run.first_matching, run.first_construction_bills,
                               (fs::path(ev_out) / "matching.csv").string());
            std::ofstream sum((fs::path(ev_out) / "summary.txt").string());
            sum.precision(9);
            sum << "days=" << run.days.size()
                << "\nretained=" << run.first_matching.retained.size()
                << "\nreconstructions=" << run.reconstructions
                << "\nmean_daily_objective=" << run.mean_daily_objective()
                << "\ng_dw=" << deposit_withdraw_gain(run.coeff_history) << "\nseed=" << ev_seed
                << "\nconfig=" << std::hex << h << "\n";
            std::cout << "eval: mean daily objective " << run.mean_daily_objective() << " $/day, "
                      << run.first_matching.retained.size() << " retained\n";
        } else if (*sx) {
            Scenario sc = load_scenario_arg(sx_scenario);
            SesConfig cfg = load_config_opt(sx_config);
            Td3Agent agent = Td3Agent::load(resolve_data_path(sx_ckpt));
            AgentPolicy policy(agent);
            std::vector<double> grid;
            for (int i = 0; i <= 9; ++i) grid.push_back(i / 10.0);
            auto rows = sweep_xi(sc, cfg, policy, grid);
            write_xi_csv(rows, sx_seed, config_hash(cfg), sx_out);
            std::cout << "wrote " << sx_out << " (" << rows.size() << " rows)\n";
        } else if (*st) {
            Scenario sc = load_scenario_arg(st_scenario);
            SesConfig cfg = load_config_opt(st_config);
            Td3Agent agent = Td3Agent::load(resolve_data_path(st_ckpt));
            AgentPolicy policy(agent);
            std::vector<double> grid;
            for (int i = 0; i <= 6; ++i) grid.push_back(i * 0.05);
            auto cells = sweep_triggers(sc, cfg, policy, grid);
            write_trigger_csv(cells, st_seed, config_hash(cfg), st_out);
            std::cout << "wrote " << st_out << " (" << cells.size() << " cells)\n";
        } else if (*ab) {
            Scenario sc = load_scenario_arg(ab_scenario);
            SesConfig cfg = load_config_opt(ab_config);
            std::vector<AblationRow> rows;
            for (int c = 1; c <= 4; ++c) {
                AblationRow row;
                row.case_number = c;
                for (std::uint64_t seed : ab_seeds) {
                    const std::string path =
                        (fs::path(ab_dir) / ckpt_name(c, "cnepr", seed)).string();
                    Td3Agent agent = Td3Agent::load(path);
                    AgentPolicy policy(agent);
                    RunSummary run = run_case(sc, cfg, CaseConfig::from_case(c), policy);
                    std::vector<int> retained;
                    for (int local : run.first_matching.retained) retained.push_back(local);
                    const double days = static_cast<double>(run.days.size());
                    row.total_objective += run.mean_daily_objective();
                    row.participants += static_cast<double>(retained.size());
                    if (!retained.empty()) {
                        Allocation a = allocate_run(sc, cfg, retained, run);
                        row.esp_profit += a.esp_share / days;
                        row.participant_profit +=
                            a.prosumer_pool / (days * static_cast<double>(retained.size()));
                    }
                }
                const double n = static_cast<double>(ab_seeds.size());
                row.total_objective /= n;
                row.participants /= n;
                row.esp_profit /= n;
                row.participant_profit /= n;
                rows.push_back(row);
            }
            for (auto& row : rows)
                row.loss_vs_case1 = rows[0].total_objective != 0.0
                                        ? 100.0 * (rows[0].total_objective - row.total_objective) /
                                              std::abs(rows[0].total_objective)
                                        : 0.0;
            write_ablation_csv(rows, config_hash(cfg), ab_out);
            std::cout << "wrote " << ab_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
