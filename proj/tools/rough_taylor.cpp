// Command-line frontend: path generation, single solves, rate sweeps and the
// exhaustive property-check suites. All numerics are config-file driven; flags
// only override scalars. Exit codes: 0 success, 2 config error, 3 experiment
// infeasible, 1 internal failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <rough_taylor/rough_taylor.hpp>

namespace rt = rough_taylor;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rt::config_error("cannot open config: " + path);
    return json::parse(in);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Written atomically before any result file; results reference it by name.
std::string write_manifest(const fs::path& out_dir, const json& config, std::uint64_t seed,
                           const std::vector<std::string>& outputs) {
    fs::create_directories(out_dir);
    nlohmann::ordered_json manifest;
    manifest["tool"] = "rough_taylor";
    manifest["version"] = kVersion;
    manifest["config_hash"] = fnv1a(config.dump());
    manifest["seed"] = seed;
    manifest["created_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
    manifest["outputs"] = outputs;
    const fs::path tmp = out_dir / "manifest.json.tmp";
    const fs::path final_path = out_dir / "manifest.json";
    {
        std::ofstream out(tmp);
        out << manifest.dump(2) << "\n";
    }
    fs::rename(tmp, final_path);
    return final_path.string();
}

void write_trajectory_csv(const fs::path& file, const rt::SolveResult& result, const rt::DrivingSignal& signal,
                          std::uint64_t coarse_n, const std::string& manifest) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << "# manifest: " << manifest << "\n";
    out.precision(17);
    out << "t";
    for (std::size_t i = 1; i <= result.values[0].size(); ++i) out << ",y" << i;
    out << "\n";
    if (!result.dense_values.empty()) {
        for (std::uint64_t k = 0; k < result.dense_values.size(); ++k) {
            out << signal.time_at(k);
            for (double v : result.dense_values[k]) out << "," << v;
            out << "\n";
        }
        return;
    }
    const std::uint64_t stride = signal.spec.n_fine / coarse_n;
    for (std::uint64_t k = 0; k < result.values.size(); ++k) {
        out << signal.time_at(k * stride);
        for (double v : result.values[k]) out << "," << v;
        out << "\n";
    }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::uint64_t seed_override,
                 bool has_seed) {
    json config = load_config(config_path);
    if (has_seed) config["seed"] = seed_override;
    auto spec = rt::SignalSpec::from_json(config);
    const auto manifest = write_manifest(out_dir, config, spec.seed, {"path.rtpath"});

    const auto signal = rt::build_signal(spec);
    const fs::path file = fs::path(out_dir) / "path.rtpath";
    rt::save_signal(signal, file.string());

    std::cout << "wrote " << file.string() << " (manifest: " << manifest << ")\n";
    for (int j = 1; j <= spec.m; ++j) {
        double lo = 0.0, hi = 0.0;
        for (double v : signal.samples[static_cast<std::size_t>(j - 1)]) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        std::cout << "component " << j << ": terminal " << signal.value(j, spec.n_fine) << ", range [" << lo << ", "
                  << hi << "]\n";
    }
    return 0;
}

int cmd_solve(const std::string& config_path, const std::string& out_dir, bool strict, int threads,
              std::uint64_t seed_override, bool has_seed) {
    json config = load_config(config_path);

    // either a saved path file to replay, or a signal spec to sample from
    std::optional<rt::DrivingSignal> replay;
    rt::SignalSpec sig_spec;
    if (config.contains("path_file")) {
        replay = rt::load_signal(config.at("path_file").get<std::string>());
        sig_spec = replay->spec;
    } else {
        const auto& s = config.at("signal");
        sig_spec.m = s.value("m", 1);
        sig_spec.hurst = s.at("hurst").is_object()
                             ? rt::exponent_vector_from_json(s.at("hurst"))
                             : rt::ExponentVector::hurst(s.at("hurst").get<std::vector<double>>());
        sig_spec.component_1_is_time = s.value("component_1_is_time", false);
        sig_spec.T = s.value("T", 1.0);
        sig_spec.n_fine = s.value("n_fine", std::uint64_t{4096});
        sig_spec.seed = has_seed ? seed_override : s.value("seed", std::uint64_t{1});
        sig_spec.validate();
    }

    std::unique_ptr<rt::JetOracle> oracle;
    if (config.contains("field"))
        oracle = std::make_unique<rt::PolynomialVectorField>(rt::PolynomialVectorField::from_json(config.at("field")));
    else
        oracle = rt::make_builtin_model(config.value("model", std::string("sine_field")));

    const auto sel = rt::parse_scheme_block(config.value("scheme", json::object()), sig_spec.hurst, sig_spec.m);
    rt::SchemeConfig scheme_config;
    scheme_config.coarse_n = config.value("n", std::uint64_t{256});
    scheme_config.refine_factor = config.value("refine_factor", std::uint64_t{64});
    scheme_config.interpolate_in_step = config.value("interpolate", false);
    scheme_config.hurst = sig_spec.hurst;

    const rt::Point y0 = config.value("y0", rt::Point{0.7});
    const int paths = replay ? 1 : config.value("paths", 1);

    std::vector<std::string> outputs;
    for (int p = 0; p < paths; ++p) outputs.push_back("trajectory_" + std::to_string(p) + ".csv");
    const auto manifest = write_manifest(out_dir, config, sig_spec.seed, outputs);

    int divergences = 0;
    std::vector<int> flags(static_cast<std::size_t>(paths), 0);
    rt::parallel_for(static_cast<std::size_t>(paths), threads ? threads : rt::default_thread_count(), [&](std::size_t p) {
        rt::SignalSpec per_path = sig_spec;
        per_path.seed = (paths == 1) ? sig_spec.seed : rt::mix_seed(sig_spec.seed, static_cast<std::uint64_t>(p));
        const auto signal = replay ? *replay : rt::build_signal(per_path);

        rt::SolveResult result;
        switch (sel.kind) {
            case rt::SchemeKind::EULER:
            case rt::SchemeKind::MILSTEIN:
            case rt::SchemeKind::MODIFIED_EULER:
                result = rt::solve_named(sel.kind, *oracle, signal, y0, scheme_config);
                break;
            case rt::SchemeKind::COMPLETE_TAYLOR:
                result = rt::solve_complete_taylor(*oracle, sel.order, signal, y0, scheme_config);
                break;
            case rt::SchemeKind::INCOMPLETE:
                result = rt::solve_incomplete(*oracle, sel.index_set, signal, y0, scheme_config);
                break;
            case rt::SchemeKind::MODIFIED:
                result = rt::solve_modified(*oracle, sel.index_set, sel.correction_set, sig_spec.hurst, signal, y0,
                                            scheme_config);
                break;
        }
        if (result.diverged) flags[p] = 1;
        write_trajectory_csv(fs::path(out_dir) / outputs[p], result, signal, scheme_config.coarse_n, manifest);
    });
    for (std::size_t p = 0; p < flags.size(); ++p)
        if (flags[p]) {
            ++divergences;
            std::cerr << "warning: trajectory " << p << " diverged\n";
        }

    std::cout << "wrote " << paths << " trajectories to " << out_dir << "\n";
    if (divergences > 0 && strict) {
        std::cerr << divergences << " trajectories diverged (strict mode)\n";
        return 1;
    }
    return 0;
}

int cmd_rates(const std::string& config_path, const std::string& plan_name, const std::string& out_dir, int threads,
              std::uint64_t seed_override, bool has_seed) {
    rt::ExperimentPlan plan;
    json config;
    if (!plan_name.empty()) {
        plan = rt::make_builtin_plan(plan_name);
        config = rt::to_json(plan);
    } else {
        config = load_config(config_path);
        plan = rt::plan_from_json(config);
    }
    if (has_seed) plan.seed = seed_override;
    if (threads) plan.threads = threads;

    const std::string prefix = (fs::path(out_dir) / (plan.experiment + "_rates")).string();
    const auto manifest = write_manifest(
        out_dir, config, plan.seed,
        {plan.experiment + "_rates_table.csv", plan.experiment + "_rates_report.json",
         plan.experiment + "_rates_plotdata.csv"});

    auto report = rt::run_experiment(plan);
    report.meta["manifest"] = manifest;
    rt::emit_report(report, prefix);

    std::cout << "experiment " << report.experiment << ": slope " << report.slope << " (ci " << report.ci_half_width
              << ") vs theory " << report.theory << " +/- " << report.tolerance << " -> "
              << (report.pass ? "pass" : "fail") << "\n";
    std::cout << "report: " << prefix << "_report.json\n";
    return report.pass ? 0 : 1;
}

int cmd_check(const std::string& suite) {
    const auto results = rt::run_check_suite(suite);
    bool all_pass = true;
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        summary.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    std::cout << summary.dump() << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Taylor-scheme solvers for fBm-driven differential equations"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", plan_name, suite = "all";
    std::uint64_t seed = 0;
    bool strict = false;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "JSON config file");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--threads", threads, "worker threads (default: ROUGH_TAYLOR_THREADS or all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "sample a driving signal and write a path file");
    add_common(simulate, true);

    auto* solve = app.add_subcommand("solve", "run one scheme and export trajectories");
    add_common(solve, true);
    solve->add_flag("--strict", strict, "nonzero exit when any trajectory diverges");

    auto* rates = app.add_subcommand("rates", "run a convergence-rate experiment plan");
    add_common(rates, false);
    rates->add_option("--plan", plan_name, "builtin plan name (e.g. euler_h07)");

    auto* check = app.add_subcommand("check", "run the exhaustive property suites");
    check->add_option("suite", suite, "combinatorics | jets | integrals | all");

    CLI11_PARSE(app, argc, argv);

    try {
        const bool has_seed =
            simulate->count("--seed") > 0 || solve->count("--seed") > 0 || rates->count("--seed") > 0;
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed, has_seed);
        if (solve->parsed()) return cmd_solve(config_path, out_dir, strict, threads, seed, has_seed);
        if (rates->parsed()) {
            if (config_path.empty() && plan_name.empty())
                throw rt::config_error("rates needs --config or --plan");
            return cmd_rates(config_path, plan_name, out_dir, threads, seed, has_seed);
        }
        if (check->parsed()) return cmd_check(suite);
    } catch (const rt::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const rt::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
