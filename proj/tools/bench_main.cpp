// Experiment runner: sweeps surrogate models over transformed domains and
// writes RMSE tables, per-cell transforms and line-slice CSVs for plotting.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "surrofit/surrofit.hpp"

namespace {

struct CommonOpts {
    std::string spec_path;
    std::string preset;
    std::string out_dir = "bench_out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quick = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("spec", o.spec_path, "experiment spec (JSON file)");
    cmd->add_option("--preset", o.preset, "canned sweep: 2d, 4d, 8d or 16d");
    cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "override the master seed")
        ->each([&](const std::string&) { o.seed_set = true; });
    cmd->add_flag("--quick", o.quick, "smoke-run sizes: 10 repeats, 1e4 test points");
}

surrofit::ExperimentSpec load_spec(const CommonOpts& o) {
    if (o.preset.empty() == o.spec_path.empty())
        throw surrofit::SpecError("provide exactly one of a spec file or --preset");
    surrofit::ExperimentSpec spec;
    if (!o.preset.empty()) {
        spec = surrofit::preset_spec(o.preset);
    } else {
        std::ifstream in(o.spec_path);
        if (!in) throw surrofit::SpecError("cannot open spec file: " + o.spec_path);
        surrofit::json j;
        try {
            in >> j;
        } catch (const surrofit::json::exception& e) {
            throw surrofit::SpecError(std::string("invalid JSON: ") + e.what());
        }
        spec = surrofit::spec_from_json(j);
    }
    if (o.seed_set) spec.master_seed = o.seed;
    if (o.quick) surrofit::apply_quick(spec);
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"surrogate-model domain-transform benchmark"};
    app.require_subcommand(1);

    CommonOpts run_opts, line_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "run a sweep and write rmse.csv/summary.json");
    add_common(run_cmd, run_opts);
    CLI::App* lines_cmd =
        app.add_subcommand("lines", "fit at the largest sample count and slice along lines");
    add_common(lines_cmd, line_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto spec = load_spec(run_opts);
            const surrofit::RunResult res = surrofit::run_experiment(spec);
            surrofit::emit(res, run_opts.out_dir);
            std::cout << "wrote " << run_opts.out_dir << "/rmse.csv ("
                      << res.records.size() - res.failures << " records";
            if (res.failures > 0) std::cout << ", " << res.failures << " failures";
            std::cout << ")\n";
            return res.failures > 0 ? 3 : 0;
        }
        const auto spec = load_spec(line_opts);
        const int failures = surrofit::run_lines(spec, line_opts.out_dir);
        std::cout << "wrote line slices under " << line_opts.out_dir << "/lines";
        if (failures > 0) std::cout << " (" << failures << " cells failed)";
        std::cout << "\n";
        return failures > 0 ? 3 : 0;
    } catch (const surrofit::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
