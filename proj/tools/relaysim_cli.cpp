#include "relaysim/config.hpp"
#include "relaysim/csv.hpp"
#include "relaysim/experiment.hpp"
#include "relaysim/oracle.hpp"
#include "relaysim/recipes.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace relaysim;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::string out;
    bool desk_scale = false;
    bool paper_frames = false;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> min_errors;
    std::optional<std::uint64_t> max_frames;
    bool no_timing = false;
    bool quiet = false;

    void apply(ExperimentSpec& spec) const {
        if (seed) spec.seed = *seed;
        if (workers) spec.workers = *workers;
        if (min_errors) spec.stop.min_errors = *min_errors;
        if (max_frames) spec.max_frames = *max_frames;
        if (no_timing) spec.record_timing = false;
        if (!out.empty()) spec.output = out;
    }
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--out", o.out, "Output CSV path (default: stdout)");
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--min-errors", o.min_errors, "Bit errors per point before stopping");
    cmd->add_option("--max-frames", o.max_frames, "Frame cap per point");
    cmd->add_flag("--no-timing", o.no_timing, "Write 0 in the seconds column");
    cmd->add_flag("--quiet", o.quiet, "No progress lines on stderr");
}

void emit(const ExperimentSpec& spec, const std::vector<BerRecord>& records) {
    if (spec.output.empty()) {
        write_ber_csv(std::cout, records);
    } else {
        write_ber_csv(spec.output, records);
    }
}

int run(const ExperimentSpec& spec, bool quiet) {
    spec.validate();
    RecordSink progress;
    if (!quiet) {
        progress = [](const BerRecord& r) {
            std::fprintf(stderr, "%6.2f dB  %-22s ber=%-11.4g errors=%-9llu bits=%llu\n", r.snr_db,
                         r.scheme.c_str(), r.ber, static_cast<unsigned long long>(r.errors),
                         static_cast<unsigned long long>(r.bits));
        };
    }
    emit(spec, run_experiment(spec, progress));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative relaying over Markov-Gaussian noise: Monte Carlo and closed-form BER"};
    app.require_subcommand(1);

    Overrides o;
    std::string config_path;
    auto* sweep = app.add_subcommand("sweep", "Run the experiment described by a config file");
    sweep->add_option("config", config_path, "INI experiment file")->required();
    add_run_flags(sweep, o);
    sweep->add_flag("--desk-scale", o.desk_scale, "Accepted for symmetry; the file sets the scale");

    std::string figure_id;
    auto* figure = app.add_subcommand("figure", "Run a built-in figure recipe");
    figure->add_option("id", figure_id, "fig3, fig4, fig5 or fig8")->required();
    add_run_flags(figure, o);
    figure->add_flag("--desk-scale", o.desk_scale, "Shorter frames and smaller targets");
    figure->add_flag("--paper-frames", o.paper_frames, "Fixed 2000 frames per point");

    std::string analytic_figure;
    std::string analytic_config;
    auto* analytic = app.add_subcommand("analytic", "Closed-form curves only, no simulation");
    analytic->add_option("--figure", analytic_figure, "Figure recipe to evaluate");
    analytic->add_option("--config", analytic_config, "Experiment file to evaluate");
    analytic->add_option("--out", o.out, "Output CSV path (default: stdout)");

    std::size_t trials = 1000;
    std::size_t max_len = 8;
    double tolerance = 1e-9;
    std::uint64_t oracle_seed = 1;
    auto* oracle_cmd = app.add_subcommand("oracle", "Check the MAP detector against enumeration");
    oracle_cmd->add_option("--trials", trials, "Random frames");
    oracle_cmd->add_option("--max-len", max_len, "Longest frame (symbols)")
        ->check(CLI::Range(std::size_t{1}, oracle::kMaxEnumerationLength));
    oracle_cmd->add_option("--tolerance", tolerance, "Largest allowed posterior difference");
    oracle_cmd->add_option("--seed", oracle_seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sweep) {
            auto spec = load_config(config_path);
            o.apply(spec);
            return run(spec, o.quiet);
        }
        if (*figure) {
            auto spec = figure_recipe(figure_id, {o.desk_scale, o.paper_frames});
            o.apply(spec);
            return run(spec, o.quiet);
        }
        if (*analytic) {
            std::vector<AnalyticPoint> points;
            if (!analytic_config.empty()) {
                points = analytic_curves(load_config(analytic_config));
            } else if (!analytic_figure.empty()) {
                points = analytic_curves(figure_recipe(analytic_figure));
            } else {
                for (const auto& id : figure_ids()) {
                    for (auto p : analytic_curves(figure_recipe(id))) {
                        p.curve = id + ":" + p.curve;
                        points.push_back(p);
                    }
                }
            }
            if (o.out.empty()) {
                write_analytic_csv(std::cout, points);
            } else {
                write_analytic_csv(o.out, points);
            }
            return 0;
        }
        if (*oracle_cmd) {
            const auto report = oracle::run_equivalence_suite(trials, oracle_seed, max_len, tolerance);
            std::printf("oracle: %zu frames, %zu failures, max |error| %.3g (tolerance %.3g)\n",
                        report.trials, report.failures, report.max_abs_error, report.tolerance);
            return report.passed() ? 0 : kExitRuntime;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
