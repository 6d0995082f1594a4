// Sweep runner: nrlat SPEC.yaml [-o DIR] [--seed N] [-j N] [--set axis=value ...] [--figure ID ...]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "nrlat/errors.hpp"
#include "nrlat/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"V2N2V radio latency sweeps"};
    std::string spec_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::vector<std::string> overrides;
    std::vector<std::string> figures;
    bool list_figures = false;
    bool dry_run = false;

    app.add_option("spec", spec_path, "experiment spec (YAML)");
    app.add_option("-o,--output", out_dir, "output directory (overrides output_dir)");
    app.add_option("--seed", seed, "seed override");
    app.add_option("-j,--workers", workers, "concurrent sweep points")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "pin an axis to one value, e.g. --set density=40");
    app.add_option("--figure", figures, "emit plot series for a figure id after the sweep");
    app.add_flag("--list-figures", list_figures, "print figure ids and exit");
    app.add_flag("--dry-run", dry_run, "print the expanded points and exit");
    CLI11_PARSE(app, argc, argv);

    if (list_figures) {
        for (const auto& id : nrlat::figure_ids()) std::cout << id << "\n";
        return 0;
    }
    if (spec_path.empty()) {
        std::cerr << "error: a spec file is required\n" << app.help();
        return 2;
    }

    try {
        nrlat::ExperimentSpec spec = nrlat::load_spec(spec_path);
        if (!out_dir.empty()) spec.output_dir = out_dir;
        if (seed) spec.seed = *seed;
        if (workers) spec.workers = *workers;
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw nrlat::ConfigError("--set expects axis=value, got '" + o + "'");
            const std::string name = o.substr(0, eq);
            const std::string value = o.substr(eq + 1);
            nrlat::set_field(spec.base, name, value);
            std::erase_if(spec.axes, [&](const nrlat::Axis& a) { return a.name == name; });
        }
        // Overrides go through the same validation as the file.
        spec = nrlat::parse_spec(nrlat::serialize(spec), spec_path + " (with overrides)");

        if (dry_run) {
            for (const auto& p : nrlat::expand(spec)) std::cout << p.key << "\n";
            return 0;
        }
        const auto out = nrlat::run_sweep(spec, &std::cerr);
        std::cerr << "ran " << out.ran << ", skipped " << out.skipped << ", failed " << out.failed << " -> "
                  << out.csv.string() << "\n";
        for (const auto& id : figures) {
            for (const auto& f : nrlat::emit_figure_data(out.table, id, std::filesystem::path(spec.output_dir) / "figures")) {
                std::cout << f.string() << "\n";
            }
        }
        return out.failed > 0 ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
