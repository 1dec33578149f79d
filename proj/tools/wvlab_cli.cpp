#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "wvlab/commands.hpp"
#include "wvlab/errors.hpp"

namespace {

constexpr int kExitRegime = 1;
constexpr int kExitParse = 2;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_n;
    bool labeled = false;
};

wvlab::RunConfig load(const Options& o) {
    auto c = wvlab::load_run_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.labeled) c.labeled = true;
    if (!o.out.empty()) c.out_dir = o.out;
    if (o.grid_n) {
        if (!c.grid) {
            const auto psi = wvlab::compose_psi(c.recipe, c.labeled), phi = wvlab::compose_phi(c.recipe, c.labeled);
            const wvlab::SuperposedState* states[] = {&psi, &phi};
            c.grid = wvlab::auto_grid(states);
        }
        c.grid->n = *o.grid_n;
        try {
            c.grid->validate();
        } catch (const wvlab::InvalidArgument& e) {
            throw wvlab::ParseError(std::string("--grid-n: ") + e.what());
        }
    }
    return c;
}

void emit(const wvlab::RunConfig& c, const wvlab::CommandResult& r) {
    if (c.out_dir.empty()) {
        for (const auto& a : r.artifacts) std::cout << a.content;
        return;
    }
    const std::filesystem::path dir = c.out_dir;
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw wvlab::Error("cannot write " + (dir / name).string());
        f << content;
    };
    for (const auto& a : r.artifacts) {
        write(a.filename, a.content);
        std::cerr << "wrote " << (dir / a.filename).string() << "\n";
    }
    write("config.cfg", wvlab::to_config_text(c));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weak values of nonlocal observables: packet algebra, interferometer tracing, pointer ensembles"};
    app.require_subcommand(1);
    Options opts;

    using Command = std::function<wvlab::CommandResult(const wvlab::RunConfig&)>;
    const std::map<std::string, std::pair<std::string, Command>> commands{
        {"weak-values", {"Analytic vs grid weak-value table (CSV)", wvlab::cmd_weak_values}},
        {"interferometer", {"Trace and tune the interferometer scenario (JSON)", wvlab::cmd_interferometer}},
        {"trace-map", {"Forward/backward/overlap spacetime map (CSV)", wvlab::cmd_trace_map}},
        {"pointer", {"Monte-Carlo pointer ensemble (JSON)", wvlab::cmd_pointer}},
        {"validate", {"Run the invariant suite at the configured parameters (JSON)", wvlab::cmd_validate}},
    };
    std::map<CLI::App*, const Command*> dispatch;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", opts.config, "Run configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out, "Output directory (default: stdout)");
        sub->add_option("--seed", opts.seed, "Random seed override");
        sub->add_option("--grid-n", opts.grid_n, "Grid point count override");
        sub->add_flag("--labeled", opts.labeled, "Use the spin-tagged selection states");
        dispatch[sub] = &entry.second;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        const auto config = load(opts);
        for (auto* sub : app.get_subcommands()) {
            const auto result = (*dispatch.at(sub))(config);
            emit(config, result);
            return result.status;
        }
    } catch (const wvlab::ParseError& e) {
        std::cerr << "error: " << opts.config << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const wvlab::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wvlab::RegimeError& e) {
        std::cerr << "physics regime error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRegime;
    }
    return 0;
}
