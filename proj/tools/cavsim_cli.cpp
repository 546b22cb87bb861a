// cavsim — command-line front end for the driven-cavity gate / GHZ simulator.
//
// Exit codes: 0 success, 2 configuration error, 3 invariant or truncation
// failure, 4 numerical non-convergence.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavsim/scenarios.hpp"

namespace {

using cavsim::scenarios::Kind;
using cavsim::scenarios::RunConfig;

struct CliState {
    RunConfig cfg;
    bool print_config = false;
    CLI::App* selected = nullptr;
};

void add_common_options(CLI::App* sub, CliState& st, bool with_model) {
    sub->set_config("--config", "", "configuration file (key=value lines; unknown keys rejected)");
    sub->allow_config_extras(CLI::config_extras_mode::error);
    if (with_model)
        sub->add_option("--model", st.cfg.model, "evolution model")
            ->capture_default_str()
            ->check(CLI::IsMember({"effective", "full", "lindblad"}));
    sub->add_option("--tolerance", st.cfg.tolerance,
                    "integrator refinement target, in (0, 1e-4]")
        ->capture_default_str()
        ->check(CLI::Range(1e-300, 1e-4));
    sub->add_option("--step", st.cfg.step, "integrator base step (0 = default rule)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--output", st.cfg.output_prefix,
                    "output file prefix (writes <prefix>.csv and <prefix>.jsonl)")
        ->capture_default_str();
    sub->add_option("--threads", st.cfg.threads,
                    "sweep thread count (0 = CAVSIM_THREADS env or hardware)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--print-config", st.print_config,
                  "print the resolved configuration and exit")
        ->configurable(false);
}

void add_field_options(CLI::App* sub, CliState& st) {
    sub->add_option("--nbar", st.cfg.nbar, "thermal mean photon number of the field")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--fock", st.cfg.fock_input, "pure Fock field input (overrides --nbar)")
        ->capture_default_str();
    sub->add_option("--cutoff", st.cfg.fock_cutoff, "Fock cutoff (0 = auto)")
        ->capture_default_str();
}

void add_physical_options(CLI::App* sub, CliState& st) {
    sub->add_option("--g-khz", st.cfg.g_khz, "physical coupling g / 2pi in kHz (0 = dimensionless)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--reference-point", st.cfg.reference_point,
                  "use the microwave operating point (g = 2pi x 50 kHz, Tc = 1 ms)")
        ->capture_default_str();
    sub->add_option("--kappa", st.cfg.kappa, "cavity decay rate in units of g (lindblad model)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--nbar-bath", st.cfg.nbar_bath, "bath occupation (lindblad model)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

CLI::App* build_cli(CLI::App& app, CliState& st) {
    app.require_subcommand(0, 1);

    auto* gate = app.add_subcommand("gate", "two-atom phase-gate verification run");
    gate->add_option("--omega-ratio", st.cfg.omega_ratio, "target Omega/g (admissible value chosen)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common_options(gate, st, true);
    add_field_options(gate, st);
    add_physical_options(gate, st);
    gate->callback([&st, gate] {
        st.cfg.scenario = Kind::Gate;
        st.selected = gate;
    });

    auto* ghz = app.add_subcommand("ghz", "multiatom GHZ generation run");
    ghz->add_option("--n-atoms", st.cfg.n_atoms, "number of atoms (even/odd drive family selected)")
        ->capture_default_str()
        ->check(CLI::Range(2, 8));
    ghz->add_option("--omega-ratio", st.cfg.omega_ratio, "target Omega/g")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common_options(ghz, st, true);
    add_field_options(ghz, st);
    add_physical_options(ghz, st);
    ghz->callback([&st, ghz] {
        st.cfg.scenario = Kind::Ghz;
        st.selected = ghz;
    });

    auto* sweep = app.add_subcommand("thermal-sweep", "gate fidelity across thermal occupations");
    sweep->add_option("--omega-ratio", st.cfg.omega_ratio, "target Omega/g")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--nbar-list", st.cfg.nbar_list, "thermal occupations to sweep")
        ->capture_default_str();
    sweep->add_option("--cutoff", st.cfg.fock_cutoff, "minimum Fock cutoff (auto-raised)")
        ->capture_default_str();
    add_common_options(sweep, st, true);
    add_physical_options(sweep, st);
    sweep->callback([&st, sweep] {
        st.cfg.scenario = Kind::ThermalSweep;
        st.selected = sweep;
    });

    auto* budget = app.add_subcommand("error-budget",
                                      "stark-shift, entry-timing and drive-fluctuation errors");
    budget->add_option("--advance-fraction", st.cfg.advance_fraction,
                       "entry-timing advance as a fraction of the gate time")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.499));
    add_common_options(budget, st, false);
    budget->callback([&st, budget] {
        st.cfg.scenario = Kind::ErrorBudget;
        st.selected = budget;
    });

    auto* validate = app.add_subcommand(
        "validate-propagator", "factorized effective propagator vs time-ordered integration");
    validate->add_option("--seed", st.cfg.seed, "random draw seed")->capture_default_str();
    validate->add_option("--pairs", st.cfg.n_pairs, "number of (delta, t) draws")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    validate->add_option("--block-cutoff", st.cfg.block_cutoff,
                         "compared Fock block (internal cutoff adapts above it)")
        ->capture_default_str()
        ->check(CLI::Range(2, 12));
    add_common_options(validate, st, false);
    validate->callback([&st, validate] {
        st.cfg.scenario = Kind::ValidatePropagator;
        st.selected = validate;
    });

    app.add_subcommand("list", "list the available scenarios")->callback([] {
        for (const auto& [k, name] : cavsim::scenarios::kind_names()) {
            (void)k;
            std::cout << name << "\n";
        }
    });

    auto* tmpl = app.add_subcommand("template", "print a configuration template for a scenario");
    static std::string tmpl_name;
    tmpl->add_option("scenario", tmpl_name, "scenario name")->required();
    tmpl->callback([&app, &st] {
        (void)app;
        (void)st;
    });

    return tmpl;
}

std::string scenario_template(const std::string& name) {
    CliState st;
    CLI::App app{"cavsim"};
    build_cli(app, st);
    CLI::App* sub = app.get_subcommand(name);  // throws OptionNotFound for unknown names
    return sub->config_to_str(true, true);
}

}  // namespace

int main(int argc, char** argv) {
    CliState st;
    CLI::App app{"driven-cavity quantum phase gate and GHZ-state simulator"};
    build_cli(app, st);

    std::string tmpl_name;
    if (auto* tmpl = app.get_subcommand("template"))
        tmpl->get_option("scenario")->each([&tmpl_name](const std::string& v) { tmpl_name = v; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "valid scenarios:";
        for (const auto& [k, name] : cavsim::scenarios::kind_names()) {
            (void)k;
            std::cerr << " " << name;
        }
        std::cerr << "\n";
        return 2;
    }

    if (app.get_subcommand("list")->parsed()) return 0;

    if (app.get_subcommand("template")->parsed()) {
        try {
            std::cout << scenario_template(tmpl_name);
            return 0;
        } catch (const std::exception&) {
            std::cerr << "unknown scenario: " << tmpl_name << "\nvalid scenarios:";
            for (const auto& [k, name] : cavsim::scenarios::kind_names()) {
                (void)k;
                std::cerr << " " << name;
            }
            std::cerr << "\n";
            return 2;
        }
    }

    if (st.selected == nullptr) {
        std::cerr << app.help() << "\n";
        return 2;
    }

    if (st.print_config) {
        std::cout << st.selected->config_to_str(true, true);
        return 0;
    }

    try {
        st.cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        const cavsim::scenarios::ScenarioOutput out = cavsim::scenarios::run_scenario(st.cfg);
        std::cout << out.summary;

        std::string prefix = st.cfg.output_prefix;
        if (prefix.empty()) prefix = "cavsim_" + cavsim::scenarios::kind_name(st.cfg.scenario);
        cavsim::io::write_file(prefix + ".csv", out.table.to_csv());
        std::string jsonl;
        for (const auto& j : out.jsonl) jsonl += j.dump() + "\n";
        cavsim::io::write_file(prefix + ".jsonl", jsonl);
        std::cout << "wrote " << prefix << ".csv and " << prefix << ".jsonl\n";

        if (!out.ok) {
            std::cerr << "scenario invariant checks failed\n";
            return 3;
        }
        return 0;
    } catch (const cavsim::ConvergenceError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << "\n";
        return 4;
    } catch (const cavsim::TruncationError& e) {
        std::cerr << "truncation failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "invariant failure: " << e.what() << "\n";
        return 3;
    }
}
