// report.hpp — Result record for one simulation run.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cavsim {

struct FidelityReport {
    double fidelity = 1.0;  // primary scalar: worst case over the checked inputs
    std::vector<std::pair<std::string, double>> per_input;  // label -> fidelity
    std::vector<std::pair<std::string, double>> delta_f;    // error-budget entries
    std::vector<std::pair<std::string, double>> extra;      // scenario-specific values
    double truncation_leakage = 0.0;  // max population in the top two Fock levels

    // parameters echoed
    std::string model;
    int n_atoms = 0;
    int fock_cutoff = 0;
    double g = 1.0;
    double delta = 1.0;
    double omega_rabi = 0.0;
    double t = 0.0;
    double nbar = 0.0;
    long k = -1;

    // integrator echo
    long steps = 0;
    int refinements = 0;
    double richardson_diff = 0.0;

    void validate() const {
        if (fidelity < 0.0 || fidelity > 1.0 + 1e-9)
            throw std::logic_error("FidelityReport: fidelity outside [0, 1]");
        for (const auto& [label, f] : per_input)
            if (f < 0.0 || f > 1.0 + 1e-9)
                throw std::logic_error("FidelityReport: per-input fidelity outside [0, 1]: " + label);
        if (truncation_leakage < 0.0)
            throw std::logic_error("FidelityReport: negative truncation leakage");
    }

    double per_input_value(const std::string& label) const {
        for (const auto& [l, v] : per_input)
            if (l == label) return v;
        throw std::out_of_range("FidelityReport: no per-input entry " + label);
    }
};

}  // namespace cavsim
