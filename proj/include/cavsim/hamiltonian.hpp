// hamiltonian.hpp — Time-dependent Hamiltonians of the driven Tavis–Cummings
// model, in the cavity interaction picture and in the drive-rotated frame.
//
// A Hamiltonian is a list of (scalar coefficient function, constant sparse
// operator) terms; H(t) = Σ_k c_k(t) M_k. Integrators apply the sparse terms
// directly, which keeps the cost per RK4 stage at O(nnz · cols) instead of a
// dense matrix product.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cavsim/hilbert.hpp"
#include "cavsim/linalg.hpp"
#include "cavsim/operators.hpp"

namespace cavsim {

struct HamiltonianTerm {
    std::function<Complex(double)> coeff;
    SparseOperator op;
};

class TimeDependentHamiltonian {
public:
    TimeDependentHamiltonian(HilbertSpec spec, std::string label, std::vector<HamiltonianTerm> terms)
        : spec_(spec), label_(std::move(label)), terms_(std::move(terms)) {}

    const HilbertSpec& spec() const { return spec_; }
    const std::string& label() const { return label_; }
    Eigen::Index dim() const { return spec_.dim(); }
    const std::vector<HamiltonianTerm>& terms() const { return terms_; }

    LinearOperator evaluate(double t) const {
        LinearOperator h = LinearOperator::Zero(dim(), dim());
        for (const auto& term : terms_) h += term.coeff(t) * LinearOperator(term.op);
        return h;
    }

    // out = H(t) * x, without materializing H(t).
    void apply(double t, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) const {
        out.setZero(x.rows(), x.cols());
        for (const auto& term : terms_) out.noalias() += term.coeff(t) * (term.op * x);
    }

private:
    HilbertSpec spec_;
    std::string label_;
    std::vector<HamiltonianTerm> terms_;
};

namespace detail {

inline SparseOperator sparse(const LinearOperator& m) {
    SparseOperator s = m.sparseView(1.0, 1e-300);
    s.makeCompressed();
    return s;
}

inline LinearOperator sum_atomic(const HilbertSpec& spec, AtomicOp which,
                                 const std::vector<int>& atoms) {
    LinearOperator out = LinearOperator::Zero(spec.dim(), spec.dim());
    for (int j : atoms) out += atomic_operator(spec, j, which);
    return out;
}

inline std::vector<int> all_atoms(const HilbertSpec& spec) {
    std::vector<int> v(spec.n_atoms);
    for (int j = 0; j < spec.n_atoms; ++j) v[j] = j + 1;
    return v;
}

}  // namespace detail

// Interaction-picture Hamiltonian (resonant drive, omega0 = omega):
//   H_i(t) = Σ_j [ (g/2)(e^{-iδt} a† S_j⁻ + e^{iδt} a S_j⁺) + (Ω/2)(S_j⁺ + S_j⁻) ],
// restricted to the given subset of atoms (entry/exit windows are modeled by
// evolving piecewise with different subsets).
inline TimeDependentHamiltonian build_interaction_windowed(const HilbertSpec& spec,
                                                           const std::vector<int>& atoms) {
    spec.validate();
    const double g = spec.g, delta = spec.delta, omega = spec.omega_rabi;
    const LinearOperator adag = creation(spec);
    const LinearOperator a = annihilation(spec);
    const LinearOperator sm = detail::sum_atomic(spec, AtomicOp::SMinus, atoms);
    const LinearOperator sp = detail::sum_atomic(spec, AtomicOp::SPlus, atoms);

    std::vector<HamiltonianTerm> terms;
    terms.push_back({[g, delta](double t) { return 0.5 * g * std::exp(-kImag * delta * t); },
                     detail::sparse(adag * sm)});
    terms.push_back({[g, delta](double t) { return 0.5 * g * std::exp(kImag * delta * t); },
                     detail::sparse(a * sp)});
    if (omega != 0.0)
        terms.push_back({[omega](double) { return Complex(0.5 * omega, 0.0); },
                         detail::sparse(sp + sm)});
    return {spec, "interaction", std::move(terms)};
}

inline TimeDependentHamiltonian build_interaction(const HilbertSpec& spec) {
    return build_interaction_windowed(spec, detail::all_atoms(spec));
}

// Drive-frame generator H0 = Ω Σ_j σ_z,j (equal to Ω·S_x as a matrix).
inline LinearOperator build_drive_frame(const HilbertSpec& spec) {
    spec.validate();
    return spec.omega_rabi * detail::sum_atomic(spec, AtomicOp::SigmaZ, detail::all_atoms(spec));
}

// Rotated-frame Hamiltonian H_i'(t) = e^{iH0 t}(H_i(t) - H0)e^{-iH0 t}:
//   Σ_j (g/2)[ e^{-iδt} a†(σ_z,j - ½σ_j⁺e^{iΩt} + ½σ_j⁻e^{-iΩt})
//            + e^{iδt}  a (σ_z,j + ½σ_j⁺e^{iΩt} - ½σ_j⁻e^{-iΩt}) ],
// which follows from S_j⁺ = σ_z,j + ½σ_j⁺ - ½σ_j⁻ and
// S_j⁻ = σ_z,j - ½σ_j⁺ + ½σ_j⁻ under the |±> basis change.
inline TimeDependentHamiltonian build_rotated(const HilbertSpec& spec) {
    spec.validate();
    const double g = spec.g, delta = spec.delta, omega = spec.omega_rabi;
    const auto atoms = detail::all_atoms(spec);
    const LinearOperator adag = creation(spec);
    const LinearOperator a = annihilation(spec);
    const LinearOperator sz = detail::sum_atomic(spec, AtomicOp::SigmaZ, atoms);
    const LinearOperator sgp = detail::sum_atomic(spec, AtomicOp::SigmaPlus, atoms);
    const LinearOperator sgm = detail::sum_atomic(spec, AtomicOp::SigmaMinus, atoms);

    std::vector<HamiltonianTerm> terms;
    terms.push_back({[g, delta](double t) { return 0.5 * g * std::exp(-kImag * delta * t); },
                     detail::sparse(adag * sz)});
    terms.push_back({[g, delta](double t) { return 0.5 * g * std::exp(kImag * delta * t); },
                     detail::sparse(a * sz)});
    terms.push_back({[g, delta, omega](double t) { return -0.25 * g * std::exp(-kImag * (delta - omega) * t); },
                     detail::sparse(adag * sgp)});
    terms.push_back({[g, delta, omega](double t) { return 0.25 * g * std::exp(-kImag * (delta + omega) * t); },
                     detail::sparse(adag * sgm)});
    terms.push_back({[g, delta, omega](double t) { return -0.25 * g * std::exp(kImag * (delta - omega) * t); },
                     detail::sparse(a * sgm)});
    terms.push_back({[g, delta, omega](double t) { return 0.25 * g * std::exp(kImag * (delta + omega) * t); },
                     detail::sparse(a * sgp)});
    return {spec, "rotated", std::move(terms)};
}

// Effective Hamiltonian after dropping the terms oscillating at Ω ± δ
// (valid for Ω >> δ, g):  H_eff(t) = (g/2)(e^{-iδt} a† + e^{iδt} a) S_x,
// with S_x entering through its collective σ_z,j form.
// The windowed variant restricts the sum to a subset of atoms (entry/exit).
inline TimeDependentHamiltonian build_effective_windowed(const HilbertSpec& spec,
                                                         const std::vector<int>& atoms) {
    spec.validate();
    const double g = spec.g, delta = spec.delta;
    const LinearOperator sz = detail::sum_atomic(spec, AtomicOp::SigmaZ, atoms);
    const LinearOperator adag = creation(spec);
    const LinearOperator a = annihilation(spec);

    std::vector<HamiltonianTerm> terms;
    terms.push_back({[g, delta](double t) { return 0.5 * g * std::exp(-kImag * delta * t); },
                     detail::sparse(adag * sz)});
    terms.push_back({[g, delta](double t) { return 0.5 * g * std::exp(kImag * delta * t); },
                     detail::sparse(a * sz)});
    return {spec, "effective", std::move(terms)};
}

inline TimeDependentHamiltonian build_effective(const HilbertSpec& spec) {
    return build_effective_windowed(spec, detail::all_atoms(spec));
}

// The discarded fast-oscillating terms; build_rotated = build_effective + build_residual.
inline TimeDependentHamiltonian build_residual(const HilbertSpec& spec) {
    spec.validate();
    const double g = spec.g, delta = spec.delta, omega = spec.omega_rabi;
    const auto atoms = detail::all_atoms(spec);
    const LinearOperator adag = creation(spec);
    const LinearOperator a = annihilation(spec);
    const LinearOperator sgp = detail::sum_atomic(spec, AtomicOp::SigmaPlus, atoms);
    const LinearOperator sgm = detail::sum_atomic(spec, AtomicOp::SigmaMinus, atoms);

    std::vector<HamiltonianTerm> terms;
    terms.push_back({[g, delta, omega](double t) { return -0.25 * g * std::exp(-kImag * (delta - omega) * t); },
                     detail::sparse(adag * sgp)});
    terms.push_back({[g, delta, omega](double t) { return 0.25 * g * std::exp(-kImag * (delta + omega) * t); },
                     detail::sparse(adag * sgm)});
    terms.push_back({[g, delta, omega](double t) { return -0.25 * g * std::exp(kImag * (delta - omega) * t); },
                     detail::sparse(a * sgm)});
    terms.push_back({[g, delta, omega](double t) { return 0.25 * g * std::exp(kImag * (delta + omega) * t); },
                     detail::sparse(a * sgp)});
    return {spec, "residual", std::move(terms)};
}

// Constant Hamiltonian wrapper, mostly for tests and the Lindblad driver.
inline TimeDependentHamiltonian constant_hamiltonian(const HilbertSpec& spec, const LinearOperator& h,
                                                     std::string label = "constant") {
    std::vector<HamiltonianTerm> terms;
    terms.push_back({[](double) { return Complex(1.0, 0.0); }, detail::sparse(h)});
    return {spec, std::move(label), std::move(terms)};
}

}  // namespace cavsim
