// state.hpp — Pure/mixed quantum states, thermal field states, tensor and
// partial-trace utilities.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cavsim/hilbert.hpp"
#include "cavsim/linalg.hpp"
#include "cavsim/operators.hpp"

namespace cavsim {

enum class StateKind { Pure, Mixed };

class QuantumState {
public:
    static QuantumState pure(StateVector psi) {
        QuantumState s;
        s.kind_ = StateKind::Pure;
        const double norm = psi.norm();
        if (std::abs(norm - 1.0) > 1e-10)
            throw std::invalid_argument("QuantumState: pure state norm deviates from 1 by " +
                                        std::to_string(std::abs(norm - 1.0)));
        s.vector_ = std::move(psi);
        return s;
    }

    // `positivity_tol` relaxes the minimum-eigenvalue check for producers with
    // a looser contract (the Lindblad integrator allows -1e-6).
    static QuantumState mixed(LinearOperator rho, double positivity_tol = 1e-10) {
        QuantumState s;
        s.kind_ = StateKind::Mixed;
        if (rho.rows() != rho.cols()) throw std::invalid_argument("QuantumState: density matrix not square");
        if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
            throw std::invalid_argument("QuantumState: density matrix trace deviates from 1");
        if (hermiticity_defect(rho) > 1e-10)
            throw std::invalid_argument("QuantumState: density matrix not Hermitian");
        Eigen::SelfAdjointEigenSolver<LinearOperator> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -positivity_tol)
            throw std::invalid_argument("QuantumState: density matrix not positive semidefinite");
        s.density_ = std::move(rho);
        return s;
    }

    StateKind kind() const { return kind_; }
    bool is_pure() const { return kind_ == StateKind::Pure; }
    Eigen::Index dim() const { return is_pure() ? vector_.size() : density_.rows(); }

    const StateVector& vector() const {
        if (!is_pure()) throw std::logic_error("QuantumState: not a pure state");
        return vector_;
    }
    const LinearOperator& density() const {
        if (is_pure()) throw std::logic_error("QuantumState: not a mixed state");
        return density_;
    }
    LinearOperator as_density() const {
        return is_pure() ? LinearOperator(vector_ * vector_.adjoint()) : density_;
    }

private:
    QuantumState() = default;
    StateKind kind_ = StateKind::Pure;
    StateVector vector_;
    LinearOperator density_;
};

// ---- constructions ----

inline StateVector fock_vector(int fock_cutoff, int n) {
    if (n < 0 || n >= fock_cutoff) throw std::out_of_range("fock_vector: level out of range");
    StateVector v = StateVector::Zero(fock_cutoff);
    v(n) = 1.0;
    return v;
}

inline QuantumState fock_state(int fock_cutoff, int n) {
    return QuantumState::pure(fock_vector(fock_cutoff, n));
}

// Geometric photon-number distribution p_n = nbar^n/(1+nbar)^(n+1), renormalized
// on the truncated space so the state keeps trace 1. Truncation error is a
// separate diagnostic (thermal_tail_mass).
inline std::vector<double> thermal_probabilities(double nbar, int fock_cutoff) {
    if (nbar < 0.0) throw std::invalid_argument("thermal_probabilities: nbar must be >= 0");
    std::vector<double> p(fock_cutoff);
    double total = 0.0;
    for (int n = 0; n < fock_cutoff; ++n) {
        p[n] = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
        total += p[n];
    }
    for (double& x : p) x /= total;
    return p;
}

inline QuantumState thermal_state(int fock_cutoff, double nbar) {
    const auto p = thermal_probabilities(nbar, fock_cutoff);
    LinearOperator rho = LinearOperator::Zero(fock_cutoff, fock_cutoff);
    for (int n = 0; n < fock_cutoff; ++n) rho(n, n) = p[n];
    return QuantumState::mixed(std::move(rho));
}

inline QuantumState thermal_state(const HilbertSpec& spec, double nbar) {
    return thermal_state(spec.fock_cutoff, nbar);
}

// Renormalized probability mass above `level` (exclusive); reported in
// truncation diagnostics.
inline double thermal_tail_mass(double nbar, int fock_cutoff, int level) {
    const auto p = thermal_probabilities(nbar, fock_cutoff);
    double tail = 0.0;
    for (int n = level + 1; n < fock_cutoff; ++n) tail += p[n];
    return tail;
}

// Product state of per-atom kets from a pattern string over {g,e,+,-},
// e.g. atomic_product("g+-") for atom1=|g>, atom2=|+>, atom3=|->.
inline StateVector atomic_product(const std::string& pattern) {
    StateVector v = StateVector::Ones(1);
    for (char c : pattern) {
        StateVector q(2);
        switch (c) {
            case 'g': q << 1, 0; break;
            case 'e': q << 0, 1; break;
            case '+': q << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0); break;
            case '-': q << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0); break;
            default: throw std::invalid_argument("atomic_product: unknown symbol in pattern");
        }
        StateVector w(v.size() * 2);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            w(2 * i) = v(i) * q(0);
            w(2 * i + 1) = v(i) * q(1);
        }
        v = std::move(w);
    }
    return v;
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    StateVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline QuantumState tensor(const QuantumState& a, const QuantumState& b) {
    if (a.is_pure() && b.is_pure()) return QuantumState::pure(tensor(a.vector(), b.vector()));
    return QuantumState::mixed(kron(a.as_density(), b.as_density()));
}

// ---- partial traces (ordering: atoms ⊗ field) ----

inline QuantumState partial_trace_field(const QuantumState& state, const HilbertSpec& spec) {
    if (state.dim() != spec.dim()) throw std::invalid_argument("partial_trace_field: dimension mismatch");
    const int da = spec.atom_dim(), f = spec.fock_cutoff;
    const LinearOperator rho = state.as_density();
    LinearOperator out = LinearOperator::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int n = 0; n < f; ++n) out(i, j) += rho(i * f + n, j * f + n);
    return QuantumState::mixed(std::move(out));
}

inline QuantumState partial_trace_atoms(const QuantumState& state, const HilbertSpec& spec) {
    if (state.dim() != spec.dim()) throw std::invalid_argument("partial_trace_atoms: dimension mismatch");
    const int da = spec.atom_dim(), f = spec.fock_cutoff;
    const LinearOperator rho = state.as_density();
    LinearOperator out = LinearOperator::Zero(f, f);
    for (int n = 0; n < f; ++n)
        for (int m = 0; m < f; ++m)
            for (int i = 0; i < da; ++i) out(n, m) += rho(i * f + n, i * f + m);
    return QuantumState::mixed(std::move(out));
}

}  // namespace cavsim
