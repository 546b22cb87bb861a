// propagator.hpp — Closed-form effective propagator and time-ordered numerical
// propagation (RK4 with Richardson self-convergence), plus Lindblad evolution
// for cavity damping.
//
// The effective evolution factorizes as
//   U'(t) = exp(-iA S_x²) · exp(-iB S_x a) · exp(-iC S_x a†)
// with closed-form A, B, C. At closure δt = 2kπ the field factors vanish and
// U'(t) = exp(-iλt S_x²) ⊗ I with λ = g²/(4δ).

#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "cavsim/hamiltonian.hpp"
#include "cavsim/hilbert.hpp"
#include "cavsim/linalg.hpp"
#include "cavsim/operators.hpp"
#include "cavsim/state.hpp"

namespace cavsim {

inline constexpr double kPi = std::numbers::pi_v<double>;

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- closed-form coefficients (valid for delta != 0) ----

struct PropagatorCoefficients {
    Complex A;      // coefficient of S_x²
    Complex B;      // coefficient of S_x a
    Complex C;      // coefficient of S_x a†
    double lambda;  // g²/(4δ)
};

inline PropagatorCoefficients coefficients(const HilbertSpec& spec, double t) {
    spec.validate();
    const double g = spec.g, delta = spec.delta;
    if (delta == 0.0) throw std::invalid_argument("coefficients: delta = 0 not supported (closed forms singular)");
    const Complex eip = std::exp(kImag * delta * t);
    const Complex eim = std::exp(-kImag * delta * t);
    PropagatorCoefficients co;
    co.B = g / (2.0 * kImag * delta) * (eip - 1.0);
    co.C = -g / (2.0 * kImag * delta) * (eim - 1.0);
    co.A = g * g / (4.0 * delta) * (t + (eim - 1.0) / (kImag * delta));
    co.lambda = g * g / (4.0 * delta);
    return co;
}

// ---- analytic propagators ----

// S_x is block-diagonalized first: on each eigenvalue-m sector the three
// factors reduce to scalars and field-only exponentials,
//   U'_m = e^{-iA m²} · exp(-iB m a) · exp(-iC m a†),
// and U'(t) = Σ_m P_m ⊗ U'_m. This is exact and much cheaper than
// exponentiating on the composite space.
inline LinearOperator effective_propagator(const HilbertSpec& spec, double t) {
    const PropagatorCoefficients co = coefficients(spec, t);
    const LinearOperator sx_at = collective_sx_atomic(spec.n_atoms);
    const LinearOperator a = field_annihilation(spec.fock_cutoff);
    const LinearOperator adag = a.adjoint();

    Eigen::SelfAdjointEigenSolver<LinearOperator> es(sx_at);
    const Eigen::Index da = spec.atom_dim();
    LinearOperator u = LinearOperator::Zero(spec.dim(), spec.dim());
    Eigen::Index i = 0;
    while (i < da) {
        // S_x eigenvalues are exact half-integers; snap to kill solver noise
        const double m = std::round(2.0 * es.eigenvalues()(i)) / 2.0;
        Eigen::Index j = i;
        while (j < da && std::abs(es.eigenvalues()(j) - m) < 1e-9) ++j;
        const LinearOperator proj = es.eigenvectors().middleCols(i, j - i) *
                                    es.eigenvectors().middleCols(i, j - i).adjoint();
        const Complex sq_phase = std::exp(-kImag * co.A * m * m);
        LinearOperator field_factor;
        if (m == 0.0) {
            field_factor = identity(spec.fock_cutoff);
        } else {
            field_factor = sq_phase * (expm(LinearOperator((-kImag * co.B * m) * a)) *
                                       expm(LinearOperator((-kImag * co.C * m) * adag)));
        }
        u += kron(proj, field_factor);
        i = j;
    }
    return u;
}

struct FullFramePropagator {
    LinearOperator op;
    bool sx_closed_form;  // true iff δt = 2kπ held (|B|, |C| below 1e-12)
};

// U(t) = e^{-iH0 t} U'(t); at closure this equals exp(-i(Ωt S_x + λt S_x²)) ⊗ I.
inline FullFramePropagator full_frame_propagator(const HilbertSpec& spec, double t) {
    const PropagatorCoefficients co = coefficients(spec, t);
    const LinearOperator sx_at = collective_sx_atomic(spec.n_atoms);
    Eigen::SelfAdjointEigenSolver<LinearOperator> es(sx_at);

    StateVector frame_phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < frame_phases.size(); ++i)
        frame_phases(i) = std::exp(-kImag * spec.omega_rabi * t * es.eigenvalues()(i));
    const LinearOperator frame =
        kron(es.eigenvectors() * frame_phases.asDiagonal() * es.eigenvectors().adjoint(),
             identity(spec.fock_cutoff));

    FullFramePropagator out;
    out.op = frame * effective_propagator(spec, t);
    out.sx_closed_form = std::abs(co.B) <= 1e-12 && std::abs(co.C) <= 1e-12;
    if (out.sx_closed_form) {
        StateVector closed(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < closed.size(); ++i) {
            const double m = es.eigenvalues()(i);
            closed(i) = std::exp(-kImag * (spec.omega_rabi * t * m + co.lambda * t * m * m));
        }
        const LinearOperator ref =
            kron(es.eigenvectors() * closed.asDiagonal() * es.eigenvectors().adjoint(),
                 identity(spec.fock_cutoff));
        if (max_abs(out.op - ref) > 1e-10)
            throw std::logic_error("full_frame_propagator: closed form deviates from factorized product");
    }
    return out;
}

// ---- time-ordered integration ----

struct IntegratorConfig {
    enum class Method { FixedStep, Adaptive };
    Method method = Method::Adaptive;
    double step = 0.0;        // base step; 0 derives the default from the spec
    double tolerance = 1e-8;  // adaptive refinement target, in (0, 1e-4]
    int max_refinements = 12;
    Eigen::Index max_dim = 4096;  // guard for materialized propagators

    void validate() const {
        if (method == Method::FixedStep && !(step > 0.0))
            throw std::invalid_argument("IntegratorConfig: fixed-step method requires step > 0");
        if (step < 0.0) throw std::invalid_argument("IntegratorConfig: step must be >= 0");
        if (!(tolerance > 0.0) || tolerance > 1e-4)
            throw std::invalid_argument("IntegratorConfig: tolerance must lie in (0, 1e-4]");
        if (max_refinements < 1) throw std::invalid_argument("IntegratorConfig: max_refinements must be >= 1");
    }
};

struct EvolveStats {
    long steps = 0;              // steps of the accepted (finest) pass
    int refinements = 0;         // doublings performed beyond the base pass
    double richardson_diff = 0;  // max-entry difference between the last two passes
    double norm_drift = 0;       // | ||psi|| - 1 | (or unitarity/trace defect)
    double leakage = 0;          // max population in the top two Fock levels over the run
    bool converged = true;
};

namespace detail {

// Resolve the fastest phase with >= 40 samples per drive period; without a
// drive the detuning period sets the scale.
inline double default_step(const HilbertSpec& spec) {
    if (spec.omega_rabi > 0.0) return (2.0 * kPi / spec.omega_rabi) / 40.0;
    return (2.0 * kPi / std::abs(spec.delta)) / 200.0;
}

inline double top_level_population_col(const HilbertSpec& spec, const Eigen::MatrixXcd& x,
                                       Eigen::Index c) {
    const int f = spec.fock_cutoff;
    double p = 0.0;
    for (int i = 0; i < spec.atom_dim(); ++i)
        p += std::norm(x(i * f + f - 1, c)) + std::norm(x(i * f + f - 2, c));
    return p;
}

// Population in the top two Fock levels, maximized over columns. Columns that
// already start at the truncation edge (top-2 population > 0.5, e.g. the
// |cutoff-1> basis columns of a propagator) carry no diagnostic value and are
// skipped; callers add the initial edge mass of their actual field state.
inline double top_level_population(const HilbertSpec& spec, const Eigen::MatrixXcd& x) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        worst = std::max(worst, top_level_population_col(spec, x, c));
    return worst;
}

// One fixed-step RK4 sweep of i dX/dt = H(t) X over [t0, t1]. With
// `col_weights` the leakage probe records the weighted mixture population of
// the top two Fock levels; otherwise it maxes over the columns flagged in
// `tracked`.
inline void rk4_pass(const TimeDependentHamiltonian& h, Eigen::MatrixXcd& x, double t0, double t1,
                     long n_steps, const HilbertSpec& spec, double* leakage,
                     const std::vector<bool>* tracked, const std::vector<double>* col_weights) {
    const double dt = (t1 - t0) / double(n_steps);
    const Complex half = -kImag * (0.5 * dt);
    const Complex full = -kImag * dt;
    const Complex sixth = -kImag * (dt / 6.0);
    Eigen::MatrixXcd h1, h2, h3, h4, tmp;
    const long probe_stride = std::max<long>(1, n_steps / 256);
    for (long i = 0; i < n_steps; ++i) {
        const double t = t0 + double(i) * dt;
        h.apply(t, x, h1);
        tmp = x + half * h1;
        h.apply(t + 0.5 * dt, tmp, h2);
        tmp = x + half * h2;
        h.apply(t + 0.5 * dt, tmp, h3);
        tmp = x + full * h3;
        h.apply(t + dt, tmp, h4);
        x += sixth * (h1 + 2.0 * h2 + 2.0 * h3 + h4);
        if (leakage && (i % probe_stride == 0 || i + 1 == n_steps)) {
            if (col_weights) {
                double mix = 0.0;
                for (Eigen::Index c = 0; c < x.cols(); ++c)
                    mix += (*col_weights)[std::size_t(c)] * top_level_population_col(spec, x, c);
                *leakage = std::max(*leakage, mix);
            } else {
                for (Eigen::Index c = 0; c < x.cols(); ++c)
                    if (!tracked || (*tracked)[std::size_t(c)])
                        *leakage = std::max(*leakage, top_level_population_col(spec, x, c));
            }
        }
    }
}

inline Eigen::MatrixXcd integrate(const TimeDependentHamiltonian& h, const Eigen::MatrixXcd& x0,
                                  double t0, double t1, const IntegratorConfig& cfg,
                                  EvolveStats& stats, bool track_leakage,
                                  const std::vector<double>* col_weights = nullptr) {
    cfg.validate();
    if (t1 == t0) {
        stats = EvolveStats{};
        return x0;
    }
    const double base_dt = cfg.step > 0.0 ? cfg.step : default_step(h.spec());
    const long base_steps = std::max<long>(4, long(std::ceil(std::abs(t1 - t0) / base_dt)));

    std::vector<bool> tracked(std::size_t(x0.cols()), true);
    for (Eigen::Index c = 0; c < x0.cols(); ++c)
        if (top_level_population_col(h.spec(), x0, c) > 0.5) tracked[std::size_t(c)] = false;

    double leak = 0.0;
    double* leak_ptr = track_leakage ? &leak : nullptr;
    Eigen::MatrixXcd current = x0;
    rk4_pass(h, current, t0, t1, base_steps, h.spec(), leak_ptr, &tracked, col_weights);
    stats.steps = base_steps;
    stats.refinements = 0;
    stats.leakage = leak;

    if (cfg.method == IntegratorConfig::Method::FixedStep) {
        stats.richardson_diff = 0.0;
        stats.converged = true;
        return current;
    }
    for (int r = 1; r <= cfg.max_refinements; ++r) {
        leak = 0.0;
        Eigen::MatrixXcd finer = x0;
        const long n = base_steps << r;
        rk4_pass(h, finer, t0, t1, n, h.spec(), leak_ptr, &tracked, col_weights);
        stats.richardson_diff = max_abs(LinearOperator(finer - current));
        stats.steps = n;
        stats.refinements = r;
        stats.leakage = leak;
        current = std::move(finer);
        if (stats.richardson_diff < cfg.tolerance) {
            stats.converged = true;
            return current;
        }
    }
    throw ConvergenceError("integrate: step doubling did not reach tolerance " +
                           std::to_string(cfg.tolerance));
}

}  // namespace detail

// Time-ordered propagator U(t1 <- t0). Materializes a dense dim×dim matrix,
// guarded by cfg.max_dim.
inline LinearOperator propagate(const TimeDependentHamiltonian& h, double t0, double t1,
                                const IntegratorConfig& cfg, EvolveStats* stats = nullptr) {
    if (h.dim() > cfg.max_dim)
        throw std::invalid_argument("propagate: dimension exceeds the propagator materialization guard");
    EvolveStats st;
    LinearOperator u = detail::integrate(h, identity(h.dim()), t0, t1, cfg, st, true);
    st.norm_drift = unitarity_defect(u);
    if (stats) *stats = st;
    return u;
}

// Time-ordered action of the propagator on a set of columns, without
// materializing the full matrix. With `col_weights` the leakage diagnostic is
// the weighted mixture population of the top two Fock levels.
inline Eigen::MatrixXcd propagate_block(const TimeDependentHamiltonian& h,
                                        const Eigen::MatrixXcd& x0, double t0, double t1,
                                        const IntegratorConfig& cfg, EvolveStats* stats = nullptr,
                                        const std::vector<double>* col_weights = nullptr) {
    if (x0.rows() != h.dim()) throw std::invalid_argument("propagate_block: dimension mismatch");
    if (col_weights && col_weights->size() != std::size_t(x0.cols()))
        throw std::invalid_argument("propagate_block: weight/column count mismatch");
    EvolveStats st;
    Eigen::MatrixXcd out = detail::integrate(h, x0, t0, t1, cfg, st, true, col_weights);
    if (stats) *stats = st;
    return out;
}

// Time-ordered solution of i d|psi>/dt = H(t)|psi> over [t0, t1]. The returned
// state is normalized; the raw norm drift is reported in stats.
inline QuantumState evolve_interval(const TimeDependentHamiltonian& h, const QuantumState& state0,
                                    double t0, double t1, const IntegratorConfig& cfg,
                                    EvolveStats* stats = nullptr) {
    if (state0.dim() != h.dim()) throw std::invalid_argument("evolve: dimension mismatch");
    EvolveStats st;
    if (state0.is_pure()) {
        Eigen::MatrixXcd x = state0.vector();
        x = detail::integrate(h, x, t0, t1, cfg, st, true);
        StateVector psi = x.col(0);
        st.norm_drift = std::abs(psi.norm() - 1.0);
        if (stats) *stats = st;
        return QuantumState::pure(psi / psi.norm());
    }
    const LinearOperator u = propagate(h, t0, t1, cfg, &st);
    if (stats) *stats = st;
    LinearOperator rho = u * state0.density() * u.adjoint();
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();
    return QuantumState::mixed(std::move(rho), 1e-8);
}

inline QuantumState evolve(const TimeDependentHamiltonian& h, const QuantumState& state0,
                           double t_final, const IntegratorConfig& cfg, EvolveStats* stats = nullptr) {
    return evolve_interval(h, state0, 0.0, t_final, cfg, stats);
}

// ---- Lindblad master equation with single-mode cavity damping ----
//
// d rho/dt = -i[H, rho] + kappa(1+nbar) D[a] rho + kappa nbar D[a†] rho,
// D[L] rho = L rho L† - ½{L†L, rho}.
inline QuantumState lindblad_evolve(const TimeDependentHamiltonian& h, const QuantumState& rho0,
                                    double kappa, double nbar_bath, double t_final,
                                    const IntegratorConfig& cfg, EvolveStats* stats = nullptr) {
    cfg.validate();
    if (kappa < 0.0) throw std::invalid_argument("lindblad_evolve: kappa must be >= 0");
    if (nbar_bath < 0.0) throw std::invalid_argument("lindblad_evolve: nbar_bath must be >= 0");
    if (rho0.kind() != StateKind::Mixed)
        throw std::invalid_argument("lindblad_evolve: initial state must be mixed-kind");
    if (rho0.dim() != h.dim()) throw std::invalid_argument("lindblad_evolve: dimension mismatch");

    const HilbertSpec& spec = h.spec();
    const SparseOperator a = detail::sparse(annihilation(spec));
    const SparseOperator adag = detail::sparse(creation(spec));
    const SparseOperator nop = detail::sparse(creation(spec) * annihilation(spec));
    const SparseOperator mop = detail::sparse(annihilation(spec) * creation(spec));
    const double k_down = kappa * (1.0 + nbar_bath);
    const double k_up = kappa * nbar_bath;

    auto rhs = [&](double t, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
        Eigen::MatrixXcd hrho;
        h.apply(t, rho, hrho);
        out = -kImag * (hrho - hrho.adjoint().eval());  // -i[H, rho] for Hermitian H
        if (k_down > 0.0) {
            const Eigen::MatrixXcd arho = a * rho;
            out.noalias() += k_down * (arho * adag);
            out.noalias() -= (0.5 * k_down) * (nop * rho);
            out.noalias() -= (0.5 * k_down) * (rho * nop);
        }
        if (k_up > 0.0) {
            const Eigen::MatrixXcd adrho = adag * rho;
            out.noalias() += k_up * (adrho * a);
            out.noalias() -= (0.5 * k_up) * (mop * rho);
            out.noalias() -= (0.5 * k_up) * (rho * mop);
        }
    };

    const double base_dt = cfg.step > 0.0 ? cfg.step : detail::default_step(spec);
    const long base_steps = std::max<long>(4, long(std::ceil(t_final / base_dt)));

    auto run_pass = [&](long n, double* leak) {
        Eigen::MatrixXcd rho = rho0.density();
        const double dt = t_final / double(n);
        Eigen::MatrixXcd k1, k2, k3, k4, tmp;
        const long probe_stride = std::max<long>(1, n / 256);
        for (long i = 0; i < n; ++i) {
            const double t = double(i) * dt;
            rhs(t, rho, k1);
            tmp = rho + (0.5 * dt) * k1;
            rhs(t + 0.5 * dt, tmp, k2);
            tmp = rho + (0.5 * dt) * k2;
            rhs(t + 0.5 * dt, tmp, k3);
            tmp = rho + dt * k3;
            rhs(t + dt, tmp, k4);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (leak && (i % probe_stride == 0 || i + 1 == n)) {
                double p = 0.0;
                const int f = spec.fock_cutoff;
                for (int q = 0; q < spec.atom_dim(); ++q)
                    p += rho(q * f + f - 1, q * f + f - 1).real() + rho(q * f + f - 2, q * f + f - 2).real();
                *leak = std::max(*leak, p);
            }
        }
        return rho;
    };

    EvolveStats st;
    double leak = 0.0;
    Eigen::MatrixXcd current = run_pass(base_steps, &leak);
    st.steps = base_steps;
    st.leakage = leak;
    if (cfg.method == IntegratorConfig::Method::Adaptive) {
        bool done = false;
        for (int r = 1; r <= cfg.max_refinements && !done; ++r) {
            leak = 0.0;
            Eigen::MatrixXcd finer = run_pass(base_steps << r, &leak);
            st.richardson_diff = max_abs(LinearOperator(finer - current));
            st.steps = base_steps << r;
            st.refinements = r;
            st.leakage = leak;
            current = std::move(finer);
            done = st.richardson_diff < cfg.tolerance;
        }
        if (!done) throw ConvergenceError("lindblad_evolve: step doubling did not reach tolerance");
    }
    st.norm_drift = std::abs(current.trace().real() - 1.0);
    if (stats) *stats = st;
    current = 0.5 * (current + current.adjoint().eval());
    current /= current.trace().real();
    return QuantumState::mixed(std::move(current), 1e-6);
}

}  // namespace cavsim
