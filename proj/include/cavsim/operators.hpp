// operators.hpp — Elementary and collective operators on the composite space.
//
// Atomic basis: |g> = (1,0), |e> = (0,1). The superposition basis
// |±> = (|g> ± |e>)/√2 defines the σ-operators; σ_z = ½(|+><+| - |-><-|),
// σ⁺ = |+><-|, σ⁻ = |-><+|. All builders return operators on the full
// composite space (identity on the untouched factors).

#pragma once

#include "cavsim/hilbert.hpp"
#include "cavsim/linalg.hpp"

namespace cavsim {

// ---- field (bare, fock_cutoff × fock_cutoff) ----

inline LinearOperator field_annihilation(int fock_cutoff) {
    LinearOperator a = LinearOperator::Zero(fock_cutoff, fock_cutoff);
    for (int n = 1; n < fock_cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

inline LinearOperator field_creation(int fock_cutoff) {
    return field_annihilation(fock_cutoff).adjoint();
}

// ---- single-atom 2x2 blocks ----

inline LinearOperator ket_plus() {
    LinearOperator v(2, 1);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return v;
}

inline LinearOperator ket_minus() {
    LinearOperator v(2, 1);
    v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    return v;
}

// Change of basis |g>,|e> -> |+>,|->; real, symmetric and involutive.
inline LinearOperator basis_change() {
    LinearOperator t(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    t << s, s, s, -s;
    return t;
}

enum class AtomicOp {
    SPlus,       // |e><g|
    SMinus,      // |g><e|
    SzSingle,    // ½(|e><e| - |g><g|)
    SigmaPlus,   // |+><-|
    SigmaMinus,  // |-><+|
    SigmaZ,      // ½(|+><+| - |-><-|)
};

inline LinearOperator atomic_block(AtomicOp which) {
    LinearOperator m = LinearOperator::Zero(2, 2);
    switch (which) {
        case AtomicOp::SPlus: m(1, 0) = 1.0; break;
        case AtomicOp::SMinus: m(0, 1) = 1.0; break;
        case AtomicOp::SzSingle: m(0, 0) = -0.5; m(1, 1) = 0.5; break;
        case AtomicOp::SigmaPlus: m = ket_plus() * ket_minus().adjoint(); break;
        case AtomicOp::SigmaMinus: m = ket_minus() * ket_plus().adjoint(); break;
        case AtomicOp::SigmaZ:
            m = 0.5 * (ket_plus() * ket_plus().adjoint() - ket_minus() * ket_minus().adjoint());
            break;
    }
    return m;
}

// ---- composite-space embeddings ----

// Embed a 2x2 block at atom j (1-based), identity elsewhere and on the field.
inline LinearOperator embed_atomic(const HilbertSpec& spec, int j, const LinearOperator& block) {
    spec.validate();
    if (j < 1 || j > spec.n_atoms) throw std::out_of_range("embed_atomic: atom index out of range");
    LinearOperator op = identity(1);
    for (int i = 1; i <= spec.n_atoms; ++i)
        op = kron(op, i == j ? block : identity(2));
    return kron(op, identity(spec.fock_cutoff));
}

inline LinearOperator atomic_operator(const HilbertSpec& spec, int j, AtomicOp which) {
    return embed_atomic(spec, j, atomic_block(which));
}

// a embedded on the composite space (atoms untouched).
inline LinearOperator annihilation(const HilbertSpec& spec) {
    spec.validate();
    return kron(identity(spec.atom_dim()), field_annihilation(spec.fock_cutoff));
}

inline LinearOperator creation(const HilbertSpec& spec) {
    return annihilation(spec).adjoint();
}

inline LinearOperator number_operator(const HilbertSpec& spec) {
    return creation(spec) * annihilation(spec);
}

// S_x = ½ Σ_j (S_j⁺ + S_j⁻), the collective operator generating the gate phases.
inline LinearOperator collective_sx(const HilbertSpec& spec) {
    spec.validate();
    LinearOperator sx = LinearOperator::Zero(spec.dim(), spec.dim());
    for (int j = 1; j <= spec.n_atoms; ++j)
        sx += 0.5 * (atomic_operator(spec, j, AtomicOp::SPlus) +
                     atomic_operator(spec, j, AtomicOp::SMinus));
    return sx;
}

// Atomic-only variant (no field factor), used by the Dicke-expansion path.
inline LinearOperator collective_sx_atomic(int n_atoms) {
    HilbertSpec s;
    s.n_atoms = n_atoms;
    s.fock_cutoff = 2;
    LinearOperator full = collective_sx(s);
    // strip the trivial field factor: full = sx_atomic ⊗ I_2
    const int d = 1 << n_atoms;
    LinearOperator sx(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) sx(r, c) = full(2 * r, 2 * c);
    return sx;
}

}  // namespace cavsim
