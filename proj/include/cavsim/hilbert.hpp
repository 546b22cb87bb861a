// hilbert.hpp — Description of the composite atoms ⊗ field Hilbert space.
//
// Tensor ordering is fixed everywhere in this library as
//   atom 1 ⊗ atom 2 ⊗ ... ⊗ atom N ⊗ field,
// i.e. a composite basis index decomposes as  idx = atomic_idx * fock_cutoff + n,
// with atom 1 occupying the most significant bit of atomic_idx and the field
// index n running fastest. All frequencies are in units of the coupling g
// (g = 1 internally); the CLI layer handles physical units.

#pragma once

#include <stdexcept>
#include <string>

namespace cavsim {

struct HilbertSpec {
    int n_atoms = 1;
    int fock_cutoff = 2;   // field dimension; Fock levels 0 .. fock_cutoff-1
    double g = 1.0;        // atom-cavity coupling strength
    double delta = 1.0;    // detuning omega0 - omega_a
    double omega_rabi = 0.0;  // classical drive Rabi frequency

    int atom_dim() const { return 1 << n_atoms; }
    int dim() const { return atom_dim() * fock_cutoff; }

    void validate() const {
        if (n_atoms < 1) throw std::invalid_argument("HilbertSpec: n_atoms must be >= 1");
        if (n_atoms > 12) throw std::invalid_argument("HilbertSpec: n_atoms too large for dense simulation");
        if (fock_cutoff < 2) throw std::invalid_argument("HilbertSpec: fock_cutoff must be >= 2");
        if (!(g > 0.0)) throw std::invalid_argument("HilbertSpec: g must be positive");
        if (omega_rabi < 0.0) throw std::invalid_argument("HilbertSpec: omega_rabi must be >= 0");
    }
};

}  // namespace cavsim
