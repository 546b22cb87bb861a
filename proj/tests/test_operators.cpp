#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cavsim/operators.hpp"
#include "cavsim/state.hpp"

using namespace cavsim;

namespace {

HilbertSpec make_spec(int atoms, int cutoff) {
    HilbertSpec s;
    s.n_atoms = atoms;
    s.fock_cutoff = cutoff;
    s.g = 1.0;
    s.delta = 1.0;
    return s;
}

Eigen::VectorXd sorted_eigenvalues(const LinearOperator& m) {
    Eigen::SelfAdjointEigenSolver<LinearOperator> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("annihilation acts as the truncated ladder operator") {
    const auto spec1 = make_spec(1, 2);
    const LinearOperator a = annihilation(spec1);
    const StateVector g1 = tensor(atomic_product("g"), fock_vector(2, 1));
    const StateVector g0 = tensor(atomic_product("g"), fock_vector(2, 0));
    REQUIRE(max_abs(StateVector(a * g1 - g0)) < 1e-14);
    REQUIRE(max_abs(StateVector(a * g0)) < 1e-14);

    const auto spec4 = make_spec(1, 4);
    const LinearOperator a4 = annihilation(spec4);
    const StateVector f3 = tensor(atomic_product("g"), fock_vector(4, 3));
    const StateVector f2 = tensor(atomic_product("g"), fock_vector(4, 2));
    REQUIRE(std::abs(f2.dot(a4 * f3) - std::sqrt(3.0)) < 1e-14);
}

TEST_CASE("number operator spectrum on a cutoff-3 space") {
    const auto spec = make_spec(1, 3);
    const Eigen::VectorXd evals = sorted_eigenvalues(number_operator(spec));
    // each Fock level appears once per atomic sector
    REQUIRE(evals.size() == 6);
    const double expected[6] = {0, 0, 1, 1, 2, 2};
    for (int i = 0; i < 6; ++i) REQUIRE(std::abs(evals(i) - expected[i]) < 1e-12);
}

TEST_CASE("commutator [a, a+] is the identity below the truncation edge") {
    const auto spec = make_spec(2, 8);
    const LinearOperator a = annihilation(spec), ad = creation(spec);
    const LinearOperator comm = a * ad - ad * a;
    const int f = spec.fock_cutoff;
    for (int q = 0; q < spec.atom_dim(); ++q)
        for (int n = 0; n < f - 1; ++n)
            for (int m = 0; m < f - 1; ++m) {
                const Complex expect = (n == m) ? Complex(1, 0) : Complex(0, 0);
                REQUIRE(std::abs(comm(q * f + n, q * f + m) - expect) < 1e-13);
            }
}

TEST_CASE("atomic sigma+ flips |-> to |+> and leaves the field alone") {
    const auto spec = make_spec(2, 3);
    const LinearOperator sp1 = atomic_operator(spec, 1, AtomicOp::SigmaPlus);
    const StateVector in = tensor(atomic_product("-g"), fock_vector(3, 2));
    const StateVector expect = tensor(atomic_product("+g"), fock_vector(3, 2));
    REQUIRE(max_abs(StateVector(sp1 * in - expect)) < 1e-14);
}

TEST_CASE("S+ applied twice annihilates") {
    const auto spec = make_spec(2, 2);
    const LinearOperator sp = atomic_operator(spec, 1, AtomicOp::SPlus);
    REQUIRE(max_abs(LinearOperator(sp * sp)) < 1e-14);
}

TEST_CASE("sigma_z equals half the sum of S+ and S- in the original basis") {
    // expand the |±> definitions: σ_z = ½(|+><+| - |-><-|) = ½(S⁺ + S⁻)
    const auto spec = make_spec(2, 2);
    const LinearOperator lhs = atomic_operator(spec, 1, AtomicOp::SigmaZ);
    const LinearOperator rhs = 0.5 * (atomic_operator(spec, 1, AtomicOp::SPlus) +
                                      atomic_operator(spec, 1, AtomicOp::SMinus));
    REQUIRE(max_abs(LinearOperator(lhs - rhs)) < 1e-14);
}

TEST_CASE("atomic operators act as identity on the other atoms") {
    const auto spec = make_spec(3, 2);
    const LinearOperator sp2 = atomic_operator(spec, 2, AtomicOp::SPlus);
    const StateVector in = tensor(atomic_product("egg"), fock_vector(2, 1));
    const StateVector expect = tensor(atomic_product("eeg"), fock_vector(2, 1));
    REQUIRE(max_abs(StateVector(sp2 * in - expect)) < 1e-14);
}

TEST_CASE("invalid atom index is rejected") {
    const auto spec = make_spec(2, 2);
    REQUIRE_THROWS_AS(atomic_operator(spec, 0, AtomicOp::SPlus), std::out_of_range);
    REQUIRE_THROWS_AS(atomic_operator(spec, 3, AtomicOp::SPlus), std::out_of_range);
}

TEST_CASE("collective S_x spectra") {
    const Eigen::VectorXd e1 = sorted_eigenvalues(collective_sx(make_spec(1, 2)));
    REQUIRE(e1.size() == 4);  // each atomic eigenvalue twice (field dim 2)
    REQUIRE(std::abs(e1(0) + 0.5) < 1e-12);
    REQUIRE(std::abs(e1(e1.size() - 1) - 0.5) < 1e-12);

    // N = 2: eigenvalues {-1, 0, 0, +1} on the atomic sector
    const Eigen::VectorXd e2 = sorted_eigenvalues(collective_sx_atomic(2));
    const double expected[4] = {-1, 0, 0, 1};
    for (int i = 0; i < 4; ++i) REQUIRE(std::abs(e2(i) - expected[i]) < 1e-12);
}

TEST_CASE("S_x commutes with the photon number operator") {
    const auto spec = make_spec(2, 5);
    const LinearOperator sx = collective_sx(spec), n = number_operator(spec);
    REQUIRE(max_abs(LinearOperator(sx * n - n * sx)) < 1e-13);
}

TEST_CASE("basis change is involutive, real, symmetric, unitary") {
    const LinearOperator t = basis_change();
    REQUIRE(max_abs(LinearOperator(t * t - identity(2))) < 1e-14);
    REQUIRE(max_abs(LinearOperator(t - t.transpose())) < 1e-14);
    REQUIRE(unitarity_defect(t) < 1e-14);
    REQUIRE(t.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thermal state limits and normalization") {
    SECTION("nbar = 0 is the vacuum") {
        const QuantumState th = thermal_state(6, 0.0);
        LinearOperator expect = LinearOperator::Zero(6, 6);
        expect(0, 0) = 1.0;
        REQUIRE(max_abs(LinearOperator(th.density() - expect)) < 1e-14);
    }
    SECTION("nbar = 1 at large cutoff: geometric distribution") {
        const auto p = thermal_probabilities(1.0, 60);
        REQUIRE(std::abs(p[0] - 0.5) < 1e-12);
        REQUIRE(std::abs(p[1] - 0.25) < 1e-12);
    }
    SECTION("probabilities sum to one after renormalization") {
        for (double nbar : {0.3, 1.0, 2.7}) {
            const auto p = thermal_probabilities(nbar, 12);
            double sum = 0.0;
            for (double x : p) sum += x;
            REQUIRE(std::abs(sum - 1.0) < 1e-12);
        }
    }
    SECTION("nbar = 2, cutoff = 20: tail above n = 15 is small but reported") {
        const double tail = thermal_tail_mass(2.0, 20, 15);
        REQUIRE(tail > 0.0);
        REQUIRE(tail < 1e-2);
    }
    SECTION("negative nbar rejected") {
        REQUIRE_THROWS_AS(thermal_state(6, -0.1), std::invalid_argument);
    }
}

TEST_CASE("partial traces") {
    const auto spec = make_spec(2, 3);
    SECTION("product state stays pure under field trace") {
        const StateVector psi = tensor(atomic_product("gg"), fock_vector(3, 0));
        const QuantumState atoms = partial_trace_field(QuantumState::pure(psi), spec);
        LinearOperator expect = LinearOperator::Zero(4, 4);
        expect(0, 0) = 1.0;
        REQUIRE(max_abs(LinearOperator(atoms.density() - expect)) < 1e-14);
    }
    SECTION("trace is preserved for random mixed states") {
        std::mt19937 rng(7);
        std::normal_distribution<double> dist;
        LinearOperator m(spec.dim(), spec.dim());
        for (int i = 0; i < spec.dim(); ++i)
            for (int j = 0; j < spec.dim(); ++j) m(i, j) = Complex(dist(rng), dist(rng));
        LinearOperator rho = m * m.adjoint();
        rho /= rho.trace().real();
        const QuantumState field = partial_trace_atoms(QuantumState::mixed(rho), spec);
        REQUIRE(std::abs(field.density().trace().real() - 1.0) < 1e-12);
    }
    SECTION("maximally entangled pair traces to maximally mixed") {
        HilbertSpec s = make_spec(1, 2);
        StateVector bell = (tensor(atomic_product("g"), fock_vector(2, 0)) +
                            tensor(atomic_product("e"), fock_vector(2, 1))) /
                           std::sqrt(2.0);
        const QuantumState atom = partial_trace_field(QuantumState::pure(bell), s);
        REQUIRE(max_abs(LinearOperator(atom.density() - 0.5 * identity(2))) < 1e-14);
    }
    SECTION("dimension mismatch rejected") {
        const StateVector psi = tensor(atomic_product("g"), fock_vector(2, 0));
        REQUIRE_THROWS_AS(partial_trace_field(QuantumState::pure(psi), spec),
                          std::invalid_argument);
    }
}

TEST_CASE("QuantumState invariants are enforced") {
    StateVector bad = StateVector::Zero(4);
    bad(0) = 1.1;
    REQUIRE_THROWS_AS(QuantumState::pure(bad), std::invalid_argument);

    LinearOperator not_herm = LinearOperator::Zero(2, 2);
    not_herm(0, 0) = 1.0;
    not_herm(0, 1) = Complex(0.2, 0.1);
    REQUIRE_THROWS_AS(QuantumState::mixed(not_herm), std::invalid_argument);

    LinearOperator neg = LinearOperator::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    REQUIRE_THROWS_AS(QuantumState::mixed(neg), std::invalid_argument);
}

TEST_CASE("spec validation") {
    HilbertSpec s;
    s.n_atoms = 0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
    s.n_atoms = 1;
    s.fock_cutoff = 1;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
    s.fock_cutoff = 2;
    s.g = 0.0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
}
