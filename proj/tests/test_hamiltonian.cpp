#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cavsim/hamiltonian.hpp"
#include "cavsim/operators.hpp"
#include "cavsim/propagator.hpp"

using namespace cavsim;

namespace {

HilbertSpec make_spec(int atoms, int cutoff, double g, double delta, double omega) {
    HilbertSpec s;
    s.n_atoms = atoms;
    s.fock_cutoff = cutoff;
    s.g = g;
    s.delta = delta;
    s.omega_rabi = omega;
    return s;
}

// frame-conjugation oracle: e^{iH0 t} (H - H0) e^{-iH0 t}
LinearOperator conjugated(const LinearOperator& h, const LinearOperator& h0, double t) {
    const LinearOperator u = hermitian_expm(h0, kImag * t);
    return u * (h - h0) * u.adjoint();
}

// composite-Simpson average of a matrix-valued function over [0, T]
LinearOperator simpson_average(const TimeDependentHamiltonian& h, double period, int panels) {
    LinearOperator acc = LinearOperator::Zero(h.dim(), h.dim());
    const double dt = period / (2 * panels);
    for (int i = 0; i <= 2 * panels; ++i) {
        const double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * h.evaluate(i * dt);
    }
    return acc * (dt / 3.0) / period;
}

}  // namespace

TEST_CASE("interaction Hamiltonian reduces to resonant Jaynes-Cummings at t=0, omega=0") {
    const auto spec = make_spec(1, 4, 1.0, 0.7, 0.0);
    const auto h = build_interaction(spec);
    const LinearOperator expect =
        0.5 * spec.g *
        (creation(spec) * atomic_operator(spec, 1, AtomicOp::SMinus) +
         annihilation(spec) * atomic_operator(spec, 1, AtomicOp::SPlus));
    REQUIRE(max_abs(LinearOperator(h.evaluate(0.0) - expect)) < 1e-14);
}

TEST_CASE("interaction matrix element <e,0|H(t)|g,1> = (g/2) e^{i delta t}") {
    const auto spec = make_spec(1, 3, 1.0, 1.3, 2.0);
    const auto h = build_interaction(spec);
    const StateVector bra = tensor(atomic_product("e"), fock_vector(3, 0));
    const StateVector ket = tensor(atomic_product("g"), fock_vector(3, 1));
    for (double t : {0.0, 0.4, 2.9}) {
        const Complex elem = bra.dot(h.evaluate(t) * ket);
        const Complex expect = 0.5 * spec.g * std::exp(kImag * spec.delta * t);
        REQUIRE(std::abs(elem - expect) < 1e-14);
    }
}

TEST_CASE("interaction Hamiltonian is periodic with period 2pi/delta") {
    const auto spec = make_spec(2, 5, 1.0, 0.8, 7.0);
    const auto h = build_interaction(spec);
    const double period = 2.0 * kPi / spec.delta;
    for (double t : {0.1, 1.7, 4.4})
        REQUIRE(max_abs(LinearOperator(h.evaluate(t + period) - h.evaluate(t))) < 1e-12);
}

TEST_CASE("all builders are Hermitian at random times") {
    const auto spec = make_spec(2, 6, 1.0, 1.1, 23.0);
    const auto hi = build_interaction(spec);
    const auto hr = build_rotated(spec);
    const auto he = build_effective(spec);
    const auto hd = build_residual(spec);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> time(0.0, 12.0);
    for (int i = 0; i < 20; ++i) {
        const double t = time(rng);
        REQUIRE(hermiticity_defect(hi.evaluate(t)) < 1e-12);
        REQUIRE(hermiticity_defect(hr.evaluate(t)) < 1e-12);
        REQUIRE(hermiticity_defect(he.evaluate(t)) < 1e-12);
        REQUIRE(hermiticity_defect(hd.evaluate(t)) < 1e-12);
    }
    REQUIRE(hermiticity_defect(build_drive_frame(spec)) < 1e-12);
}

TEST_CASE("drive frame H0") {
    const auto spec = make_spec(2, 2, 1.0, 1.0, 3.0);
    const LinearOperator h0 = build_drive_frame(spec);

    SECTION("atomic eigenvalues are {-Omega, 0, 0, +Omega}") {
        Eigen::SelfAdjointEigenSolver<LinearOperator> es(h0, Eigen::EigenvaluesOnly);
        // field dim 2 doubles each
        const double expect[8] = {-3, -3, 0, 0, 0, 0, 3, 3};
        for (int i = 0; i < 8; ++i) REQUIRE(std::abs(es.eigenvalues()(i) - expect[i]) < 1e-12);
    }
    SECTION("H0 equals Omega S_x as a matrix") {
        REQUIRE(max_abs(LinearOperator(h0 - spec.omega_rabi * collective_sx(spec))) < 1e-12);
    }
    SECTION("exp(-i H0 t) is unitary at Omega t = 10.5 pi") {
        const double t = 10.5 * kPi / spec.omega_rabi;
        REQUIRE(unitarity_defect(hermitian_expm(h0, -kImag * t)) < 1e-12);
    }
}

TEST_CASE("rotated frame equals the conjugation identity") {
    const auto spec = make_spec(2, 5, 1.0, 1.0, 20.0);
    const auto hi = build_interaction(spec);
    const auto hr = build_rotated(spec);
    const LinearOperator h0 = build_drive_frame(spec);

    SECTION("t = 0: H'(0) = H(0) - H0") {
        REQUIRE(max_abs(LinearOperator(hr.evaluate(0.0) - (hi.evaluate(0.0) - h0))) < 1e-12);
    }
    SECTION("Omega = 0: trivial frame") {
        const auto spec0 = make_spec(2, 5, 1.0, 1.0, 0.0);
        const auto hi0 = build_interaction(spec0);
        const auto hr0 = build_rotated(spec0);
        for (double t : {0.0, 0.9, 3.3})
            REQUIRE(max_abs(LinearOperator(hr0.evaluate(t) - hi0.evaluate(t))) < 1e-12);
    }
    SECTION("random times against the numerical conjugation oracle") {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> time(0.0, 6.0);
        for (int i = 0; i < 6; ++i) {
            const double t = time(rng);
            REQUIRE(max_abs(LinearOperator(hr.evaluate(t) - conjugated(hi.evaluate(t), h0, t))) <
                    1e-10);
        }
    }
}

TEST_CASE("effective Hamiltonian structure") {
    const auto spec = make_spec(2, 6, 1.0, 1.0, 40.0);
    const auto he = build_effective(spec);
    const LinearOperator sx = collective_sx(spec);

    SECTION("commutes with S_x at all times") {
        for (double t : {0.0, 0.37, 2.2})
            REQUIRE(max_abs(LinearOperator(he.evaluate(t) * sx - sx * he.evaluate(t))) < 1e-12);
    }
    SECTION("two-time commutator is a c-number times S_x^2 below the truncation edge") {
        const double t1 = 0.31, t2 = 1.77, d = spec.delta, g = spec.g;
        const LinearOperator comm =
            he.evaluate(t1) * he.evaluate(t2) - he.evaluate(t2) * he.evaluate(t1);
        const Complex c = g * g / 4.0 *
                          (std::exp(kImag * d * (t1 - t2)) - std::exp(-kImag * d * (t1 - t2)));
        const LinearOperator sx2 = collective_sx_atomic(2) * collective_sx_atomic(2);
        const int f = spec.fock_cutoff;
        // compare on field levels below the top (where [a, a+] = 1 holds)
        for (int qa = 0; qa < 4; ++qa)
            for (int qb = 0; qb < 4; ++qb)
                for (int n = 0; n < f - 1; ++n)
                    REQUIRE(std::abs(comm(qa * f + n, qb * f + n) - c * sx2(qa, qb)) < 1e-12);
    }
    SECTION("doubling g doubles every entry") {
        const auto spec2 = make_spec(2, 6, 2.0, 1.0, 40.0);
        const auto he2 = build_effective(spec2);
        for (double t : {0.21, 1.9})
            REQUIRE(max_abs(LinearOperator(he2.evaluate(t) - 2.0 * he.evaluate(t))) < 1e-12);
    }
}

TEST_CASE("residual terms complete the decomposition") {
    const auto spec = make_spec(2, 5, 1.0, 1.0, 25.0);
    const auto hr = build_rotated(spec);
    const auto he = build_effective(spec);
    const auto hd = build_residual(spec);

    SECTION("rotated = effective + residual, entrywise") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> time(0.0, 9.0);
        for (int i = 0; i < 8; ++i) {
            const double t = time(rng);
            REQUIRE(max_abs(LinearOperator(hr.evaluate(t) - he.evaluate(t) - hd.evaluate(t))) <
                    1e-12);
        }
    }
    SECTION("decomposition at t = 0") {
        REQUIRE(max_abs(LinearOperator(hd.evaluate(0.0) + he.evaluate(0.0) - hr.evaluate(0.0))) <
                1e-12);
    }
}

TEST_CASE("residual has no atomic-diagonal part in the |±> basis") {
    const auto spec = make_spec(2, 3, 1.0, 1.0, 25.0);
    const auto hd = build_residual(spec);
    const LinearOperator h = hd.evaluate(0.83);
    const char* pm[4] = {"++", "+-", "-+", "--"};
    for (const char* conf : pm) {
        const StateVector atomic = atomic_product(conf);
        for (int n = 0; n < 3; ++n)
            for (int m = 0; m < 3; ++m) {
                const StateVector bra = tensor(atomic, fock_vector(3, n));
                const StateVector ket = tensor(atomic, fock_vector(3, m));
                REQUIRE(std::abs(bra.dot(h * ket)) < 1e-13);
            }
    }
}

TEST_CASE("residual time-average over one drive period is suppressed") {
    // quadrature oracle; the average decays like delta/Omega
    const double period20 = 2.0 * kPi / 20.0;
    const auto spec20 = make_spec(2, 4, 1.0, 1.0, 20.0);
    const LinearOperator avg20 = simpson_average(build_residual(spec20), period20, 512);
    const double norm20 = avg20.operatorNorm();
    REQUIRE(norm20 < 0.1 * spec20.g);

    const auto spec50 = make_spec(2, 4, 1.0, 1.0, 50.0);
    const LinearOperator avg50 =
        simpson_average(build_residual(spec50), 2.0 * kPi / 50.0, 512);
    REQUIRE(avg50.operatorNorm() < norm20);
    REQUIRE(avg50.operatorNorm() < 0.1 * spec50.g);
}
