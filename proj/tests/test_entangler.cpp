#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>

#include "sdq/eigensolver.hpp"
#include "sdq/entangler.hpp"
#include "sdq/errors.hpp"
#include "sdq/gates_two.hpp"

using namespace sdq;
using E = EntanglerState;

namespace {

const UnitSystem lab_units(2e5, 2e5, 1.1e6);
const double lab_a_t = 106.0 * constants::bohr_radius;

EntanglerState with(std::initializer_list<std::pair<std::size_t, std::complex<double>>> amps) {
    EntanglerState s;
    for (auto [k, c] : amps) s.amp[k] = c;
    return s;
}

}  // namespace

TEST_CASE("fock basis holds two bosons in ten distinct states") {
    std::set<std::array<int, 4>> seen;
    for (const auto& occ : fock_basis()) {
        CHECK(occ[0] + occ[1] + occ[2] + occ[3] == 2);
        seen.insert(occ);
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("populations and Bell fidelity of simple states") {
    const auto p = populations(E::initial());
    CHECK(p.rho01 == 1.0);
    CHECK(p.rho00 + p.rho10 + p.rho11 + p.rho_dq + p.rho_dt == 0.0);

    const double r = 1.0 / std::sqrt(2.0);
    const auto bell = with({{E::c01, r}, {E::c10, r}});
    const auto pb = populations(bell);
    CHECK(pb.rho01 == doctest::Approx(0.5));
    CHECK(pb.rho10 == doctest::Approx(0.5));
    CHECK(bell_fidelity(with({{E::c01, r}, {E::c10, std::complex<double>(0.0, r)}})) == doctest::Approx(1.0));
    CHECK(bell_phase(with({{E::c01, r}, {E::c10, std::complex<double>(0.0, r)}})) == doctest::Approx(std::numbers::pi / 2));
    CHECK(bell_fidelity(E::initial()) == doctest::Approx(0.5));
    CHECK(bell_fidelity(with({{E::cA, 1.0}})) == 0.0);

    const auto mixed = with({{E::c00, 0.5}, {E::cB, 0.5}, {E::dA1, 0.5}, {E::c11, 0.5}});
    const auto pm = populations(mixed);
    CHECK(pm.rho_dq == doctest::Approx(0.25));
    CHECK(pm.rho_dt == doctest::Approx(0.25));
    CHECK(pm.total() == doctest::Approx(1.0));
}

TEST_CASE("on-site interaction matches the harmonic closed form") {
    const double g = effective_1d_coupling(lab_units, lab_a_t);
    // integral of |phi|^4 for the unit oscillator is 1 / sqrt(2 pi)
    CHECK(onsite_interaction(TrapShape::harmonic(), 5.0, g) == doctest::Approx(g / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-9));
    CHECK(onsite_interaction(TrapShape::harmonic(), 5.0, 0.0) == 0.0);
    const auto h = hubbard_from_traps(TrapShape::harmonic(), TrajectorySpec::cosine(5.0, 1.9, 80.0, 58.0), lab_units, 0.0);
    CHECK(h.u == 0.0);
}

TEST_CASE("tunneling follows the splitting along the trajectory") {
    const auto shape = TrapShape::harmonic();
    const auto traj = TrajectorySpec::cosine(5.0, 1.9, 80.0, 58.0);
    const auto h = hubbard_from_traps(shape, traj, lab_units, lab_a_t);
    CHECK(h.duration == doctest::Approx(218.0));
    const auto grid = default_grid(shape, 5.0, 512);
    const double peak = 0.5 * splitting_frequency(double_well_family(shape), 1.9, grid);
    CHECK(h.j_x(100.0) == doctest::Approx(peak).epsilon(1e-6));
    const double mid = 0.5 * splitting_frequency(double_well_family(shape), separation_at(traj, 31.0), grid);
    CHECK(h.j_y(31.0) == doctest::Approx(mid).epsilon(1e-3));
    for (double t = 0.0; t <= h.duration; t += 1.0) CHECK(h.j_x(t) >= 0.0);

    const auto frozen = hubbard_from_traps(shape, TrajectorySpec::cosine(5.0, 5.0, 80.0, 58.0), lab_units, lab_a_t);
    for (double t = 0.0; t <= frozen.duration; t += 5.0) CHECK(frozen.j_x(t) < 1e-6);
}

TEST_CASE("non-interacting atoms walk independently") {
    // Constant J: the one-particle propagator is exp(i J t K) for the square's
    // adjacency K, and two-boson amplitudes are permanents of its columns.
    const double j = 0.03, duration = 40.0;
    HubbardParams p{[j](double) { return j; }, [j](double) { return j; }, 0.0, duration};
    const auto samples = evolve_two_boson(p, E::initial(), 0.01, 1000);

    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    for (auto [a, b] : {std::pair{A0, A1}, {B0, B1}, {A0, B0}, {A1, B1}}) k(a, b) = k(b, a) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(k);
    for (const auto& s : samples) {
        Eigen::Vector4cd phase;
        for (int q = 0; q < 4; ++q) phase(q) = std::polar(1.0, j * es.eigenvalues()(q) * s.t);
        const Eigen::Matrix4cd u = es.eigenvectors().cast<std::complex<double>>() * phase.asDiagonal() *
                                   es.eigenvectors().transpose().cast<std::complex<double>>();
        for (std::size_t idx = 0; idx < E::size; ++idx) {
            const auto& occ = fock_basis()[idx];
            std::complex<double> expect;
            std::vector<int> sites;
            for (int q = 0; q < 4; ++q)
                for (int c = 0; c < occ[q]; ++c) sites.push_back(q);
            const int x = sites[0], y = sites[1];
            if (x == y) expect = std::sqrt(2.0) * u(x, A0) * u(x, B1);
            else expect = u(x, A0) * u(y, B1) + u(y, A0) * u(x, B1);
            CHECK(std::abs(s.amp[idx] - expect) < 1e-8);
        }
    }
}

TEST_CASE("symmetric approach keeps the populations locked") {
    const auto h = hubbard_from_traps(TrapShape::harmonic(), TrajectorySpec::cosine(5.0, 1.9, 80.0, 58.0), lab_units,
                                      lab_a_t);
    const auto samples = evolve_two_boson(h, E::initial(), 0.01, 10);
    CHECK(samples.front().t == 0.0);
    CHECK(samples.back().t == doctest::Approx(h.duration));
    double sym = 0.0, drift = 0.0;
    for (const auto& s : samples) {
        const auto p = populations(s);
        sym = std::max({sym, std::abs(p.rho00 - p.rho11), std::abs(p.rho00 - 0.5 * p.rho_dq)});
        drift = std::max(drift, std::abs(p.total() - 1.0));
    }
    CHECK(sym < 1e-6);
    CHECK(drift < 1e-9);
    CHECK_FALSE(oscillation_nodes(samples).empty());
}

TEST_CASE("reversed evolution undoes the forward one") {
    const auto h = hubbard_from_traps(TrapShape::harmonic(), TrajectorySpec::cosine(5.0, 1.9, 60.0, 30.0), lab_units,
                                      lab_a_t);
    const auto forward = evolve_two_boson(h, E::initial(), 0.01, 1000000);
    // -H(T - t): U negated, J mirrored in time (its sign is a gauge choice on the square).
    const double total = h.duration;
    HubbardParams back{[&](double t) { return -h.j_x(total - t); }, [&](double t) { return -h.j_y(total - t); }, -h.u,
                       total};
    const auto undone = evolve_two_boson(back, forward.back(), 0.01, 1000000);
    CHECK(std::norm(undone.back().amp[E::c01]) > 1.0 - 1e-6);
}

TEST_CASE("two-site model without interaction") {
    const double j = 0.02;
    const auto s = evolve_two_site([j](double) { return j; }, 0.0, 60.0, 0.01, 500);
    for (const auto& st : s) {
        const double p_lr = std::norm(st.amp[0]);
        CHECK(p_lr == doctest::Approx(std::pow(std::cos(2.0 * j * st.t), 2)).epsilon(1e-8));
        CHECK(std::norm(st.amp[0]) + std::norm(st.amp[1]) + std::norm(st.amp[2]) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("integrator validation") {
    HubbardParams p{[](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, 1.0};
    CHECK_THROWS_AS(evolve_two_boson(p, E::initial(), 0.0), ValidationError);
    CHECK_THROWS_AS(evolve_two_site([](double) { return 0.0; }, 0.0, 1.0, -1.0), ValidationError);
}
