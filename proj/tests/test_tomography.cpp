#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "spintomo/tomogram_io.hpp"
#include "spintomo/tomography.hpp"
#include "test_util.hpp"

using namespace spintomo;
using Catch::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("rotation_u identity and x-axis columns") {
    CHECK(frob_distance(rotation_u(0.0, 0.0), CMat::identity(2)) < 1e-15);

    const CMat u = rotation_u(std::numbers::pi / 2.0, 0.0);
    // Column k must be the (k - 1/2) eigenvector of sigma_x.
    for (int k = 0; k < 2; ++k) {
        std::vector<cx> col{u(0, k), u(1, k)};
        const auto sv = sigma_x().apply(col);
        const double m = k - 0.5;
        CHECK(std::abs(sv[0] - m * col[0]) < 1e-14);
        CHECK(std::abs(sv[1] - m * col[1]) < 1e-14);
    }
}

TEST_CASE("rotation_u is unitary for random angles") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (int rep = 0; rep < 100; ++rep) {
        const CMat m = rotation_u(u(rng), u(rng));
        CHECK(frob_distance(m.adjoint() * m, CMat::identity(2)) < 1e-13);
    }
}

TEST_CASE("rotation_u columns label m with the n.sigma eigenvalue for any direction") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ut(0.0, std::numbers::pi), up(0.0, 2.0 * std::numbers::pi);
    for (int rep = 0; rep < 25; ++rep) {
        const Direction d = Direction::from_angles(ut(rng), up(rng));
        const auto n = d.unit_vector();
        const CMat ns = n[0] * sigma_x() + n[1] * sigma_y() + n[2] * sigma_z();
        const CMat u = rotation_u(d.theta, d.phi);
        for (int k = 0; k < 2; ++k) {
            std::vector<cx> col{u(0, k), u(1, k)};
            const auto sv = ns.apply(col);
            const double m = k - 0.5;
            CHECK(std::abs(sv[0] - m * col[0]) < 1e-12);
            CHECK(std::abs(sv[1] - m * col[1]) < 1e-12);
        }
    }
}

TEST_CASE("tomogram slices of reference states") {
    const DensityMatrix upup = projector(spin_coherent(0.0, 0.0));
    const auto zz = tomogram_slice(upup, {Direction::from_axis(Axis::Z), Direction::from_axis(Axis::Z)});
    CHECK(zz[0] == Approx(0.0).margin(1e-12));
    CHECK(zz[1] == Approx(0.0).margin(1e-12));
    CHECK(zz[2] == Approx(0.0).margin(1e-12));
    CHECK(zz[3] == Approx(1.0).margin(1e-12));

    CMat m0 = 0.25 * (CMat::identity(4) + 4.0 * kron(sigma_x(), sigma_x()));
    const DensityMatrix rho0(2, m0);
    const auto xx = tomogram_slice(rho0, {Direction::from_axis(Axis::X), Direction::from_axis(Axis::X)});
    CHECK(xx[0] == Approx(0.5).margin(1e-12));
    CHECK(xx[1] == Approx(0.0).margin(1e-12));
    CHECK(xx[2] == Approx(0.0).margin(1e-12));
    CHECK(xx[3] == Approx(0.5).margin(1e-12));

    const auto xy = tomogram_slice(rho0, {Direction::from_axis(Axis::X), Direction::from_axis(Axis::Y)});
    for (double p : xy) CHECK(p == Approx(0.25).margin(1e-12));
}

TEST_CASE("spin coherent (pi/2, pi/2) has a deterministic y slice and uniform x, z slices") {
    const DensityMatrix rho = projector(spin_coherent(std::numbers::pi / 2.0, std::numbers::pi / 2.0));
    const Tomogram tom = full_tomogram(rho);
    const auto& yy = tom.slice("yy");
    CHECK(yy[3] == Approx(1.0).margin(1e-12));
    for (const char* key : {"xx", "zz", "xz", "zx"}) {
        for (double p : tom.slice(key)) CHECK(p == Approx(0.25).margin(1e-12));
    }
}

TEST_CASE("full tomograms have the right slice counts and normalisation") {
    std::mt19937_64 rng(21);
    const Tomogram t2 = full_tomogram(testutil::random_density(rng, 2));
    CHECK(t2.slices.size() == 9);
    const Tomogram t3 = full_tomogram(testutil::random_density(rng, 3));
    CHECK(t3.slices.size() == 27);
    for (const auto& [key, probs] : t3.slices) {
        CHECK(probs.size() == 8);
        double s = 0.0;
        for (double p : probs) s += p;
        CHECK(s == Approx(1.0).margin(1e-9));
    }

    const Tomogram tm = full_tomogram(DensityMatrix(2, 0.25 * CMat::identity(4)));
    for (const auto& [key, probs] : tm.slices) {
        for (double p : probs) CHECK(p == Approx(0.25).margin(1e-12));
    }
}

TEST_CASE("marginal tomograms") {
    std::mt19937_64 rng(33);
    // Product state: the joint tomogram factorises and the marginal equals
    // the factor's own tomogram.
    const DensityMatrix a = testutil::random_density(rng, 1);
    const DensityMatrix b = testutil::random_density(rng, 1);
    const DensityMatrix ab(2, kron(a.matrix, b.matrix));
    const Tomogram tab = full_tomogram(ab);
    const Tomogram ta = marginal(tab, {0});
    const Tomogram ta_direct = full_tomogram(a);
    for (const auto& [key, probs] : ta.slices) {
        for (std::size_t i = 0; i < probs.size(); ++i) {
            CHECK(probs[i] == Approx(ta_direct.slice(key)[i]).margin(1e-12));
        }
    }

    // Bell marginal: uniform in every axis.
    const Tomogram tb = marginal(full_tomogram(projector(bell_phi_plus())), {0});
    for (const auto& [key, probs] : tb.slices) {
        CHECK(probs[0] == Approx(0.5).margin(1e-12));
        CHECK(probs[1] == Approx(0.5).margin(1e-12));
    }

    // Consistency across discarded-axis choices for a generic state.
    const Tomogram tg = full_tomogram(testutil::random_density(rng, 2));
    CHECK_NOTHROW(marginal(tg, {1}, 1e-10));

    // A corrupted slice breaks consistency.
    Tomogram bad = tg;
    bad.slices["xz"][0] += 0.02;
    bad.slices["xz"][1] -= 0.02;
    CHECK_THROWS_AS(marginal(bad, {1}, 1e-10), DataError);
}

TEST_CASE("moments of reference states") {
    const Tomogram tphi = full_tomogram(projector(bell_phi_plus()));
    CHECK(moment(tphi, {{0, Axis::X}, {1, Axis::X}}) == Approx(0.25).margin(1e-12));

    const Tomogram tup = full_tomogram(projector(spin_coherent(0.0, 0.0)));
    CHECK(moment(tup, {{0, Axis::Z}}) == Approx(0.5).margin(1e-12));

    CMat m0 = 0.25 * (CMat::identity(4) + 4.0 * kron(sigma_x(), sigma_x()));
    const Tomogram t0 = full_tomogram(DensityMatrix(2, m0));
    CHECK(moment(t0, {{0, Axis::X}, {1, Axis::Y}}) == Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(moment(t0, {{0, Axis::X}, {0, Axis::Y}}), std::invalid_argument);
}

TEST_CASE("tomogram moments equal operator expectations for random states") {
    std::mt19937_64 rng(55);
    const CMat sig[3] = {sigma_x(), sigma_y(), sigma_z()};
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const DensityMatrix rho = testutil::random_density(rng, n);
        const Tomogram tom = full_tomogram(rho);
        for (int q = 0; q < n; ++q) {
            for (int a = 0; a < 3; ++a) {
                std::vector<CMat> f;
                for (int k = 0; k < n; ++k) f.push_back(k == q ? sig[a] : identity2());
                const double direct = (kron(f) * rho.matrix).trace().real();
                CHECK(moment(tom, {{q, static_cast<Axis>(a)}}) == Approx(direct).margin(1e-10));
            }
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                std::vector<CMat> f;
                for (int k = 0; k < n; ++k) {
                    f.push_back(k == 0 ? sig[a] : (k == 1 ? sig[b] : identity2()));
                }
                const double direct = (kron(f) * rho.matrix).trace().real();
                CHECK(moment(tom, {{0, static_cast<Axis>(a)}, {1, static_cast<Axis>(b)}}) ==
                      Approx(direct).margin(1e-10));
            }
        }
    }
}

TEST_CASE("product-state tomograms factorise into their marginals") {
    std::mt19937_64 rng(66);
    for (int rep = 0; rep < 5; ++rep) {
        const DensityMatrix rho = testutil::random_product_density(rng, 2);
        const Tomogram tom = full_tomogram(rho);
        const Tomogram ma = marginal(tom, {0});
        const Tomogram mb = marginal(tom, {1});
        for (const auto& [key, probs] : tom.slices) {
            const auto& pa = ma.slice(std::string(1, key[0]));
            const auto& pb = mb.slice(std::string(1, key[1]));
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    CHECK(probs[2 * i + j] == Approx(pa[i] * pb[j]).margin(1e-10));
                }
            }
        }
    }
}

TEST_CASE("expectation_from_tomogram matches the trace route") {
    std::mt19937_64 rng(77);
    for (int n : {1, 2, 3}) {
        const DensityMatrix rho = testutil::random_density(rng, n);
        const Tomogram tom = full_tomogram(rho);
        const CMat h = testutil::random_hermitian(rng, 1 << n);
        const double direct = (h * rho.matrix).trace().real();
        CHECK(expectation_from_tomogram(tom, h) == Approx(direct).margin(1e-10));
    }
}

TEST_CASE("tomogram file round trip") {
    std::mt19937_64 rng(88);
    const Tomogram tom = full_tomogram(testutil::random_density(rng, 2));
    const auto path = temp_file("spintomo_roundtrip.json");
    write_tomogram(tom, path.string());
    const Tomogram back = read_tomogram(path.string());
    REQUIRE(back.n_qubits == 2);
    REQUIRE(back.slices.size() == tom.slices.size());
    for (const auto& [key, probs] : tom.slices) {
        for (std::size_t i = 0; i < probs.size(); ++i) {
            CHECK(std::abs(back.slice(key)[i] - probs[i]) < 1e-12);
        }
    }
    write_tomogram_csv(tom, temp_file("spintomo_roundtrip.csv").string());
    std::filesystem::remove(path);
}

TEST_CASE("tomogram reader rejects bad files and accepts partial ones") {
    const auto path = temp_file("spintomo_bad.json");
    {
        std::ofstream out(path);
        out << R"({"format_version":1,"n_qubits":2,"outcome_convention":"0=-1/2,1=+1/2",
                   "slices":[{"axes":"xx","probs":[0.4,0.2,0.2,0.1]}]})";
    }
    CHECK_THROWS_AS(read_tomogram(path.string()), DataError);

    {
        std::ofstream out(path);
        out << R"({"format_version":1,"n_qubits":2,"outcome_convention":"0=-1/2,1=+1/2",
                   "slices":[{"axes":"xq","probs":[0.25,0.25,0.25,0.25]}]})";
    }
    CHECK_THROWS(read_tomogram(path.string()));

    {
        std::ofstream out(path);
        out << R"({"format_version":1,"n_qubits":2,"outcome_convention":"0=-1/2,1=+1/2",
                   "slices":[{"axes":"xx","probs":[0.5,0.0,0.0,0.5]}]})";
    }
    const Tomogram partial = read_tomogram(path.string());
    CHECK(partial.slices.size() == 1);
    CHECK_FALSE(partial.is_full());

    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(read_tomogram(path.string()), DataError);
    std::filesystem::remove(path);
}
