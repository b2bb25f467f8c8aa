#include <random>

#include "ctmar/core.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctmar;

TEST_CASE("hu_to_mu reference points") {
    Image img{Grid2(1, 3), ImageUnit::HU};
    img.grid(0, 0) = 0.0;
    img.grid(0, 1) = -1000.0;
    img.grid(0, 2) = 1000.0;
    const double mu_water = 0.02;
    const Image mu = hu_to_mu(img, mu_water);
    CHECK(mu.unit == ImageUnit::Attenuation);
    CHECK(mu.grid(0, 0) == doctest::Approx(mu_water).epsilon(1e-15));
    CHECK(mu.grid(0, 1) == 0.0);
    CHECK(mu.grid(0, 2) == doctest::Approx(2.0 * mu_water).epsilon(1e-15));
}

TEST_CASE("hu_to_mu clamps below air") {
    Image img{Grid2(1, 1, -2000.0), ImageUnit::HU};
    CHECK(hu_to_mu(img).grid(0, 0) == 0.0);
}

TEST_CASE("mu_to_hu reference points") {
    Image img{Grid2(1, 2), ImageUnit::Attenuation};
    img.grid(0, 0) = 0.02;
    img.grid(0, 1) = 0.0;
    const Image hu = mu_to_hu(img, 0.02);
    CHECK(hu.grid(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hu.grid(0, 1) == doctest::Approx(-1000.0).epsilon(1e-12));
}

TEST_CASE("hu/mu round trip is the identity above -1000 HU") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1000.0, 3000.0);
    Image img{Grid2(8, 8), ImageUnit::HU};
    for (int trial = 0; trial < 50; ++trial) {
        for (double& v : img.grid) v = u(rng);
        const Image back = mu_to_hu(hu_to_mu(img, 0.019), 0.019);
        for (size_t i = 0; i < img.grid.size(); ++i)
            CHECK(back.grid.data()[i] ==
                  doctest::Approx(img.grid.data()[i]).epsilon(1e-10));
    }
}

TEST_CASE("unit conversions reject wrong unit tags") {
    Image mu{Grid2(1, 1, 0.02), ImageUnit::Attenuation};
    Image hu{Grid2(1, 1, 0.0), ImageUnit::HU};
    CHECK_THROWS_AS(hu_to_mu(mu), UnitMismatch);
    CHECK_THROWS_AS(mu_to_hu(hu), UnitMismatch);
    CHECK_THROWS_AS(hu_to_mu(hu, 0.0), ConfigError);
}

static MetalMask mask_with_count(int n, long long count) {
    Grid2 g(n, n, 0.0);
    long long placed = 0;
    for (int r = 0; r < n && placed < count; ++r)
        for (int c = 0; c < n && placed < count; ++c) {
            g(r, c) = 1.0;
            ++placed;
        }
    return MetalMask{std::move(g)};
}

TEST_CASE("metal_size_group bin edges and tie rule") {
    const SizeThresholds t{100, 300, 700, 1500};
    CHECK(metal_size_group(mask_with_count(64, 1501), t) == 1);
    CHECK(metal_size_group(mask_with_count(64, 1500), t) == 2);  // tie -> smaller-metal side
    CHECK(metal_size_group(mask_with_count(64, 701), t) == 2);
    CHECK(metal_size_group(mask_with_count(64, 700), t) == 3);
    CHECK(metal_size_group(mask_with_count(64, 301), t) == 3);
    CHECK(metal_size_group(mask_with_count(64, 101), t) == 4);
    CHECK(metal_size_group(mask_with_count(64, 100), t) == 5);
    CHECK(metal_size_group(mask_with_count(64, 1), t) == 5);
}

TEST_CASE("metal_size_group empty mask is a distinct no-metal signal") {
    CHECK(!metal_size_group(mask_with_count(8, 0)).has_value());
}

TEST_CASE("metal_size_group is monotone in pixel count") {
    const SizeThresholds t{10, 20, 40, 80};
    int prev_group = 6;
    for (long long count = 1; count <= 120; ++count) {
        const int g = *metal_size_group(mask_with_count(16, count), t);
        CHECK(g <= prev_group);  // more pixels never increases the label
        prev_group = g;
    }
}

TEST_CASE("metal_size_group rejects unsorted thresholds") {
    CHECK_THROWS_AS(metal_size_group(mask_with_count(8, 5), SizeThresholds{5, 4, 10, 20}),
                    ConfigError);
}

TEST_CASE("MetalMask validates binary values") {
    Grid2 g(2, 2, 0.0);
    g(0, 1) = 0.5;
    CHECK_THROWS_AS(MetalMask::from_grid(g), DataError);
    g(0, 1) = 1.0;
    CHECK(MetalMask::from_grid(g).pixel_count() == 1);
}

TEST_CASE("Geometry validation") {
    Geometry g;
    CHECK_NOTHROW(g.validate());
    g.n_angles = 0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = Geometry{};
    g.pixel_size = 0.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = Geometry{};
    g.beam = BeamModel::FanEquiangular;
    CHECK_THROWS_AS(g.validate(), ConfigError);  // fan needs source distance
    g.source_distance = 800.0;
    CHECK_NOTHROW(g.validate());
}

TEST_CASE("Geometry center detector passes through rotation center") {
    Geometry g;
    CHECK(g.detector_coord((g.n_detectors - 1) / 2) == 0.0);
}

TEST_CASE("Spectrum validation") {
    Spectrum s;
    s.energies_kev = {30.0, 60.0, 90.0};
    s.weights = {0.25, 0.5, 0.25};
    s.materials["ti"] = {{1.0, 0.5, 0.3}, 4.5};
    CHECK_NOTHROW(s.validate());

    Spectrum bad = s;
    bad.weights = {0.5, 0.5, 0.1};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = s;
    bad.energies_kev = {30.0, 30.0, 90.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = s;
    bad.materials["ti"].lambda = {1.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = s;
    bad.materials["ti"].lambda[1] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
