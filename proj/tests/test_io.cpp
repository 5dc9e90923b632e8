#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "spinsim/config.hpp"

using namespace spinsim;

TEST_CASE("config parsing: sections, comments, types") {
    Config c = Config::parse_string(
        "# comment\n"
        "[device]\n"
        "e_z = 15700\n"
        "j = 18.85\n"
        "t1_1down = inf\n"
        "\n"
        "[rb]\n"
        "lengths = 2, 4, 8\n"
        "protocol = differenced\n"
        "single_tone = true\n",
        "test.cfg");
    c.reject_unknown();
    CHECK(c.get_double("device", "e_z", 0) == 15700.0);
    CHECK(c.get_double("device", "de_z", 300.0) == 300.0);  // fallback
    CHECK(std::isinf(c.get_double("device", "t1_1down", 1.0)));
    CHECK(c.get_bool("rb", "single_tone", false));
    auto lens = c.get_list("rb", "lengths");
    REQUIRE(lens.size() == 3);
    CHECK(lens[2] == 8.0);
    CHECK(c.get_str("rb", "protocol", "") == "differenced");
}

TEST_CASE("config errors carry line numbers") {
    CHECK_THROWS_WITH_AS(Config::parse_string("[device]\ne_z 15700\n", "bad.cfg"),
                         doctest::Contains("bad.cfg:2"), std::runtime_error);
    CHECK_THROWS_WITH_AS(Config::parse_string("e_z = 1\n", "bad.cfg"),
                         doctest::Contains("outside"), std::runtime_error);
    CHECK_THROWS_WITH_AS(Config::parse_string("[device]\ne_z = 1\ne_z = 2\n", "bad.cfg"),
                         doctest::Contains("duplicate"), std::runtime_error);

    Config unknown = Config::parse_string("[device]\nbogus_key = 1\n", "u.cfg");
    CHECK_THROWS_WITH_AS(unknown.reject_unknown(), doctest::Contains("bogus_key"),
                         std::runtime_error);
    Config badsec = Config::parse_string("[notasection]\nx = 1\n", "u.cfg");
    CHECK_THROWS_WITH_AS(badsec.reject_unknown(), doctest::Contains("notasection"),
                         std::runtime_error);

    Config c = Config::parse_string("[device]\ne_z = abc\n", "t.cfg");
    CHECK_THROWS_WITH_AS(c.get_double("device", "e_z", 0), doctest::Contains("t.cfg:2"),
                         std::runtime_error);
}

TEST_CASE("typed views apply the reference defaults and flag them") {
    Config empty = Config::parse_string("", "empty.cfg");
    DeviceParams p = device_from_config(empty);
    CHECK(p.E_Z == 15700.0);
    CHECK(p.dE_Z == 300.0);
    CHECK(p.J == 18.85);
    CHECK(p.coherence_defaults);

    Config custom = Config::parse_string("[device]\nt2star_1down = 2.5\n", "c.cfg");
    DeviceParams pc = device_from_config(custom);
    CHECK(pc.T2star[0] == 2.5);
    CHECK(!pc.coherence_defaults);

    // noise sigma defaults calibrated from T2*
    NoiseModel nm = noise_from_config(empty, p, 7);
    auto* qs = std::get_if<QuasiStaticGaussian>(&nm.kind);
    REQUIRE(qs != nullptr);
    CHECK(qs->sigma_f1 == doctest::Approx(sigma_from_t2star(3.0)));

    SpamConfig spam = spam_from_config(empty);
    CHECK(spam.init_error == 0.02);
    CHECK(trotter_from_config(empty).steps_per_halfpi == 1000);
}

TEST_CASE("round12 keeps twelve significant digits") {
    CHECK(round12(0.123456789012345) == doctest::Approx(0.123456789012).epsilon(1e-12));
    CHECK(round12(15700.0) == 15700.0);
    CHECK(round12(1.0 / 3.0) == doctest::Approx(0.333333333333).epsilon(1e-12));
}
