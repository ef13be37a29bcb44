#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hqc/errors.hpp"
#include "hqc/hybrid.hpp"
#include "hqc/io.hpp"

using namespace hqc;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / (std::string("hqc_test_") + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("an empty document names the required fields") {
        try {
            parse_config_text("");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("coupling.lambda") != std::string::npos);
            CHECK(msg.find("coupling.sigma") != std::string::npos);
        }
    }
    SUBCASE("a minimal document takes the defaults") {
        const auto c = parse_config_text(R"({"coupling": {"lambda": 0.5, "sigma": 2}})");
        HybridConfig expected;
        expected.coupling = {0.5, 2.0};
        CHECK(c == expected);
        CHECK(c.quantum.dim == 64);
        CHECK(c.numerics.dt == 1e-3);
        CHECK(c.mode == Mode::Hybrid);
    }
    SUBCASE("unknown keys and bad types carry the field path") {
        auto field_of = [](const char* text) {
            try {
                parse_config_text(text);
            } catch (const ConfigError& e) {
                return e.field();
            }
            return std::string("<none>");
        };
        CHECK(field_of(R"({"coupling": {"lambda": 1, "sigma": 1, "gamma": 2}})") == "coupling.gamma");
        CHECK(field_of(R"({"coupling": {"lambda": "one", "sigma": 1}})") == "coupling.lambda");
        CHECK(field_of(R"({"coupling": {"lambda": 1, "sigma": 1}, "numerics": {"dt": -1}})") == "numerics.dt");
        CHECK(field_of(R"({"coupling": {"lambda": 1, "sigma": 1}, "quantum": {"dim": 2.5}})") == "quantum.dim");
        CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
        CHECK_THROWS_AS(parse_config("/nonexistent/hqc.json"), ConfigError);
    }
    SUBCASE("every shipped config parses") {
        for (const auto& entry : fs::directory_iterator(HQC_SOURCE_DIR "/configs")) {
            CAPTURE(entry.path().string());
            CHECK_NOTHROW(parse_config(entry.path()));
        }
    }
}

TEST_CASE("config round trip and hashing") {
    HybridConfig c;
    c.coupling = {0.7, 1.3};
    c.packets = {PacketSpec{-2, 0.5, cplx(0.3, -0.1)}, PacketSpec{2, 0, 1.0}};
    c.classical.potential = PotentialSpec::polynomial({0.0, 0.1, 0.5, 0.0, 0.01});
    c.classical.frozen = true;
    c.numerics.scheme = SseScheme::EulerMaruyama;
    c.convention = Convention::PaperLiteral;
    c.mode = Mode::Chain;
    c.analysis.classification_radius = 1.25;
    c.seed = 0xFFFFFFFFFFFFFFFFull;
    c.classical.p0 = 0.1 + 0.2;  // needs all 17 digits

    const auto back = parse_config_text(serialize_config(c));
    CHECK(back == c);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));

    std::set<std::string> hashes;
    HybridConfig v = c;
    hashes.insert(config_hash(v));
    v.seed = 1;
    hashes.insert(config_hash(v));
    v.coupling.lambda = std::nextafter(0.7, 1.0);
    hashes.insert(config_hash(v));
    v.packets[0].amplitude = cplx(0.3, 0.1);
    hashes.insert(config_hash(v));
    v.mode = Mode::Hybrid;
    hashes.insert(config_hash(v));
    v.classical.frozen = false;
    hashes.insert(config_hash(v));
    v.analysis.classification_radius.reset();
    hashes.insert(config_hash(v));
    CHECK(hashes.size() == 7);
    CHECK(config_hash(c).size() == 64);
}

TEST_CASE("sha256 and number formatting") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.0}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("trajectory CSV") {
    HybridConfig c;
    c.coupling = {1.0, 1.0};
    c.numerics.t_final = 0.05;
    c.numerics.output_stride = 5;
    const auto rec = run_trajectory(HybridModel(c), 9, 0);

    std::ostringstream s;
    write_trajectory_csv(s, rec);
    CHECK(s.str().find("\n" + std::string(kCsvColumns) + "\n") != std::string::npos);
    CHECK(s.str().find("config_hash=" + rec.config_hash) != std::string::npos);

    const fs::path dir = scratch_dir("csv");
    write_trajectory_csv(dir / "a.csv", rec);
    const auto rows = read_trajectory_csv(dir / "a.csv");
    CHECK(rows == rec.rows);
    write_trajectory_csv(dir / "b.csv", rec);
    CHECK(file_sha256(dir / "a.csv") == file_sha256(dir / "b.csv"));
    fs::remove_all(dir);
}

TEST_CASE("manifest") {
    const fs::path dir = scratch_dir("manifest");
    {
        std::ofstream(dir / "x.txt") << "hello";
    }
    RunManifest m;
    m.command = "simulate";
    m.options = {{"mode", "hybrid"}};
    m.config.coupling = {1.0, 1.0};
    m.master_seed = 12;
    m.steps = 1000;
    write_manifest(dir, m, {"x.txt"});
    REQUIRE(m.outputs.size() == 1);
    CHECK(m.outputs[0].sha256 == sha256_hex("hello"));
    const auto back = read_manifest(dir / "manifest.json");
    CHECK(back.command == "simulate");
    CHECK(back.config == m.config);
    CHECK(back.master_seed == 12);
    CHECK(back.outputs[0].sha256 == m.outputs[0].sha256);
    CHECK(back.version == kArtifactVersion);
    fs::remove_all(dir);
}
