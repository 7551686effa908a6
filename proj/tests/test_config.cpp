#include "slab/config.hpp"

#include "slab/error.hpp"
#include "slab/maps.hpp"

#include <doctest.h>

#include <cmath>

using namespace slab;

namespace {

const char* kDocument = R"cfg(# user-defined objects
[chart warped]
dim = 2
g11 = "1/(1+abs2)"
g22 = "1/(1+abs2)"   # same conformal factor
radial = true

[soliton mine]
chart = warped
f = "-log(1+abs2)"
lambda = 0

[soliton yam]
kind = yamabe
chart = euclidean3
F = "abs2/2"
rho = -1

[map probe]
source = warped
target = sphere2
components = ["x", "y"]

[run]
rmax = 2.5
radii = [2, 4, 8]
)cfg";

Point pt(double x, double y)
{
    Point p(2);
    p << x, y;
    return p;
}

} // namespace

TEST_CASE("sections and values")
{
    const ConfigDocument doc = ConfigDocument::parse(kDocument);
    CHECK(doc.sections().size() == 5);
    const ConfigSection* c = doc.find("chart", "warped");
    REQUIRE(c != nullptr);
    CHECK(c->line == 2);
    CHECK(c->number("dim") == 2.0);
    CHECK(c->string("g22") == "1/(1+abs2)");
    CHECK(c->boolean("radial"));
    CHECK_FALSE(c->maybe_string("domain").has_value());
    REQUIRE(doc.run() != nullptr);
    CHECK(doc.run()->number("rmax") == 2.5);
    CHECK(doc.run()->numbers("radii") == std::vector<double>{2, 4, 8});
    CHECK(doc.find("map", "probe")->strings("components") == std::vector<std::string>{"x", "y"});
}

TEST_CASE("hash is stable and content sensitive")
{
    const ConfigDocument a = ConfigDocument::parse(kDocument);
    CHECK(a.hash() == ConfigDocument::parse(kDocument).hash());
    CHECK(a.hash().size() == 16);
    CHECK(a.hash() != ConfigDocument::parse(std::string(kDocument) + "\n").hash());
    CHECK(ConfigDocument{}.hash() == "cbf29ce484222325");
}

TEST_CASE("malformed documents report the line")
{
    auto message = [](const std::string& text) {
        try {
            ConfigDocument::parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("[chart a\n").find("line 1") != std::string::npos);
    CHECK(message("\n\nx = 1\n").find("line 3") != std::string::npos);
    CHECK(message("[chart a]\ndim 2\n").find("line 2") != std::string::npos);
    CHECK(message("[chart a]\ndim = 2\ndim = 3\n").find("duplicate key") != std::string::npos);
    CHECK(message("[widget a]\n").find("unknown section") != std::string::npos);
    CHECK(message("[run]\n[run]\n").find("duplicate [run]") != std::string::npos);
    CHECK(message("[chart]\n").find("needs a name") != std::string::npos);
    const ConfigDocument doc = ConfigDocument::parse("[run]\nrmax = three\nradii = [1, 2\n");
    CHECK_THROWS_AS(doc.run()->number("rmax"), ConfigError);
    CHECK_THROWS_AS(doc.run()->numbers("radii"), ConfigError);
    CHECK_THROWS_AS(doc.run()->number("missing"), ConfigError);
}

TEST_CASE("registry resolves user and built-in names")
{
    const ConfigDocument doc = ConfigDocument::parse(kDocument);
    const Registry reg(doc);

    const Chart warped = reg.chart("warped");
    CHECK(warped.radial());
    CHECK(metric_at(warped, pt(1, 2)).value(0, 0) == doctest::Approx(1.0 / 6.0));

    const SolitonEntry mine = reg.soliton("mine");
    CHECK_FALSE(mine.yamabe);
    CHECK(ricci_residual(mine.ricci, pt(0.3, -0.7)).value.norm() < 1e-12);

    const SolitonEntry yam = reg.soliton("yam");
    REQUIRE(yam.yamabe);
    CHECK(yam.chart().dim() == 3);
    CHECK(yam.yamabe_data.rho == -1.0);

    const SmoothMap probe = reg.map("probe");
    CHECK(probe.n() == 2);
    CHECK(tension(probe, pt(0.4, 0.1)).value.norm() < 1e-12);

    CHECK(reg.chart("euclidean4").dim() == 4);
    CHECK(reg.soliton("gaussian3").ricci.lambda == 1.0);
    CHECK(reg.soliton("euclidean-yamabe2").yamabe);
    CHECK(reg.soliton("euclidean2").ricci.lambda == 0.0);
    CHECK(reg.map("linear3").n() == 2);
    CHECK(reg.map("quadratic3").m() == 3);
    CHECK(reg.map("cigar-stereo").source().name() == "cigar");

    CHECK_THROWS_AS(reg.chart("nowhere"), ConfigError);
    CHECK_THROWS_AS(reg.soliton("nothing"), ConfigError);
    CHECK_THROWS_AS(reg.map("euclidean0"), ConfigError);
    CHECK_THROWS_AS(reg.chart("euclidean9"), ConfigError);
}

TEST_CASE("registry validates sections")
{
    const ConfigDocument doc = ConfigDocument::parse(R"([chart partial]
dim = 2
g11 = "1"

[soliton odd]
kind = gradient
chart = euclidean2
f = "0"
lambda = 0

[soliton unparsable]
chart = euclidean2
f = "x +* y"
lambda = 0
)");
    const Registry reg(doc);
    CHECK_THROWS_AS(reg.chart("partial"), ConfigError);
    CHECK_THROWS_AS(reg.soliton("odd"), ConfigError);
    CHECK_THROWS_AS(reg.soliton("unparsable"), SyntaxError);
}

TEST_CASE("builtin dimension suffix")
{
    CHECK(builtin_dimension("gaussian3", "gaussian") == 3);
    CHECK_FALSE(builtin_dimension("gaussian", "gaussian").has_value());
    CHECK_FALSE(builtin_dimension("gaussianx", "gaussian").has_value());
    CHECK_FALSE(builtin_dimension("cigar", "gaussian").has_value());
}
