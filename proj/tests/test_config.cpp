#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "wvlab/commands.hpp"
#include "wvlab/errors.hpp"

using namespace wvlab;
using doctest::Approx;

namespace {

const std::filesystem::path kRoot = WVLAB_SOURCE_DIR;

const char* kMinimal = R"(
[recipe]
k0 = 5
k1 = 1
dk_f = 0.1
dk_g = 0.1
x0 = 100

[constants]
hbar = 1
mass = 1
)";

int error_line(const std::string& text) {
    try {
        parse_run_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("config echo re-parses to an equal config") {
    for (const char* name : {"p1.cfg", "p2.cfg", "no_inner_p1.cfg"}) {
        const auto c = load_run_config(kRoot / "configs" / name);
        CHECK(parse_run_config(to_config_text(c)) == c);
    }
    auto c = parse_run_config(kMinimal);
    c.pointer = PointerRun{{3.0, 0.1}, 17, "", ProbeSelection{cplx(0.6, 0.0), cplx(0.0, 0.8), 1.0, 0.0}};
    c.labeled = true;
    c.seed = 123456789012345ULL;
    c.recipe.dk_g = 0.1 + 1e-17 * 3;
    CHECK(parse_run_config(to_config_text(c)) == c);
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const auto s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("config errors carry line numbers") {
    const std::string base = kMinimal;
    CHECK(error_line(base + "[grid]\nx_min = -1\nx_max = 1\nn = 12x\n") == 15);
    CHECK(error_line(base + "bogus line\n") == 12);
    CHECK(error_line(base + "[recipe]\n") == 12);
    CHECK(error_line(base + "[extra]\nkey = 1\n") == 12);
    CHECK(error_line("[recipe]\nk0 = 5\nk1 = 1\ndk_f = 0.1\ndk_g = 0.1\nx0 = 100\nk0 = 6\n") == 7);
    CHECK(error_line("[recipe]\nk0 = 5\nk1 = 1\ndk_f = 0.1\ndk_g = 0.1\nx0 = 100\nspin = 2\n") == 7);
    // Missing x0: no hidden defaults.
    CHECK(error_line("[recipe]\nk0 = 5\nk1 = 1\ndk_f = 0.1\ndk_g = 0.1\n") == 1);
    // Module invariants are re-checked at parse time.
    CHECK(error_line("[recipe]\nk0 = 5\nk1 = 1\ndk_f = 0\ndk_g = 0.1\nx0 = 1\n") == 1);
    CHECK(error_line(base + "[grid]\nx_min = 1\nx_max = -1\nn = 4096\n") == 12);
    CHECK(error_line(base + "[pointer]\nwidth = 1\ndeflection = 1\nsamples = 10\n") == 12);
    CHECK(error_line(base + "[pointer]\nwidth = 1\ndeflection = 1\nsamples = 10\ntarget = q\n") == 12);
    CHECK_THROWS_AS(parse_run_config("[constants]\nhbar = 1\nmass = 1\n"), ParseError);
}

TEST_CASE("scenario files round-trip") {
    const PacketRecipe r{5, 1, 0.1, 0.1, 100};
    const auto tuned = tune_splitters(nested_scenario(r));
    const ScenarioFile f{tuned, false};
    const auto back = parse_scenario(to_scenario_text(f), r, {});
    REQUIRE(back.scenario.elements.size() == tuned.elements.size());
    CHECK(to_scenario_text(back) == to_scenario_text(f));
    const auto a = selection_states(tuned, tuned.find("d2"));
    const auto b = selection_states(back.scenario, back.scenario.find("d2"));
    CHECK(a.detection_probability == b.detection_probability);

    // Shipped file reproduces the programmatic layout after tuning.
    const auto shipped = load_scenario(kRoot / "scenarios" / "nested_p1.scn", r, {});
    CHECK(shipped.tune);
    CHECK(to_scenario_text({tune_splitters(shipped.scenario), false}) == to_scenario_text(f));
}

TEST_CASE("scenario errors") {
    const PacketRecipe r{5, 1, 0.1, 0.1, 100};
    const std::string head = "[scenario]\nt_start = -10\nt_end = 10\nfocus_time = 0\nx_g = 0\nx_h = 0\n";
    const std::string src = "[element]\nid = s\nkind = source\nx = 0\nt = -5\nvelocity = 1\n";
    CHECK_THROWS_AS(parse_scenario(head + src, r, {}), ParseError);  // no detector
    CHECK_NOTHROW(parse_scenario(head + src + "[element]\nid = d\nkind = detector\nx = 0\nt = 5\nvelocity = 1\n", r, {}));
    try {
        parse_scenario(head + src + "[element]\nid = m\nkind = prism\nx = 0\nt = 0\nvelocity = 0\n", r, {});
        FAIL("accepted an unknown kind");
    } catch (const ParseError& e) {
        CHECK(e.line() == 13);
    }
    CHECK_THROWS_AS(
        parse_scenario(head + src + "[element]\nid = b\nkind = beam_splitter\nx = 0\nt = 0\nvelocity = 0\n", r, {}),
        ParseError);
}

TEST_CASE("commands") {
    const auto p1 = load_run_config(kRoot / "configs" / "p1.cfg");
    const auto rows = weak_value_table(p1);
    const auto find = [&](std::string_view obs, std::string_view region) {
        for (const auto& r : rows)
            if (r.observable == obs && r.region == region) return r;
        FAIL("missing row");
        return rows.front();
    };
    CHECK(std::abs(find("momentum", "h").analytic - 2.0) < 1e-12);
    CHECK(std::abs(find("momentum", "h").grid - 2.0) < 2e-6);
    CHECK(std::abs(find("presence", "h").analytic) < 1e-12);
    CHECK(std::abs(find("presence", "f-").analytic + 1.0) < 1e-12);
    CHECK(std::abs(find("momentum", "f-").analytic + 4.0) < 1e-12);

    auto p2 = load_run_config(kRoot / "configs" / "p2.cfg");
    for (const auto& r : weak_value_table(p2)) CHECK(r.region != "f+");
    p2.labeled = true;
    bool labeled_rows = false;
    for (const auto& r : weak_value_table(p2)) labeled_rows |= r.region == "f+";
    CHECK(labeled_rows);

    // Pointer runs are byte-identical under a fixed seed.
    auto small = p1;
    small.pointer->samples = 20000;
    CHECK(cmd_pointer(small).artifacts[0].content == cmd_pointer(small).artifacts[0].content);
    CHECK(pointer_selection(small).weak_value().real() == Approx(1.0));
    small.pointer->target = "h";
    CHECK(std::abs(pointer_selection(small).weak_value()) < 1e-12);

    CHECK(cmd_validate(p1).status == 0);
    auto close = p1;
    close.recipe.x0 = 5.0 / (2.0 * close.recipe.dk_f);
    close.grid.reset();
    close.scenario_file.clear();
    close.pointer.reset();
    const auto report = cmd_validate(close);
    CHECK(report.status == 0);
    CHECK(report.artifacts[0].content.find("out_of_regime") != std::string::npos);

    auto no_scenario = p1;
    no_scenario.scenario_file.clear();
    CHECK_THROWS_AS(cmd_interferometer(no_scenario), ParseError);
}

TEST_CASE("trace map of an empty scenario is a single free worldline") {
    const std::string text =
        "[scenario]\nt_start = -10\nt_end = 10\nfocus_time = 0\nx_g = 0\nx_h = 0\n"
        "[element]\nid = s\nkind = source\nx = 0\nt = 0\nvelocity = 2\n"
        "[element]\nid = d\nkind = detector\nx = 0\nt = 5\nvelocity = 2\n";
    const auto f = parse_scenario(text, {2, 1, 0.5, 0.5, 10}, {});
    const auto cells = weak_trace_map(f.scenario, f.scenario.find("d"), {0.5, 4.0}, {0.0, 8.0, 20.0});
    // Packet center moves as 2 t.
    CHECK(cells[0].forward > cells[1].forward);
    CHECK(cells[4].forward > cells[3].forward);
    CHECK(cells[2].forward < 1e-20);
}
