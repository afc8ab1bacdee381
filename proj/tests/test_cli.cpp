#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string binary()
{
    const char* b = std::getenv("CWKB_BIN");
    REQUIRE(b != nullptr);
    return b;
}

fs::path scratch(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / ("cwkb_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Run {
    int status;
    std::string out, err;
};

Run run(const std::string& args, const fs::path& dir)
{
    std::string cmd = binary() + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                      (dir / "stderr.txt").string();
    int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(dir / "stdout.txt"), slurp(dir / "stderr.txt")};
}

}  // namespace

TEST_CASE("graph summary")
{
    auto d = scratch("graph");
    auto r = run("graph --coefficients=-1,0,1 --out " + (d / "a").string(), d);
    CHECK(r.status == 0);
    CHECK(r.out.find("1 finite, 4 unbounded") != std::string::npos);
    auto j = nlohmann::json::parse(slurp(d / "a" / "graph.json"));
    CHECK(j["summary"]["finite"] == 1);
    CHECK(j["meta"]["config_digest"].get<std::string>().size() == 16);

    auto r2 = run("graph --family 2well --params 1,2 --out " + (d / "b").string(), d);
    CHECK(r2.status == 0);
    CHECK(r2.out.find("2 finite, 8 unbounded") != std::string::npos);
    CHECK(r2.out.find("(1 anti-stokes)") != std::string::npos);
}

TEST_CASE("malformed potential is a config error naming the field")
{
    auto d = scratch("bad");
    auto r = run("graph --coefficients=1,x,2 --out " + d.string(), d);
    CHECK(r.status == 2);
    CHECK(r.err.find("potential.coefficients") != std::string::npos);
    auto r2 = run("density --roots=-2,-1,1,3 --delta 1.5 --out " + d.string(), d);
    CHECK(r2.status == 2);
    CHECK(r2.err.find("density.delta") != std::string::npos);
    auto r3 = run("graph --set potential.colour=red --coefficients=-1,0,1 --out " + d.string(), d);
    CHECK(r3.status == 2);
}

TEST_CASE("spectrum table")
{
    auto d = scratch("spectrum");
    auto r = run("spectrum --coefficients=-1,0,1 --lambda-max 22 --out " + d.string(), d);
    REQUIRE(r.status == 0);
    std::stringstream csv(slurp(d / "eigenvalues.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# cwkb", 0) == 0);
    std::getline(csv, line);
    CHECK(line.find("quantization_defect") != std::string::npos);
    int rows = 0;
    while (std::getline(csv, line)) {
        double lambda = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::abs(lambda - (2 * rows + 1)) < 1e-8);
        ++rows;
    }
    CHECK(rows == 11);

    auto e = run("spectrum --coefficients=-1,0,1 --lambda-max 0.5 --out " + (d / "empty").string(), d);
    CHECK(e.status == 0);
}

TEST_CASE("zeros with and without a family")
{
    auto d = scratch("zeros");
    auto r = run("zeros --family 2well --params 1,2 --lambda-max 14 --region=-0.5,0.5,0.05,2 --out " +
                     (d / "fam").string(),
                 d);
    REQUIRE(r.status == 0);
    auto m = nlohmann::json::parse(slurp(d / "fam" / "measure.json"));
    REQUIRE(m["fits"].size() == 1);
    CHECK(m["fits"][0]["c_fit"].get<double>() < 0);
    auto z = nlohmann::json::parse(slurp(d / "fam" / "zeros.json"));
    CHECK(z["zeros"].size() == z["region_winding"].get<std::size_t>());

    auto u = run("zeros --coefficients=4,0,-5,0,1 --lambda-max 14 --region=-0.5,0.5,0.05,2 --out " +
                     (d / "plain").string(),
                 d);
    REQUIRE(u.status == 0);
    CHECK(u.out.find("skipped") != std::string::npos);
    auto zu = nlohmann::json::parse(slurp(d / "plain" / "zeros.json"));
    CHECK(zu["comparison"] == "skipped");
    CHECK(!fs::exists(d / "plain" / "measure.json"));
}

TEST_CASE("density and calibrate")
{
    auto d = scratch("density");
    auto r = run("density --roots=-2,-1,1,3 --ratio 0.5 --count 500 --out " + d.string(), d);
    REQUIRE(r.status == 0);
    auto j = nlohmann::json::parse(slurp(d / "density.json"));
    for (const auto& s : j["sequences"])
        CHECK(s["empirical"].get<double>() >= 0.99);

    auto c = run("calibrate --roots=-2,-1,1,3 --target 0.3333333333333333 --out " + d.string(), d);
    REQUIRE(c.status == 0);
    auto cj = nlohmann::json::parse(slurp(d / "calibration.json"));
    CHECK(std::abs(cj["ratio"].get<double>() - 1.0 / 3) < 1e-10);
}

TEST_CASE("config file with flag override and byte-identical reruns")
{
    auto d = scratch("config");
    {
        std::ofstream f(d / "run.ini");
        f << "[potential]\nfamily = 2well\nparams = 1, 2\n\n[spectrum]\nlambda_max = 30\n\n[zeros]\nregion = "
             "-0.5, 0.5, 0.05, 2\n";
    }
    std::string base = "zeros --config " + (d / "run.ini").string() + " --lambda-max 12 --out ";
    REQUIRE(run(base + (d / "one").string(), d).status == 0);
    REQUIRE(run(base + (d / "two").string(), d).status == 0);
    for (const char* name : {"zeros.json", "measure.json", "measure.csv"})
        CHECK(slurp(d / "one" / name) == slurp(d / "two" / name));
    auto z = nlohmann::json::parse(slurp(d / "one" / "zeros.json"));
    CHECK(z["lambda"].get<double>() < 12);

    auto g1 = run("graph --coefficients=-1,0,0,0,1 --out " + (d / "g1").string(), d);
    auto g2 = run("graph --coefficients=-1,0,0,0,1 --out " + (d / "g2").string(), d);
    REQUIRE(g1.status == 0);
    CHECK(slurp(d / "g1" / "graph.json") == slurp(d / "g2" / "graph.json"));
}

TEST_CASE("numerical failure exit status")
{
    auto d = scratch("failure");
    // a cutoff inside the well cannot carry decaying data
    auto r = run("spectrum --coefficients=-1,0,1 --lambda-max 5 --cutoff 0.5 --out " + d.string(), d);
    CHECK(r.status == 3);
    CHECK(r.err.find("CutoffTooSmall") != std::string::npos);
}
