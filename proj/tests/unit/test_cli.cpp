#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"

#include "hpmean/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = hpmean::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("hpmean_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text = {}) const {
        const fs::path p = path / name;
        if (!text.empty()) std::ofstream(p) << text;
        return p.string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("pmean command") {
    auto r = run({"pmean", "--values", "0,0,1", "--p", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("p,value,residual,relative_residual,iterations\n3,0.41421356237", 0) == 0);
    r = run({"pmean", "--values", "1,2,3", "--p", "2"});
    CHECK(r.out == "p,value,residual,relative_residual,iterations\n2,2,0,0,0\n");
    CHECK(run({"pmean", "--values", "", "--p", "2"}).code == 1);
    CHECK(run({"pmean", "--values", "1,x"}).code == 1);
    CHECK(run({"pmean", "--values", "1,2", "--p", "0.5"}).code == 1);

    TempDir tmp;
    CHECK(run({"pmean", "--samples", tmp.file("empty.txt", "# nothing\n")}).code == 1);
    CHECK(run({"pmean", "--samples", tmp.file("bad.txt", "1\n2,abc\n")}).code == 1);
    CHECK(run({"pmean", "--samples", tmp.path.string() + "/missing.txt"}).code == 1);
    r = run({"pmean", "--samples", tmp.file("w.txt", "0,1\n10,3\n"), "--p", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n2,7.5,") != std::string::npos);
}

TEST_CASE("flat config files with command-line overrides") {
    TempDir tmp;
    const std::string cfg = tmp.file("run.cfg", "# pmean run\nvalues = 0, 0, 1\np=3\n\n");
    auto r = run({"pmean", "--config", cfg});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n3,0.414213562") != std::string::npos);
    r = run({"pmean", "--config", cfg, "--p", "4"});
    CHECK(r.out.find("\n4,0.442493334") != std::string::npos);
    r = run({"pmean", "--p", "4", "--config", cfg});
    CHECK(r.out.find("\n4,0.442493334") != std::string::npos);

    r = run({"pmean", "--config", tmp.file("bad.cfg", "values=1,2\nbogus_key=1\n")});
    CHECK(r.code == 1);
    CHECK(r.err.find("bogus-key") != std::string::npos);
    CHECK(run({"pmean", "--config", tmp.file("nokv.cfg", "values\n")}).code == 1);
    CHECK(run({"pmean", "--config", tmp.path.string() + "/none.cfg"}).code == 1);
}

TEST_CASE("usage errors and help") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"pmean", "--no-such-option", "1"}).code == 1);
    const auto h = run({"solve", "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("--datum") != std::string::npos);
}

TEST_CASE("solve writes deterministic files") {
    TempDir tmp;
    const std::string cfg = tmp.file("solve.cfg",
                                     "shape=axis_excluded_annulus\ninner_radius=0.5\nouter_radius=1\nclearance=0.3\n"
                                     "eps=0.25\np=3\ndatum=radial\nreference_resolution=12\n");
    const auto a = run({"solve", "--config", cfg, "--csv", tmp.file("a.csv"), "--json", tmp.file("a.json")});
    REQUIRE(a.code == 0);
    CHECK(a.out.rfind("iterations,final_residual,tol,nodes,interior,seconds\n", 0) == 0);
    const auto b = run({"solve", "--config", cfg, "--csv", tmp.file("b.csv"), "--json", "", "--serial"});
    REQUIRE(b.code == 0);
    CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));
    CHECK(slurp(tmp.file("a.json")).find("\"domain_fingerprint\"") != std::string::npos);

    const auto c = run({"solve", "--shape", "koranyi_ball", "--lattice", "full3d", "--eps", "0.5", "--spacing",
                        "0.0625", "--datum", "constant:5", "--csv", tmp.file("c.csv"), "--json", ""});
    REQUIRE(c.code == 0);
    std::istringstream csv(slurp(tmp.file("c.csv")));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::vector<std::string> cells;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 6);
        CHECK(cells[4] == "5");
    }

    const auto fail = run({"solve", "--config", cfg, "--max-iter", "2", "--csv", tmp.file("f.csv"), "--json", ""});
    CHECK(fail.code == 2);
    CHECK(fail.err.find("history") != std::string::npos);
    CHECK(run({"solve", "--config", cfg, "--datum", "wobble", "--csv", tmp.file("g.csv")}).code == 1);
    CHECK(run({"solve", "--config", cfg, "--eps", "2", "--csv", tmp.file("g.csv")}).code == 1);
}

TEST_CASE("converge with a single epsilon has no fitted rate") {
    const auto r = run({"converge", "--eps", "0.25", "--reference-resolution", "12"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("epsilon,h,vertical_spacing,nodes,interior,iterations,final_residual,sup_error\n", 0) == 0);
    CHECK(r.out.find("# rate=none") != std::string::npos);
}

TEST_CASE("amvp flags the degenerate linear field") {
    const auto r = run({"amvp", "--field", "x1", "--eps", "0.4,0.2", "--resolution", "32", "--floor-resolutions", "24"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# status=degenerate") != std::string::npos);
    CHECK(run({"amvp", "--field", "x1sq_x2sq", "--point", "0,0,0", "--resolution", "16"}).code == 2);
    CHECK(run({"amvp", "--field", "nope"}).code == 1);
}

TEST_CASE("boundary-iter") {
    auto r = run({"boundary-iter", "--mu", "0.5", "--p", "2", "--eta", "0.1", "--sup-g", "1", "--inf-g", "0"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# theta=0.97407407407") != std::string::npos);
    CHECK(r.out.find("# k0=141\n") != std::string::npos);
    CHECK(r.out.find("\n141,") != std::string::npos);
    CHECK(r.out.find("caveat") == std::string::npos);
    r = run({"boundary-iter", "--p", "4"});
    CHECK(r.out.find("# caveat=") != std::string::npos);
    r = run({"boundary-iter", "--sup-g", "2", "--inf-g", "2"});
    CHECK(r.out.find("# k0=1\n") != std::string::npos);
    CHECK(run({"boundary-iter", "--mu", "1.5"}).code == 1);
}

TEST_CASE("verify runs selected criteria") {
    const auto r = run({"verify", "--criteria", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("PASS  [2]", 0) == 0);
    CHECK(run({"verify", "--criteria", "99"}).code == 1);
}
