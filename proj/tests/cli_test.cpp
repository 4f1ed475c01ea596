// SPDX-License-Identifier: Apache-2.0
// End-to-end runs of the effsnr binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch()
{
    static const fs::path p = [] {
        fs::path d = fs::path(EFFSNR_SCRATCH_DIR) / "cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return p;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = std::string("'") + EFFSNR_CLI + "' " + args + " > " + q(out) + " 2> " +
                            q(scratch() / "stderr.txt");
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path nominal_table()
{
    json t;
    t["metric"] = "effective-snr";
    const double tau[8] = {2.0, 5.0, 7.5, 10.5, 14.0, 18.5, 20.0, 21.5};
    for (int m = 0; m < 24; ++m)
        t["thresholds"][std::to_string(m)] = tau[m % 8];
    const fs::path p = scratch() / "nominal.json";
    write(p, t.dump());
    return p;
}

} // namespace

TEST_CASE("gen is deterministic")
{
    const fs::path a = scratch() / "a.trace", b = scratch() / "b.trace", c = scratch() / "c.trace";
    const std::string args = " --seed 3 --n-rx 3 --n-tx 3 --records 100";
    REQUIRE(run("gen --out " + q(a) + args).code == 0);
    REQUIRE(run("gen --out " + q(b) + args).code == 0);
    REQUIRE(run("gen --out " + q(c) + " --seed 4 --n-rx 3 --n-tx 3 --records 100").code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    CHECK(lines(slurp(a)) == 101);
    const Run stdout_run = run("gen" + args);
    CHECK(stdout_run.out == slurp(a));
}

TEST_CASE("predict covers every record and config")
{
    const fs::path tr = scratch() / "p.trace";
    REQUIRE(run("gen --out " + q(tr) + " --seed 5 --n-rx 3 --n-tx 3 --records 100").code == 0);
    const fs::path table = nominal_table();
    const Run csv = run("predict --trace " + q(tr) + " --thresholds " + q(table));
    REQUIRE(csv.code == 0);
    CHECK(lines(csv.out) == 2401);
    CHECK(csv.out.rfind("t_us,config,rho_eff_db,works,rate_mbps\n", 0) == 0);

    const fs::path out = scratch() / "p.json";
    REQUIRE(run("predict --trace " + q(tr) + " --thresholds " + q(table) + " --format json --out " + q(out)).code == 0);
    const json j = json::parse(slurp(out));
    REQUIRE(j.is_array());
    CHECK(j.size() == 2400);
    CHECK(j[0].contains("rho_eff_db"));

    const Run siso = run("predict --trace " + q(tr) + " --thresholds " + q(table) + " --mcs-set siso");
    CHECK(lines(siso.out) == 801);
}

TEST_CASE("calibrate on separable samples")
{
    std::ostringstream s;
    s << "mcs,link_id,snr_db,prr\n";
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 10; ++i) {
            s << m << ",g" << i << ',' << 10 + 3 * m + i << ",1\n";
            s << m << ",b" << i << ',' << 3 * m + i * 0.5 << ",0\n";
        }
    const fs::path samples = scratch() / "samples.csv";
    write(samples, s.str());
    const fs::path table = scratch() / "cal.json", windows = scratch() / "windows.csv";
    REQUIRE(run("calibrate --samples " + q(samples) + " --out " + q(table) + " --windows " + q(windows)).code == 0);
    const json t = json::parse(slurp(table));
    CHECK(t["thresholds"].size() == 3);
    std::istringstream w(slurp(windows));
    std::string line;
    std::getline(w, line);
    REQUIRE(line.find("balanced_error") != std::string::npos);
    int rows = 0;
    while (std::getline(w, line)) {
        std::istringstream cells(line);
        std::string mcs, tau, err;
        std::getline(cells, mcs, ',');
        std::getline(cells, tau, ',');
        std::getline(cells, err, ',');
        CHECK(std::stod(err) == 0.0);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("sweep, simulate and decisions")
{
    const Run sweep = run("sweep-prr --mcs 0,7 --snr-min 30 --snr-max 30 --packets 3 --payload 100");
    REQUIRE(sweep.code == 0);
    CHECK(sweep.out == "mcs,snr_db,prr\n0,30,1\n7,30,1\n");

    const fs::path tr = scratch() / "s.trace";
    REQUIRE(run("gen --out " + q(tr) + " --seed 6 --n-rx 2 --n-tx 2 --records 60").code == 0);
    const fs::path events = scratch() / "events.csv";
    const Run sim = run("simulate --trace " + q(tr) + " --algo effsnr --thresholds " + q(nominal_table()) +
                        " --probe-bytes 100 --out " + q(events));
    REQUIRE(sim.code == 0);
    const json summary = json::parse(sim.out);
    CHECK(summary["algorithm"] == "effsnr");
    CHECK(summary["n_batches"].get<std::size_t>() + 1 == lines(slurp(events)));
    CHECK(summary.contains("fraction_of_optimal"));

    const fs::path dir = scratch() / "aps";
    fs::create_directories(dir);
    REQUIRE(run("gen --out " + q(dir / "1-c.trace") + " --seed 1 --snr 5 --records 2").code == 0);
    REQUIRE(run("gen --out " + q(dir / "2-c.trace") + " --seed 1 --snr 25 --records 2").code == 0);
    REQUIRE(run("gen --out " + q(dir / "3-other.trace") + " --seed 1 --snr 40 --records 2").code == 0);
    const Run ap = run("select-ap --dir " + q(dir) + " --client c --metric packet-snr");
    REQUIRE(ap.code == 0);
    const json d = json::parse(ap.out);
    CHECK(d["chosen"] == "2");

    const Run mob = run("mobility --trace " + q(tr));
    CHECK(mob.code == 2);   // 60 ms of trace is too short at 4 ms spacing
}

TEST_CASE("exit codes")
{
    CHECK(run("").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("predict --trace x").code == 2);
    CHECK(run("predict --trace " + q(scratch() / "missing.trace") + " --thresholds " + q(nominal_table())).code == 1);
    CHECK(run("sweep-prr --mcs 40").code == 2);
    const fs::path bad = scratch() / "bad.trace";
    write(bad, "not a trace\n");
    CHECK(run("mobility --trace " + q(bad)).code == 1);
}
