#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int invoke(const std::string& args) {
    const std::string command = std::string(SLICING_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("slicing_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("run writes identical slots and summary files for one seed") {
    const fs::path dir = scratch("run");
    const std::string common = "--policy random --horizon 300 --window 100 --seed 5";
    REQUIRE(invoke("run " + common + " --out " + (dir / "a").string()) == 0);
    REQUIRE(invoke("run " + common + " --out " + (dir / "b").string()) == 0);
    for (const char* file : {"slots.csv", "summary.csv"}) {
        const std::string a = slurp(dir / "a" / file);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(dir / "b" / file));
    }
    const std::string summary = slurp(dir / "a" / "summary.csv");
    CHECK(summary.rfind("slot_window,policy,lambda,J,avg_utility_per_mu,avg_payment,avg_drops,avg_queue\n", 0) == 0);
    int lines = 0;
    for (char c : summary) lines += c == '\n';
    CHECK(lines == 4);
    CHECK(fs::exists(dir / "a" / "checkpoint.txt"));
}

TEST_CASE("resuming from a checkpoint reproduces the tail of a longer run") {
    const fs::path dir = scratch("resume");
    const std::string common = "--horizon 120 --window 40 --seed 3 --no-slots";
    REQUIRE(invoke("run --policy queue_aware --horizon 60 --window 40 --seed 3 --out " + (dir / "half").string()) == 0);
    REQUIRE(invoke("run --policy queue_aware " + common + " --resume " + (dir / "half" / "checkpoint.txt").string() +
                   " --out " + (dir / "resumed").string()) == 0);
    REQUIRE(invoke("run --policy queue_aware " + common + " --out " + (dir / "full").string()) == 0);
    // The resumed run closes the windows ending at slots 80 and 120, the last two of the full run.
    const std::string full = slurp(dir / "full" / "summary.csv");
    const std::string resumed = slurp(dir / "resumed" / "summary.csv");
    const std::string header = full.substr(0, full.find('\n') + 1);
    const std::size_t second = full.find('\n', header.size()) + 1;
    CHECK(resumed == header + full.substr(second));
}

TEST_CASE("config files and the harness section") {
    const fs::path dir = scratch("config");
    {
        std::ofstream ini(dir / "exp.ini");
        ini << "[env]\nchannels = 9\n[harness]\npolicy = channel_aware\nhorizon = 20\nwindow = 20\n";
    }
    REQUIRE(invoke("run --config " + (dir / "exp.ini").string() + " --out " + (dir / "out").string()) == 0);
    const std::string summary = slurp(dir / "out" / "summary.csv");
    CHECK(summary.find(",channel_aware,8.000000,9,") != std::string::npos);
}

TEST_CASE("sweep, eval and oracle-check produce their outputs") {
    const fs::path dir = scratch("sweep");
    REQUIRE(invoke("sweep --axis J --values 8,11 --seeds 1 --horizon 40 --window 20 --policy random,queue_aware --out " +
                   dir.string()) == 0);
    const std::string table = slurp(dir / "sweep.csv");
    CHECK(table.rfind("policy,lambda,J,avg_utility_per_mu,std_error,seeds\n", 0) == 0);
    int lines = 0;
    for (char c : table) lines += c == '\n';
    CHECK(lines == 5);
    CHECK(fs::exists(dir / "summary.csv"));

    REQUIRE(invoke("eval --policy random --horizon 10 --episodes 3 --eval-horizon 5 --out " + dir.string()) == 0);
    CHECK(slurp(dir / "eval.csv").rfind("sp,policy,discounted_payoff,std_error,episodes,horizon\n", 0) == 0);

    CHECK(invoke("oracle-check --instances 500 --serial") == 0);
}

TEST_CASE("bad input exits non-zero") {
    const fs::path dir = scratch("bad");
    CHECK(invoke("run --policy greedy --out " + dir.string()) != 0);
    CHECK(invoke("run --horizon 0 --out " + dir.string()) != 0);
    CHECK(invoke("sweep --axis mu --out " + dir.string()) != 0);
    CHECK(invoke("frobnicate") != 0);
    {
        std::ofstream ini(dir / "bad.ini");
        ini << "[env]\nchanels = 9\n";
    }
    CHECK(invoke("run --config " + (dir / "bad.ini").string() + " --out " + dir.string()) == 1);
}
