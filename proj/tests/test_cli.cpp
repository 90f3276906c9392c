#include "doctest.h"
#include "fixtures.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

std::filesystem::path scratch() {
    auto dir = std::filesystem::temp_directory_path() / "factorarg_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

Run run(const std::string& args) {
    const auto out = scratch() / "stdout.txt";
    const std::string cmd = std::string(FACTORARG_CLI) + " " + args + " > " + out.string() + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, fixtures::slurp(out.string())};
}

std::string asia_model() { return "--model " + fixtures::data_path("asia.bif"); }

const std::string kQuery = " --evidence xray=yes,tub=no,bronc=no --target lung=yes";

} // namespace

TEST_CASE("cli inspect and arguments") {
    auto r = run("inspect " + asia_model());
    CHECK(r.code == 0);
    CHECK(r.out.find("lung") != std::string::npos);

    r = run("arguments " + asia_model() + kQuery + " --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.is_array());
    CHECK(j.size() == 2);
}

TEST_CASE("cli explain uses the description dictionary") {
    const auto r = run("explain " + asia_model() + kQuery + " --mode overview --descriptions " +
                       fixtures::data_path("asia_descriptions.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("we infer that the patient has lung cancer (strong inference)") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    CHECK(run("").code == 2);
    CHECK(run("arguments " + asia_model() + " --evidence xray=blue --target lung=yes").code == 2);
    CHECK(run("arguments " + asia_model() + " --evidence xray=yes --target lung=maybe").code == 2);
    CHECK(run("arguments --model /nonexistent/net.bif" + kQuery).code == 2);
    CHECK(run("explain " + asia_model() + kQuery + " --mode poetic").code == 2);
    CHECK(run("eval " + asia_model() + " --n 5 --out-csv /nonexistent/dir/out.csv").code == 3);
}

TEST_CASE("cli output is byte-identical across runs") {
    const auto a = run("arguments " + asia_model() + kQuery + " --format json");
    const auto b = run("arguments " + asia_model() + kQuery + " --format json");
    CHECK(a.out == b.out);

    const auto dir = scratch();
    const auto csv1 = (dir / "e1.csv").string(), csv2 = (dir / "e2.csv").string();
    const auto sum1 = (dir / "s1.json").string(), sum2 = (dir / "s2.json").string();
    REQUIRE(run("eval " + asia_model() + " --n 40 --seed 3 --threads 4 --out-csv " + csv1 + " --out-summary " + sum1)
                .code == 0);
    REQUIRE(run("eval " + asia_model() + " --n 40 --seed 3 --threads 1 --out-csv " + csv2 + " --out-summary " + sum2)
                .code == 0);
    CHECK(fixtures::slurp(csv1) == fixtures::slurp(csv2));
    CHECK(fixtures::slurp(sum1) == fixtures::slurp(sum2));
    CHECK(nlohmann::json::accept(fixtures::slurp(sum1)));
}
