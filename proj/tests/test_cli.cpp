#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "smale/io.hpp"

using namespace smale;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "smale_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SMALE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

Json run_cli_json(const std::string& args, int expect_exit = 0) {
  auto out = work_dir() / "report.json";
  std::string cmd =
      std::string(SMALE_CLI_PATH) + " --out " + out.string() + " " + args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  REQUIRE(WEXITSTATUS(status) == expect_exit);
  return Json::parse(read_file(out.string()));
}

}  // namespace

TEST_CASE("file format round trips") {
  SECTION("sft text") {
    auto gm = SubshiftOfFiniteType::golden_mean();
    auto back = parse_sft_text(sft_to_text(gm));
    CHECK(back.transitions() == gm.transitions());
  }
  SECTION("sft json") {
    auto full = SubshiftOfFiniteType::full_shift(3);
    auto back = sft_from_json(sft_to_json(full));
    CHECK(back.transitions() == full.transitions());
  }
  SECTION("horseshoe json") {
    auto h = make_blender_model();
    auto back = horseshoe_from_json(horseshoe_to_json(h));
    CHECK(back.d_uu() == h.d_uu());
    CHECK(back.branch_count() == h.branch_count());
    for (int j = 0; j < h.branch_count(); ++j)
      CHECK(sup_norm(back.translation(j) - h.translation(j)) == 0.0);
  }
  SECTION("center ifs json") {
    auto ifs = extract_center_ifs(make_blender_model());
    auto back = center_ifs_from_json(center_ifs_to_json(ifs));
    CHECK(back.rates[0] == ifs.rates[0]);
    CHECK(back.translations[1][0] == ifs.translations[1][0]);
  }
  SECTION("grid set run-length encoding") {
    GridSet g(1, 100, Box::centered_unit(1));
    for (long i : {3L, 4L, 5L, 20L, 99L}) g.set(i, true);
    auto back = gridset_from_text(gridset_to_text(g));
    CHECK(back == g);
  }
  SECTION("graph json") {
    std::mt19937_64 rng(4);
    auto g = random_lipschitz_graph(1, 2, 8, rng);
    auto back = graph_from_json(graph_to_json(g));
    for (size_t i = 0; i < g.raw_values().size(); ++i)
      CHECK(sup_norm(back.raw_values()[i] - g.raw_values()[i]) == 0.0);
  }
}

TEST_CASE("cli end-to-end") {
  auto dir = work_dir();

  SECTION("entropy hypothesis margins for the six-branch model") {
    StandardAffineHorseshoe h(1, 1, 1, [] {
      Vec d(3);
      d << 4.0, 2.0, 1.0 / 3.0;
      return d;
    }(), std::vector<Vec>(6, Vec::Zero(3)));
    write_file((dir / "smale6.json").string(), horseshoe_to_json(h).dump());
    auto rep = run_cli_json("horseshoe hypothesis --model " + (dir / "smale6.json").string() +
                            " --k 1");
    double margin = rep["results"]["margins"]["almost_pesin"].get<double>();
    double expected = std::log(6.0) - (std::log(8.0) - 0.5 * std::log(2.0));
    CHECK(margin == Catch::Approx(expected).margin(1e-12));
    CHECK(rep["results"]["almost_pesin_ok"].get<bool>());
  }

  SECTION("circle cover command") {
    auto rep = run_cli_json("cover-circle --points 0 --a 1/4");
    CHECK(rep["results"]["kappa"].get<std::string>() == "1/8");
  }

  SECTION("missing files exit with code 1") {
    CHECK(run_cli("sft entropy --model /no/such/file.sft") == 1);
  }

  SECTION("negative verdicts exit with code 2") {
    CenterIfs disjoint;
    disjoint.rates = Vec::Constant(1, 1.0 / 3.0);
    disjoint.translations = {Vec::Constant(1, -1.0 / 3.0), Vec::Constant(1, 1.0 / 3.0)};
    write_file((dir / "disjoint.json").string(), center_ifs_to_json(disjoint).dump());
    CHECK(run_cli("ifs search-recurrent --model " + (dir / "disjoint.json").string() +
                  " --cells 400") == 2);
  }

  SECTION("reports are byte-identical for identical configs") {
    write_file((dir / "gm.sft").string(), sft_to_text(SubshiftOfFiniteType::golden_mean()));
    auto out1 = dir / "rep1.json";
    auto out2 = dir / "rep2.json";
    std::string base = std::string(SMALE_CLI_PATH) + " --out ";
    std::string args = " sft entropy --model " + (dir / "gm.sft").string();
    REQUIRE(std::system((base + out1.string() + args).c_str()) == 0);
    REQUIRE(std::system((base + out2.string() + args).c_str()) == 0);
    CHECK(read_file(out1.string()) == read_file(out2.string()));
  }

  SECTION("sft text format accepted by the cli") {
    write_file((dir / "full3.sft").string(), "sft 3\n111\n111\n111\n");
    auto rep = run_cli_json("sft entropy --model " + (dir / "full3.sft").string());
    CHECK(rep["results"]["entropy_nats"].get<double>() ==
          Catch::Approx(std::log(3.0)).margin(1e-12));
  }

  SECTION("shadowing through files reproduces the closed form") {
    Json seq;
    seq["n0"] = -5;
    seq["n1"] = 6;
    seq["d_u"] = 1;
    seq["d_s"] = 1;
    Json steps = Json::array();
    for (int n = -5; n < 6; ++n) {
      Json b = Json::array({0.0, 0.0});
      if (n == 0) b = Json::array({-1.0, -1.0});
      steps.push_back(Json{{"lu", Json::array({2.0})}, {"ls", Json::array({0.5})}, {"b", b}});
    }
    seq["steps"] = steps;
    write_file((dir / "seq.json").string(), seq.dump());
    Json po;
    po["n0"] = -5;
    Json pts = Json::array();
    for (int n = -5; n <= 6; ++n) pts.push_back(Json::array({0.0, 0.0}));
    po["points"] = pts;
    write_file((dir / "po.json").string(), po.dump());
    auto rep = run_cli_json("shadow --seq " + (dir / "seq.json").string() + " --pseudo " +
                            (dir / "po.json").string());
    auto points = rep["results"]["points"];
    CHECK(points[5][0].get<double>() == Catch::Approx(0.5));   // u_0
    CHECK(points[5][1].get<double>() == Catch::Approx(0.0).margin(1e-15));
    CHECK(points[6][0].get<double>() == Catch::Approx(0.0).margin(1e-15));
    CHECK(points[6][1].get<double>() == Catch::Approx(-1.0));  // u_1
  }

  SECTION("blender constant graph on the canonical model") {
    write_file((dir / "blender.json").string(),
               horseshoe_to_json(make_blender_model()).dump());
    auto rep = run_cli_json("blender constant-graph --model " +
                            (dir / "blender.json").string() + " --value 0.5,0.5");
    CHECK(rep["results"]["kind"].get<std::string>() == "Intersects");
  }
}
