#include <doctest.h>

#include <cmath>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "fvt/io.hpp"
#include "fvt/rom.hpp"

using namespace fvt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "fvt_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

using Table = std::vector<std::vector<std::string>>;

Table parse_tsv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) row.push_back(cell);
    t.push_back(row);
  }
  return t;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t c = 0; c < t.front().size(); ++c) {
    if (t.front()[c] == name) return c;
  }
  FAIL("missing column " << name);
  return 0;
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

TEST_CASE("number formatting") {
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  CHECK(cli::format_double(1.0) == "1");
  CHECK(std::stod(cli::format_double(M_PI)) == M_PI);
}

TEST_CASE("exit codes") {
  const fs::path d = workdir("exit");
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"gen", "--family", "separable", "--bogus", "1", "--out", (d / "a.fvt").string()}).code == cli::kExitUsage);
  CHECK(run({"gen", "--family", "stokes", "--out", (d / "a.fvt").string()}).code == cli::kExitUsage);
  CHECK(run({"gen", "--family", "separable", "--dims", "4,x,4", "--out", (d / "a.fvt").string()}).code == cli::kExitUsage);
  CHECK(run({"gen", "--family", "separable"}).code == cli::kExitUsage);
  CHECK(run({"build", "--family", "separable", "--dims", "4,4,4", "--aux", "9", "--out", (d / "m").string()}).code ==
        cli::kExitUsage);
  CHECK(run({"build", "--family", "separable", "--draw", "maxvol", "--out", (d / "m").string()}).code == cli::kExitUsage);
  CHECK(run({"gen", "--family", "separable", "--dims", "4,4,4", "--h", "3", "--out", (d / "a.fvt").string()}).code ==
        cli::kExitOk);
  CHECK(run({"build", "--family", "separable", "--input", (d / "a.fvt").string(), "--out", (d / "m").string()}).code ==
        cli::kExitUsage);

  CHECK(run({"info", "--input", (d / "missing.fvt").string()}).code == cli::kExitData);
  std::ofstream(d / "junk.fvt") << "junk";
  const Run junk = run({"info", "--input", (d / "junk.fvt").string()});
  CHECK(junk.code == cli::kExitData);
  CHECK(junk.err.find("BadMagic") != std::string::npos);

  std::string bytes = slurp(d / "a.fvt");
  bytes.resize(bytes.size() - 3);
  std::ofstream(d / "short.fvt", std::ios::binary) << bytes;
  const Run trunc = run({"build", "--input", (d / "short.fvt").string(), "--out", (d / "s").string()});
  CHECK(trunc.code == cli::kExitData);
  CHECK(trunc.err.find("TruncatedFile") != std::string::npos);
}

TEST_CASE("gen and info") {
  const fs::path d = workdir("gen");
  const std::string a = (d / "a.fvt").string(), b = (d / "b.fvt").string();
  REQUIRE(run({"gen", "--family", "lowrank_plus_decay", "--dims", "5,6,4", "--h", "7", "--gram", "dense", "--seed", "3",
               "--out", a})
              .code == 0);
  REQUIRE(run({"gen", "--family", "lowrank_plus_decay", "--dims", "5,6,4", "--h", "7", "--gram", "dense", "--seed", "3",
               "--threads", "4", "--out", b})
              .code == 0);
  CHECK(slurp(a) == slurp(b));
  const BTensor A = load_fvt(a);
  CHECK(A.dims() == Shape{5, 6, 4});
  CHECK(A.ip().kind() == GramKind::Dense);

  const Run info = run({"info", "--input", a});
  REQUIRE(info.code == 0);
  const Table t = parse_tsv(info.out);
  CHECK(t[0] == std::vector<std::string>{"key", "value"});
  CHECK(info.out.find("dims\t5,6,4\n") != std::string::npos);
  CHECK(info.out.find("gram\tdense\n") != std::string::npos);
  CHECK(info.out.find("entries\t120\n") != std::string::npos);
}

TEST_CASE("gram files") {
  const fs::path d = workdir("gram");
  std::ofstream(d / "w.txt") << "1 2 0.5";
  REQUIRE(run({"gen", "--family", "separable", "--dims", "3,3", "--h", "3", "--gram", "diagonal:" + (d / "w.txt").string(),
               "--out", (d / "w.fvt").string()})
              .code == 0);
  const BTensor W = load_fvt((d / "w.fvt").string());
  CHECK(W.ip().kind() == GramKind::Diagonal);
  CHECK(W.ip().weights()(2) == 0.5);

  std::ofstream(d / "g.txt") << "2 1\n1 2\n";
  REQUIRE(run({"gen", "--family", "separable", "--dims", "3,3", "--h", "2", "--gram", "dense:" + (d / "g.txt").string(),
               "--out", (d / "g.fvt").string()})
              .code == 0);
  CHECK(load_fvt((d / "g.fvt").string()).ip().gram()(0, 1) == 1.0);

  std::ofstream(d / "bad.txt") << "1 2\n2 1\n";
  CHECK(run({"gen", "--family", "separable", "--dims", "3,3", "--h", "2", "--gram", "dense:" + (d / "bad.txt").string(),
             "--out", (d / "x.fvt").string()})
            .code == cli::kExitData);
  CHECK(run({"gen", "--family", "separable", "--dims", "3,3", "--h", "4", "--gram", "diagonal:" + (d / "w.txt").string(),
             "--out", (d / "x.fvt").string()})
            .code == cli::kExitData);
  CHECK(run({"gen", "--family", "separable", "--gram", "sparse", "--out", (d / "x.fvt").string()}).code == cli::kExitUsage);
}

TEST_CASE("compare on a separable rank-3 family") {
  const Run r = run({"compare", "--family", "separable", "--family-rank", "3", "--iters", "5", "--seeds", "0,1,2"});
  REQUIRE(r.code == 0);
  const Table t = parse_tsv(r.out);
  REQUIRE(t.size() == 1 + 15);
  CHECK(t[0][0] == "iterations");
  CHECK(t[0][1] == "rank");
  const std::size_t it = column(t, "iterations"), abc = column(t, "tuckerabc"), hos = column(t, "hosvd"),
                    bnd = column(t, "hosvd_bound"), ev = column(t, "evaluations");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double e_abc = std::stod(t[i][abc]), e_hos = std::stod(t[i][hos]), bound = std::stod(t[i][bnd]);
    if (std::stoul(t[i][it]) >= 3) CHECK(e_abc <= 1e-8);
    CHECK(e_hos <= e_abc + 64 * kEps);
    CHECK(e_hos <= bound * (1 + 1e-8) + 64 * kEps);
    CHECK(std::stoul(t[i][ev]) < 8 * 8 * 8);
    CHECK(t[i][1].front() == '(');
  }
}

TEST_CASE("compare reports the identity-Gram column on request") {
  const Run r = run({"compare", "--family", "separable", "--dims", "6,6,6", "--h", "4", "--gram", "dense", "--iters", "2",
                     "--identity-gram"});
  REQUIRE(r.code == 0);
  const Table t = parse_tsv(r.out);
  const std::size_t c = column(t, "tuckerabc_identity_gram");
  CHECK(t.size() == 3);
  CHECK(std::stod(t[1][c]) >= 0.0);
}

TEST_CASE("hosvd subcommand") {
  const fs::path d = workdir("hosvd");
  const std::string a = (d / "a.fvt").string();
  REQUIRE(run({"gen", "--family", "lowrank_plus_decay", "--dims", "6,5,4", "--h", "5", "--out", a}).code == 0);
  const Run r = run({"hosvd", "--input", a, "--rank", "2,3,2", "--out", (d / "h").string()});
  REQUIRE(r.code == 0);
  const Table t = parse_tsv(r.out);
  CHECK(t[1][column(t, "rank")] == "(2,3,2)");
  CHECK(std::stod(t[1][column(t, "hosvd")]) <= std::stod(t[1][column(t, "hosvd_bound")]) * (1 + 1e-8) + 64 * kEps);
  CHECK(t[1][column(t, "clamped")] == "0");
  CHECK(load_fvt((d / "h.core.fvt").string()).dims() == Shape{2, 3, 2});
  CHECK(fs::exists(d / "h.json"));
  const Table sig = parse_tsv(slurp(d / "h.sigma.tsv"));
  CHECK(sig.size() > 1);

  const Run big = run({"hosvd", "--input", a, "--rank", "9,9,9", "--out", (d / "g").string()});
  REQUIRE(big.code == 0);
  CHECK(parse_tsv(big.out)[1][3] == "1");
  CHECK(run({"hosvd", "--input", a, "--rank", "2,2", "--out", (d / "x").string()}).code == cli::kExitUsage);
}

TEST_CASE("build then eval at sampled nodes is bit-exact") {
  const fs::path d = workdir("eval");
  const std::string a = (d / "a.fvt").string(), m = (d / "m").string();
  REQUIRE(run({"gen", "--family", "gaussian_bump", "--dims", "9,8,7", "--h", "16", "--out", a}).code == 0);
  const Run b = run({"build", "--input", a, "--iters", "4", "--seed", "5", "--out", m});
  REQUIRE(b.code == 0);
  CHECK(parse_tsv(b.out).size() == 5);
  CHECK(fs::exists(m + ".report.json"));

  const RomModel rom = load_rom(m + ".json");
  const BTensor core = load_fvt(m + ".core.fvt");
  const auto& I = rom.cross.index_sets;
  // FVT inputs use the grid 1..n_k.
  for (std::size_t p = 0; p < I[0].size(); ++p) {
    for (std::size_t q = 0; q < I[1].size(); ++q) {
      const std::size_t r = (p + q) % I[2].size();
      const std::string params =
          std::to_string(I[0][p] + 1) + "," + std::to_string(I[1][q] + 1) + "," + std::to_string(I[2][r] + 1);
      const Run e = run({"eval", "--model", m + ".json", "--params", params, "--format", "hex"});
      REQUIRE(e.code == 0);
      std::istringstream lines(e.out);
      std::string line;
      const std::size_t pos[] = {p, q, r};
      const auto want = core.entry(pos);
      Eigen::Index c = 0;
      while (std::getline(lines, line)) {
        const double v = parse_hexfloat(line);
        const double w = want(c);
        CHECK(std::memcmp(&v, &w, sizeof v) == 0);
        ++c;
      }
      CHECK(c == 16);
    }
  }

  const Run dec = run({"eval", "--model", m + ".json", "--params", "2.5,3.25,1.5"});
  REQUIRE(dec.code == 0);
  CHECK(parse_tsv(dec.out).size() == 16);
  REQUIRE(run({"eval", "--model", m + ".json", "--params", "2.5,3.25,1.5", "--format", "raw", "--out",
               (d / "v.bin").string()})
              .code == 0);
  CHECK(fs::file_size(d / "v.bin") == 16 * 8);
  CHECK(run({"eval", "--model", m + ".json", "--params", "0.5,3,1"}).code == cli::kExitData);
  CHECK(run({"eval", "--model", m + ".json", "--params", "1,2"}).code == cli::kExitUsage);
  CHECK(run({"eval", "--model", m + ".json", "--params", "1,2,3", "--format", "raw"}).code == cli::kExitUsage);

  const Run info = run({"info", "--input", m + ".json"});
  REQUIRE(info.code == 0);
  CHECK(info.out.find("format\trom\n") != std::string::npos);
}

TEST_CASE("pipeline determinism") {
  std::string first;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path d = workdir("det" + std::to_string(pass));
    const std::string a = (d / "a.fvt").string(), m = (d / "m").string();
    const std::string threads = pass == 0 ? "1" : "4";
    REQUIRE(run({"gen", "--family", "lowrank_plus_decay", "--dims", "8,7,6", "--h", "9", "--gram", "diagonal", "--seed",
                 "12", "--threads", threads, "--out", a})
                .code == 0);
    const Run b = run({"build", "--input", a, "--iters", "4", "--draw", "leverage", "--seed", "4", "--threads", threads,
                       "--out", m});
    REQUIRE(b.code == 0);
    const Run e = run({"eval", "--model", m + ".json", "--params", "2.5,4,3.75", "--format", "hex"});
    REQUIRE(e.code == 0);
    const std::string all = slurp(a) + b.out + slurp(m + ".json") + slurp(m + ".core.fvt") + slurp(m + ".report.json") + e.out;
    if (pass == 0) {
      first = all;
    } else {
      CHECK(all == first);
    }
  }
}

TEST_CASE("config files and the thread environment variable") {
  const fs::path d = workdir("config");
  nlohmann::json cfg = {{"family", "separable"}, {"dims", {6, 5, 4}}, {"h", 3}, {"iters", 2}, {"seeds", "0"}};
  std::ofstream(d / "c.json") << cfg.dump();
  const Run viaconfig = run({"compare", "--config", (d / "c.json").string()});
  const Run direct = run({"compare", "--family", "separable", "--dims", "6,5,4", "--h", "3", "--iters", "2"});
  REQUIRE(viaconfig.code == 0);
  CHECK(viaconfig.out == direct.out);

  const Run override_iters = run({"compare", "--config", (d / "c.json").string(), "--iters", "3"});
  CHECK(parse_tsv(override_iters.out).size() == 4);

  std::ofstream(d / "bad.json") << "[1, 2";
  CHECK(run({"compare", "--config", (d / "bad.json").string()}).code != 0);

  ::setenv("FVT_THREADS", "3", 1);
  const Run env = run({"compare", "--family", "separable", "--dims", "6,5,4", "--h", "3", "--iters", "2"});
  ::unsetenv("FVT_THREADS");
  CHECK(env.out == direct.out);
}
