#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fockop/report.hpp"

using namespace fockop;

namespace {

const char* kClassify =
    "command=classify\nop=V\nweight=gaussian:alpha=1\ng=poly:0,1\nphi=affine:beta=0.9,gamma=0\nalpha=1\nq=1";

std::vector<std::string> errors_of(std::string_view text, const std::vector<std::string>& ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

struct Proc {
  int status;
  std::string out;
};

Proc shell(const std::string& cmd) {
  Proc p{0, {}};
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return {-1, {}};
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), n);
  const int st = pclose(f);
  p.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

std::string status_in(const std::string& json) {
  const auto k = json.find("\"status\": \"");
  if (k == std::string::npos) return {};
  const auto b = k + 11;
  return json.substr(b, json.find('"', b) - b);
}

}  // namespace

TEST(Grammar, ComplexLiterals) {
  EXPECT_EQ(grammar::parse_complex("2"), cplx(2.0));
  EXPECT_EQ(grammar::parse_complex("-3i"), cplx(0, -3));
  EXPECT_EQ(grammar::parse_complex("1.5-2i"), cplx(1.5, -2));
  EXPECT_EQ(grammar::parse_complex("1e-3+2e+1j"), cplx(1e-3, 20));
  EXPECT_EQ(grammar::parse_complex("i"), cplx(0, 1));
  EXPECT_THROW(grammar::parse_complex("1+"), DomainError);
  EXPECT_THROW(grammar::parse_complex("abc"), DomainError);
  for (cplx c : {cplx(0.1, -0.3), cplx(-2.5), cplx(0, 1e-7)})
    EXPECT_EQ(grammar::parse_complex(grammar::format_complex(c)), c);
}

TEST(Grammar, SymbolsMapsWeights) {
  EXPECT_EQ(parse_symbol("poly:0,1,2i"), EntireSymbol(std::vector<cplx>{0.0, 1.0, cplx(0, 2)}));
  const auto phi = grammar::parse_affine("affine:beta=0.5i,gamma=1-1i");
  EXPECT_EQ(phi.beta, cplx(0, 0.5));
  EXPECT_EQ(phi.gamma[0], cplx(1, -1));
  EXPECT_EQ(grammar::parse_affine("affine:beta=2").gamma[0], cplx(0.0));
  EXPECT_THROW(parse_symbol("z^2"), DomainError);
  EXPECT_EQ(parse_weight("gaussian:alpha=2").describe(), WeightFunction::gaussian(2).describe());
  EXPECT_EQ(parse_weight("gaussian_poly:alpha=1,m=3").describe(), WeightFunction::gaussian_poly(1, 3).describe());
  EXPECT_THROW(parse_weight("gaussian:alpha=1,beta=2"), DomainError);
  EXPECT_THROW(parse_weight("custom:phi=x"), DomainError);
}

TEST(Grammar, DensityAndAtoms) {
  const auto rho = grammar::parse_density("radial:r2=-1,log1p=-3");
  EXPECT_NEAR(rho(2.0), -4.0 - 3.0 * std::log(3.0), 1e-14);
  const auto atoms = grammar::parse_atoms("0:1; 1+2i:0.5");
  ASSERT_EQ(atoms.size(), 2u);
  EXPECT_EQ(atoms[1].z[0], cplx(1, 2));
  EXPECT_EQ(atoms[1].mass, 0.5);
  EXPECT_THROW(grammar::parse_atoms("1:-2"), DomainError);
}

TEST(ParseConfig, Examples) {
  const auto cfg = parse_config(kClassify);
  EXPECT_EQ(cfg.command(), Command::classify);
  EXPECT_EQ(cfg.op(), OperatorKind::volterra);
  const auto e1 = errors_of("command=weight-show\nweight=gaussian:alpha=-1");
  ASSERT_FALSE(e1.empty());
  EXPECT_EQ(e1[0], "line 2: alpha must be positive");
  const auto e2 = errors_of("");
  ASSERT_EQ(e2.size(), 1u);
  EXPECT_EQ(e2[0], "missing key: command");
}

TEST(ParseConfig, AllErrorsReported) {
  const auto e = errors_of("command=classify\nop=Q\nbogus=1\nq=0\nq=2\nalpha=x\n");
  EXPECT_TRUE(contains(e, "line 2: unknown operator"));
  EXPECT_TRUE(contains(e, "line 3: unknown key: bogus"));
  EXPECT_TRUE(contains(e, "line 4:"));
  EXPECT_TRUE(contains(e, "line 6: malformed number"));
  EXPECT_TRUE(contains(e, "missing key: g"));
  EXPECT_GE(e.size(), 5u);
}

TEST(ParseConfig, DuplicatesAndOverrides) {
  EXPECT_TRUE(contains(errors_of(std::string(kClassify) + "\nq=2"), "line 8: duplicate key: q"));
  const auto cfg = parse_config(kClassify, {"q=3", "phi=affine:beta=1"});
  EXPECT_EQ(cfg.get("q"), "3");
  EXPECT_EQ(cfg.entries().at("q").origin, "override 1");
  EXPECT_TRUE(contains(errors_of(kClassify, {"n_max=5000"}), "override 1:"));
  EXPECT_TRUE(contains(errors_of(kClassify, {"r_cap=1e7"}), "override 1:"));
  EXPECT_TRUE(errors_of(kClassify, {"n_max=1024", "r_cap=1e6"}).empty());
  EXPECT_TRUE(contains(errors_of(kClassify, {"justtext"}), "override 1: expected key=value"));
}

TEST(ParseConfig, CommandRequirements) {
  EXPECT_TRUE(contains(errors_of("command=carleson\nweight=gaussian:alpha=1\nq=2"), "missing key: atoms or density"));
  EXPECT_TRUE(contains(errors_of("command=weight-essential\nweight=gaussian:alpha=1\nx_start=3\nx_end=1"),
                       "x_end must exceed x_start"));
  EXPECT_TRUE(errors_of("command=classify\nop=K\ng=poly:0,1\nalpha=1\nq=2").empty());
}

TEST(Property, SerializeRoundTrip) {
  const std::string messy = "# header\n q = 1 \nalpha=1\nphi=affine:beta=0.9,gamma=0  # map\ncommand=classify\n"
                            "g=poly:0,1\nop=V\nweight=gaussian:alpha=1\n";
  const auto once = parse_config(messy).serialize();
  EXPECT_EQ(once.substr(0, once.find('\n')), "command=classify");
  EXPECT_EQ(parse_config(once).serialize(), once);
  EXPECT_EQ(once, parse_config(kClassify).serialize());
}

TEST(Run, ClassifyExitCodes) {
  const auto a = run(parse_config(kClassify));
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(status_in(a.json), "bounded");
  const auto b = run(parse_config(kClassify, {"phi=affine:beta=1.0,gamma=0", "q=1"}));
  EXPECT_EQ(b.exit_code, 0);
  EXPECT_EQ(status_in(b.json), "unbounded");
}

TEST(Run, InconclusiveIsExitTwo) {
  // omega(t) = (1+t)^-1 e^{t^2/2} composed with the identity into F_1^2: the
  // profile decays exactly like 1/r after the area factor.
  const auto c = run(parse_config(
      "command=classify\nop=WC\nweight=fock_sobolev:beta=-1\ng=poly:1\nphi=affine:beta=1\nalpha=1\nq=2\n"
      "path=numeric\na_margin=1e-12\nb_margin=1e-12\nkappa_band=1e-3"));
  EXPECT_EQ(c.exit_code, 2);
  EXPECT_EQ(status_in(c.json), "inconclusive");
}

TEST(Run, ErrorIsExitOne) {
  const auto r = run(parse_config("command=berezin-check\nalpha=1\nq=2\ng=poly:0,1,0\nop=V\nz_grid=1,2\nphi=affine:beta=1"));
  EXPECT_EQ(r.exit_code, 0);
  const auto e = run(parse_config("command=classify\nop=V\nweight=gaussian:alpha=1\ng=poly:0,1\nalpha=1\nq=2\n"
                                  "target=sup\ntarget_weight=gaussian:alpha=1"));
  EXPECT_EQ(e.exit_code, 1);
  EXPECT_NE(e.json.find("\"error\": "), std::string::npos);
}

TEST(Run, WeightTableAndEssentiality) {
  const auto r = run(parse_config("command=weight-show\nweight=gaussian:alpha=1\nr_max=5\npoints=6"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "r,omega,omega_tilde");
  EXPECT_EQ(std::count(r.csv.begin(), r.csv.end(), '\n'), 7);
  EXPECT_NE(r.json.find("\"timings\": null"), std::string::npos);
  const auto e = run(parse_config("command=weight-essential\nweight=fock_sobolev:beta=-3\nx_end=10"));
  EXPECT_EQ(e.exit_code, 0);
  EXPECT_NE(e.json.find("essential_certified"), std::string::npos);
}

TEST(Run, Deterministic) {
  for (const char* text : {kClassify, "command=weight-associated\nweight=fock_sobolev:beta=2\nn_max=30",
                           "command=carleson\nweight=gaussian:alpha=1\nq=2\ndensity=radial:r2=-1,log1p=-3\natoms=1:2"}) {
    const auto a = run(parse_config(text)), b = run(parse_config(text));
    EXPECT_EQ(a.json, b.json);
    EXPECT_EQ(a.csv, b.csv);
  }
}

TEST(Cli, ByteIdenticalRuns) {
  const std::string cli = FOCKOP_CLI_PATH;
  const std::string cfg = ::testing::TempDir() + "fockop_cli.txt";
  std::ofstream(cfg) << kClassify << "\n";
  const auto a = shell(cli + " -c " + cfg + " 2>&1");
  const auto b = shell(cli + " -c " + cfg + " 2>&1");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(status_in(a.out), "bounded");
  const auto c = shell(cli + " -c " + cfg + " phi=affine:beta=1 2>&1");
  EXPECT_EQ(status_in(c.out), "unbounded");
}

TEST(Cli, ConfigErrorsToStderr) {
  const std::string cli = FOCKOP_CLI_PATH;
  const auto r = shell("printf 'command=classify\\nop=Q\\n' | " + cli + " -c - 2>&1 >/dev/null");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("line 2: unknown operator"), std::string::npos);
  EXPECT_NE(r.out.find("missing key: g"), std::string::npos);
}

TEST(Cli, WritesOutAndCsv) {
  const std::string cli = FOCKOP_CLI_PATH;
  const std::string dir = ::testing::TempDir();
  const std::string out = dir + "fockop_out.json", csv = dir + "fockop_out.csv";
  std::remove(out.c_str());
  std::remove(csv.c_str());
  const auto r = shell("printf 'command=weight-show\\nweight=gaussian:alpha=1\\npoints=3\\n' | " + cli + " -c - --out " +
                       out + " --csv " + csv);
  EXPECT_EQ(r.status, 0);
  std::stringstream js, cs;
  js << std::ifstream(out).rdbuf();
  cs << std::ifstream(csv).rdbuf();
  EXPECT_EQ(js.str().rfind("{", 0), 0u);
  EXPECT_EQ(cs.str().rfind("r,omega,omega_tilde\n", 0), 0u);
}
