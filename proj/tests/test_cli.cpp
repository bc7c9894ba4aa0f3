#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pnt/cli.hpp"
#include "pnt/xreal.hpp"

using namespace pnt;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int s = cli::run(args, out, err);
  return {s, out.str(), err.str()};
}

// value printed after "label = "
std::string field(const std::string& text, const std::string& label) {
  size_t p = text.find(label + " = ");
  if (p == std::string::npos) return {};
  p += label.size() + 3;
  return text.substr(p, text.find(' ', p) - p);
}

}  // namespace

TEST_CASE("plain decimal display") {
  CHECK(cli::plain_decimal("1.21103e2") == "121.103");
  CHECK(cli::plain_decimal("5.01516e-5") == "0.0000501516");
  CHECK(cli::plain_decimal("1.9202e0") == "1.9202");
  CHECK(cli::plain_decimal("2e3") == "2000");
  CHECK(cli::plain_decimal("-3.5e-1") == "-0.35");
  CHECK(cli::plain_decimal("1.5701e-12") == "1.5701e-12");
  CHECK(cli::plain_decimal("42") == "42");
}

TEST_CASE("documented command examples") {
  Result r = run({"convert-asymp", "theta-to-pi", "--A", "121.0961", "--B", "3/2", "--C", "2", "--R", "5.5666305",
                  "--anchor", "crossing", "--log-x1", "20000"});
  CHECK(r.status == cli::kOk);
  CHECK(field(r.out, "A_pi") == "121.103");
  CHECK(r.out.find("A_pi = 121.103 (rounded up)") != std::string::npos);

  r = run({"eval", "asymp", "--A", "121.107", "--B", "3/2", "--C", "2", "--log-x", "100", "--digits", "5"});
  CHECK(r.status == cli::kOk);
  CHECK(field(r.out, "eps_asymp") == "1.9202");

  r = run({"mu", "num", "--anchor", "1e15", "--log-x1", "100", "--log-x2", "inf"});
  CHECK(r.status == cli::kOk);
  CHECK(field(r.out, "mu_num").rfind("0.0199", 0) == 0);
  r = run({"mu", "num", "--anchor", "1e15", "--log-x1", "100", "--log-x2", "101", "--digits", "3"});
  CHECK(field(r.out, "mu_num") == "0.0166");

  r = run({"eval", "plain", "--A", "121.107", "--log-x", "100", "--digits", "5"});
  CHECK(field(r.out, "A'") == "9.2211");
  r = run({"eval", "plain", "--A", "121.107", "--log-x", "100", "--digits", "8"});
  CHECK(field(r.out, "C'") == "0.84768363");

  r = run({"convert-asymp", "psi-to-theta", "--A", "121.096", "--digits", "7"});
  CHECK(field(r.out, "A_theta") == "121.0961");
  CHECK(field(r.out, "nu").rfind("6.3372", 0) == 0);

  r = run({"eval", "step", "--log-x", "100", "--digits", "5"});
  CHECK(field(r.out, "eps") == "2.0097e-12");
}

TEST_CASE("discrepancy from two bounds at x0") {
  Result r = run({"mu", "asymp", "--A", "23.14", "--B", "1.503", "--C", "2.0429", "--disc-log-x0", "100000",
                  "--disc-eps-theta", "1e-20", "--disc-eps-pi", "1e-20", "--log-x1", "100016"});
  CHECK(r.status == cli::kOk);
  CHECK(r.out.find("mu_asymp = ") == 0);
  r = run({"mu", "asymp", "--A", "23.14", "--disc-log-x0", "100000", "--log-x1", "100016"});
  CHECK(r.status == cli::kUsage);
}

TEST_CASE("exit statuses") {
  CHECK(run({}).status == cli::kUsage);
  CHECK(run({"bogus"}).status == cli::kUsage);
  CHECK(run({"convert-asymp", "sideways", "--A", "1"}).status == cli::kUsage);
  CHECK(run({"convert-asymp", "theta-to-pi", "--log-x1", "100"}).status == cli::kUsage);
  CHECK(run({"--precision", "8", "crossing-point"}).status == cli::kUsage);
  Result help = run({"--help"});
  CHECK(help.status == cli::kOk);
  CHECK(help.out.find("convert-asymp") != std::string::npos);

  // hypothesis failures are input errors
  Result h = run({"mu", "asymp", "--A", "121", "--B", "1", "--anchor", "crossing", "--log-x1", "100"});
  CHECK(h.status == cli::kUsage);
  CHECK(h.err.find("error:") == 0);
  CHECK(run({"mu", "num", "--anchor", "nowhere", "--log-x1", "100"}).status == cli::kUsage);
  CHECK(run({"mu", "num", "--anchor", "1e15", "--log-x1", "100", "--log-x2", "99"}).status == cli::kUsage);

  CHECK(run({"verify-dominates", "--A", "121.107"}).status == cli::kOk);
  Result v = run({"verify-dominates", "--A", "100"});
  CHECK(v.status == cli::kViolation);
  CHECK(v.out.find("VIOLATED") != std::string::npos);
  CHECK(run({"verify-dominates", "--A", "121.107", "--certified"}).status == cli::kViolation);

  CHECK(run({"verify-weak", "--limit", "100000"}).status == cli::kOk);
  Result w = run({"verify-weak", "--limit", "100000", "--constant", "0.3"});
  CHECK(w.status == cli::kViolation);
  CHECK(w.out.find("[7, 11)") != std::string::npos);
}

TEST_CASE("precision changes widths, not directions") {
  Result lo = run({"--precision", "64", "crossing-point"});
  Result hi = run({"--precision", "512", "crossing-point"});
  REQUIRE(lo.status == cli::kOk);
  REQUIRE(hi.status == cli::kOk);
  double wl = std::stod(field(lo.out, "width")), wh = std::stod(field(hi.out, "width"));
  CHECK(wh < wl);
  for (const char* bits : {"64", "128", "256", "1024"}) {
    Result r = run({"--precision", bits, "--digits", "12", "convert-asymp", "theta-to-pi", "--A", "121.0961",
                    "--anchor", "crossing", "--log-x1", "20000"});
    CHECK(r.out.find("(rounded up)") != std::string::npos);
    CHECK(r.out.find("(rounded down)") == std::string::npos);
    // every precision bounds the 1024-bit lower end from above
    PrecisionScope ps(1024);
    CHECK(XReal::parse(field(r.out, "A_pi"), Dir::up) >= XReal::parse("121.10217", Dir::down));
  }
  setenv(cli::kPrecisionEnv, "64", 1);
  Result env = run({"crossing-point"});
  unsetenv(cli::kPrecisionEnv);
  CHECK(env.out == lo.out);
}

TEST_CASE("output is deterministic") {
  std::vector<std::string> args{"mu", "num", "--anchor", "1e15", "--log-x1", "100", "--log-x2", "100.1"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("numerical conversions and regeneration") {
  Result t = run({"convert-num", "psi-to-theta"});
  CHECK(t.status == cli::kOk);
  CHECK(t.out.rfind("# kind: theta", 0) == 0);
  CHECK(t.out.find("\n4,") != std::string::npos);

  Result p = run({"convert-num", "theta-to-pi", "--anchor", "1e15", "--log-x1", "100", "--digits", "5"});
  CHECK(p.status == cli::kOk);
  CHECK(field(p.out, "eps_pi") == "2.0497e-12");

  std::string json = "pnt_cli_regen.json", table = "pnt_cli_regen.csv";
  Result g = run({"regenerate", "--targets", "44,100", "--refinement", "2", "--json", json, "--out", table});
  CHECK((g.status == cli::kOk || g.status == cli::kViolation));
  CHECK(g.out.find("1.7") != std::string::npos);
  std::ifstream js(json);
  nlohmann::json j = nlohmann::json::parse(js);
  CHECK(j["rows"].size() == 2);
  CHECK((j["failures"] == 0) == (g.status == cli::kOk));
  std::ifstream tf(table);
  std::string first;
  std::getline(tf, first);
  CHECK(first == "# kind: pi");
  std::remove(json.c_str());
  std::remove(table.c_str());
}
