#include <doctest.h>

#include <algorithm>
#include <random>

#include "pnt/tables_io.hpp"

using namespace pnt;

namespace {

const char* kSmall =
    "# kind: theta\n"
    "# R: 5.5666305\n"
    "# provenance: test rows\n"
    "# columns: log_x,eps\n"
    "10,1e-3\n"
    "20,2.5e-4,checked by hand\n"
    "\n"
    "30,1.25e-5\n";

size_t parse_error_line(const std::string& text) {
  try {
    TableFile::parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string random_decimal(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mant(1, 99999), ex(-30, 3);
  return std::to_string(mant(rng)) + "e" + std::to_string(ex(rng));
}

}  // namespace

TEST_CASE("load shipped tables") {
  StepBoundTable theta = load_table(tables_dir() + "/theta.csv");
  CHECK(theta.kind() == Kind::theta);
  CHECK(round_decimal(eval_step(theta, XReal(100L)), 5, Dir::down).text == "2.0097e-12");
  StepBoundTable pi = load_table(tables_dir() + "/pi.csv");
  CHECK(pi.kind() == Kind::pi);
  CHECK(pi.rows().front().log_x_text == "44");
  StepBoundTable psi = load_table(tables_dir() + "/psi.csv");
  CHECK(psi.kind() == Kind::psi);
  TableFile interp = TableFile::read(tables_dir() + "/pi_interp.csv");
  CHECK(interp.columns.size() == 3);
  CHECK(interp.rows.size() == 21);
  CHECK(to_step_table(interp, "eps_num_inf").rows().size() == 21);
  CHECK_THROWS_AS(to_step_table(interp, "nope"), std::invalid_argument);
  CHECK_THROWS(load_table(tables_dir() + "/missing.csv"));
}

TEST_CASE("table structure errors") {
  TableFile f = TableFile::parse(kSmall);
  CHECK(f.rows.size() == 3);
  CHECK(f.rows[1].note == "checked by hand");
  CHECK(f.rows[2].line == 8);
  CHECK(f.provenance == "test rows");
  CHECK(to_step_table(f).rows().size() == 3);

  TableFile empty = TableFile::parse("# kind: pi\n# columns: log_x,eps\n");
  CHECK_THROWS_AS(to_step_table(empty), EmptyTable);

  TableFile shuffled = f;
  std::swap(shuffled.rows[0], shuffled.rows[2]);
  CHECK_THROWS_AS(to_step_table(shuffled), OrderError);
  TableFile twice = f;
  twice.rows[1].cells[0] = "10";
  CHECK_THROWS_AS(to_step_table(twice), OrderError);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error_line("# kind: theta\n10,1e-3\n20,abc\n") == 3);
  CHECK(parse_error_line("# kind: theta\n\n\n10\n") == 4);
  CHECK(parse_error_line("# kind: omega\n") == 1);
  CHECK(parse_error_line("# kind: theta\n# R: five\n") == 2);
  CHECK(parse_error_line("# kind: theta\n# columns: eps,log_x\n") == 2);
  CHECK(parse_error_line("10,1e-3\n20,1e-4\n") == 2);  // no kind header at all
  CHECK(parse_error_line("# kind: pi\n10,-\n") == 2);
  try {
    TableFile::parse("# kind: theta\n10,x\n", "t.csv");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("t.csv:2:", 0) == 0);
  }
}

TEST_CASE("format and parse round trip") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    TableFile f;
    f.kind = static_cast<Kind>(rng() % 3);
    f.provenance = trial % 2 ? "random rows" : "";
    size_t extra = rng() % 3;
    for (size_t c = 0; c < extra; ++c) f.columns.push_back("c" + std::to_string(c));
    size_t n = rng() % 30 + 1;
    long log_x = 2;
    for (size_t i = 0; i < n; ++i) {
      TableFile::Row r;
      log_x += static_cast<long>(rng() % 50) + 1;
      r.cells.push_back(std::to_string(log_x) + (rng() % 2 ? ".5" : ""));
      for (size_t c = 1; c < f.columns.size(); ++c) r.cells.push_back(random_decimal(rng));
      if (rng() % 4 == 0) r.note = "note " + std::to_string(i);
      f.rows.push_back(r);
    }
    TableFile g = TableFile::parse(f.format());
    REQUIRE(g.kind == f.kind);
    REQUIRE(g.R == f.R);
    REQUIRE(g.provenance == f.provenance);
    REQUIRE(g.columns == f.columns);
    REQUIRE(g.rows == f.rows);
    REQUIRE(g.format() == f.format());
  }
  // through a step table and back, the printed texts survive
  StepBoundTable t = load_table(tables_dir() + "/theta.csv");
  TableFile back = from_step_table(t);
  StepBoundTable t2 = to_step_table(TableFile::parse(back.format()));
  REQUIRE(t2.rows().size() == t.rows().size());
  for (size_t i = 0; i < t.rows().size(); ++i) {
    CHECK(t2.rows()[i].log_x == t.rows()[i].log_x);
    CHECK(t2.rows()[i].eps == t.rows()[i].eps);
  }
}

TEST_CASE("anchor records") {
  auto a = load_anchors(tables_dir() + "/anchors.txt");
  REQUIRE(a.size() == 2);
  const ExactAnchor& big = find_anchor(a, "1e15");
  CHECK(big.pi_x0 == 29844570422669);
  CHECK_FALSE(big.oracle_verifiable);
  CHECK(big.theta_x0.contains(XReal::parse("999999965752660.9398405", Dir::up)));
  CHECK(big.li_x0.width() > XReal(0L));
  const ExactAnchor& cross = find_anchor(a, "crossing");
  CHECK(cross.pi_x0 == 12);
  CHECK(cross.oracle_verifiable);
  CHECK_THROWS_AS(find_anchor(a, "nowhere"), std::invalid_argument);

  CHECK_THROWS_AS(parse_anchors("x0 = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_anchors("[a]\nx0 = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_anchors("[a]\nx0 = 1\ntheta = 1\nli = 1\npi = 1.5\n"), ParseError);
  CHECK_THROWS_AS(parse_anchors("[a\n"), ParseError);
  auto ok = parse_anchors("[a]\nx0 = 100\ntheta = 83.7\nli = 30.1\npi = 25\n");
  CHECK(ok.front().name == "a");
  CHECK(ok.front().theta_x0.is_point() == false);
}

TEST_CASE("emit_report") {
  Report empty{"nothing", {"a", "b"}, {}};
  EmittedReport e = emit_report(empty);
  CHECK(e.failures == 0);
  CHECK(std::count(e.text.begin(), e.text.end(), '\n') == 2);
  CHECK(e.summary["rows"].empty());

  Report r{"two rows", {"x", "value"}, {{{"1", "ok"}, true}, {{"2", "bad"}, false}}};
  EmittedReport o = emit_report(r);
  CHECK(o.failures == 1);
  CHECK(o.summary["failures"] == 1);
  CHECK(o.summary["rows"][1]["value"] == "bad");
  CHECK(o.summary["rows"][1]["ok"] == false);
  CHECK(o.text.find("FAIL") != std::string::npos);
  CHECK(o.text.find("failures: 1 of 2") != std::string::npos);
}

TEST_CASE("interpolation report") {
  TableFile interp = TableFile::read(tables_dir() + "/pi_interp.csv");
  auto curve = AsymptoticBound::make(Kind::pi, "121.107", "3/2", "2", kDefaultR, log(Enclosure(2L)));
  Report rep = interpolation_report(interp, curve);
  REQUIRE(rep.rows.size() == 21);
  CHECK(rep.rows.front().cells[1] == "1.9202e0");
  size_t exact = 0;
  for (const auto& row : rep.rows) {
    CHECK(row.ok);
    if (row.cells[3] == "0") ++exact;
  }
  CHECK(exact >= 13);
  // a smaller constant moves the curve below the numerical column
  auto low = AsymptoticBound::make(Kind::pi, "1", "3/2", "2", kDefaultR, log(Enclosure(2L)));
  CHECK(emit_report(interpolation_report(interp, low)).failures > 0);
}

TEST_CASE("regeneration: coarser refinement is never tighter") {
  StepBoundTable theta = load_table(tables_dir() + "/theta.csv");
  StepBoundTable pi = load_table(tables_dir() + "/pi.csv");
  auto anchors = load_anchors(tables_dir() + "/anchors.txt");
  AnchorDiscrepancy disc = AnchorDiscrepancy::from_anchor(find_anchor(anchors, "1e15"));
  ThetaNumSource src(theta);
  std::vector<std::string> targets{"44", "45", "50", "100"};
  RegenResult coarse = regenerate_pi_table(src, disc, targets, 1, &pi);
  RegenResult fine = regenerate_pi_table(src, disc, targets, 4, &pi);
  REQUIRE(coarse.rows.size() == targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    CHECK(fine.rows[i].regenerated <= coarse.rows[i].regenerated);
    CHECK(fine.rows[i].printed.has_value());
    CHECK(fine.table.rows()[i].eps >= fine.rows[i].regenerated);
  }
  // the regenerated bound is non-increasing over the targets
  for (size_t i = 0; i + 1 < targets.size(); ++i) CHECK(fine.rows[i + 1].regenerated <= fine.rows[i].regenerated);
  CHECK_THROWS_AS(regenerate_pi_table(src, disc, {}, 4), DomainError);
  CHECK_THROWS_AS(regenerate_pi_table(src, disc, targets, 0), DomainError);
  CHECK_THROWS_AS(regenerate_pi_table(src, disc, {"30"}, 1), HypothesisViolated);
}
