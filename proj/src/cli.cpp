#include "pnt/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>

#include "pnt/oracle.hpp"
#include "pnt/tables_io.hpp"

namespace pnt::cli {

namespace {

struct BoundArgs {
  std::string A, B = "3/2", C = "2", R = kDefaultR, log_x0;
};

struct AnchorArgs {
  std::string name, file, log_x0, eps_theta, eps_pi;
};

void add_bound(CLI::App* app, BoundArgs& b, const std::string& default_log_x0 = "") {
  app->add_option("--A", b.A, "constant A (rounded up)")->required();
  app->add_option("--B", b.B, "exponent B, decimal or p/q")->capture_default_str();
  app->add_option("--C", b.C, "constant C")->capture_default_str();
  app->add_option("--R", b.R, "zero-free region constant")->capture_default_str();
  b.log_x0 = default_log_x0;
  app->add_option("--log-x0", b.log_x0, "log of the validity threshold (default log 2)");
}

void add_anchor(CLI::App* app, AnchorArgs& a) {
  app->add_option("--anchor", a.name, "anchor record name");
  app->add_option("--anchors", a.file, "anchor file (default: shipped anchors.txt)");
  auto* l = app->add_option("--disc-log-x0", a.log_x0, "instead of an anchor: log x0 where two bounds are known");
  app->add_option("--disc-eps-theta", a.eps_theta, "theta bound at x0")->needs(l);
  app->add_option("--disc-eps-pi", a.eps_pi, "pi bound at x0")->needs(l);
}

Enclosure parse_log(const std::string& text) {
  if (text == "inf") throw DomainError("infinity is only accepted for --log-x2");
  return Enclosure::parse(text);
}

AsymptoticBound make_bound(Kind kind, const BoundArgs& b) {
  Enclosure l0 = b.log_x0.empty() ? log(Enclosure(2L)) : parse_log(b.log_x0);
  return AsymptoticBound::make(kind, b.A, b.B, b.C, b.R, l0);
}

AnchorDiscrepancy make_disc(const AnchorArgs& a) {
  if (!a.log_x0.empty()) {
    if (a.eps_theta.empty() || a.eps_pi.empty())
      throw CLI::ValidationError("--disc-log-x0 needs --disc-eps-theta and --disc-eps-pi");
    return AnchorDiscrepancy::from_bounds(parse_log(a.log_x0), XReal::parse(a.eps_theta, Dir::up),
                                          XReal::parse(a.eps_pi, Dir::up));
  }
  if (a.name.empty()) throw CLI::ValidationError("give --anchor or --disc-log-x0");
  auto anchors = load_anchors(a.file.empty() ? tables_dir() + "/anchors.txt" : a.file);
  return AnchorDiscrepancy::from_anchor(find_anchor(anchors, a.name));
}

std::string table_path(const std::string& given, const char* shipped) {
  return given.empty() ? tables_dir() + "/" + shipped : given;
}

class Printer {
 public:
  Printer(std::ostream& out, int digits) : out_(out), digits_(digits) {}

  void value(const std::string& label, const XReal& x, Dir d) {
    Decimal r = round_decimal(x, digits_, d);
    out_ << label << " = " << plain_decimal(r.text) << " (rounded " << (d == Dir::up ? "up" : "down") << ")\n";
  }
  void enclosure(const std::string& label, const Enclosure& e) {
    out_ << label << " in [" << plain_decimal(round_decimal(e.lo(), std::max(digits_ + 4, 20), Dir::down).text) << ", "
         << plain_decimal(round_decimal(e.hi(), std::max(digits_ + 4, 20), Dir::up).text) << "]\n";
  }
  void line(const std::string& s) { out_ << s << "\n"; }

 private:
  std::ostream& out_;
  int digits_;
};

std::vector<const char*> argv_of(const std::vector<std::string>& args) {
  std::vector<const char*> v{"pntconv"};
  for (const auto& a : args) v.push_back(a.c_str());
  return v;
}

}  // namespace

std::string plain_decimal(const std::string& sci) {
  size_t e = sci.find_first_of("eE");
  if (e == std::string::npos) return sci;
  long ex = std::strtol(sci.c_str() + e + 1, nullptr, 10);
  std::string mant = sci.substr(0, e);
  std::string sign;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    if (mant[0] == '-') sign = "-";
    mant.erase(0, 1);
  }
  size_t dot = mant.find('.');
  std::string digits = mant;
  long int_len = static_cast<long>(mant.size());
  if (dot != std::string::npos) {
    digits.erase(dot, 1);
    int_len = static_cast<long>(dot);
  }
  long point = int_len + ex;
  if (ex < -5 || point > 15) return sci;
  std::string s;
  if (point <= 0) {
    s = "0." + std::string(static_cast<size_t>(-point), '0') + digits;
  } else if (point >= static_cast<long>(digits.size())) {
    s = digits + std::string(static_cast<size_t>(point) - digits.size(), '0');
  } else {
    s = digits.substr(0, static_cast<size_t>(point)) + "." + digits.substr(static_cast<size_t>(point));
  }
  return sign + s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convert explicit prime number theorem error bounds between psi, theta and pi"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all");
  long precision = 192;
  if (const char* env = std::getenv(kPrecisionEnv); env && *env) precision = std::strtol(env, nullptr, 10);
  int digits = 6;
  app.add_option("--precision", precision, "working precision in bits (env " + std::string(kPrecisionEnv) + ")")
      ->check(CLI::Range(64L, static_cast<long>(kMaxPrecision)));
  app.add_option("--digits", digits, "significant digits shown")->check(CLI::Range(1, 40));

  int status = kOk;
  std::function<void()> action;

  // convert-asymp
  auto* ca = app.add_subcommand("convert-asymp", "convert an asymptotic bound");
  std::string ca_dir;
  BoundArgs ca_b;
  AnchorArgs ca_a;
  std::string ca_log_x1, ca_a1, ca_a2;
  ca->add_option("direction", ca_dir, "psi-to-theta | theta-to-pi | psi-to-pi")
      ->required()
      ->check(CLI::IsMember({"psi-to-theta", "theta-to-pi", "psi-to-pi"}));
  add_bound(ca, ca_b);
  add_anchor(ca, ca_a);
  ca->add_option("--log-x1", ca_log_x1, "log x1 where the pi bound starts");
  ca->add_option("--a1", ca_a1, "override a1 in psi - theta <= a1 sqrt x + a2 cbrt x");
  ca->add_option("--a2", ca_a2, "override a2");
  ca->callback([&] {
    action = [&] {
      Printer p(out, digits);
      Bkwln_a1a2 a = Bkwln_a1a2::defaults();
      if (!ca_a1.empty()) a.a1 = XReal::parse(ca_a1, Dir::up);
      if (!ca_a2.empty()) a.a2 = XReal::parse(ca_a2, Dir::up);
      if (ca_dir != "theta-to-pi" && ca_b.log_x0.empty()) ca_b.log_x0 = "30";
      AsymptoticBound in = make_bound(ca_dir == "theta-to-pi" ? Kind::theta : Kind::psi, ca_b);
      AsymptoticBound theta = in;
      if (ca_dir != "theta-to-pi") {
        p.value("nu", nu_asymp(in, a, in.log_x0).hi(), Dir::up);
        theta = psi_to_theta_asymp(in, a);
        p.value("A_theta", theta.A, Dir::up);
        if (ca_dir == "psi-to-theta") return;
      }
      if (ca_log_x1.empty()) throw CLI::ValidationError("--log-x1 is required for conversions to pi");
      Enclosure L1 = parse_log(ca_log_x1);
      AnchorDiscrepancy disc = make_disc(ca_a);
      p.value("mu", mu_asymp(theta, disc, L1).hi(), Dir::up);
      p.value("A_pi", theta_to_pi_asymp(theta, disc, L1).A, Dir::up);
    };
  });

  // convert-num
  auto* cn = app.add_subcommand("convert-num", "convert a numerical (step table) bound");
  std::string cn_dir, cn_table, cn_log_x1, cn_log_x2 = "inf";
  AnchorArgs cn_a;
  cn->add_option("direction", cn_dir, "psi-to-theta | theta-to-pi")
      ->required()
      ->check(CLI::IsMember({"psi-to-theta", "theta-to-pi"}));
  cn->add_option("--table", cn_table, "input table (default: shipped psi.csv or theta.csv)");
  add_anchor(cn, cn_a);
  cn->add_option("--log-x1", cn_log_x1, "theta-to-pi: log x1");
  cn->add_option("--log-x2", cn_log_x2, "theta-to-pi: log x2 or inf")->capture_default_str();
  cn->callback([&] {
    action = [&] {
      Printer p(out, digits);
      if (cn_dir == "psi-to-theta") {
        StepBoundTable psi = load_table(table_path(cn_table, "psi.csv"));
        TableFile f;
        f.kind = Kind::theta;
        f.R = psi.R();
        f.provenance = "converted from " + psi.provenance();
        for (const StepRow& r : psi.rows()) {
          ThetaFromPsi t = psi_to_theta_num(r.eps, Enclosure(r.log_x));
          f.rows.push_back({{r.log_x_text, round_decimal(t.eps_theta, 5, Dir::up).text}, "", 0});
        }
        out << f.format();
        return;
      }
      if (cn_log_x1.empty()) throw CLI::ValidationError("--log-x1 is required");
      StepBoundTable theta = load_table(table_path(cn_table, "theta.csv"));
      AnchorDiscrepancy disc = make_disc(cn_a);
      Enclosure L1 = parse_log(cn_log_x1);
      std::optional<Enclosure> L2;
      if (cn_log_x2 != "inf") L2 = parse_log(cn_log_x2);
      std::vector<XReal> base;
      for (const auto& r : theta.rows()) base.push_back(r.log_x);
      Partition part = Partition::refine_between(base, disc.log_x0, L1, 1);
      p.value("eps_pi", pi_num_on_interval(theta, part, disc, L1, L2), Dir::up);
    };
  });

  // mu
  auto* mu = app.add_subcommand("mu", "overhead factor from a theta bound to a pi bound");
  std::string mu_kind, mu_table, mu_log_x1, mu_log_x2 = "inf";
  BoundArgs mu_b;
  AnchorArgs mu_a;
  int mu_refine = 1;
  mu->add_option("kind", mu_kind, "asymp | num")->required()->check(CLI::IsMember({"asymp", "num"}));
  mu->add_option("--A", mu_b.A, "asymp: theta constant A");
  mu->add_option("--B", mu_b.B, "asymp: exponent B")->capture_default_str();
  mu->add_option("--C", mu_b.C, "asymp: constant C")->capture_default_str();
  mu->add_option("--R", mu_b.R, "asymp: zero-free region constant")->capture_default_str();
  mu->add_option("--log-x0", mu_b.log_x0, "asymp: log of the validity threshold (default log 2)");
  mu->add_option("--theta-table", mu_table, "num: theta table (default: shipped theta.csv)");
  mu->add_option("--refinement", mu_refine, "num: split each partition gap this many ways")->check(CLI::Range(1, 4096));
  add_anchor(mu, mu_a);
  mu->add_option("--log-x1", mu_log_x1, "log x1")->required();
  mu->add_option("--log-x2", mu_log_x2, "num: log x2 or inf")->capture_default_str();
  mu->callback([&] {
    action = [&] {
      Printer p(out, digits);
      AnchorDiscrepancy disc = make_disc(mu_a);
      Enclosure L1 = parse_log(mu_log_x1);
      if (mu_kind == "asymp") {
        if (mu_b.A.empty()) throw CLI::ValidationError("mu asymp needs --A");
        p.value("mu_asymp", mu_asymp(make_bound(Kind::theta, mu_b), disc, L1).hi(), Dir::up);
        return;
      }
      StepBoundTable theta = load_table(table_path(mu_table, "theta.csv"));
      std::optional<Enclosure> L2;
      if (mu_log_x2 != "inf") L2 = parse_log(mu_log_x2);
      std::vector<XReal> base;
      for (const auto& r : theta.rows()) base.push_back(r.log_x);
      Partition part = Partition::refine_between(base, disc.log_x0, L1, mu_refine);
      p.value("mu_num", mu_num(disc, theta, part, L1, L2).hi(), Dir::up);
    };
  });

  // verify-dominates
  auto* vd = app.add_subcommand("verify-dominates", "check that a step table lies below an asymptotic curve");
  std::string vd_table, vd_lo = "0.6931471805599453", vd_hi = "20000";
  bool vd_certified = false;
  std::string vd_json;
  BoundArgs vd_b;
  vd->add_option("--table", vd_table, "step table (default: shipped pi.csv)");
  add_bound(vd, vd_b);
  vd->add_option("--log-lo", vd_lo, "range start")->capture_default_str();
  vd->add_option("--log-hi", vd_hi, "range end")->capture_default_str();
  vd->add_flag("--certified", vd_certified, "compare each row with the curve over its whole span");
  vd->add_option("--json", vd_json, "write a summary to this file");
  vd->callback([&] {
    action = [&] {
      StepBoundTable t = load_table(table_path(vd_table, "pi.csv"));
      AsymptoticBound b = make_bound(t.kind(), vd_b);
      DominanceReport r = dominates(t, b, parse_log(vd_lo), parse_log(vd_hi),
                                    vd_certified ? DominanceMode::certified : DominanceMode::row_start);
      Report rep{"dominance of " + (t.provenance().empty() ? std::string("table") : t.provenance()),
                 {"log_x", "eps_table", "note"},
                 {}};
      for (size_t i : r.violations)
        rep.rows.push_back({{t.rows()[i].log_x_text, t.rows()[i].eps_text, "above curve"}, false});
      EmittedReport e = emit_report(rep);
      out << e.text;
      out << "rows checked: " << r.rows_checked << "\n" << (r.holds ? "holds" : "VIOLATED") << "\n";
      if (!vd_json.empty()) std::ofstream(vd_json) << e.summary.dump(2) << "\n";
      if (!r.holds) status = kViolation;
    };
  });

  // verify-weak
  auto* vw = app.add_subcommand("verify-weak", "check E_pi(x) <= c at every prime gap up to a sieve limit");
  std::uint64_t vw_limit = PrimeStore::kDefaultLimit;
  std::string vw_c = "0.4298", vw_cache;
  vw->add_option("--limit", vw_limit, "sieve limit")->capture_default_str()->check(CLI::Range(100ULL, 4000000000ULL));
  vw->add_option("--constant", vw_c, "the constant c")->capture_default_str();
  vw->add_option("--cache", vw_cache, "sieve checkpoint cache file");
  vw->callback([&] {
    action = [&] {
      Printer p(out, digits);
      PrimeStore store = vw_cache.empty() ? PrimeStore(vw_limit) : PrimeStore::with_cache(vw_limit, vw_cache);
      XReal c = XReal::parse(vw_c, Dir::down);
      PointwiseReport r = verify_pointwise(store, Kind::pi, PointwiseBound::of_constant(c), vw_limit);
      out << "gaps checked: " << r.gaps_checked << "\nviolations: " << r.violation_count << "\n";
      out << "max ratio: " << r.max_ratio << "\n";
      for (const auto& v : r.violations)
        out << "  [" << v.left << ", " << v.right << "): error " << v.error << " > " << v.bound << "\n";
      Enclosure L = log(Enclosure(static_cast<long>(97)));
      XReal env = buthe_envelope(L);
      p.value("envelope(97)", env, Dir::up);
      bool env_ok = env <= c;
      bool mono = buthe_decreasing_on_grid(L, log(Enclosure::parse("1e19")), 10000);
      out << "envelope below c at 97: " << (env_ok ? "yes" : "no") << "\n";
      out << "envelope decreasing on [97, 1e19]: " << (mono ? "yes" : "no") << "\n";
      if (!r.verified() || !env_ok || !mono) status = kViolation;
    };
  });

  // regenerate
  auto* rg = app.add_subcommand("regenerate", "rebuild the numerical pi table from the theta table");
  std::string rg_theta, rg_pi, rg_out, rg_json;
  std::vector<std::string> rg_targets;
  AnchorArgs rg_a;
  rg_a.name = "1e15";
  int rg_refine = 64;
  BoundArgs rg_env;
  rg->add_option("--theta-table", rg_theta, "theta table (default: shipped theta.csv)");
  rg->add_option("--pi-table", rg_pi, "printed pi table to compare with (default: shipped pi.csv)");
  rg->add_option("--targets", rg_targets, "log x1 values (default: every row of the printed table)")->delimiter(',');
  rg->add_option("--refinement", rg_refine, "split each gap this many ways")->capture_default_str()->check(CLI::Range(1, 4096));
  add_anchor(rg, rg_a);
  rg->add_option("--envelope-A", rg_env.A, "sharpen theta with this asymptotic theta constant");
  rg->add_option("--envelope-B", rg_env.B, "envelope exponent B")->capture_default_str();
  rg->add_option("--envelope-C", rg_env.C, "envelope constant C")->capture_default_str();
  rg->add_option("--out", rg_out, "write the regenerated table here");
  rg->add_option("--json", rg_json, "write a summary to this file");
  rg->callback([&] {
    action = [&] {
      StepBoundTable theta = load_table(table_path(rg_theta, "theta.csv"));
      StepBoundTable printed = load_table(table_path(rg_pi, "pi.csv"));
      if (rg_targets.empty())
        for (const auto& r : printed.rows()) rg_targets.push_back(r.log_x_text);
      std::optional<AsymptoticBound> env;
      if (!rg_env.A.empty()) env = make_bound(Kind::theta, rg_env);
      ThetaNumSource src(theta, env);
      RegenResult res = regenerate_pi_table(src, make_disc(rg_a), rg_targets, rg_refine, &printed);
      Report rep{"regenerated pi table", {"log_x", "regenerated", "printed", "rel_diff"}, {}};
      for (const auto& r : res.rows) {
        char diff[32];
        std::snprintf(diff, sizeof diff, "%+.2e", r.rel_diff);
        rep.rows.push_back({{r.log_x_text, round_decimal(r.regenerated, 5, Dir::up).text,
                             r.printed ? round_decimal(*r.printed, 5, Dir::up).text : "-", r.printed ? diff : "-"},
                            r.within});
      }
      EmittedReport e = emit_report(rep);
      out << e.text;
      if (!rg_out.empty()) std::ofstream(rg_out) << from_step_table(res.table).format();
      if (!rg_json.empty()) std::ofstream(rg_json) << e.summary.dump(2) << "\n";
      if (res.mismatches) status = kViolation;
    };
  });

  // crossing-point
  auto* cp = app.add_subcommand("crossing-point", "where the pi and theta discrepancies agree, between 37 and 41");
  cp->callback([&] {
    action = [&] {
      Printer p(out, digits);
      Enclosure x = crossing_point();
      p.enclosure("x", x);
      p.value("width", x.width(), Dir::up);
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a bound at log x");
  std::string ev_kind, ev_table, ev_log_x;
  BoundArgs ev_b;
  ev->add_option("form", ev_kind, "asymp | plain | step")->required()->check(CLI::IsMember({"asymp", "plain", "step"}));
  ev->add_option("--A", ev_b.A, "constant A");
  ev->add_option("--B", ev_b.B, "exponent B")->capture_default_str();
  ev->add_option("--C", ev_b.C, "constant C")->capture_default_str();
  ev->add_option("--R", ev_b.R, "zero-free region constant")->capture_default_str();
  ev->add_option("--table", ev_table, "step: table file (default: shipped theta.csv)");
  ev->add_option("--log-x", ev_log_x, "log x")->required();
  ev->callback([&] {
    action = [&] {
      Printer p(out, digits);
      Enclosure L = parse_log(ev_log_x);
      if (ev_kind == "step") {
        // the row's own text: re-rounding its up-rounded binary value would bump the last digit
        StepBoundTable t = load_table(table_path(ev_table, "theta.csv"));
        XReal v = eval_step(t, L);
        for (auto it = t.rows().rbegin(); it != t.rows().rend(); ++it)
          if (const StepRow& r = *it; r.log_x <= L.lo() && r.eps == v) {
            out << "eps = " << r.eps_text << " (row log_x = " << r.log_x_text << ")\n";
            return;
          }
        p.value("eps", v, Dir::up);
        return;
      }
      if (ev_b.A.empty()) throw CLI::ValidationError("eval " + ev_kind + " needs --A");
      AsymptoticBound b = make_bound(Kind::pi, ev_b);
      if (ev_kind == "asymp") {
        p.value("eps_asymp", eval_asymp(b, L, Dir::up), Dir::up);
        return;
      }
      PlainForm f = to_plain_form(b);
      p.value("A'", f.A, Dir::up);
      p.value("C'", f.C, Dir::down);
      p.value("eps_plain", eval_plain(f, L, Dir::up), Dir::up);
    };
  });

  std::vector<const char*> argv = argv_of(args);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  try {
    PrecisionScope scope(static_cast<mpfr_prec_t>(precision));
    if (action) action();
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return status;
}

}  // namespace pnt::cli
