#include "pnt/tables_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "pnt/oracle.hpp"

#ifndef PNT_TABLES_DIR
#define PNT_TABLES_DIR "tables"
#endif

namespace pnt {

namespace {

std::string trim(std::string_view s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool is_decimal(const std::string& s) {
  static const std::regex re(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?|inf)");
  return std::regex_match(s, re);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int significant_digits(const std::string& text) {
  std::string m = text.substr(0, text.find_first_of("eE"));
  int n = 0;
  bool started = false;
  for (char c : m) {
    if (!std::isdigit(static_cast<unsigned char>(c))) continue;
    if (c != '0') started = true;
    if (started) ++n;
  }
  return std::max(n, 1);
}

// (a - b) in units of the last displayed digit of b
long units_between(const XReal& a, const std::string& b_text) {
  XReal b = XReal::parse(b_text, Dir::down);
  XReal ulp = decimal_ulp(b, significant_digits(b_text));
  Enclosure d = (Enclosure(a) - Enclosure::parse(b_text)) / Enclosure(ulp);
  return std::lround(d.approx());
}

}  // namespace

ParseError::ParseError(const std::string& where, size_t line, const std::string& msg)
    : std::runtime_error(where + ":" + std::to_string(line) + ": " + msg), line_(line) {}

// ---------------------------------------------------------------- table files

TableFile TableFile::parse(std::string_view text, const std::string& where) {
  TableFile f;
  bool have_kind = false;
  std::istringstream in{std::string(text)};
  size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::string body = trim(std::string_view(t).substr(1));
      size_t colon = body.find(':');
      if (colon == std::string::npos) continue;  // free comment
      std::string key = trim(std::string_view(body).substr(0, colon));
      std::string value = trim(std::string_view(body).substr(colon + 1));
      if (key == "kind") {
        try {
          f.kind = parse_kind(value);
        } catch (const std::invalid_argument&) {
          throw ParseError(where, line_no, "unknown kind '" + value + "'");
        }
        have_kind = true;
      } else if (key == "R") {
        if (!is_decimal(value)) throw ParseError(where, line_no, "bad R '" + value + "'");
        f.R = value;
      } else if (key == "provenance") {
        f.provenance = value;
      } else if (key == "columns") {
        f.columns = split(value, ',');
        if (f.columns.size() < 2 || f.columns[0] != "log_x")
          throw ParseError(where, line_no, "columns must start with log_x and name at least one value");
      }
      continue;
    }
    Row row;
    row.line = line_no;
    std::vector<std::string> cells = split(t, ',');
    if (cells.size() < f.columns.size())
      throw ParseError(where, line_no, "expected " + std::to_string(f.columns.size()) + " cells");
    for (size_t i = 0; i < f.columns.size(); ++i) {
      if (!is_decimal(cells[i])) throw ParseError(where, line_no, "not a decimal: '" + cells[i] + "'");
      row.cells.push_back(cells[i]);
    }
    for (size_t i = f.columns.size(); i < cells.size(); ++i) row.note += (i > f.columns.size() ? "," : "") + cells[i];
    f.rows.push_back(std::move(row));
  }
  if (!have_kind) throw ParseError(where, line_no, "missing '# kind:' header");
  return f;
}

TableFile TableFile::read(const std::string& path) { return parse(read_file(path), path); }

std::string TableFile::format() const {
  std::ostringstream out;
  out << "# kind: " << to_string(kind) << "\n# R: " << R << "\n";
  if (!provenance.empty()) out << "# provenance: " << provenance << "\n";
  out << "# columns: ";
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const Row& r : rows) {
    for (size_t i = 0; i < r.cells.size(); ++i) out << (i ? "," : "") << r.cells[i];
    if (!r.note.empty()) out << "," << r.note;
    out << "\n";
  }
  return out.str();
}

size_t TableFile::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::invalid_argument("no column '" + name + "'");
  return static_cast<size_t>(it - columns.begin());
}

StepBoundTable to_step_table(const TableFile& file, const std::string& column) {
  size_t c = file.column(column);
  std::vector<StepRow> rows;
  rows.reserve(file.rows.size());
  for (const auto& r : file.rows) rows.push_back(StepBoundTable::make_row(r.cells[0], r.cells[c], r.note));
  return StepBoundTable(file.kind, std::move(rows), file.provenance, file.R);
}

TableFile from_step_table(const StepBoundTable& table) {
  TableFile f;
  f.kind = table.kind();
  f.R = table.R();
  f.provenance = table.provenance();
  for (const StepRow& r : table.rows()) f.rows.push_back({{r.log_x_text, r.eps_text}, r.provenance, 0});
  return f;
}

StepBoundTable load_table(const std::string& path, const std::string& column) {
  return to_step_table(TableFile::read(path), column);
}

std::string tables_dir() {
  if (const char* env = std::getenv("PNT_TABLES_DIR"); env && *env) return env;
  return PNT_TABLES_DIR;
}

// ---------------------------------------------------------------- anchors

std::vector<ExactAnchor> parse_anchors(std::string_view text, const std::string& where) {
  struct Record {
    std::string name;
    size_t line = 0;
    std::map<std::string, std::string> kv;
  };
  std::vector<Record> recs;
  std::istringstream in{std::string(text)};
  size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) throw ParseError(where, line_no, "bad record header");
      recs.push_back({t.substr(1, t.size() - 2), line_no, {}});
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(where, line_no, "expected key = value");
    if (recs.empty()) throw ParseError(where, line_no, "value outside a [record]");
    recs.back().kv[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }

  std::vector<ExactAnchor> out;
  for (const Record& r : recs) {
    auto get = [&](const std::string& k) -> std::string {
      auto it = r.kv.find(k);
      if (it == r.kv.end()) throw ParseError(where, r.line, "record [" + r.name + "] lacks '" + k + "'");
      return it->second;
    };
    auto opt = [&](const std::string& k, const std::string& d) {
      auto it = r.kv.find(k);
      return it == r.kv.end() ? d : it->second;
    };
    ExactAnchor a;
    if (opt("computed", "") == "crossing_point") {
      a = crossing_anchor();
    } else {
      auto number = [&](const std::string& k) {
        std::string v = get(k);
        if (!is_decimal(v)) throw ParseError(where, r.line, "bad number for '" + k + "'");
        return opt(k + "_digits", "exact") == "truncated" ? Enclosure::parse_truncated(v) : Enclosure::parse(v);
      };
      a.x0 = number("x0");
      a.theta_x0 = number("theta");
      a.li_x0 = number("li");
      std::string pi = get("pi");
      size_t used = 0;
      try {
        a.pi_x0 = std::stoll(pi, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != pi.size()) throw ParseError(where, r.line, "pi must be an integer");
      a.oracle_verifiable = opt("oracle_verifiable", "false") == "true";
    }
    a.name = r.name;
    a.provenance = opt("provenance", a.provenance);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<ExactAnchor> load_anchors(const std::string& path) { return parse_anchors(read_file(path), path); }

const ExactAnchor& find_anchor(const std::vector<ExactAnchor>& anchors, const std::string& name) {
  for (const auto& a : anchors)
    if (a.name == name) return a;
  throw std::invalid_argument("no anchor named '" + name + "'");
}

// ---------------------------------------------------------------- regeneration

RegenResult regenerate_pi_table(const ThetaNumSource& theta, const AnchorDiscrepancy& disc,
                                const std::vector<std::string>& target_log_x, int refinement,
                                const StepBoundTable* printed) {
  if (target_log_x.empty()) throw DomainError("no target rows");
  if (refinement < 1) throw DomainError("refinement must be at least 1");
  std::vector<XReal> targets;
  for (const auto& t : target_log_x) targets.push_back(XReal::parse(t, Dir::up));
  std::vector<size_t> order(targets.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return targets[a] < targets[b]; });
  const XReal& first = targets[order.front()];
  if (!certainly_lt(disc.log_x0, Enclosure(first)) && !disc.log_x0.overlaps(Enclosure(first)))
    throw HypothesisViolated("targets must lie at or above log x0");

  // knots: log x0, theta rows above it, targets
  std::vector<XReal> knot_vals;
  for (const StepRow& r : theta.table().rows())
    if (disc.log_x0.hi() < r.log_x) knot_vals.push_back(r.log_x);
  for (const XReal& t : targets)
    if (disc.log_x0.hi() < t) knot_vals.push_back(t);
  std::sort(knot_vals.begin(), knot_vals.end(), [](const XReal& a, const XReal& b) { return a < b; });
  knot_vals.erase(std::unique(knot_vals.begin(), knot_vals.end()), knot_vals.end());

  std::vector<Enclosure> pts{disc.log_x0};
  std::vector<bool> sub{disc.log_x0.overlaps(Enclosure(first))};
  for (const XReal& k : knot_vals) {
    Enclosure prev = pts.back(), next(k);
    Enclosure step = (next - prev) / Enclosure(static_cast<long>(refinement));
    for (int j = 1; j < refinement; ++j) {
      XReal p = (prev + step * Enclosure(static_cast<long>(j))).mid();
      pts.emplace_back(p);
      sub.push_back(first <= p);
    }
    pts.push_back(next);
    sub.push_back(first <= k);
  }

  std::vector<StitchedPiece> pieces = stitch_sweep(theta, disc, pts, sub);
  // suffix maxima of the piece bounds
  std::vector<XReal> suffix(pieces.size());
  for (size_t i = pieces.size(); i-- > 0;)
    suffix[i] = i + 1 < pieces.size() ? max(pieces[i].eps_pi, suffix[i + 1]) : pieces[i].eps_pi;

  RegenResult res;
  std::vector<StepRow> rows;
  for (size_t idx : order) {
    const XReal& t = targets[idx];
    auto it = std::find_if(pieces.begin(), pieces.end(), [&](const StitchedPiece& p) { return p.log_lo.contains(t); });
    if (it == pieces.end()) throw PartitionNotCovered("target " + target_log_x[idx] + " is not a subdivision point");
    RegenRow row;
    row.log_x_text = target_log_x[idx];
    row.log_x = t;
    row.regenerated = suffix[static_cast<size_t>(it - pieces.begin())];
    if (printed) {
      const auto& prow = printed->rows();
      auto pit = std::find_if(prow.begin(), prow.end(), [&](const StepRow& r) { return r.log_x == t; });
      if (pit != prow.end()) {
        row.printed = pit->eps;
        Enclosure ratio = Enclosure(row.regenerated) / Enclosure(pit->eps);
        row.rel_diff = ratio.approx() - 1;
        bool upper_ok = ratio.hi() <= Enclosure::parse("1.001").lo();
        bool lower_ok = ratio.lo() >= Enclosure::parse("0.99").hi();
        row.within = upper_ok && lower_ok;
        if (!row.within) ++res.mismatches;
      }
    }
    Decimal shown = round_decimal(row.regenerated, 5, Dir::up);
    rows.push_back(StepBoundTable::make_row(row.log_x_text, shown.text, "regenerated"));
    res.rows.push_back(std::move(row));
  }
  res.table = StepBoundTable(Kind::pi, std::move(rows), "regenerated from " + theta.table().provenance());
  return res;
}

// ---------------------------------------------------------------- reports

EmittedReport emit_report(const Report& report) {
  EmittedReport out;
  std::vector<size_t> width(report.columns.size(), 0);
  for (size_t i = 0; i < report.columns.size(); ++i) width[i] = report.columns[i].size();
  for (const auto& r : report.rows)
    for (size_t i = 0; i < r.cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], r.cells[i].size());
  std::ostringstream text;
  text << "== " << report.title << "\n";
  auto line = [&](const std::vector<std::string>& cells, const std::string& tail) {
    for (size_t i = 0; i < width.size(); ++i) {
      std::string c = i < cells.size() ? cells[i] : "";
      text << c << std::string(width[i] - std::min(width[i], c.size()) + 2, ' ');
    }
    text << tail << "\n";
  };
  line(report.columns, "status");
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    line(r.cells, r.ok ? "ok" : "FAIL");
    nlohmann::json j;
    for (size_t i = 0; i < report.columns.size() && i < r.cells.size(); ++i) j[report.columns[i]] = r.cells[i];
    j["ok"] = r.ok;
    rows.push_back(j);
    if (!r.ok) ++out.failures;
  }
  if (!report.rows.empty()) text << "failures: " << out.failures << " of " << report.rows.size() << "\n";
  out.text = text.str();
  out.summary = {{"title", report.title}, {"columns", report.columns}, {"rows", rows}, {"failures", out.failures}};
  return out;
}

Report interpolation_report(const TableFile& interp, const AsymptoticBound& pi_bound) {
  Report rep;
  rep.title = "asymptotic curve against " + (interp.provenance.empty() ? std::string("table") : interp.provenance);
  rep.columns = {"log_x", "eps_asymp", "printed", "units", "eps_num", "num_below"};
  size_t c_asymp = interp.column("eps_asymp");
  std::optional<size_t> c_num;
  for (size_t i = 0; i < interp.columns.size(); ++i)
    if (interp.columns[i].rfind("eps_num", 0) == 0) c_num = i;
  for (const auto& r : interp.rows) {
    Enclosure L = Enclosure::parse(r.cells[0]);
    XReal v = eval_asymp(pi_bound, L, Dir::up);
    const std::string& printed = r.cells[c_asymp];
    Decimal shown = round_decimal(v, significant_digits(printed), Dir::up);
    long units = units_between(shown.value, printed);
    Report::Row row;
    row.cells = {r.cells[0], shown.text, printed, std::to_string(units)};
    bool below = true;
    if (c_num) {
      const std::string& num = r.cells[*c_num];
      below = XReal::parse(num, Dir::up) <= eval_asymp(pi_bound, L, Dir::down);
      row.cells.push_back(num);
      row.cells.push_back(below ? "yes" : "no");
    }
    row.ok = std::labs(units) <= 1 && below;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace pnt
