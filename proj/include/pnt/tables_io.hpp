#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pnt/conversions.hpp"

namespace pnt {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, size_t line, const std::string& msg);
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Comma-separated rows under '#'-prefixed header lines:
//   # kind: theta
//   # R: 5.5666305
//   # provenance: ...
//   # columns: log_x,eps
// Cells past the declared columns are kept as a per-row note.
struct TableFile {
  struct Row {
    std::vector<std::string> cells;
    std::string note;
    size_t line = 0;
    bool operator==(const Row& o) const { return cells == o.cells && note == o.note; }
  };

  Kind kind = Kind::theta;
  std::string R = kDefaultR;
  std::string provenance;
  std::vector<std::string> columns{"log_x", "eps"};
  std::vector<Row> rows;

  static TableFile parse(std::string_view text, const std::string& where = "<text>");
  static TableFile read(const std::string& path);
  std::string format() const;
  size_t column(const std::string& name) const;
};

StepBoundTable to_step_table(const TableFile& file, const std::string& column = "eps");
TableFile from_step_table(const StepBoundTable& table);
StepBoundTable load_table(const std::string& path, const std::string& column = "eps");

// Directory holding the shipped tables: $PNT_TABLES_DIR, else the build-time path.
std::string tables_dir();

// key = value records under [name] headers. A record with
// `computed = crossing_point` is filled in from the oracle.
std::vector<ExactAnchor> parse_anchors(std::string_view text, const std::string& where = "<text>");
std::vector<ExactAnchor> load_anchors(const std::string& path);
const ExactAnchor& find_anchor(const std::vector<ExactAnchor>& anchors, const std::string& name);

struct RegenRow {
  std::string log_x_text;
  XReal log_x;
  XReal regenerated;  // certified, before display rounding
  std::optional<XReal> printed;
  double rel_diff = 0;  // regenerated / printed - 1
  bool within = true;
};

struct RegenResult {
  StepBoundTable table;  // pi rows, eps rounded up to 5 significant digits
  std::vector<RegenRow> rows;
  size_t mismatches = 0;
};

// One stitched sweep over the theta rows from log x0, each span split
// `refinement` ways, every point from the first target on opening a
// subinterval, the last one running to infinity. The value at a target is the
// largest piece bound at or beyond it. Rows compared against `printed` must lie
// within [printed (1 - 1e-2), printed (1 + 1e-3)].
RegenResult regenerate_pi_table(const ThetaNumSource& theta, const AnchorDiscrepancy& disc,
                                const std::vector<std::string>& target_log_x, int refinement,
                                const StepBoundTable* printed = nullptr);

struct Report {
  std::string title;
  std::vector<std::string> columns;
  struct Row {
    std::vector<std::string> cells;
    bool ok = true;
  };
  std::vector<Row> rows;
};

struct EmittedReport {
  std::string text;
  nlohmann::json summary;
  size_t failures = 0;
};

EmittedReport emit_report(const Report& report);

// Interpolation check: curve value, printed value, numerical column and
// whether the numerical column stays below the curve.
Report interpolation_report(const TableFile& interp, const AsymptoticBound& pi_bound);

}  // namespace pnt
