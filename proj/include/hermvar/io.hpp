#ifndef HERMVAR_IO_HPP
#define HERMVAR_IO_HPP

#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hermvar/distances.hpp"
#include "hermvar/kernel_norms.hpp"
#include "hermvar/malliavin.hpp"
#include "hermvar/variations.hpp"

namespace hermvar::io {

/// Shortest round-trippable-enough decimal: 17 significant digits, '.'
/// separator, no grouping.
inline std::string fmt(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << x;
  return os.str();
}

/// Comma-separated table writer; rows are flushed in insertion order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
  }

  [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
  [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline nlohmann::json to_json(const Statistic& s) {
  return {{"q", s.spec.q.value()}, {"H", s.spec.h.value()}, {"regime", to_string(s.spec.regime)},
          {"n", s.n},              {"vn", s.vn},           {"zn", s.zn}};
}

inline nlohmann::json to_json(const BoundEstimate& b, int q) {
  return {{"q", q},           {"n", b.n},     {"batch", b.batch}, {"seed", b.seed.value},
          {"mean_sq", b.mean_sq}, {"se", b.se}, {"tv_bound", b.tv_bound}};
}

inline nlohmann::json to_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"stderr_slope", f.stderr_slope}};
}

inline nlohmann::json to_json(const DiscrepancyReport& d) {
  return {{"n", d.n}, {"delta", d.delta}, {"l2_error", d.l2_error}, {"normalized", d.normalized}};
}

}  // namespace hermvar::io

#endif  // HERMVAR_IO_HPP
