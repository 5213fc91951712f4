#include "fldelay/report.hpp"

#include <cmath>
#include <cstdio>

#include "fldelay/errors.hpp"

namespace fldelay {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw ValidationError("out", "cannot write " + path);
}

void CsvWriter::header(std::initializer_list<std::string> names) {
  row(std::vector<std::string>(names));
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw NumericalError("write failed for " + path_);
}

void write_pmf_csv(const std::string& path, const SlotPmf& pmf) {
  CsvWriter w(path);
  w.header({"d", "t_seconds", "pmf", "cdf", "tail_mass_note"});
  double cdf = 0.0;
  for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
    const std::int64_t d = pmf.first_slot + static_cast<std::int64_t>(i);
    cdf += pmf.probs[i];
    const bool last = i + 1 == pmf.probs.size();
    w.row({std::to_string(d), format_number(pmf.seconds(d)), format_number(pmf.probs[i]), format_number(cdf),
           last ? "unenumerated mass " + format_number(pmf.tail_mass) + " beyond this row" : ""});
  }
}

void write_summary_csv(const std::string& path, const SlotPmf& pmf) {
  CsvWriter w(path);
  w.header({"mean_s", "variance_s2", "truncation_mass", "first_slot", "last_slot"});
  const double var = pmf.variance_slots() * pmf.slot_len * pmf.slot_len;
  w.row({format_number(pmf.mean_seconds()), format_number(var), format_number(pmf.tail_mass),
         std::to_string(pmf.first_slot), std::to_string(pmf.last_slot())});
}

}  // namespace fldelay
