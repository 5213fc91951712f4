#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "fldelay/pmf.hpp"

namespace fldelay {

/// 12 significant digits, C locale.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void header(std::initializer_list<std::string> names);
  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

/// Columns d, t_seconds, pmf, cdf, tail_mass_note; the note is filled on the
/// last row with the unenumerated mass.
void write_pmf_csv(const std::string& path, const SlotPmf& pmf);

/// One row: mean_s, variance_s2, truncation_mass, first_slot, last_slot.
void write_summary_csv(const std::string& path, const SlotPmf& pmf);

}  // namespace fldelay
