#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ctiv {

// A non-fatal problem found while processing input: a malformed row, a
// skipped event, an enrichment miss. Parsers never drop input silently;
// they emit one of these instead.
struct Report {
  std::string source;
  std::size_t index = 0;  // row / event / record position within source
  std::string message;
};

class Diagnostics {
 public:
  void add(std::string source, std::size_t index, std::string message) {
    reports_.push_back({std::move(source), index, std::move(message)});
  }
  const std::vector<Report>& reports() const { return reports_; }
  std::size_t size() const { return reports_.size(); }
  bool empty() const { return reports_.empty(); }
  void clear() { reports_.clear(); }

 private:
  std::vector<Report> reports_;
};

}  // namespace ctiv
