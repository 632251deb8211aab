#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavkin/types.hpp"

namespace cavkin {

// Deterministic plain-text output: tab-separated tables with one header
// line, and 'key = value' manifests. Numbers are printed with %.{precision}g
// so equal seeds on equal builds give byte-identical files.

class TableWriter {
 public:
  TableWriter(std::string path, std::vector<std::string> columns,
              int precision = 12);
  ~TableWriter();

  void row(const std::vector<Real>& values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t n_cols_;
  int precision_;
  std::string buffer_;
  bool closed_ = false;
};

std::string format_real(Real x, int precision = 12);

class Manifest {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, Real value, int precision = 12);
  void add(const std::string& key, std::int64_t value);
  void write(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace cavkin
