#include "cavkin/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cavkin {

std::string format_real(Real x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
  return buf;
}

TableWriter::TableWriter(std::string path, std::vector<std::string> columns,
                         int precision)
    : path_(std::move(path)), n_cols_(columns.size()), precision_(precision) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buffer_ += '\t';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
}

void TableWriter::row(const std::vector<Real>& values) {
  if (values.size() != n_cols_)
    throw std::logic_error("table row width mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += '\t';
    buffer_ += format_real(values[i], precision_);
  }
  buffer_ += '\n';
}

void TableWriter::close() {
  if (closed_) return;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path_ + "'");
  out << buffer_;
  closed_ = true;
}

TableWriter::~TableWriter() {
  try {
    close();
  } catch (...) {
  }
}

void Manifest::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void Manifest::add(const std::string& key, Real value, int precision) {
  entries_.emplace_back(key, format_real(value, precision));
}

void Manifest::add(const std::string& key, std::int64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

}  // namespace cavkin
