#pragma once

// Deterministic artifact emission: the binary field dump and CSV helpers.
// Every data file embeds a schema line and the verbatim config echo.
//
// Field dump layout (documented in the README):
//   bytes 0..31   ASCII magic "PLANECELLFLD planecell/1", space padded, \n last
//   uint64 LE     byte length of the config echo
//   ...           config echo (JSON, UTF-8)
//   int64 LE x3   d, N, m
//   f64 LE        epsilon
//   f64 LE x d    omega
//   f64 LE x m^d  node values, row major

#include <string>
#include <vector>

#include "planecell/grid.hpp"

namespace planecell::io {

struct FieldDump {
  TorusSpec torus;
  std::vector<double> omega;
  double epsilon = 0.0;
  Field field;
  std::string config_echo;
};

void write_field_dump(const std::string& path, const Field& field,
                      std::span<const double> omega, double epsilon,
                      const std::string& config_echo);

FieldDump read_field_dump(const std::string& path);

/// CSV writer with fixed float formatting; emits the schema and config
/// comment lines first so reruns with the same config are byte identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_echo,
            std::vector<std::string> columns);
  ~CsvWriter();

  void row(std::span<const double> values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace planecell::io
