#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbp/operators.hpp"
#include "sbp/sat.hpp"

namespace sbp::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, "nan"/"inf" spelled as JSON null in documents.
std::string format_number(double value);

/// Serializes with every floating-point value rendered by format_number.
std::string dump(const Json& doc, int indent = 2);

Json vector_json(std::span<const double> v);
Json matrix_json(const Matrix& m);

Json operator_json(const SbpSecondDerivative& op);
/// Rebuilds the operator matrix from the stored parts.
SbpSecondDerivative operator_from_json(const Json& doc);

Json discretization_json(const SatDiscretization& disc);

/// Comma-separated table with a header row and LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out, std::vector<std::string> header);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(const std::string& value);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace sbp::io
