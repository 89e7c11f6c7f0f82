#include "sbp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sbp/errors.hpp"

namespace sbp::io {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void emit(std::ostringstream& out, const Json& node, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (node.type()) {
    case Json::value_t::object: {
      if (node.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (auto it = node.begin(); it != node.end(); ++it) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        out << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        emit(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case Json::value_t::array: {
      if (node.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(node.begin(), node.end(), [](const Json& e) { return e.is_primitive(); });
      out << '[';
      bool first = true;
      for (const auto& e : node) {
        if (!first) out << (flat ? ", " : ",");
        first = false;
        if (!flat) newline(depth + 1);
        emit(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = node.get<double>();
      out << (std::isfinite(v) ? format_number(v) : "null");
      return;
    }
    default:
      out << node.dump();
  }
}

}  // namespace

std::string dump(const Json& doc, int indent) {
  std::ostringstream out;
  emit(out, doc, indent, 0);
  out << '\n';
  return out.str();
}

Json vector_json(std::span<const double> v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

Json matrix_json(const Matrix& m) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) arr.push_back(vector_json(m.row(i)));
  return arr;
}

Json operator_json(const SbpSecondDerivative& op) {
  Json doc;
  doc["order"] = op.interior_order;
  doc["n"] = op.grid.n;
  doc["alpha"] = op.free_parameter ? Json(*op.free_parameter) : Json(nullptr);
  doc["H_diag"] = vector_json(op.norm_weights);
  doc["A"] = matrix_json(op.stiffness);
  doc["dL"] = vector_json(op.left_derivative);
  doc["dR"] = vector_json(op.right_derivative);
  return doc;
}

SbpSecondDerivative operator_from_json(const Json& doc) {
  try {
    SbpSecondDerivative op;
    op.grid = make_grid(doc.at("n").get<long long>());
    op.interior_order = doc.at("order").get<int>();
    if (!doc.at("alpha").is_null()) op.free_parameter = doc.at("alpha").get<double>();
    op.norm_weights = doc.at("H_diag").get<Vector>();
    op.left_derivative = doc.at("dL").get<Vector>();
    op.right_derivative = doc.at("dR").get<Vector>();
    const auto rows = doc.at("A").get<std::vector<Vector>>();
    const std::size_t size = op.grid.size();
    if (op.norm_weights.size() != size || op.left_derivative.size() != size || op.right_derivative.size() != size ||
        rows.size() != size)
      throw DimensionMismatch("operator document sizes disagree with n");
    op.stiffness = Matrix(size, size);
    for (std::size_t i = 0; i < size; ++i) {
      if (rows[i].size() != size) throw DimensionMismatch("operator document row length");
      for (std::size_t j = 0; j < size; ++j) op.stiffness(i, j) = rows[i][j];
    }
    op.matrix = -1.0 * op.stiffness;
    for (std::size_t j = 0; j < size; ++j) {
      op.matrix(0, j) -= op.left_derivative[j];
      op.matrix(size - 1, j) += op.right_derivative[j];
    }
    for (std::size_t i = 0; i < size; ++i)
      for (double& v : op.matrix.row(i)) v /= op.norm_weights[i];
    return op;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed operator document: ") + e.what());
  }
}

Json discretization_json(const SatDiscretization& disc) {
  Json doc = operator_json(disc.op);
  doc["bc_left"] = to_string(disc.bc_left);
  doc["bc_right"] = to_string(disc.bc_right);
  doc["phi"] = disc.phi;
  doc["gamma"] = disc.gamma ? Json(*disc.gamma) : Json(nullptr);
  doc["mu"] = disc.mu ? Json(*disc.mu) : Json(nullptr);
  return doc;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ >= columns_) throw UsageError("CSV row has more cells than header columns");
  if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  out_ << format_number(value);
  return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw UsageError("CSV row has fewer cells than header columns");
  out_ << '\n';
  filled_ = 0;
}

}  // namespace sbp::io
