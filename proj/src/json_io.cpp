#include "ovpframe/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ovp {

namespace {

void dump(const json &j, std::string &out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) out += ",\n";
        first = false;
        out += pad_in + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line (matrix rows)
      bool scalars = true;
      for (const auto &v : j) scalars = scalars && !v.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad_in;
        dump(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isinf(v)) {
        out += v > 0 ? "\"inf\"" : "\"-inf\"";
        return;
      }
      if (std::isnan(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

double exponent_from_json(const json &j, const std::string &field) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInf;
  if (!j.is_number()) throw SchemaError(field, "must be a number or \"inf\"");
  return j.get<double>();
}

json exponent_to_json(double r) { return std::isinf(r) ? json("inf") : json(r); }

SpaceDesc space_from_json(const json &j, const std::string &field) {
  if (!j.is_object()) throw SchemaError(field, "must be an object with \"dim\" and \"r\"");
  if (!j.contains("dim")) throw SchemaError(field + ".dim", "missing");
  if (!j.contains("r")) throw SchemaError(field + ".r", "missing");
  const json &dj = j.at("dim");
  if (!dj.is_number_integer() || dj.get<long long>() < 1)
    throw SchemaError(field + ".dim", "must be an integer >= 1");
  const double r = exponent_from_json(j.at("r"), field + ".r");
  if (!(r >= 1.0)) throw SchemaError(field + ".r", "must lie in [1, inf]");
  ScalarField fld = ScalarField::Real;
  if (j.contains("field")) {
    const json &fj = j.at("field");
    if (fj == "complex") {
      fld = ScalarField::Complex;
    } else if (fj != "real") {
      throw SchemaError(field + ".field", "must be \"real\" or \"complex\"");
    }
  }
  return SpaceDesc{static_cast<Index>(dj.get<long long>()), r, fld};
}

json space_to_json(const SpaceDesc &s) {
  json j = {{"dim", s.dim}, {"r", exponent_to_json(s.norm_exp)}};
  if (s.field == ScalarField::Complex) j["field"] = "complex";
  return j;
}

std::string join(const std::string &prefix, const std::string &field) {
  return prefix.empty() ? field : prefix + "." + field;
}

}  // namespace

std::string dump_canonical(const json &j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

json matrix_to_json(const Matrix &M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json &j, const std::string &field) {
  if (!j.is_array() || j.empty()) throw SchemaError(field, "must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw SchemaError(field, "rows must be non-empty arrays");
  Matrix M(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json &row = j[i];
    std::ostringstream rf;
    rf << field << "[" << i << "]";
    if (!row.is_array() || row.size() != cols) throw SchemaError(rf.str(), "ragged row");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!row[k].is_number()) {
        std::ostringstream ef;
        ef << rf.str() << "[" << k << "]";
        throw SchemaError(ef.str(), "must be a number");
      }
      M(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
    }
  }
  return M;
}

json frame_to_json(const FramePair &f) {
  json A = json::array(), Psi = json::array();
  for (Index n = 0; n < f.N(); ++n) {
    A.push_back(matrix_to_json(f.A[n]));
    Psi.push_back(matrix_to_json(f.Psi[n]));
  }
  return json{{"A", A}, {"Psi", Psi}, {"X", space_to_json(f.X)}, {"Y", space_to_json(f.Y)},
              {"p", f.p}};
}

FramePair frame_from_json(const json &j, const std::string &prefix) {
  if (!j.is_object()) throw SchemaError(prefix.empty() ? "<root>" : prefix, "must be an object");
  for (const char *key : {"A", "Psi", "X", "Y", "p"})
    if (!j.contains(key)) throw SchemaError(join(prefix, key), "missing");
  const json &pj = j.at("p");
  if (!pj.is_number()) throw SchemaError(join(prefix, "p"), "must be a number");
  const double p = pj.get<double>();
  if (!(p >= 1.0) || std::isinf(p)) throw SchemaError(join(prefix, "p"), "must lie in [1, inf)");
  const SpaceDesc X = space_from_json(j.at("X"), join(prefix, "X"));
  const SpaceDesc Y = space_from_json(j.at("Y"), join(prefix, "Y"));
  std::vector<Matrix> A, Psi;
  for (const char *key : {"A", "Psi"}) {
    const json &list = j.at(key);
    const std::string field = join(prefix, key);
    if (!list.is_array() || list.empty()) throw SchemaError(field, "must be a non-empty array");
    const bool analysis_side = std::string(key) == "A";
    auto &dst = analysis_side ? A : Psi;
    const Index rows = analysis_side ? Y.dim : X.dim;
    const Index cols = analysis_side ? X.dim : Y.dim;
    for (std::size_t n = 0; n < list.size(); ++n) {
      std::ostringstream ef;
      ef << field << "[" << n << "]";
      Matrix M = matrix_from_json(list[n], ef.str());
      if (M.rows() != rows || M.cols() != cols) {
        std::ostringstream os;
        os << "is " << M.rows() << "x" << M.cols() << ", expected " << rows << "x" << cols;
        throw SchemaError(ef.str(), os.str());
      }
      dst.push_back(std::move(M));
    }
  }
  if (A.size() != Psi.size()) throw SchemaError(join(prefix, "Psi"), "length differs from A");
  return FramePair::make(std::move(A), std::move(Psi), p, X, Y);
}

json pair_to_json(const FramePair &f, const FramePair &g) {
  return json{{"f", frame_to_json(f)}, {"g", frame_to_json(g)}};
}

std::pair<FramePair, FramePair> pair_from_json(const json &j) {
  if (!j.is_object() || !j.contains("f") || !j.contains("g"))
    throw SchemaError("<root>", "pair files need \"f\" and \"g\"");
  return {frame_from_json(j.at("f"), "f"), frame_from_json(j.at("g"), "g")};
}

json parse_text(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    // translate the byte offset into line/column
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col;
    throw SchemaError(os.str(), "syntax error");
  }
}

json read_json_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OvpError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OvpError("cannot write " + path);
  out << text;
}

FramePair read_frame_file(const std::string &path) { return frame_from_json(read_json_file(path)); }

void write_frame_file(const std::string &path, const FramePair &f) {
  write_text_file(path, dump_canonical(frame_to_json(f)));
}

}  // namespace ovp
