#ifndef OVPFRAME_JSON_IO_HPP_
#define OVPFRAME_JSON_IO_HPP_

#include <string>
#include <utility>

#include "json.hpp"
#include "ovpframe/frames.hpp"

namespace ovp {

using json = nlohmann::json;

// Malformed input; the message starts with the offending field path (or
// "line L, column C" for syntax errors).
class SchemaError : public OvpError {
 public:
  SchemaError(const std::string &field, const std::string &what)
      : OvpError(field + ": " + what), field_(field) {}
  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

// Canonical text: sorted keys, two-space indent, doubles as %.17g, the
// string "inf" for infinite exponents.
std::string dump_canonical(const json &j);

json matrix_to_json(const Matrix &M);
Matrix matrix_from_json(const json &j, const std::string &field);

json frame_to_json(const FramePair &f);
// `prefix` is prepended to field paths in error messages.
FramePair frame_from_json(const json &j, const std::string &prefix = "");

json pair_to_json(const FramePair &f, const FramePair &g);
std::pair<FramePair, FramePair> pair_from_json(const json &j);

// Parses text; syntax errors are reported as SchemaError with line/column.
json parse_text(const std::string &text);
json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

FramePair read_frame_file(const std::string &path);
void write_frame_file(const std::string &path, const FramePair &f);

}  // namespace ovp

#endif  // OVPFRAME_JSON_IO_HPP_
