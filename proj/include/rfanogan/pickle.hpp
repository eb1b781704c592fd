#pragma once

// Minimal, non-executing reader for the subset of the Python pickle format
// used to distribute numpy-array dictionaries (protocols 0-4). Only the
// numpy reconstruction globals and _codecs.encode are understood; any other
// global is rejected rather than interpreted.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rfanogan::pickle {

struct NdArray {
  std::vector<std::int64_t> shape;
  std::string dtype;    // numpy descr without byte order, e.g. "f4"
  char byte_order = '<';
  bool fortran_order = false;
  std::string data;     // raw element bytes
};

struct Value;
using Items = std::vector<Value>;
using DictItems = std::vector<std::pair<Value, Value>>;

struct Value {
  enum class Kind { none, boolean, integer, real, text, bytes, tuple, list, dict, global, dtype, ndarray };

  Kind kind = Kind::none;
  std::int64_t integer = 0;
  double real = 0.0;
  std::string str;  // text (UTF-8), bytes or dotted global name
  std::shared_ptr<Items> items;
  std::shared_ptr<DictItems> dict;
  std::shared_ptr<NdArray> array;

  bool is_string() const { return kind == Kind::text || kind == Kind::bytes; }
};

// Throws Error("malformed container: ...") on anything it cannot decode.
Value parse(std::string_view bytes);

}  // namespace rfanogan::pickle
