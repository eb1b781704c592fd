#include <bit>
#include <charconv>
#include <cstring>
#include <map>
#include <optional>

#include "rfanogan/error.hpp"
#include "rfanogan/pickle.hpp"

namespace rfanogan::pickle {
namespace {

[[noreturn]] void fail(const std::string& why) { throw Error("malformed container: pickle: " + why); }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// UTF-8 text whose code points are all below 256 -> latin-1 bytes.
std::string utf8_to_latin1(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t n = 0; n < text.size();) {
    const auto c = static_cast<unsigned char>(text[n]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      n += 1;
    } else if ((c & 0xE0) == 0xC0 && n + 1 < text.size()) {
      const std::uint32_t cp = ((c & 0x1FU) << 6) | (static_cast<unsigned char>(text[n + 1]) & 0x3FU);
      if (cp > 0xFF) fail("latin-1 encode of a code point above 255");
      out.push_back(static_cast<char>(cp));
      n += 2;
    } else {
      fail("latin-1 encode of a code point above 255");
    }
  }
  return out;
}

Value make(Value::Kind kind) {
  Value v;
  v.kind = kind;
  return v;
}

Value make_string(Value::Kind kind, std::string s) {
  Value v = make(kind);
  v.str = std::move(s);
  return v;
}

Value make_int(std::int64_t i) {
  Value v = make(Value::Kind::integer);
  v.integer = i;
  return v;
}

Value make_sequence(Value::Kind kind, Items items) {
  Value v = make(kind);
  v.items = std::make_shared<Items>(std::move(items));
  return v;
}

class Machine {
 public:
  explicit Machine(std::string_view bytes) : in_(bytes) {}

  Value run() {
    while (true) {
      const auto op = static_cast<unsigned char>(take(1)[0]);
      switch (op) {
        case 0x80: take(1); break;   // PROTO
        case 0x95: take(8); break;   // FRAME
        case '.': return pop();      // STOP
        case '(': marks_.push_back(stack_.size()); break;
        case 'N': stack_.push_back(make(Value::Kind::none)); break;
        case 0x88: case 0x89: {
          Value v = make(Value::Kind::boolean);
          v.integer = op == 0x88 ? 1 : 0;
          stack_.push_back(v);
          break;
        }
        case 'J': stack_.push_back(make_int(static_cast<std::int32_t>(le(4)))); break;
        case 'K': stack_.push_back(make_int(static_cast<std::int64_t>(le(1)))); break;
        case 'M': stack_.push_back(make_int(static_cast<std::int64_t>(le(2)))); break;
        case 0x8a: stack_.push_back(make_int(long1(static_cast<std::size_t>(le(1))))); break;
        case 'I': int_line(); break;
        case 'L': {
          auto text = line();
          if (!text.empty() && text.back() == 'L') text.remove_suffix(1);
          stack_.push_back(make_int(parse_int(text)));
          break;
        }
        case 'G': {
          Value v = make(Value::Kind::real);
          v.real = std::bit_cast<double>(be64());
          stack_.push_back(v);
          break;
        }
        case 'F': {
          Value v = make(Value::Kind::real);
          v.real = std::stod(std::string(line()));
          stack_.push_back(v);
          break;
        }
        case 'S': stack_.push_back(make_string(Value::Kind::bytes, unquote(line()))); break;
        case 'V': stack_.push_back(make_string(Value::Kind::text, raw_unicode_escape(line()))); break;
        case 'U': stack_.push_back(make_string(Value::Kind::bytes, std::string(take(le(1))))); break;
        case 'T': stack_.push_back(make_string(Value::Kind::bytes, std::string(take(le(4))))); break;
        case 'C': stack_.push_back(make_string(Value::Kind::bytes, std::string(take(le(1))))); break;
        case 'B': stack_.push_back(make_string(Value::Kind::bytes, std::string(take(le(4))))); break;
        case 0x8e: stack_.push_back(make_string(Value::Kind::bytes, std::string(take(le(8))))); break;
        case 0x8c: stack_.push_back(make_string(Value::Kind::text, std::string(take(le(1))))); break;
        case 'X': stack_.push_back(make_string(Value::Kind::text, std::string(take(le(4))))); break;
        case 0x8d: stack_.push_back(make_string(Value::Kind::text, std::string(take(le(8))))); break;
        case ')': stack_.push_back(make_sequence(Value::Kind::tuple, {})); break;
        case ']': stack_.push_back(make_sequence(Value::Kind::list, {})); break;
        case '}': {
          Value v = make(Value::Kind::dict);
          v.dict = std::make_shared<DictItems>();
          stack_.push_back(v);
          break;
        }
        case 't': stack_.push_back(make_sequence(Value::Kind::tuple, pop_mark())); break;
        case 'l': stack_.push_back(make_sequence(Value::Kind::list, pop_mark())); break;
        case 0x85: case 0x86: case 0x87: {
          const std::size_t n = op - 0x84U;
          if (stack_.size() < n) fail("stack underflow in TUPLEn");
          Items items(stack_.end() - static_cast<std::ptrdiff_t>(n), stack_.end());
          stack_.resize(stack_.size() - n);
          stack_.push_back(make_sequence(Value::Kind::tuple, std::move(items)));
          break;
        }
        case 'd': {
          auto items = pop_mark();
          if (items.size() % 2 != 0) fail("odd item count in DICT");
          Value v = make(Value::Kind::dict);
          v.dict = std::make_shared<DictItems>();
          for (std::size_t k = 0; k < items.size(); k += 2) v.dict->emplace_back(items[k], items[k + 1]);
          stack_.push_back(v);
          break;
        }
        case 's': {
          Value value = pop();
          Value key = pop();
          dict_top()->emplace_back(std::move(key), std::move(value));
          break;
        }
        case 'u': {
          auto items = pop_mark();
          if (items.size() % 2 != 0) fail("odd item count in SETITEMS");
          auto* d = dict_top();
          for (std::size_t k = 0; k < items.size(); k += 2) d->emplace_back(items[k], items[k + 1]);
          break;
        }
        case 'a': {
          Value v = pop();
          list_top()->push_back(std::move(v));
          break;
        }
        case 'e': {
          auto items = pop_mark();
          auto* l = list_top();
          l->insert(l->end(), items.begin(), items.end());
          break;
        }
        case 'p': memo_[static_cast<std::uint64_t>(parse_int(line()))] = top(); break;
        case 'q': memo_[le(1)] = top(); break;
        case 'r': memo_[le(4)] = top(); break;
        case 0x94: memo_[memo_.size()] = top(); break;
        case 'g': stack_.push_back(memo_get(static_cast<std::uint64_t>(parse_int(line())))); break;
        case 'h': stack_.push_back(memo_get(le(1))); break;
        case 'j': stack_.push_back(memo_get(le(4))); break;
        case 'c': {
          const auto module = line();
          const auto name = line();
          stack_.push_back(make_string(Value::Kind::global, std::string(module) + "." + std::string(name)));
          break;
        }
        case 0x93: {
          Value name = pop();
          Value module = pop();
          if (!name.is_string() || !module.is_string()) fail("STACK_GLOBAL needs string operands");
          stack_.push_back(make_string(Value::Kind::global, module.str + "." + name.str));
          break;
        }
        case 'R': {
          Value args = pop();
          Value callable = pop();
          stack_.push_back(reduce(callable, args));
          break;
        }
        case 'b': {
          Value state = pop();
          build(top(), state);
          break;
        }
        case '0': pop(); break;
        case '2': stack_.push_back(top()); break;
        default: fail("unsupported opcode 0x" + hex(op));
      }
    }
  }

 private:
  static std::string hex(unsigned value) {
    static constexpr char kHex[] = "0123456789abcdef";
    return {kHex[(value >> 4) & 0xF], kHex[value & 0xF]};
  }

  std::string_view take(std::uint64_t n) {
    if (n > in_.size() - pos_) fail("truncated stream");
    auto out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t le(int n) {
    const auto bytes = take(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int k = n - 1; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes[static_cast<std::size_t>(k)]);
    return v;
  }

  std::uint64_t be64() {
    const auto bytes = take(8);
    std::uint64_t v = 0;
    for (char c : bytes) v = (v << 8) | static_cast<unsigned char>(c);
    return v;
  }

  std::int64_t long1(std::size_t n) {
    if (n > 8) fail("LONG1 wider than 64 bits");
    const auto bytes = take(n);
    std::uint64_t v = 0;
    for (std::size_t k = n; k-- > 0;) v = (v << 8) | static_cast<unsigned char>(bytes[k]);
    if (n > 0 && n < 8 && (static_cast<unsigned char>(bytes[n - 1]) & 0x80)) v -= (std::uint64_t{1} << (8 * n));
    return static_cast<std::int64_t>(v);
  }

  std::string_view line() {
    const auto end = in_.find('\n', pos_);
    if (end == std::string_view::npos) fail("unterminated text line");
    auto out = in_.substr(pos_, end - pos_);
    pos_ = end + 1;
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    return out;
  }

  static std::int64_t parse_int(std::string_view text) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) fail("bad integer literal");
    return v;
  }

  void int_line() {
    const auto text = line();
    if (text == "01" || text == "00") {
      Value v = make(Value::Kind::boolean);
      v.integer = text == "01" ? 1 : 0;
      stack_.push_back(v);
    } else {
      stack_.push_back(make_int(parse_int(text)));
    }
  }

  // Python 2 repr() of a str: quoted, with backslash escapes.
  static std::string unquote(std::string_view text) {
    if (text.size() < 2 || (text.front() != '\'' && text.front() != '"') || text.back() != text.front()) {
      fail("STRING operand is not quoted");
    }
    text = text.substr(1, text.size() - 2);
    std::string out;
    out.reserve(text.size());
    for (std::size_t n = 0; n < text.size(); ++n) {
      if (text[n] != '\\') {
        out.push_back(text[n]);
        continue;
      }
      if (++n >= text.size()) fail("dangling escape");
      const char c = text[n];
      switch (c) {
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'a': out.push_back('\a'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'v': out.push_back('\v'); break;
        case '\\': case '\'': case '"': out.push_back(c); break;
        case 'x': {
          if (n + 2 >= text.size()) fail("short \\x escape");
          unsigned v = 0;
          const auto [ptr, ec] = std::from_chars(text.data() + n + 1, text.data() + n + 3, v, 16);
          if (ec != std::errc{} || ptr != text.data() + n + 3) fail("bad \\x escape");
          out.push_back(static_cast<char>(v));
          n += 2;
          break;
        }
        default:
          if (c >= '0' && c <= '7') {
            unsigned v = 0;
            std::size_t k = 0;
            while (k < 3 && n + k < text.size() && text[n + k] >= '0' && text[n + k] <= '7') {
              v = v * 8 + static_cast<unsigned>(text[n + k] - '0');
              ++k;
            }
            out.push_back(static_cast<char>(v & 0xFF));
            n += k - 1;
          } else {
            out.push_back('\\');
            out.push_back(c);
          }
      }
    }
    return out;
  }

  // raw-unicode-escape: bytes are latin-1 code points, \uXXXX / \UXXXXXXXX escapes.
  static std::string raw_unicode_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t n = 0; n < text.size(); ++n) {
      const auto c = static_cast<unsigned char>(text[n]);
      if (c == '\\' && n + 1 < text.size() && (text[n + 1] == 'u' || text[n + 1] == 'U')) {
        const std::size_t digits = text[n + 1] == 'u' ? 4 : 8;
        if (n + 1 + digits >= text.size()) fail("short unicode escape");
        std::uint32_t cp = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + n + 2, text.data() + n + 2 + digits, cp, 16);
        if (ec != std::errc{} || ptr != text.data() + n + 2 + digits) fail("bad unicode escape");
        append_utf8(out, cp);
        n += 1 + digits;
      } else {
        append_utf8(out, c);
      }
    }
    return out;
  }

  Value pop() {
    if (stack_.empty() || (!marks_.empty() && stack_.size() == marks_.back())) fail("stack underflow");
    Value v = std::move(stack_.back());
    stack_.pop_back();
    return v;
  }

  Value& top() {
    if (stack_.empty()) fail("stack underflow");
    return stack_.back();
  }

  Items pop_mark() {
    if (marks_.empty()) fail("missing MARK");
    const auto mark = marks_.back();
    marks_.pop_back();
    Items items(stack_.begin() + static_cast<std::ptrdiff_t>(mark), stack_.end());
    stack_.resize(mark);
    return items;
  }

  DictItems* dict_top() {
    auto& v = top();
    if (v.kind != Value::Kind::dict) fail("SETITEM target is not a dict");
    return v.dict.get();
  }

  Items* list_top() {
    auto& v = top();
    if (v.kind != Value::Kind::list) fail("APPEND target is not a list");
    return v.items.get();
  }

  Value memo_get(std::uint64_t key) {
    const auto it = memo_.find(key);
    if (it == memo_.end()) fail("memo key " + std::to_string(key) + " not found");
    return it->second;
  }

  static bool is_reconstruct(const std::string& name) {
    return name == "numpy.core.multiarray._reconstruct" || name == "numpy._core.multiarray._reconstruct";
  }

  Value reduce(const Value& callable, const Value& args) {
    if (callable.kind != Value::Kind::global || args.kind != Value::Kind::tuple) fail("unsupported REDUCE");
    const auto& name = callable.str;
    const auto& a = *args.items;
    if (is_reconstruct(name)) {
      Value v = make(Value::Kind::ndarray);
      v.array = std::make_shared<NdArray>();
      return v;
    }
    if (name == "numpy.dtype") {
      if (a.empty() || !a[0].is_string()) fail("numpy.dtype without descr");
      // Shared so a memoised copy sees the byte order set by a later BUILD.
      Value v = make(Value::Kind::dtype);
      v.array = std::make_shared<NdArray>();
      v.array->dtype = a[0].str;
      v.array->byte_order = '=';
      return v;
    }
    if (name == "_codecs.encode") {
      if (a.size() != 2 || !a[0].is_string() || !a[1].is_string()) fail("unexpected _codecs.encode arguments");
      if (a[1].str != "latin1" && a[1].str != "latin-1") fail("unsupported encoding " + a[1].str);
      return make_string(Value::Kind::bytes, utf8_to_latin1(a[0].str));
    }
    fail("unsupported global " + name);
  }

  void build(Value& target, const Value& state) {
    if (state.kind != Value::Kind::tuple) fail("BUILD state is not a tuple");
    const auto& s = *state.items;
    if (target.kind == Value::Kind::dtype) {
      if (s.size() >= 2 && s[1].is_string() && s[1].str.size() == 1) target.array->byte_order = s[1].str[0];
      return;
    }
    if (target.kind != Value::Kind::ndarray) fail("BUILD on unsupported object");
    // (version, shape, dtype, is_fortran, data) or the older 4-tuple without version.
    const std::size_t off = s.size() == 5 ? 1 : 0;
    if (s.size() != 4 + off) fail("unexpected ndarray state");
    const auto& shape = s[off];
    const auto& dtype = s[off + 1];
    const auto& fortran = s[off + 2];
    const auto& data = s[off + 3];
    if (shape.kind != Value::Kind::tuple || dtype.kind != Value::Kind::dtype || !data.is_string()) {
      fail("unexpected ndarray state layout");
    }
    auto& arr = *target.array;
    for (const auto& d : *shape.items) {
      if (d.kind != Value::Kind::integer || d.integer < 0) fail("bad ndarray dimension");
      arr.shape.push_back(d.integer);
    }
    arr.dtype = dtype.array->dtype;
    if (!arr.dtype.empty() && (arr.dtype[0] == '<' || arr.dtype[0] == '>' || arr.dtype[0] == '|')) {
      arr.byte_order = arr.dtype[0];
      arr.dtype.erase(0, 1);
    } else {
      arr.byte_order = dtype.array->byte_order == '=' ? '<' : dtype.array->byte_order;
    }
    arr.fortran_order = fortran.integer != 0;
    arr.data = data.kind == Value::Kind::text ? utf8_to_latin1(data.str) : data.str;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::vector<Value> stack_;
  std::vector<std::size_t> marks_;
  std::map<std::uint64_t, Value> memo_;
};

}  // namespace

Value parse(std::string_view bytes) {
  if (bytes.empty()) fail("empty stream");
  return Machine(bytes).run();
}

}  // namespace rfanogan::pickle
