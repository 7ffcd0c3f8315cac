#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hazshift {

// Streaming JSON emitter used for every file the tool writes. Output is
// fully deterministic: keys appear in insertion order and doubles are printed
// with 17 significant digits so that values round-trip exactly.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }

  const std::string& str() const { return out_; }

  static std::string format_double(double v);

 private:
  void comma();
  std::string out_;
  std::vector<char> first_;  // one flag per open container
  bool pending_key_ = false;
};

// Writes `content` to `path` via a temporary file and an atomic rename, so a
// partial file is never observable at `path`.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace hazshift
