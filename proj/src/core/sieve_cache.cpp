#include "lsl/sieve_cache.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "lsl/error.hpp"

namespace lsl {

namespace {

constexpr char kMagic[4] = {'L', 'S', 'L', '1'};
constexpr std::size_t kHeaderSize = 4 + 2 + 8 + 1;

std::uint8_t encode_code(std::int8_t v) {
  switch (v) {
    case 0: return 0b00;
    case 1: return 0b01;
    case -1: return 0b11;
  }
  throw FormatError("value " + std::to_string(int(v)) + " has no 2-bit code");
}

}  // namespace

std::vector<std::uint8_t> encode_sieve_cache(const ValueTable& table, std::uint16_t version) {
  if (!table.integral()) throw ConfigError("class F tables are not cacheable");
  std::vector<std::uint8_t> out(kHeaderSize + (table.limit + 3) / 4, 0);
  std::memcpy(out.data(), kMagic, 4);
  out[4] = static_cast<std::uint8_t>(version & 0xff);
  out[5] = static_cast<std::uint8_t>(version >> 8);
  for (int i = 0; i < 8; ++i) out[6 + i] = static_cast<std::uint8_t>(table.limit >> (8 * i));
  out[14] = static_cast<std::uint8_t>(table.cls);
  std::uint8_t* body = out.data() + kHeaderSize;
  for (std::uint64_t n = 1; n <= table.limit; ++n) {
    const std::uint64_t k = n - 1;
    body[k / 4] |= static_cast<std::uint8_t>(encode_code(table.codes[n]) << (2 * (k % 4)));
  }
  return out;
}

ValueTable decode_sieve_cache(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("sieve cache truncated: header incomplete");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("sieve cache: bad magic bytes");
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kCacheFormatVersion)
    throw FormatError("sieve cache: unknown version " + std::to_string(version));
  std::uint64_t limit = 0;
  for (int i = 0; i < 8; ++i) limit |= std::uint64_t(bytes[6 + i]) << (8 * i);
  const std::uint8_t tag = bytes[14];
  if (tag != static_cast<std::uint8_t>(FunctionClass::F0) && tag != static_cast<std::uint8_t>(FunctionClass::F1))
    throw FormatError("sieve cache: unsupported class tag " + std::to_string(tag));
  const std::uint64_t body_size = (limit + 3) / 4;
  if (limit > (std::uint64_t(1) << 40) || bytes.size() - kHeaderSize < body_size)
    throw FormatError("sieve cache truncated: expected " + std::to_string(body_size) + " value bytes");
  if (bytes.size() - kHeaderSize > body_size) throw FormatError("sieve cache: trailing bytes after values");

  ValueTable table;
  table.limit = limit;
  table.cls = static_cast<FunctionClass>(tag);
  table.codes.assign(limit + 1, 0);
  const std::uint8_t* body = bytes.data() + kHeaderSize;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    const std::uint64_t k = n - 1;
    const unsigned code = (body[k / 4] >> (2 * (k % 4))) & 0b11;
    std::int8_t v;
    switch (code) {
      case 0b00: v = 0; break;
      case 0b01: v = 1; break;
      case 0b11: v = -1; break;
      default: throw FormatError("sieve cache: invalid code at n = " + std::to_string(n));
    }
    if (v == 0 && table.cls == FunctionClass::F1)
      throw FormatError("sieve cache: zero value in an F1 table at n = " + std::to_string(n));
    table.codes[n] = v;
  }
  // the padding bits of the final byte must be zero
  if (limit % 4 != 0 && (body[body_size - 1] >> (2 * (limit % 4))) != 0)
    throw FormatError("sieve cache: nonzero padding bits");
  return table;
}

void write_sieve_cache(const std::filesystem::path& path, const ValueTable& table) {
  const auto bytes = encode_sieve_cache(table);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed: " + path.string());
}

ValueTable read_sieve_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_sieve_cache(bytes);
}

}  // namespace lsl
