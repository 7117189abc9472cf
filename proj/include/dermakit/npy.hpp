#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dermakit/error.hpp"

namespace dermakit {

enum class Dtype { U8, I32, F32, F64 };

inline std::size_t dtype_itemsize(Dtype d) {
  switch (d) {
    case Dtype::U8: return 1;
    case Dtype::I32: return 4;
    case Dtype::F32: return 4;
    case Dtype::F64: return 8;
  }
  return 0;
}

inline const char* dtype_descr(Dtype d) {
  switch (d) {
    case Dtype::U8: return "|u1";
    case Dtype::I32: return "<i4";
    case Dtype::F32: return "<f4";
    case Dtype::F64: return "<f8";
  }
  return "";
}

/// Parsed n-dimensional array. The payload is kept as raw little-endian
/// bytes in file order; typed views are obtained through as<T>().
struct NdArray {
  Dtype dtype = Dtype::U8;
  std::vector<std::int64_t> shape;
  std::vector<std::uint8_t> data;
  bool fortran_order = false;

  std::int64_t element_count() const {
    std::int64_t n = 1;
    for (auto e : shape) n *= e;
    return n;
  }

  template <typename T>
  std::span<const T> as() const {
    return {reinterpret_cast<const T*>(data.data()), data.size() / sizeof(T)};
  }

  template <typename T>
  std::span<T> as() {
    return {reinterpret_cast<T*>(data.data()), data.size() / sizeof(T)};
  }

  static NdArray make(Dtype dtype, std::vector<std::int64_t> shape) {
    NdArray a;
    a.dtype = dtype;
    a.shape = std::move(shape);
    a.data.resize(static_cast<std::size_t>(a.element_count()) *
                  dtype_itemsize(dtype));
    return a;
  }
};

namespace npy_detail {

inline std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void push_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  v.push_back(static_cast<std::uint8_t>(x & 0xff));
  v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xff));
}

inline void push_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  for (int i = 0; i < 4; ++i)
    v.push_back(static_cast<std::uint8_t>((x >> (8 * i)) & 0xff));
}

inline Dtype dtype_from_descr(std::string_view descr) {
  if (descr == "|u1") return Dtype::U8;
  if (descr == "<i4") return Dtype::I32;
  if (descr == "<f4") return Dtype::F32;
  if (descr == "<f8") return Dtype::F64;
  fail(ErrorKind::UnsupportedDtype, "descr '" + std::string(descr) + "'");
}

struct HeaderScanner {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n'))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  std::string quoted() {
    skip_ws();
    if (pos >= s.size() || (s[pos] != '\'' && s[pos] != '"'))
      fail(ErrorKind::HeaderMalformed, "expected quoted string in header");
    const char q = s[pos++];
    std::string out;
    while (pos < s.size() && s[pos] != q) out.push_back(s[pos++]);
    if (pos >= s.size()) fail(ErrorKind::HeaderMalformed, "unterminated string");
    ++pos;
    return out;
  }

  bool boolean() {
    skip_ws();
    if (s.compare(pos, 4, "True") == 0) {
      pos += 4;
      return true;
    }
    if (s.compare(pos, 5, "False") == 0) {
      pos += 5;
      return false;
    }
    fail(ErrorKind::HeaderMalformed, "expected True/False in header");
  }

  std::vector<std::int64_t> tuple() {
    if (!eat('(')) fail(ErrorKind::HeaderMalformed, "expected shape tuple");
    std::vector<std::int64_t> out;
    for (;;) {
      if (eat(')')) break;
      skip_ws();
      std::int64_t v = 0;
      bool any = false;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        v = v * 10 + (s[pos] - '0');
        ++pos;
        any = true;
      }
      if (!any) fail(ErrorKind::HeaderMalformed, "bad integer in shape tuple");
      out.push_back(v);
      if (eat(',')) continue;
      if (eat(')')) break;
      fail(ErrorKind::HeaderMalformed, "bad shape tuple");
    }
    return out;
  }
};

inline std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> src,
                                             std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK)
    fail(ErrorKind::CorruptArchive, "zlib init failed");
  zs.next_in = const_cast<Bytef*>(src.data());
  zs.avail_in = static_cast<uInt>(src.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected)
    fail(ErrorKind::CorruptArchive, "deflate stream corrupt or size mismatch");
  return out;
}

}  // namespace npy_detail

/// Parses an NPY v1.0/v2.0 buffer. Supported dtypes: |u1, <i4, <f4, <f8.
/// Trailing bytes beyond the declared payload are ignored, matching the
/// reference reader's tolerance.
inline NdArray parse_npy(std::span<const std::uint8_t> bytes) {
  static const std::uint8_t magic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
  if (bytes.size() < 8 || std::memcmp(bytes.data(), magic, 6) != 0)
    fail(ErrorKind::BadMagic, "not an NPY file");
  const int major = bytes[6];
  const int minor = bytes[7];
  if ((major != 1 && major != 2) || minor != 0)
    fail(ErrorKind::HeaderMalformed,
         "unsupported NPY version " + std::to_string(major) + "." +
             std::to_string(minor));

  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    if (bytes.size() < 10) fail(ErrorKind::HeaderMalformed, "truncated header");
    header_len = npy_detail::read_u16(bytes.data() + 8);
    header_start = 10;
  } else {
    if (bytes.size() < 12) fail(ErrorKind::HeaderMalformed, "truncated header");
    header_len = npy_detail::read_u32(bytes.data() + 8);
    header_start = 12;
  }
  if (bytes.size() < header_start + header_len)
    fail(ErrorKind::HeaderMalformed, "header extends past end of buffer");

  const std::string_view header(
      reinterpret_cast<const char*>(bytes.data() + header_start), header_len);

  npy_detail::HeaderScanner sc{header};
  if (!sc.eat('{')) fail(ErrorKind::HeaderMalformed, "expected dict");
  std::string descr;
  bool have_descr = false, have_fortran = false, have_shape = false;
  bool fortran = false;
  std::vector<std::int64_t> shape;
  for (;;) {
    if (sc.eat('}')) break;
    const std::string key = sc.quoted();
    if (!sc.eat(':')) fail(ErrorKind::HeaderMalformed, "expected ':'");
    if (key == "descr") {
      descr = sc.quoted();
      have_descr = true;
    } else if (key == "fortran_order") {
      fortran = sc.boolean();
      have_fortran = true;
    } else if (key == "shape") {
      shape = sc.tuple();
      have_shape = true;
    } else {
      fail(ErrorKind::HeaderMalformed, "unexpected header key '" + key + "'");
    }
    sc.eat(',');
  }
  if (!have_descr || !have_fortran || !have_shape)
    fail(ErrorKind::HeaderMalformed, "missing descr/fortran_order/shape");

  NdArray arr;
  arr.dtype = npy_detail::dtype_from_descr(descr);
  arr.shape = std::move(shape);
  arr.fortran_order = fortran;

  // Overflow guard: reject shapes whose element count cannot possibly fit
  // in the buffer anyway.
  constexpr std::int64_t kMaxElements = std::int64_t{1} << 40;
  std::int64_t count = 1;
  for (auto e : arr.shape) {
    if (e > kMaxElements || (e > 0 && count > kMaxElements / e))
      fail(ErrorKind::HeaderMalformed, "shape too large");
    count *= e;
  }

  const std::size_t needed = static_cast<std::size_t>(count) *
                             dtype_itemsize(arr.dtype);
  const std::size_t payload_start = header_start + header_len;
  if (bytes.size() - payload_start < needed)
    fail(ErrorKind::PayloadTruncated,
         "need " + std::to_string(needed) + " payload bytes, have " +
             std::to_string(bytes.size() - payload_start));
  arr.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(payload_start),
                  bytes.begin() + static_cast<std::ptrdiff_t>(payload_start + needed));
  return arr;
}

/// Serializes to NPY v1.0 with the header padded so the total prefix
/// length is a multiple of 64. parse_npy(write_npy(a)) reproduces a
/// bit for bit.
inline std::vector<std::uint8_t> write_npy(const NdArray& arr) {
  std::string dict = "{'descr': '";
  dict += dtype_descr(arr.dtype);
  dict += "', 'fortran_order': ";
  dict += arr.fortran_order ? "True" : "False";
  dict += ", 'shape': (";
  for (std::size_t i = 0; i < arr.shape.size(); ++i) {
    dict += std::to_string(arr.shape[i]);
    if (arr.shape.size() == 1) {
      dict += ",";
    } else if (i + 1 < arr.shape.size()) {
      dict += ", ";
    }
  }
  dict += "), }";

  const std::size_t base = 10;  // magic + version + u16 length
  const std::size_t unpadded = base + dict.size() + 1;
  const std::size_t total = (unpadded + 63) / 64 * 64;
  const std::size_t header_len = total - base;

  std::vector<std::uint8_t> out;
  out.reserve(total + arr.data.size());
  const std::uint8_t magic[8] = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
  out.insert(out.end(), magic, magic + 8);
  npy_detail::push_u16(out, static_cast<std::uint16_t>(header_len));
  out.insert(out.end(), dict.begin(), dict.end());
  out.insert(out.end(), total - unpadded, ' ');
  out.push_back('\n');
  out.insert(out.end(), arr.data.begin(), arr.data.end());
  return out;
}

/// Parses a ZIP container of NPY entries (the NPZ layout). Entries that
/// are not *.npy are skipped. Stored and deflate compression only.
inline std::map<std::string, NdArray> parse_npz(
    std::span<const std::uint8_t> bytes) {
  using namespace npy_detail;
  constexpr std::uint32_t kEocdSig = 0x06054b50;
  constexpr std::uint32_t kCdSig = 0x02014b50;
  constexpr std::uint32_t kLocalSig = 0x04034b50;

  if (bytes.size() < 22) fail(ErrorKind::NotAZip, "buffer too small for a zip");

  // End-of-central-directory: scan backwards allowing a trailing comment.
  std::size_t eocd = std::string::npos;
  const std::size_t lowest =
      bytes.size() >= 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
  for (std::size_t i = bytes.size() - 22 + 1; i-- > lowest;) {
    if (read_u32(bytes.data() + i) == kEocdSig) {
      const std::size_t comment_len = read_u16(bytes.data() + i + 20);
      if (i + 22 + comment_len == bytes.size()) {
        eocd = i;
        break;
      }
    }
  }
  if (eocd == std::string::npos)
    fail(ErrorKind::NotAZip, "no end-of-central-directory record");

  const std::size_t entry_count = read_u16(bytes.data() + eocd + 10);
  const std::size_t cd_offset = read_u32(bytes.data() + eocd + 16);
  if (entry_count == 0xffff || cd_offset == 0xffffffff)
    fail(ErrorKind::CorruptArchive, "zip64 archives are not supported");

  std::map<std::string, NdArray> result;
  std::size_t p = cd_offset;
  for (std::size_t e = 0; e < entry_count; ++e) {
    if (p + 46 > bytes.size() || read_u32(bytes.data() + p) != kCdSig)
      fail(ErrorKind::CorruptArchive, "bad central directory entry");
    const std::uint16_t method = read_u16(bytes.data() + p + 10);
    const std::uint32_t crc = read_u32(bytes.data() + p + 16);
    const std::size_t csize = read_u32(bytes.data() + p + 20);
    const std::size_t usize = read_u32(bytes.data() + p + 24);
    const std::size_t nlen = read_u16(bytes.data() + p + 28);
    const std::size_t xlen = read_u16(bytes.data() + p + 30);
    const std::size_t clen = read_u16(bytes.data() + p + 32);
    const std::size_t local_off = read_u32(bytes.data() + p + 42);
    if (p + 46 + nlen > bytes.size())
      fail(ErrorKind::CorruptArchive, "central directory name out of range");
    const std::string name(reinterpret_cast<const char*>(bytes.data() + p + 46),
                           nlen);
    p += 46 + nlen + xlen + clen;

    if (name.empty() || name.back() == '/') continue;
    if (name.size() < 4 || name.substr(name.size() - 4) != ".npy") continue;

    if (local_off + 30 > bytes.size() ||
        read_u32(bytes.data() + local_off) != kLocalSig)
      fail(ErrorKind::CorruptArchive, "bad local header for '" + name + "'");
    const std::size_t lnlen = read_u16(bytes.data() + local_off + 26);
    const std::size_t lxlen = read_u16(bytes.data() + local_off + 28);
    const std::size_t data_off = local_off + 30 + lnlen + lxlen;
    if (data_off + csize > bytes.size())
      fail(ErrorKind::CorruptArchive, "entry data out of range for '" + name + "'");

    // A deflate stream cannot expand by more than ~1032x; anything beyond
    // that in a corrupt central directory would be a pointless allocation.
    if (usize > csize * 1040 + 4096)
      fail(ErrorKind::CorruptArchive, "implausible entry size for '" + name + "'");

    std::span<const std::uint8_t> comp(bytes.data() + data_off, csize);
    std::vector<std::uint8_t> raw;
    if (method == 0) {
      if (csize != usize)
        fail(ErrorKind::CorruptArchive, "stored entry size mismatch for '" + name + "'");
      raw.assign(comp.begin(), comp.end());
    } else if (method == 8) {
      raw = inflate_raw(comp, usize);
    } else {
      fail(ErrorKind::UnsupportedCompression,
           "method " + std::to_string(method) + " for '" + name + "'");
    }

    const auto actual_crc = static_cast<std::uint32_t>(
        crc32(0L, raw.data(), static_cast<uInt>(raw.size())));
    if (actual_crc != crc)
      fail(ErrorKind::CorruptArchive, "crc mismatch for '" + name + "'");

    try {
      result.emplace(name.substr(0, name.size() - 4), parse_npy(raw));
    } catch (const Error& err) {
      fail(err.kind(), "entry '" + name + "': " + err.what());
    }
  }
  return result;
}

/// Writes an NPZ container with stored (uncompressed) entries and fixed
/// timestamps, so identical inputs serialize to identical bytes.
inline std::vector<std::uint8_t> write_npz(
    const std::vector<std::pair<std::string, NdArray>>& entries) {
  using namespace npy_detail;
  std::vector<std::uint8_t> out;
  struct CdRecord {
    std::string name;
    std::uint32_t crc, size, offset;
  };
  std::vector<CdRecord> cd;

  for (const auto& [key, arr] : entries) {
    const std::string name = key + ".npy";
    const std::vector<std::uint8_t> payload = write_npy(arr);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
    const auto offset = static_cast<std::uint32_t>(out.size());

    push_u32(out, 0x04034b50);
    push_u16(out, 20);      // version needed
    push_u16(out, 0);       // flags
    push_u16(out, 0);       // method: stored
    push_u16(out, 0);       // mod time
    push_u16(out, 0x0021);  // mod date: 1980-01-01
    push_u32(out, crc);
    push_u32(out, static_cast<std::uint32_t>(payload.size()));
    push_u32(out, static_cast<std::uint32_t>(payload.size()));
    push_u16(out, static_cast<std::uint16_t>(name.size()));
    push_u16(out, 0);  // extra length
    out.insert(out.end(), name.begin(), name.end());
    out.insert(out.end(), payload.begin(), payload.end());

    cd.push_back({name, crc, static_cast<std::uint32_t>(payload.size()), offset});
  }

  const auto cd_start = static_cast<std::uint32_t>(out.size());
  for (const auto& rec : cd) {
    push_u32(out, 0x02014b50);
    push_u16(out, 20);  // version made by
    push_u16(out, 20);  // version needed
    push_u16(out, 0);   // flags
    push_u16(out, 0);   // method
    push_u16(out, 0);   // mod time
    push_u16(out, 0x0021);
    push_u32(out, rec.crc);
    push_u32(out, rec.size);
    push_u32(out, rec.size);
    push_u16(out, static_cast<std::uint16_t>(rec.name.size()));
    push_u16(out, 0);  // extra
    push_u16(out, 0);  // comment
    push_u16(out, 0);  // disk number
    push_u16(out, 0);  // internal attrs
    push_u32(out, 0);  // external attrs
    push_u32(out, rec.offset);
    out.insert(out.end(), rec.name.begin(), rec.name.end());
  }
  const auto cd_end = static_cast<std::uint32_t>(out.size());

  push_u32(out, 0x06054b50);
  push_u16(out, 0);
  push_u16(out, 0);
  push_u16(out, static_cast<std::uint16_t>(cd.size()));
  push_u16(out, static_cast<std::uint16_t>(cd.size()));
  push_u32(out, cd_end - cd_start);
  push_u32(out, cd_start);
  push_u16(out, 0);  // comment length
  return out;
}

}  // namespace dermakit
