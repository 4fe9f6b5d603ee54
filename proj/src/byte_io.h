#pragma once

// Little-endian byte stream helpers shared by the container and codec code.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radtex/errors.h"

namespace radtex {
struct AtlasHeader;
}

namespace radtex::detail {

class ByteWriter {
 public:
  void u8(uint8_t v) { bytes_.push_back(v); }
  void u32(uint32_t v) {
    for (int b = 0; b < 4; ++b) bytes_.push_back(static_cast<uint8_t>(v >> (8 * b)));
  }
  void u64(uint64_t v) {
    for (int b = 0; b < 8; ++b) bytes_.push_back(static_cast<uint8_t>(v >> (8 * b)));
  }
  // LEB128.
  void varint(uint64_t v) {
    while (v >= 0x80) {
      bytes_.push_back(static_cast<uint8_t>(v | 0x80));
      v >>= 7;
    }
    bytes_.push_back(static_cast<uint8_t>(v));
  }
  void raw(std::span<const unsigned char> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

  std::vector<unsigned char>& bytes() { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<uint32_t>(bytes_[pos_++]) << (8 * b);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<uint64_t>(bytes_[pos_++]) << (8 * b);
    return v;
  }
  uint64_t varint() {
    uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const uint8_t byte = u8();
      v |= static_cast<uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) return v;
    }
    throw FormatError(FormatError::Kind::kCodec, "varint longer than 64 bits");
  }
  std::span<const unsigned char> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw FormatError(FormatError::Kind::kTruncated, "truncated data");
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

// RADX magic, version and header fields (everything before the payload length).
void write_container_header(const AtlasHeader& header, ByteWriter& out);

}  // namespace radtex::detail
