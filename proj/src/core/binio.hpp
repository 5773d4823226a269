#pragma once
// Little-endian binary file helpers shared by the mask and graph containers.

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace snntopo {

class BinWriter {
public:
  explicit BinWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    require(out_.good(), errc::io_error, "cannot open " + path + " for writing");
  }

  void bytes(const void* p, size_t n) { out_.write(static_cast<const char*>(p), n); }
  void u8(u8 v) { bytes(&v, 1); }
  void u32v(u32 v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64v(u64 v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64v(std::bit_cast<u64>(v)); }
  void str(const std::string& s) {
    u32v(static_cast<u32>(s.size()));
    bytes(s.data(), s.size());
  }
  void u64s(const std::vector<u64>& v) {
    for (u64 x : v) u64v(x);
  }
  void f64s(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }

  void close() {
    out_.close();
    require(out_.good(), errc::io_error, "write failed for " + path_);
  }

private:
  std::ofstream out_;
  std::string path_;
};

class BinReader {
public:
  explicit BinReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    require(in_.good(), errc::io_error, "cannot open " + path);
  }

  void bytes(void* p, size_t n) {
    in_.read(static_cast<char*>(p), n);
    require(static_cast<size_t>(in_.gcount()) == n, errc::parse_error,
            path_ + ": truncated file");
  }
  u8 read_u8() {
    u8 v;
    bytes(&v, 1);
    return v;
  }
  u32 read_u32() {
    unsigned char b[4];
    bytes(b, 4);
    u32 v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<u32>(b[i]) << (8 * i);
    return v;
  }
  u64 read_u64() {
    unsigned char b[8];
    bytes(b, 8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(b[i]) << (8 * i);
    return v;
  }
  double read_f64() { return std::bit_cast<double>(read_u64()); }
  std::string read_str(u32 max_len = 1u << 20) {
    u32 n = read_u32();
    require(n <= max_len, errc::parse_error, path_ + ": string field too long");
    std::string s(n, '\0');
    if (n) bytes(s.data(), n);
    return s;
  }
  std::vector<u64> read_u64s(u64 n) {
    std::vector<u64> v(n);
    for (u64 i = 0; i < n; ++i) v[i] = read_u64();
    return v;
  }
  std::vector<double> read_f64s(u64 n) {
    std::vector<double> v(n);
    for (u64 i = 0; i < n; ++i) v[i] = read_f64();
    return v;
  }

private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace snntopo
