/*
 * Copyright (c) The shearlet toolkit authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "measures.hpp"

namespace shearlet {

// malformed, truncated or mismatched files
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// explicit little-endian byte order, independent of the host
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(char(v)); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { put(std::uint32_t(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* s, std::size_t n) { buf_.append(s, n); }
  std::size_t size() const { return buf_.size(); }
  const std::string& bytes() const { return buf_; }
  void patch_u64(std::size_t at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_[at + i] = char((v >> (8 * i)) & 0xff);
  }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
  }
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string data) : buf_(std::move(data)) {}
  std::uint8_t u8() { return std::uint8_t(get(1)); }
  std::uint16_t u16() { return std::uint16_t(get(2)); }
  std::uint32_t u32() { return std::uint32_t(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return std::int32_t(std::uint32_t(get(4))); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string tag(std::size_t n) {
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void seek(std::size_t at) { pos_ = at; }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw FormatError("unexpected end of file (truncated)");
  }
  std::uint64_t get(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(std::uint8_t(buf_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  std::string buf_;
  std::size_t pos_ = 0;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void spill(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw FormatError("write failed for " + path);
}

}  // namespace detail

// ---- images: "SHIM", version, N, dtype, row-major f64 ----

constexpr std::uint16_t kFormatVersion = 1;
constexpr std::uint8_t kDtypeF64 = 1;

inline std::string encode_image(const RealImage& img) {
  detail::ByteWriter w;
  w.raw("SHIM", 4);
  w.u16(kFormatVersion);
  w.u32(std::uint32_t(img.n));
  w.u8(kDtypeF64);
  for (double v : img.data) w.f64(v);
  return w.bytes();
}

inline RealImage decode_image(const std::string& bytes) {
  detail::ByteReader r(bytes);
  if (r.tag(4) != "SHIM") throw FormatError("not an image file (bad magic)");
  if (r.u16() != kFormatVersion) throw FormatError("unsupported image version");
  std::uint32_t n = r.u32();
  if (r.u8() != kDtypeF64) throw FormatError("unsupported image dtype");
  if (n == 0 || n % 2 || n > (1u << 15)) throw FormatError("bad image side");
  if (r.size() - r.pos() != std::size_t(n) * n * 8) throw FormatError("image payload length does not match N");
  RealImage img(static_cast<int>(n));
  for (auto& v : img.data) v = r.f64();
  return img;
}

inline void write_image(const std::string& path, const RealImage& img) { detail::spill(path, encode_image(img)); }
inline RealImage read_image(const std::string& path) { return decode_image(detail::slurp(path)); }

// binary PGM (P5), 8 or 16 bit, scaled by maxval to [0, 1]
inline RealImage read_pgm(const std::string& path) {
  std::string bytes = detail::slurp(path);
  std::size_t pos = 0;
  auto token = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw FormatError("truncated PGM header");
    return bytes.substr(start, pos - start);
  };
  if (token() != "P5") throw FormatError("only binary PGM (P5) is supported");
  long w = std::stol(token()), h = std::stol(token()), maxval = std::stol(token());
  ++pos;  // single whitespace before the raster
  if (w != h) throw FormatError("PGM image must be square");
  if (maxval < 1 || maxval > 65535) throw FormatError("bad PGM maxval");
  int bpp = maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < std::size_t(w) * h * bpp) throw FormatError("truncated PGM raster");
  RealImage img(static_cast<int>(w));
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    auto b = [&](std::size_t k) { return unsigned(static_cast<unsigned char>(bytes[pos + k])); };
    unsigned v = bpp == 2 ? (b(2 * i) << 8) | b(2 * i + 1) : b(i);  // PGM samples are big-endian
    img.data[i] = double(v) / double(maxval);
  }
  return img;
}

// ---- coefficients: "SHCF" ----

enum class TransformId : std::uint8_t { fdst = 1, dsst = 2, dnst = 3, haar = 4 };

struct CoeffParams {
  TransformId method = TransformId::fdst;
  int n = 0;
  int r_or_j = 0;  // oversampling R (fdst) or number of scales J
  double c1 = 0, c2 = 0;
  int weight_choice = 0;
};

struct CoeffFile {
  CoeffParams params;
  std::vector<BandInfo> bands;  // offsets index into data
  CVec data;
};

inline std::string method_name(TransformId id) {
  switch (id) {
    case TransformId::fdst: return "fdst";
    case TransformId::dsst: return "dsst";
    case TransformId::dnst: return "dnst";
    case TransformId::haar: return "haar";
  }
  throw FormatError("unknown transform id");
}

inline TransformId method_id(const std::string& name) {
  for (auto id : {TransformId::fdst, TransformId::dsst, TransformId::dnst, TransformId::haar})
    if (method_name(id) == name) return id;
  throw std::invalid_argument("unknown method " + name);
}

// header, directory (cone/j/k i32, rows u32, cols u32, byte offset u64),
// payload of (re, im) f64 pairs
inline std::string encode_coeffs(const CoeffFile& f) {
  detail::ByteWriter w;
  w.raw("SHCF", 4);
  w.u16(kFormatVersion);
  w.u8(std::uint8_t(f.params.method));
  w.f64(f.params.n);
  w.f64(f.params.r_or_j);
  w.f64(f.params.c1);
  w.f64(f.params.c2);
  w.u8(std::uint8_t(f.params.weight_choice));
  w.u32(std::uint32_t(f.bands.size()));
  std::size_t dir = w.size();
  for (const auto& b : f.bands) {
    w.i32(b.cone);
    w.i32(b.j);
    w.i32(b.k);
    w.u32(std::uint32_t(b.rows));
    w.u32(std::uint32_t(b.cols));
    w.u64(0);
  }
  for (std::size_t i = 0; i < f.bands.size(); ++i) {
    const auto& b = f.bands[i];
    if (b.offset + b.count() > f.data.size()) throw std::invalid_argument("band exceeds coefficient vector");
    w.patch_u64(dir + i * 28 + 20, w.size());
    for (std::size_t q = 0; q < b.count(); ++q) {
      w.f64(f.data[b.offset + q].real());
      w.f64(f.data[b.offset + q].imag());
    }
  }
  return w.bytes();
}

inline CoeffFile decode_coeffs(const std::string& bytes) {
  detail::ByteReader r(bytes);
  if (r.tag(4) != "SHCF") throw FormatError("not a coefficient file (bad magic)");
  if (r.u16() != kFormatVersion) throw FormatError("unsupported coefficient file version");
  CoeffFile f;
  std::uint8_t id = r.u8();
  if (id < 1 || id > 4) throw FormatError("unknown transform id");
  f.params.method = TransformId(id);
  f.params.n = int(r.f64());
  f.params.r_or_j = int(r.f64());
  f.params.c1 = r.f64();
  f.params.c2 = r.f64();
  f.params.weight_choice = r.u8();
  std::uint32_t count = r.u32();
  if (std::size_t(count) * 28 > r.size() - r.pos()) throw FormatError("band directory runs past the end of the file (directory bounds, truncated?)");
  std::vector<std::uint64_t> starts(count);
  std::size_t total = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    BandInfo b;
    b.cone = r.i32();
    b.j = r.i32();
    b.k = r.i32();
    b.rows = int(r.u32());
    b.cols = int(r.u32());
    starts[i] = r.u64();
    b.offset = total;
    b.lowpass = b.cone == 0 || (f.params.method == TransformId::fdst && b.cone < 10);
    total += b.count();
    f.bands.push_back(b);
  }
  // bands must lie inside the payload and must not overlap
  std::size_t payload = r.pos();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint64_t len = std::uint64_t(f.bands[i].count()) * 16;
    if (starts[i] < payload || starts[i] > r.size() || len > r.size() - starts[i])
      throw FormatError("band " + std::to_string(i) + " lies outside the file (directory bounds, truncated?)");
    spans.emplace_back(starts[i], starts[i] + len);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i)
    if (spans[i].first < spans[i - 1].second) throw FormatError("band directory entries overlap");
  f.data.resize(total);
  for (std::uint32_t i = 0; i < count; ++i) {
    r.seek(starts[i]);
    for (std::size_t q = 0; q < f.bands[i].count(); ++q) {
      double re = r.f64();
      f.data[f.bands[i].offset + q] = cplx(re, r.f64());
    }
  }
  return f;
}

inline void write_coeffs(const std::string& path, const CoeffFile& f) { detail::spill(path, encode_coeffs(f)); }
inline CoeffFile read_coeffs(const std::string& path) { return decode_coeffs(detail::slurp(path)); }

// ---- weight cache: "SHWT" ----

// N, R, choice, basis coefficients, then the weights of sector 1 and of
// sector 2 (identical by symmetry, both stored)
inline std::string encode_weights(const WeightTable& w) {
  detail::ByteWriter out;
  out.raw("SHWT", 4);
  out.u16(kFormatVersion);
  out.u32(std::uint32_t(w.params.n));
  out.u32(std::uint32_t(w.params.r));
  out.u8(std::uint8_t(w.choice));
  out.u16(std::uint16_t(w.coeffs.size()));
  for (double c : w.coeffs) out.f64(c);
  for (int sector = 0; sector < 2; ++sector)
    for (double v : w.values) out.f64(v);
  return out.bytes();
}

inline WeightTable decode_weights(const std::string& bytes) {
  detail::ByteReader in(bytes);
  if (in.tag(4) != "SHWT") throw FormatError("not a weight file (bad magic)");
  if (in.u16() != kFormatVersion) throw FormatError("unsupported weight file version");
  WeightTable w;
  int n = int(in.u32()), r = int(in.u32());
  try {
    w.params = PPGridParams(n, r);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad weight grid: ") + e.what());
  }
  w.choice = in.u8();
  std::size_t nb = in.u16(), sz = w.params.sector_size();
  if (in.size() - in.pos() != (nb + 2 * sz) * 8) throw FormatError("weight payload length does not match the grid");
  for (std::size_t i = 0; i < nb; ++i) w.coeffs.push_back(in.f64());
  w.values.resize(sz);
  for (auto& v : w.values) v = in.f64();
  for (std::size_t i = 0; i < sz; ++i)
    if (in.f64() != w.values[i]) throw FormatError("weight sectors disagree");
  return w;
}

inline void write_weights(const std::string& path, const WeightTable& w) { detail::spill(path, encode_weights(w)); }
inline WeightTable read_weights(const std::string& path) { return decode_weights(detail::slurp(path)); }

// ---- transforms from file parameters ----

inline std::shared_ptr<const Transform> transform_for(const CoeffParams& p) {
  switch (p.method) {
    case TransformId::fdst:
      return std::make_shared<FdstTransform>(fdst_plan_cached(p.n, p.r_or_j, p.weight_choice));
    case TransformId::dsst:
      return std::make_shared<DsstTransform>(p.n, p.r_or_j, p.c1, p.c2);
    case TransformId::dnst:
      return std::make_shared<DnstTransform>(p.n, p.r_or_j);
    case TransformId::haar:
      return std::make_shared<HaarTransform>(p.n, p.r_or_j);
  }
  throw FormatError("unknown transform id");
}

// as above, with FDST weights read from a cache file instead of fitted
inline std::shared_ptr<const Transform> transform_for(const CoeffParams& p, const std::string& weight_file) {
  if (weight_file.empty()) return transform_for(p);
  if (p.method != TransformId::fdst) throw std::invalid_argument("a weight file only applies to fdst");
  auto w = read_weights(weight_file);
  PPGridParams grid(p.n, p.r_or_j);
  if (!(w.params == grid) || w.choice != p.weight_choice)
    throw FormatError("weight file was fitted for another N, R or choice");
  return std::make_shared<FdstTransform>(std::make_shared<const FdstPlan>(grid, std::move(w)));
}

inline CoeffFile pack_coeffs(const CoeffParams& p, const Transform& tr, CVec data) {
  if (data.size() != tr.coeff_count()) throw std::invalid_argument("coefficient count does not match transform");
  return CoeffFile{p, tr.bands(), std::move(data)};
}

// decimated DNST export packed as a coefficient file; band shapes smaller
// than N x N mark it, the grid follows from N, J, c1 and c2 in the header
inline CoeffFile pack_dnst_decimated(const CoeffParams& p, const DnstTransform& tr, const CVec& data) {
  RVec real(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) real[i] = data[i].real();
  CoeffFile f{p, {}, {}};
  for (auto& d : dnst_decimate(real, tr.bank(), p.c1, p.c2)) {
    BandInfo b;
    b.cone = d.band.cone;
    b.j = d.band.j;
    b.k = d.band.k;
    b.rows = int(d.rows.size());
    b.cols = int(d.cols.size());
    b.offset = f.data.size();
    b.lowpass = b.cone == 0;
    f.data.insert(f.data.end(), d.values.begin(), d.values.end());
    f.bands.push_back(b);
  }
  return f;
}

inline bool is_decimated(const CoeffFile& f) {
  for (const auto& b : f.bands)
    if (f.params.method == TransformId::dnst && (b.rows != f.params.n || b.cols != f.params.n)) return true;
  return false;
}

// the directory must agree with the layout of the transform the header names
inline void check_layout(const CoeffFile& f, const Transform& tr) {
  const auto& want = tr.bands();
  bool ok = want.size() == f.bands.size();
  for (std::size_t i = 0; ok && i < want.size(); ++i) {
    const auto &a = want[i], &b = f.bands[i];
    ok = a.cone == b.cone && a.j == b.j && a.k == b.k && a.rows == b.rows && a.cols == b.cols;
  }
  if (!ok) throw FormatError("band directory does not match the transform named in the header");
}

// SHIM or binary PGM, told apart by the magic
inline RealImage read_any_image(const std::string& path) {
  std::string head = detail::slurp(path).substr(0, 2);
  return head == "P5" ? read_pgm(path) : read_image(path);
}

// ---- measure reports ----

inline nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline nlohmann::json report_json(const MeasureReport& rep, bool with_timing = true) {
  nlohmann::json j;
  j["id"] = rep.id;
  j["title"] = rep.title;
  j["transform"] = rep.transform;
  j["scalars"] = nlohmann::json::object();
  for (const auto& [n, v] : rep.scalars) j["scalars"][n] = number_json(v);
  j["curves"] = nlohmann::json::object();
  for (const auto& c : rep.curves) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < c.x.size(); ++i) arr.push_back({number_json(c.x[i]), number_json(c.y[i])});
    j["curves"][c.name] = arr;
  }
  j["config"] = rep.config;
  if (with_timing) j["seconds"] = rep.seconds;
  return j;
}

// <dir>/measure<id>_<method>.csv (one row per scalar), one csv per curve and
// a json summary; returns the written paths
inline std::vector<std::string> write_report(const MeasureReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string stem = (fs::path(dir) / ("measure" + std::to_string(rep.id) + "_" + rep.transform)).string();
  std::vector<std::string> paths;
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  {
    std::ofstream out(stem + ".csv");
    out << "measure,transform,name,value\n";
    for (const auto& [n, v] : rep.scalars) out << rep.id << "," << rep.transform << "," << n << "," << fmt(v) << "\n";
    paths.push_back(stem + ".csv");
  }
  for (const auto& c : rep.curves) {
    std::string p = stem + "_" + c.name + ".csv";
    std::ofstream out(p);
    out << "x,y\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) out << fmt(c.x[i]) << "," << fmt(c.y[i]) << "\n";
    paths.push_back(p);
  }
  std::ofstream(stem + ".json") << report_json(rep).dump(2) << "\n";
  paths.push_back(stem + ".json");
  return paths;
}

}  // namespace shearlet
