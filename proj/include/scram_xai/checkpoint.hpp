#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "scram_xai/autoencoder.hpp"
#include "scram_xai/data_pipeline.hpp"
#include "scram_xai/errors.hpp"

namespace scram_xai {

// Checkpoint layout, all integers and floats little-endian:
//
//   "SCRM"                      4 bytes magic
//   u32 version                 kCheckpointVersion
//   u32 window, u32 features
//   u32 n_encoder, then per layer: u32 units, f64 dropout
//   u32 bottleneck
//   u32 n_decoder, then per layer: u32 units, f64 dropout
//   u8  has_scaler, then (if 1) features x f64 min, features x f64 max
//   u64 parameter count
//   parameter values as f64 in AeParams::visit order, each tensor column-major
//
// Nothing may follow the last parameter.
inline constexpr char kCheckpointMagic[4] = {'S', 'C', 'R', 'M'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t(static_cast<unsigned char>(p[k])) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t(static_cast<unsigned char>(p[k])) << (8 * k);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  const char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw FormatError("checkpoint truncated at byte " + std::to_string(pos_) + " (needed " +
                        std::to_string(n) + " more of " + std::to_string(bytes_.size()) + ")");
    }
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

inline void write_layers(ByteWriter& w, const std::vector<LayerSpec>& layers) {
  w.u32(static_cast<std::uint32_t>(layers.size()));
  for (const auto& l : layers) {
    w.u32(static_cast<std::uint32_t>(l.units));
    w.f64(l.dropout);
  }
}

inline std::vector<LayerSpec> read_layers(ByteReader& r) {
  const std::uint32_t n = r.u32();
  if (n == 0 || n > 64) throw FormatError("checkpoint: implausible layer count " + std::to_string(n));
  std::vector<LayerSpec> layers(n);
  for (auto& l : layers) {
    l.units = r.u32();
    l.dropout = r.f64();
  }
  return layers;
}

}  // namespace detail

template <typename T>
std::vector<char> serialize(const Autoencoder<T>& model) {
  detail::ByteWriter w;
  w.raw(kCheckpointMagic, 4);
  w.u32(kCheckpointVersion);
  const auto& a = model.architecture();
  w.u32(static_cast<std::uint32_t>(a.window));
  w.u32(static_cast<std::uint32_t>(a.features));
  detail::write_layers(w, a.encoder);
  w.u32(static_cast<std::uint32_t>(a.bottleneck));
  detail::write_layers(w, a.decoder);
  const auto& sc = model.scaler();
  w.u8(sc ? 1 : 0);
  if (sc) {
    for (Eigen::Index j = 0; j < sc->min.size(); ++j) w.f64(sc->min(j));
    for (Eigen::Index j = 0; j < sc->max.size(); ++j) w.f64(sc->max(j));
  }
  w.u64(model.params().size());
  model.params().visit([&](const Mat<T>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) w.f64(static_cast<double>(m.data()[k]));
  });
  return w.bytes();
}

template <typename T = double>
Autoencoder<T> deserialize(std::vector<char> bytes) {
  detail::ByteReader r(std::move(bytes));
  if (r.remaining() < 4 || std::memcmp(r.take(4), kCheckpointMagic, 4) != 0) {
    throw FormatError("not a checkpoint: magic bytes are not SCRM");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint format version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  AeArchitecture arch;
  arch.window = r.u32();
  arch.features = r.u32();
  arch.encoder = detail::read_layers(r);
  arch.bottleneck = r.u32();
  arch.decoder = detail::read_layers(r);
  try {
    arch.validate();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("checkpoint architecture invalid: ") + e.what());
  }

  Autoencoder<T> model(arch, 0);
  const std::uint8_t has_scaler = r.u8();
  if (has_scaler > 1) throw FormatError("checkpoint: bad scaler flag");
  if (has_scaler) {
    const auto p = static_cast<Eigen::Index>(arch.features);
    Scaler sc{Vector(p), Vector(p)};
    for (Eigen::Index j = 0; j < p; ++j) sc.min(j) = r.f64();
    for (Eigen::Index j = 0; j < p; ++j) sc.max(j) = r.f64();
    model.set_scaler(std::move(sc));
  }
  const std::uint64_t count = r.u64();
  if (count != model.params().size()) {
    throw FormatError("checkpoint holds " + std::to_string(count) +
                      " parameters, architecture needs " + std::to_string(model.params().size()));
  }
  model.params().visit([&](Mat<T>& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<T>(r.f64());
  });
  if (!r.at_end()) throw FormatError("checkpoint has trailing bytes");
  return model;
}

template <typename T>
void save(const Autoencoder<T>& model, const std::string& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write checkpoint " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write failed: " + path);
}

template <typename T = double>
Autoencoder<T> load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize<T>(std::move(bytes));
}

}  // namespace scram_xai
