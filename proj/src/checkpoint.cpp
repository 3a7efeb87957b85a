//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstring>
#include <fstream>

#include "retrosyn/tensor.hpp"

namespace retrosyn {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'Y', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(buf), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(buf), 8);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  std::uint32_t len = read_u32(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  return s;
}

void write_values(std::ostream& os, const std::vector<double>& values, bool float32) {
  for (double d : values) {
    if (float32) {
      float f = static_cast<float>(d);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      write_u32(os, bits);
    } else {
      std::uint64_t bits;
      std::memcpy(&bits, &d, 8);
      write_u64(os, bits);
    }
  }
}

void read_values(std::istream& is, std::vector<double>& values, bool float32) {
  for (auto& d : values) {
    if (float32) {
      std::uint32_t bits = read_u32(is);
      float f;
      std::memcpy(&f, &bits, 4);
      d = static_cast<double>(f);
    } else {
      std::uint64_t bits = read_u64(is);
      std::memcpy(&d, &bits, 8);
    }
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const std::map<std::string, std::string>& metadata, bool float32) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os.write(kMagic, 8);
  write_u32(os, kVersion);
  os.put(float32 ? 4 : 8);
  write_u32(os, static_cast<std::uint32_t>(store.params_.size()));
  for (const auto& [name, t] : store.params_) {
    write_string(os, name);
    write_u32(os, static_cast<std::uint32_t>(t.shape().size()));
    for (int d : t.shape()) write_u32(os, static_cast<std::uint32_t>(d));
    write_values(os, t.node()->value, float32);
  }
  os.put(1);  // optimizer state present
  write_u64(os, store.step_);
  for (const auto& [name, t] : store.params_) {
    write_values(os, store.m_.at(name), float32);
    write_values(os, store.v_.at(name), float32);
  }
  write_u32(os, static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [k, v] : metadata) {
    write_string(os, k);
    write_string(os, v);
  }
  if (!os) throw std::runtime_error("write failure on checkpoint: " + path);
}

void load_checkpoint(const std::string& path, ParameterStore& store,
                     std::map<std::string, std::string>& metadata) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  int prec = is.get();
  if (prec != 4 && prec != 8) throw std::runtime_error("corrupt checkpoint precision field");
  bool float32 = prec == 4;
  std::uint32_t n = read_u32(is);
  store.params_.clear();
  store.m_.clear();
  store.v_.clear();
  std::vector<std::string> order;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = read_string(is);
    std::uint32_t ndim = read_u32(is);
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = static_cast<int>(read_u32(is));
    Tensor t = Tensor::zeros(shape, true);
    read_values(is, t.node()->value, float32);
    store.params_[name] = t;
    order.push_back(name);
  }
  int has_adam = is.get();
  store.step_ = 0;
  for (const auto& name : order) {
    store.m_[name].assign(store.params_[name].size(), 0.0);
    store.v_[name].assign(store.params_[name].size(), 0.0);
  }
  if (has_adam == 1) {
    store.step_ = read_u64(is);
    for (const auto& name : order) {
      read_values(is, store.m_[name], float32);
      read_values(is, store.v_[name], float32);
    }
  }
  metadata.clear();
  std::uint32_t nmeta = read_u32(is);
  for (std::uint32_t i = 0; i < nmeta; ++i) {
    std::string k = read_string(is);
    metadata[k] = read_string(is);
  }
  if (!is) throw std::runtime_error("truncated checkpoint: " + path);
}

}  // namespace retrosyn
