#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qnd/common.hpp"
#include "qnd/joint_svd.hpp"

namespace qnd {

// Binary cache for a JointSvd, bit-exact on round trip: header {magic,
// version, N, epsLambda}, row-major U then V, then per (dx,dz) ascending the
// (row, col, amplitude) triples, followed by an FNV-1a checksum of everything
// before it.

inline constexpr char kCacheMagic[8] = {'Q', 'N', 'D', 'J', 'S', 'V', 'D', '1'};
inline constexpr std::uint32_t kCacheVersion = 1;

namespace detail {
struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void feed(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
};

template <class T>
void put(std::ofstream& out, Fnv1a& sum, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  sum.feed(&v, sizeof(T));
}

template <class T>
T get(std::ifstream& in, Fnv1a& sum) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("svd cache: truncated file");
  sum.feed(&v, sizeof(T));
  return v;
}
}  // namespace detail

inline void save_joint_svd(const std::string& path, const JointSvd& jsvd) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("svd cache: cannot open " + path + " for writing");
  detail::Fnv1a sum;
  out.write(kCacheMagic, sizeof(kCacheMagic));
  sum.feed(kCacheMagic, sizeof(kCacheMagic));
  detail::put(out, sum, kCacheVersion);
  detail::put(out, sum, std::int32_t(jsvd.n_atoms));
  detail::put(out, sum, double(kLambdaEps));
  const int dim = jsvd.dim();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) detail::put(out, sum, jsvd.u(i, j));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) detail::put(out, sum, jsvd.v(i, j));
  const int d = jsvd.n_atoms + 1;
  for (int dx = 0; dx < d; ++dx)
    for (int dz = 0; dz < d; ++dz) {
      const LambdaFactor& f = jsvd.factor(dx, dz);
      detail::put(out, sum, std::uint32_t(f.nonzero_count()));
      for (int k = 0; k < dim; ++k)
        if (f.forward[std::size_t(k)] >= 0) {
          detail::put(out, sum, std::uint32_t(f.forward[std::size_t(k)]));
          detail::put(out, sum, std::uint32_t(k));
          detail::put(out, sum, f.amp[std::size_t(k)]);
        }
    }
  out.write(reinterpret_cast<const char*>(&sum.h), sizeof(sum.h));
  if (!out) throw std::runtime_error("svd cache: write failed for " + path);
}

inline JointSvd load_joint_svd(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("svd cache: cannot open " + path);
  detail::Fnv1a sum;
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
    throw std::runtime_error("svd cache: bad magic in " + path);
  sum.feed(magic, sizeof(magic));
  const auto version = detail::get<std::uint32_t>(in, sum);
  if (version != kCacheVersion) throw std::runtime_error("svd cache: unsupported version");
  const auto n = detail::get<std::int32_t>(in, sum);
  (void)detail::get<double>(in, sum);  // epsLambda, informational
  JointSvd jsvd;
  jsvd.n_atoms = n;
  const int dim = dim_of(n);
  jsvd.u.resize(dim, dim);
  jsvd.v.resize(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) jsvd.u(i, j) = detail::get<double>(in, sum);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) jsvd.v(i, j) = detail::get<double>(in, sum);
  const int d = n + 1;
  jsvd.factors.assign(std::size_t(d * d), LambdaFactor{});
  for (auto& f : jsvd.factors) {
    f.forward.assign(std::size_t(dim), -1);
    f.amp.assign(std::size_t(dim), 0.0);
    f.inverse.assign(std::size_t(dim), -1);
  }
  for (int dx = 0; dx < d; ++dx)
    for (int dz = 0; dz < d; ++dz) {
      LambdaFactor& f = jsvd.factors[std::size_t(dx * d + dz)];
      const auto count = detail::get<std::uint32_t>(in, sum);
      for (std::uint32_t t = 0; t < count; ++t) {
        const auto row = detail::get<std::uint32_t>(in, sum);
        const auto col = detail::get<std::uint32_t>(in, sum);
        const auto amp = detail::get<double>(in, sum);
        f.forward[col] = std::int32_t(row);
        f.amp[col] = amp;
        f.inverse[row] = std::int32_t(col);
      }
    }
  std::uint64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (!in || stored != sum.h) throw std::runtime_error("svd cache: checksum mismatch in " + path);
  // rebuild sector labels from the loaded columns
  jsvd.v_sector.assign(std::size_t(dim), -1);
  jsvd.u_sector.assign(std::size_t(dim), -1);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      if (std::abs(jsvd.v(i, j)) > 1e-8) {
        jsvd.v_sector[std::size_t(j)] = std::abs(k1_of(n, i) - k2_of(n, i));
        break;
      }
    }
  }
  const Mat u1 = x_rotation_matrix(n);
  for (int j = 0; j < dim; ++j) {
    // x-sector via the rotated support
    const int dd = n + 1;
    Eigen::Map<const Mat> m(jsvd.u.col(j).data(), dd, dd);
    const Mat t = u1.transpose() * m * u1;
    double best = 0.0;
    for (int k2 = 0; k2 < dd; ++k2)
      for (int k1 = 0; k1 < dd; ++k1)
        if (std::abs(t(k1, k2)) > best) {
          best = std::abs(t(k1, k2));
          jsvd.u_sector[std::size_t(j)] = std::abs(k1 - k2);
        }
  }
  return jsvd;
}

inline std::string cache_file_name(int n_atoms) {
  return "jsvd_n" + std::to_string(n_atoms) + ".qnd";
}

inline std::string cache_path(const std::string& dir, int n_atoms) {
  return (std::filesystem::path(dir) / cache_file_name(n_atoms)).string();
}

// load when present, else build (and optionally persist)
inline JointSvd load_or_build_joint_svd(const std::string& dir, int n_atoms, bool build_if_missing,
                                        bool persist = true) {
  const std::string path = cache_path(dir, n_atoms);
  if (std::filesystem::exists(path)) return load_joint_svd(path);
  if (!build_if_missing)
    throw std::runtime_error("svd cache: " + path + " missing (build it with `qnd cache build`)");
  JointSvd jsvd = compute_joint_svd(n_atoms);
  if (persist) {
    std::filesystem::create_directories(dir);
    save_joint_svd(path, jsvd);
  }
  return jsvd;
}

}  // namespace qnd
