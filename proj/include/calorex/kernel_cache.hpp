#ifndef CALOREX_KERNEL_CACHE_HPP
#define CALOREX_KERNEL_CACHE_HPP

// On-disk cache of kernel tables. Layout (little-endian):
//   "CLXK" | u32 version | u32 regime | f64 angle | f64 eps | u64 grid hash
//   | u64 n_points | u64 fft_size | f64 alpha | f64 drive_shift
//   | f64 drive_prefactor | f64 kernel_integral
//   | self_ft, cross_a_ft, cross_abar_ft (fft_size f64 each)
//   | drive_a, drive_abar (n_points complex = 2 f64 each)
//   | c_samples, g_samples (n_points f64) | g_shift_plus (n_points complex)
// A pure optimization: any mismatch or read error means "rebuild".

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "calorex/kernel_table.hpp"

namespace calorex {

inline constexpr std::uint32_t kKernelCacheVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little, "kernel cache assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

template <class T>
void put_vec(std::ostream& os, const std::vector<T>& v) {
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
bool get_vec(std::istream& is, std::vector<T>& v, std::size_t n) {
  v.resize(n);
  return static_cast<bool>(is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))));
}

}  // namespace detail

inline std::string kernel_cache_name(const SolverGrid& grid) {
  std::ostringstream os;
  os << "kernel-" << std::hex << grid.hash << ".clxk";
  return os.str();
}

inline void save_kernel_table(const std::string& path, const KernelTable& kt, const SolverGrid& grid) {
  const std::string tmp =
      path + "." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) return;
    os.write("CLXK", 4);
    detail::put(os, kKernelCacheVersion);
    detail::put(os, static_cast<std::uint32_t>(kt.regime));
    detail::put(os, kt.angle);
    detail::put(os, kt.eps);
    detail::put(os, kt.grid_hash);
    detail::put(os, static_cast<std::uint64_t>(grid.n_points));
    detail::put(os, static_cast<std::uint64_t>(grid.fft_size));
    for (double v : {kt.alpha, kt.drive_shift, kt.drive_prefactor, kt.kernel_integral}) detail::put(os, v);
    detail::put_vec(os, kt.self_ft);
    detail::put_vec(os, kt.cross_a_ft);
    detail::put_vec(os, kt.cross_abar_ft);
    detail::put_vec(os, kt.drive_a);
    detail::put_vec(os, kt.drive_abar);
    detail::put_vec(os, kt.c_samples);
    detail::put_vec(os, kt.g_samples);
    detail::put_vec(os, kt.g_shift_plus);
    if (!os) return;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
}

inline std::optional<KernelTable> load_kernel_table(const std::string& path, const SolverGrid& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[4];
  std::uint32_t version = 0, regime = 0;
  std::uint64_t n = 0, m = 0;
  KernelTable kt;
  if (!is.read(magic, 4) || std::string(magic, 4) != "CLXK") return std::nullopt;
  if (!detail::get(is, version) || version != kKernelCacheVersion) return std::nullopt;
  if (!detail::get(is, regime) || !detail::get(is, kt.angle) || !detail::get(is, kt.eps) ||
      !detail::get(is, kt.grid_hash) || !detail::get(is, n) || !detail::get(is, m))
    return std::nullopt;
  kt.regime = static_cast<Regime>(regime);
  if (kt.regime != grid.regime || kt.angle != grid.angle || kt.eps != grid.eps_shift ||
      kt.grid_hash != grid.hash || n != grid.n_points || m != grid.fft_size)
    return std::nullopt;
  for (double* v : {&kt.alpha, &kt.drive_shift, &kt.drive_prefactor, &kt.kernel_integral})
    if (!detail::get(is, *v)) return std::nullopt;
  if (!detail::get_vec(is, kt.self_ft, m) || !detail::get_vec(is, kt.cross_a_ft, m) ||
      !detail::get_vec(is, kt.cross_abar_ft, m) || !detail::get_vec(is, kt.drive_a, n) ||
      !detail::get_vec(is, kt.drive_abar, n) || !detail::get_vec(is, kt.c_samples, n) ||
      !detail::get_vec(is, kt.g_samples, n) || !detail::get_vec(is, kt.g_shift_plus, n))
    return std::nullopt;
  kt.g_shift_minus.resize(n);
  for (std::size_t j = 0; j < n; ++j) kt.g_shift_minus[j] = std::conj(kt.g_shift_plus[j]);
  kt.domain_note = kt.regime == Regime::EasyPlane
                       ? "easy-plane convolutions over the real line truncated at +-L; the +-pi limits apply only to the periodic easy-axis case"
                       : "easy-axis convolutions over the periodic domain [-pi, pi)";
  return kt;
}

/// Kernel table from `dir` when a matching file exists, else built and stored.
/// An empty `dir` disables the cache.
inline KernelTable cached_kernel_table(const AnisotropyPoint& point, const SolverGrid& grid,
                                       const std::string& dir) {
  if (dir.empty()) return build_kernel_table(point, grid);
  const std::string path = (std::filesystem::path(dir) / kernel_cache_name(grid)).string();
  if (auto kt = load_kernel_table(path, grid)) return *kt;
  KernelTable kt = build_kernel_table(point, grid);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  save_kernel_table(path, kt, grid);
  return kt;
}

}  // namespace calorex

#endif  // CALOREX_KERNEL_CACHE_HPP
