#include "mfbm3d/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mfbm3d {

const char* to_string(Basis basis) noexcept {
  switch (basis) {
    case Basis::kBior15:
      return "bior15";
    case Basis::kDct:
      return "dct";
  }
  return "?";
}

Basis basis_from_string(const std::string& name) {
  if (name == "bior15" || name == "bior1.5") return Basis::kBior15;
  if (name == "dct") return Basis::kDct;
  throw std::invalid_argument("unknown 2D basis '" + name + "' (expected bior15 or dct)");
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t floor_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

void wht_1d(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("wht_1d: length " + std::to_string(n) + " is not a power of two");
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : v) x *= scale;
}

std::vector<double> wht_1d(std::vector<double> v) {
  wht_1d(std::span<double>(v));
  return v;
}

namespace {

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
Matrix<N> invert(const Matrix<N>& m) {
  Matrix<N> a = m;
  Matrix<N> inv{};
  for (std::size_t i = 0; i < N; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = a[col][col];
    for (std::size_t c = 0; c < N; ++c) {
      a[col][c] /= p;
      inv[col][c] /= p;
    }
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < N; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// One analysis level of the bior1.5 filter bank on n samples with periodic
// extension: rows [0, n/2) are the lowpass outputs, rows [n/2, n) the
// highpass (Haar) outputs. Taps of the lowpass filter alias onto each other
// for short lengths, so they are accumulated rather than assigned.
template <std::size_t N>
Matrix<N> bior15_level() {
  constexpr double kLowTaps[10] = {3.0 / 128, -3.0 / 128, -22.0 / 128, 22.0 / 128, 1.0,
                                   1.0,       22.0 / 128, -22.0 / 128, -3.0 / 128, 3.0 / 128};
  const double s = 1.0 / std::numbers::sqrt2;
  constexpr int n = static_cast<int>(N);
  Matrix<N> m{};
  for (int k = 0; k < n / 2; ++k) {
    for (int t = 0; t < 10; ++t) {
      const int idx = ((2 * k + t - 4) % n + n) % n;
      m[k][idx] += s * kLowTaps[t];
    }
    m[n / 2 + k][2 * k] = s;
    m[n / 2 + k][2 * k + 1] = -s;
  }
  return m;
}

Matrix<8> dct_matrix() {
  Matrix<8> m{};
  for (int k = 0; k < 8; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
    for (int n = 0; n < 8; ++n)
      m[k][n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
  }
  return m;
}

template <std::size_t N>
Matrix<N> transpose(const Matrix<N>& m) {
  Matrix<N> t{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) t[i][j] = m[j][i];
  return t;
}

struct TransformTables {
  Matrix<8> bior8, bior8_inv;
  Matrix<4> bior4, bior4_inv;
  Matrix<2> bior2, bior2_inv;
  Matrix<8> dct, dct_inv;

  TransformTables()
      : bior8(bior15_level<8>()),
        bior8_inv(invert(bior8)),
        bior4(bior15_level<4>()),
        bior4_inv(invert(bior4)),
        bior2(bior15_level<2>()),
        bior2_inv(invert(bior2)),
        dct(dct_matrix()),
        dct_inv(transpose(dct)) {}
};

const TransformTables& tables() {
  static const TransformTables t;
  return t;
}

// Applies m to the leading N entries of every row, then of every column,
// restricted to the top-left N x N block of an 8x8 patch.
template <std::size_t N>
void apply_rows(const Matrix<N>& m, double* p) {
  double tmp[N];
  for (std::size_t r = 0; r < N; ++r) {
    double* row = p + r * kPatchSize;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += m[i][j] * row[j];
      tmp[i] = acc;
    }
    std::copy(tmp, tmp + N, row);
  }
}

template <std::size_t N>
void apply_cols(const Matrix<N>& m, double* p) {
  double tmp[N];
  for (std::size_t c = 0; c < N; ++c) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += m[i][j] * p[j * kPatchSize + c];
      tmp[i] = acc;
    }
    for (std::size_t i = 0; i < N; ++i) p[i * kPatchSize + c] = tmp[i];
  }
}

}  // namespace

void forward_2d(std::span<double, kPatchArea> patch, Basis basis) {
  const auto& t = tables();
  double* p = patch.data();
  if (basis == Basis::kDct) {
    apply_rows(t.dct, p);
    apply_cols(t.dct, p);
    return;
  }
  apply_rows(t.bior8, p);
  apply_cols(t.bior8, p);
  apply_rows(t.bior4, p);
  apply_cols(t.bior4, p);
  apply_rows(t.bior2, p);
  apply_cols(t.bior2, p);
}

void inverse_2d(std::span<double, kPatchArea> coeffs, Basis basis) {
  const auto& t = tables();
  double* p = coeffs.data();
  if (basis == Basis::kDct) {
    apply_cols(t.dct_inv, p);
    apply_rows(t.dct_inv, p);
    return;
  }
  apply_cols(t.bior2_inv, p);
  apply_rows(t.bior2_inv, p);
  apply_cols(t.bior4_inv, p);
  apply_rows(t.bior4_inv, p);
  apply_cols(t.bior8_inv, p);
  apply_rows(t.bior8_inv, p);
}

PatchValues forward_2d(const PatchValues& patch, Basis basis) {
  PatchValues out = patch;
  forward_2d(std::span<double, kPatchArea>(out), basis);
  return out;
}

PatchValues inverse_2d(const PatchValues& coeffs, Basis basis) {
  PatchValues out = coeffs;
  inverse_2d(std::span<double, kPatchArea>(out), basis);
  return out;
}

void wht_group_axis(std::span<double> group) {
  if (group.size() % kPatchArea != 0)
    throw std::invalid_argument("wht_group_axis: group size is not a multiple of 64");
  const std::size_t k = group.size() / kPatchArea;
  if (!is_power_of_two(k))
    throw std::invalid_argument("wht_group_axis: group of " + std::to_string(k) +
                                " patches is not a power of two");
  if (k == 1) return;
  // Butterflies act on whole 64-value slices, which keeps the inner loop
  // contiguous.
  for (std::size_t h = 1; h < k; h *= 2) {
    for (std::size_t i = 0; i < k; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        double* a = group.data() + j * kPatchArea;
        double* b = group.data() + (j + h) * kPatchArea;
        for (int e = 0; e < kPatchArea; ++e) {
          const double x = a[e];
          const double y = b[e];
          a[e] = x + y;
          b[e] = x - y;
        }
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (double& x : group) x *= scale;
}

void forward_3d(std::span<double> group, Basis basis) {
  const std::size_t k = group.size() / kPatchArea;
  for (std::size_t i = 0; i < k; ++i)
    forward_2d(group.subspan(i * kPatchArea).first<kPatchArea>(), basis);
  wht_group_axis(group);
}

void inverse_3d(std::span<double> group, Basis basis) {
  wht_group_axis(group);
  const std::size_t k = group.size() / kPatchArea;
  for (std::size_t i = 0; i < k; ++i)
    inverse_2d(group.subspan(i * kPatchArea).first<kPatchArea>(), basis);
}

std::size_t hard_threshold(std::span<double> spectrum, double tau, bool keep_dc) {
  if (tau < 0.0) throw std::invalid_argument("hard_threshold: tau must be >= 0");
  std::size_t retained = 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    double& v = spectrum[i];
    if (!(keep_dc && i == 0) && std::abs(v) < tau) v = 0.0;
    if (v != 0.0) ++retained;
  }
  return retained;
}

double wiener_shrink(std::span<double> noisy, std::span<const double> pilot, double sigma,
                     bool keep_dc) {
  if (noisy.size() != pilot.size())
    throw std::invalid_argument("wiener_shrink: noisy and pilot spectra differ in shape");
  if (!(sigma > 0.0)) throw std::invalid_argument("wiener_shrink: sigma must be > 0");
  const double s2 = sigma * sigma;
  double energy = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    double w = 1.0;
    if (!(keep_dc && i == 0)) {
      const double b2 = pilot[i] * pilot[i];
      w = b2 / (b2 + s2);
    }
    noisy[i] *= w;
    energy += w * w;
  }
  return energy;
}

PatchValues kaiser_window(double beta) {
  std::array<double, kPatchSize> w1{};
  const double norm = std::cyl_bessel_i(0.0, beta);
  for (int n = 0; n < kPatchSize; ++n) {
    const double x = 2.0 * n / (kPatchSize - 1) - 1.0;
    w1[n] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - x * x))) / norm;
  }
  PatchValues w{};
  for (int r = 0; r < kPatchSize; ++r)
    for (int c = 0; c < kPatchSize; ++c) w[r * kPatchSize + c] = w1[r] * w1[c];
  return w;
}

}  // namespace mfbm3d
