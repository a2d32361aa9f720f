#include "sketchls/data_io.hpp"

#include "sketchls/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sketchls {

namespace {

constexpr uint64_t kTagHeavyRows = 16;
constexpr uint64_t kTagBasisV = 17;
constexpr uint64_t kTagNoise = 18;

constexpr char kMagic[4] = {'S', 'K', 'L', 'S'};
constexpr uint16_t kFormatVersion = 1;

// Rows i.i.d. from a bivariate-tailed t distribution with 2 degrees of
// freedom and scale matrix C, c_ij = 2 * 0.5^{|i-j|}: g ~ N(0, C) through
// the Cholesky factor, s ~ chi-square(2), row = g / sqrt(s / 2).
Matrix sample_heavy_tailed_rows(Index n, Index d, rng::SplitMix64& stream) {
  Matrix C(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      C(i, j) = 2.0 * std::pow(0.5, std::abs(static_cast<double>(i - j)));
    }
  }
  const Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gen_synthetic: scale matrix failed Cholesky");
  }
  const Matrix L = llt.matrixL();

  Matrix X(n, d);
  Vector g(d);
  for (Index r = 0; r < n; ++r) {
    for (Index k = 0; k < d; ++k) g[k] = stream.next_normal();
    double s = 0.0;
    do {
      const double z1 = stream.next_normal();
      const double z2 = stream.next_normal();
      s = z1 * z1 + z2 * z2;
    } while (s == 0.0);
    X.row(r) = (L * g).transpose() / std::sqrt(s / 2.0);
  }
  return X;
}

Matrix thin_orthonormal_factor(const Matrix& X) {
  const Eigen::HouseholderQR<Matrix> qr(X);
  return qr.householderQ() * Matrix::Identity(X.rows(), X.cols());
}

}  // namespace

SyntheticFactors gen_synthetic_full(const SyntheticSpec& spec) {
  if (spec.d < 2) {
    throw std::invalid_argument("gen_synthetic: need d >= 2, got d=" +
                                std::to_string(spec.d));
  }
  if (spec.n < spec.d) {
    throw std::invalid_argument("gen_synthetic: need n >= d, got n=" +
                                std::to_string(spec.n) + ", d=" +
                                std::to_string(spec.d));
  }
  if (!(spec.noise_tau >= 0.0) || !std::isfinite(spec.noise_tau)) {
    throw std::invalid_argument(
        "gen_synthetic: noise_tau must be finite and nonnegative");
  }
  const Index n = spec.n;
  const Index d = spec.d;

  rng::SplitMix64 row_stream(rng::derive_seed(spec.seed, kTagHeavyRows, 0));
  Matrix U = thin_orthonormal_factor(sample_heavy_tailed_rows(n, d, row_stream));

  rng::SplitMix64 v_stream(rng::derive_seed(spec.seed, kTagBasisV, 0));
  Matrix G(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) G(i, j) = v_stream.next_normal();
  }
  Matrix V = thin_orthonormal_factor(G);

  Vector sigma(d);
  if (spec.conditioning == Conditioning::Ill) {
    // Exponents equally spaced from 0 down to -6: sixth-order decade span.
    for (Index i = 0; i < d; ++i) {
      sigma[i] = std::pow(
          10.0, -6.0 * static_cast<double>(i) / static_cast<double>(d - 1));
    }
  } else {
    // Equally spaced from 1 down to 0.1 (kept decreasing like the Ill case).
    for (Index i = 0; i < d; ++i) {
      sigma[i] = 1.0 - 0.9 * static_cast<double>(i) /
                           static_cast<double>(d - 1);
    }
  }

  Matrix A = U * sigma.asDiagonal() * V.transpose();

  // Planted coefficients: 1 on the outer ~20% blocks, 0.1 in between.
  const Index outer = static_cast<Index>(
      std::lround(0.2 * static_cast<double>(d)));
  Vector x_star = Vector::Constant(d, 0.1);
  x_star.head(outer).setOnes();
  x_star.tail(outer).setOnes();

  Vector b = A * x_star;
  if (spec.noise_tau > 0.0) {
    rng::SplitMix64 noise_stream(rng::derive_seed(spec.seed, kTagNoise, 0));
    for (Index i = 0; i < n; ++i) {
      b[i] += spec.noise_tau * noise_stream.next_normal();
    }
  }

  return SyntheticFactors{LSProblem(std::move(A), std::move(b)), std::move(U),
                          std::move(V), std::move(sigma), std::move(x_star)};
}

LSProblem gen_synthetic(const SyntheticSpec& spec) {
  return gen_synthetic_full(spec).problem;
}

namespace {

constexpr size_t kMaxFeatureIndex = 10'000'000;

// Numeric token parse that must consume the whole token. A leading '+' is
// tolerated (LIBSVM labels are often written "+1").
template <typename T>
bool parse_full(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.begin(), token.end(), out);
  return ec == std::errc{} && ptr == token.end();
}

[[noreturn]] void parse_fail(long line_no, const std::string& what) {
  throw ParseError("load_libsvm: line " + std::to_string(line_no) + ": " +
                   what);
}

}  // namespace

LSProblem load_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("load_libsvm: cannot open " + path.string());
  }

  std::vector<double> labels;
  std::vector<std::vector<std::pair<size_t, double>>> rows;
  size_t max_index = 0;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(
                                      line[pos]))) {
        ++pos;
      }
      const size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(
                                       line[pos]))) {
        ++pos;
      }
      return std::string_view(line).substr(start, pos - start);
    };

    const std::string_view label_token = next_token();
    if (label_token.empty()) continue;  // blank line

    double label = 0.0;
    if (!parse_full(label_token, label)) {
      parse_fail(line_no, "bad label '" + std::string(label_token) + "'");
    }

    std::vector<std::pair<size_t, double>> features;
    size_t prev_index = 0;
    for (std::string_view token = next_token(); !token.empty();
         token = next_token()) {
      const size_t colon = token.find(':');
      if (colon == std::string_view::npos) {
        parse_fail(line_no, "expected idx:value, got '" + std::string(token) +
                                "'");
      }
      size_t index = 0;
      if (!parse_full(token.substr(0, colon), index) || index < 1) {
        parse_fail(line_no, "bad feature index in '" + std::string(token) +
                                "' (indices are 1-based integers)");
      }
      if (index > kMaxFeatureIndex) {
        parse_fail(line_no, "feature index " + std::to_string(index) +
                                " exceeds the supported range");
      }
      if (index <= prev_index) {
        parse_fail(line_no, "feature indices must be strictly increasing");
      }
      double value = 0.0;
      if (!parse_full(token.substr(colon + 1), value)) {
        parse_fail(line_no, "bad feature value in '" + std::string(token) +
                                "'");
      }
      features.emplace_back(index, value);
      prev_index = index;
    }
    if (prev_index > max_index) max_index = prev_index;
    labels.push_back(label);
    rows.push_back(std::move(features));
  }

  if (rows.empty()) {
    throw ParseError("load_libsvm: no data lines in " + path.string());
  }
  if (max_index == 0) {
    throw ParseError("load_libsvm: no features present in " + path.string());
  }

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(max_index);
  Matrix A = Matrix::Zero(n, d);
  Vector b(n);
  for (Index i = 0; i < n; ++i) {
    b[i] = labels[static_cast<size_t>(i)];
    for (const auto& [index, value] : rows[static_cast<size_t>(i)]) {
      A(i, static_cast<Index>(index - 1)) = value;
    }
  }
  return LSProblem(std::move(A), std::move(b));
}

namespace {

void write_bytes(std::ofstream& out, const void* data, size_t len) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
}

void read_bytes(std::ifstream& in, void* data, size_t len,
                const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
  if (static_cast<size_t>(in.gcount()) != len) {
    throw FormatError("read_problem: truncated file while reading " +
                      std::string(what));
  }
}

uint64_t bswap64(uint64_t v) {
  v = ((v & 0x00ff00ff00ff00ffull) << 8) | ((v >> 8) & 0x00ff00ff00ff00ffull);
  v = ((v & 0x0000ffff0000ffffull) << 16) |
      ((v >> 16) & 0x0000ffff0000ffffull);
  return (v << 32) | (v >> 32);
}

uint64_t to_le(uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return bswap64(v);
  }
}

void write_u16(std::ofstream& out, uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff),
                         static_cast<char>(v >> 8)};
  write_bytes(out, bytes, 2);
}

void write_u64(std::ofstream& out, uint64_t v) {
  const uint64_t le = to_le(v);
  write_bytes(out, &le, 8);
}

uint16_t read_u16(std::ifstream& in, const char* what) {
  unsigned char bytes[2];
  read_bytes(in, bytes, 2, what);
  return static_cast<uint16_t>(bytes[0] | (bytes[1] << 8));
}

uint64_t read_u64(std::ifstream& in, const char* what) {
  uint64_t v = 0;
  read_bytes(in, &v, 8, what);
  return to_le(v);
}

void write_doubles(std::ofstream& out, const double* data, size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    write_bytes(out, data, count * sizeof(double));
  } else {
    for (size_t i = 0; i < count; ++i) {
      write_u64(out, std::bit_cast<uint64_t>(data[i]));
    }
  }
}

void read_doubles(std::ifstream& in, double* data, size_t count,
                  const char* what) {
  if constexpr (std::endian::native == std::endian::little) {
    read_bytes(in, data, count * sizeof(double), what);
  } else {
    for (size_t i = 0; i < count; ++i) {
      data[i] = std::bit_cast<double>(read_u64(in, what));
    }
  }
}

}  // namespace

void write_problem(const LSProblem& problem,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("write_problem: cannot open " + path.string());
  }
  write_bytes(out, kMagic, 4);
  write_u16(out, kFormatVersion);
  write_u64(out, static_cast<uint64_t>(problem.n()));
  write_u64(out, static_cast<uint64_t>(problem.d()));
  std::vector<double> row(static_cast<size_t>(problem.d()));
  for (Index i = 0; i < problem.n(); ++i) {
    for (Index j = 0; j < problem.d(); ++j) {
      row[static_cast<size_t>(j)] = problem.A()(i, j);
    }
    write_doubles(out, row.data(), row.size());
  }
  write_doubles(out, problem.b().data(),
                static_cast<size_t>(problem.n()));
  out.flush();
  if (!out) {
    throw FormatError("write_problem: write to " + path.string() + " failed");
  }
}

LSProblem read_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("read_problem: cannot open " + path.string());
  }
  char magic[4];
  read_bytes(in, magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    std::string shown;
    for (const char c : magic) {
      if (std::isprint(static_cast<unsigned char>(c))) {
        shown.push_back(c);
      } else {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\x%02x",
                      static_cast<unsigned>(static_cast<unsigned char>(c)));
        shown += buf;
      }
    }
    throw FormatError("read_problem: bad magic '" + shown +
                      "' (expected 'SKLS')");
  }
  const uint16_t version = read_u16(in, "version");
  if (version != kFormatVersion) {
    throw FormatError("read_problem: unsupported format version " +
                      std::to_string(version));
  }
  const uint64_t n64 = read_u64(in, "row count");
  const uint64_t d64 = read_u64(in, "column count");
  constexpr uint64_t kMaxEntries = uint64_t{1} << 33;  // 64 GiB of doubles
  if (d64 == 0 || d64 > kMaxEntries || n64 < d64 ||
      n64 > kMaxEntries / (d64 + 1)) {
    throw FormatError("read_problem: implausible dimensions n=" +
                      std::to_string(n64) + ", d=" + std::to_string(d64));
  }
  const Index n = static_cast<Index>(n64);
  const Index d = static_cast<Index>(d64);
  Matrix A(n, d);
  std::vector<double> row(static_cast<size_t>(d));
  for (Index i = 0; i < n; ++i) {
    read_doubles(in, row.data(), row.size(), "matrix entries");
    for (Index j = 0; j < d; ++j) A(i, j) = row[static_cast<size_t>(j)];
  }
  Vector b(n);
  read_doubles(in, b.data(), static_cast<size_t>(n), "right-hand side");
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw FormatError("read_problem: trailing bytes after the payload in " +
                      path.string());
  }
  return LSProblem(std::move(A), std::move(b));
}

}  // namespace sketchls
