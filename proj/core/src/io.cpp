#include "fvt/io.hpp"

#include <array>
#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fvt {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'V', 'T', '1'};

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> b{};
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (in.gcount() != static_cast<std::streamsize>(b.size())) {
    throw Error(ErrorCode::TruncatedFile, "unexpected end of file");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

// Bulk little-endian doubles; the host is checked once.
void get_f64_block(std::istream& in, double* dst, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    const auto bytes = static_cast<std::streamsize>(n * sizeof(double));
    in.read(reinterpret_cast<char*>(dst), bytes);
    if (in.gcount() != bytes) throw Error(ErrorCode::TruncatedFile, "entry payload is shorter than the header declares");
  } else {
    for (std::size_t i = 0; i < n; ++i) dst[i] = get_f64(in);
  }
}

void put_f64_block(std::ostream& out, const double* src, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(src), static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < n; ++i) put_f64(out, src[i]);
  }
}

}  // namespace

void write_fvt(std::ostream& out, const BTensor& A) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kFvtVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(A.order()));
  for (auto n : A.dims()) put_le<std::uint64_t>(out, n);
  put_le<std::uint64_t>(out, A.dim());
  const InnerProduct& ip = A.ip();
  out.put(static_cast<char>(ip.kind()));
  if (ip.kind() == GramKind::Diagonal) {
    put_f64_block(out, ip.weights().data(), ip.dim());
  } else if (ip.kind() == GramKind::Dense) {
    const Eigen::MatrixXd& g = ip.gram();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) put_f64(out, g(i, j));
    }
  }
  put_f64_block(out, A.coeffs().data(), static_cast<std::size_t>(A.coeffs().size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed");
}

FvtHeader read_fvt_header(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw Error(ErrorCode::BadMagic, "not an FVT file");
  FvtHeader hdr;
  hdr.version = get_le<std::uint32_t>(in);
  if (hdr.version != kFvtVersion) throw Error(ErrorCode::BadVersion, "unsupported version " + std::to_string(hdr.version));
  const auto d = get_le<std::uint32_t>(in);
  if (d == 0) throw Error(ErrorCode::TruncatedFile, "tensor order is zero");
  hdr.dims.resize(d);
  for (auto& n : hdr.dims) n = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  hdr.h = get_le<std::uint64_t>(in);
  const auto kind = get_le<std::uint8_t>(in);
  if (kind > 2) throw Error(ErrorCode::NonSPDGram, "unknown Gram kind " + std::to_string(kind));
  hdr.gram_kind = static_cast<GramKind>(kind);
  return hdr;
}

BTensor read_fvt(std::istream& in) {
  const FvtHeader hdr = read_fvt_header(in);
  const auto h = static_cast<std::size_t>(hdr.h);
  if (h == 0) throw Error(ErrorCode::TruncatedFile, "h is zero");
  InnerProduct ip = InnerProduct::identity(h);
  try {
    if (hdr.gram_kind == GramKind::Diagonal) {
      Eigen::VectorXd w(static_cast<Eigen::Index>(h));
      get_f64_block(in, w.data(), h);
      ip = InnerProduct::diagonal(std::move(w));
    } else if (hdr.gram_kind == GramKind::Dense) {
      Eigen::MatrixXd g(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h));
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = get_f64(in);
      }
      ip = InnerProduct::dense(g);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TruncatedFile) throw;
    throw Error(ErrorCode::NonSPDGram, e.what());
  }
  const std::size_t n = num_entries(hdr.dims);
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(n));
  get_f64_block(in, coeffs.data(), h * n);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::TruncatedFile, "payload is longer than the header declares");
  }
  return BTensor(hdr.dims, std::move(ip), std::move(coeffs));
}

void save_fvt(const BTensor& A, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  write_fvt(out, A);
}

BTensor load_fvt(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_fvt(in);
}

FvtHeader load_fvt_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_fvt_header(in);
}

Eigen::VectorXd read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE) {
      throw Error(ErrorCode::InvalidArgument, "'" + path + "': not a number: " + tok);
    }
    vals.push_back(v);
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string hexfloat(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%a", v);
  return buf.data();
}

double parse_hexfloat(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::InvalidArgument, "bad hex-float '" + s + "'");
  return v;
}

}  // namespace fvt
