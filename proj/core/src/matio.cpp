#include "spcg/matio.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spcg/errors.hpp"

namespace spcg {

std::string_view to_string(StorageKind kind) {
  return kind == StorageKind::kFull ? "full" : "sym";
}

StorageKind storage_of(const AnyMatrix& m) {
  return std::holds_alternative<CsrMatrix<double>>(m) ? StorageKind::kFull : StorageKind::kSymHalf;
}

std::size_t dimension_of(const AnyMatrix& m) {
  return std::visit([](const auto& a) { return a.n(); }, m);
}

std::size_t stored_entries_of(const AnyMatrix& m) {
  return std::visit([](const auto& a) { return a.nnz(); }, m);
}

void LinearSystem::validate() const {
  const std::size_t dim = n();
  if (b.size() != dim) throw DimensionError("right-hand side length does not match the matrix");
  if (x_ref && x_ref->size() != dim) {
    throw DimensionError("reference solution length does not match the matrix");
  }
}

namespace {

const CsrArrays<double>& arrays_of(const AnyMatrix& m) {
  return std::visit([](const auto& a) -> const CsrArrays<double>& { return a.arrays(); }, m);
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw FormatError("Matrix Market line " + std::to_string(line) + ": " + what);
}

// Splits on blanks; returns false when fewer than `count` tokens are present.
bool tokens(std::string_view text, std::string_view* out, std::size_t count) {
  std::size_t found = 0;
  std::size_t pos = 0;
  while (found < count) {
    pos = text.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) return false;
    const std::size_t end = std::min(text.find_first_of(" \t\r", pos), text.size());
    out[found++] = text.substr(pos, end - pos);
    pos = end;
  }
  return true;
}

template <typename Number>
bool parse_number(std::string_view token, Number& value) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

AnyMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw FormatError("Matrix Market file is empty");
  ++line_no;

  std::istringstream banner(line);
  std::string magic, object, layout, field, symmetry;
  banner >> magic >> object >> layout >> field >> symmetry;
  if (magic != "%%MatrixMarket") parse_error(line_no, "missing %%MatrixMarket banner");
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || layout != "coordinate") {
    throw FormatError("unsupported Matrix Market layout '" + object + " " + layout + "'");
  }
  if (field != "real" && field != "integer") {
    throw FormatError("unsupported Matrix Market field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw FormatError("unsupported Matrix Market symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  // Size line: first non-comment, non-blank line.
  std::string_view size_tok[3];
  for (;;) {
    if (!std::getline(in, line)) throw FormatError("Matrix Market file has no size line");
    ++line_no;
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    break;
  }
  std::size_t rows = 0, cols = 0, entries = 0;
  if (!tokens(line, size_tok, 3) || !parse_number(size_tok[0], rows) ||
      !parse_number(size_tok[1], cols) || !parse_number(size_tok[2], entries)) {
    parse_error(line_no, "malformed size line");
  }
  if (rows != cols) {
    parse_error(line_no, "matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                             ", only square matrices are supported");
  }
  if (rows == 0) parse_error(line_no, "matrix dimension is zero");

  std::vector<Triplet<double>> triplets;
  triplets.reserve(entries);
  std::string_view tok[3];
  while (triplets.size() < entries && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!tokens(line, tok, 3) || !parse_number(tok[0], i) || !parse_number(tok[1], j) ||
        !parse_number(tok[2], v)) {
      parse_error(line_no, "malformed entry");
    }
    if (i < 1 || i > rows || j < 1 || j > cols) {
      parse_error(line_no, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") outside declared " + std::to_string(rows) + "x" +
                               std::to_string(cols));
    }
    if (symmetric && j > i) std::swap(i, j);
    triplets.push_back({static_cast<index_type>(i - 1), static_cast<index_type>(j - 1), v});
  }
  if (triplets.size() < entries) {
    throw FormatError("Matrix Market file ends after " + std::to_string(triplets.size()) +
                      " of " + std::to_string(entries) + " entries");
  }

  CsrMatrix<double> assembled = build_csr_from_triplets<double>(triplets, rows);
  if (!symmetric) return assembled;
  CsrArrays<double> arrays = assembled.arrays();
  const auto report = validate_sym_half(arrays);
  for (const auto& v : report.violations) {
    if (v.rule == Rule::kMissingDiagonal) {
      throw FormatError("symmetric Matrix Market file has no diagonal entry in row " +
                        std::to_string(v.row + 1));
    }
  }
  return SymHalfMatrix<double>(std::move(arrays));
}

AnyMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  return read_matrix_market(in);
}

void write_matrix_market(const AnyMatrix& m, std::ostream& out) {
  const auto& a = arrays_of(m);
  out << "%%MatrixMarket matrix coordinate real "
      << (storage_of(m) == StorageKind::kFull ? "general" : "symmetric") << '\n';
  out << a.n << ' ' << a.n << ' ' << a.nnz() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < a.n; ++i) {
    for (offset_type k = a.row_start[i]; k < a.row_start[i + 1]; ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, a.values[k], std::chars_format::general, 17);
      out << (i + 1) << ' ' << (a.col_idx[k] + 1) << ' ' << std::string_view(buf, res.ptr - buf)
          << '\n';
    }
  }
  if (!out) throw FormatError("failed writing Matrix Market data");
}

void write_matrix_market(const AnyMatrix& m, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  write_matrix_market(m, out);
  out.close();
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// .spcg container

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'G'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagSymmetric = 1u << 0;
constexpr std::uint32_t kFlagReference = 1u << 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8;

template <typename U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U r{};
    auto* src = reinterpret_cast<unsigned char*>(&v);
    auto* dst = reinterpret_cast<unsigned char*>(&r);
    for (std::size_t i = 0; i < sizeof(U); ++i) dst[i] = src[sizeof(U) - 1 - i];
    return r;
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename U>
  void scalar(U v) {
    const U le = to_little(v);
    out_.write(reinterpret_cast<const char*>(&le), sizeof(U));
  }

  template <typename Disk, typename Mem>
  void array(const std::vector<Mem>& values) {
    for (const Mem v : values) scalar(static_cast<Disk>(v));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const char> bytes) : bytes_(bytes) {}

  template <typename U>
  U scalar() {
    if (pos_ + sizeof(U) > bytes_.size()) throw FormatError(".spcg payload is truncated");
    U v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return to_little(v);
  }

  template <typename Disk, typename Mem>
  std::vector<Mem> array(std::size_t count) {
    std::vector<Mem> out(count);
    for (auto& v : out) v = static_cast<Mem>(scalar<Disk>());
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

LinearSystem read_system(std::istream& in) {
  const std::vector<char> bytes{std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>()};
  if (bytes.size() < kHeaderBytes) throw FormatError(".spcg header is truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a .spcg file (bad magic)");

  Reader r(std::span<const char>(bytes).subspan(4));
  const auto version = r.scalar<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("unsupported .spcg version " + std::to_string(version));
  }
  const auto flags = r.scalar<std::uint32_t>();
  if (flags & ~(kFlagSymmetric | kFlagReference)) throw FormatError(".spcg header has unknown flags");
  const auto n = r.scalar<std::uint64_t>();
  const auto nnz = r.scalar<std::uint64_t>();

  // Size the payload from the header before allocating anything.
  constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 40;
  if (n >= kMaxCount || nnz >= kMaxCount) throw FormatError(".spcg header sizes are implausible");
  const std::uint64_t vectors = (flags & kFlagReference) ? 2 : 1;
  const std::uint64_t expected = 8 * (n + 1) + 4 * nnz + 8 * nnz + 8 * n * vectors;
  if (r.remaining() < expected) throw FormatError(".spcg payload is truncated");
  if (r.remaining() > expected) throw FormatError(".spcg payload is longer than its header declares");

  CsrArrays<double> arrays;
  arrays.n = n;
  arrays.row_start = r.array<std::uint64_t, offset_type>(n + 1);
  arrays.col_idx = r.array<std::uint32_t, index_type>(nnz);
  arrays.values = r.array<double, double>(nnz);

  LinearSystem system;
  try {
    if (flags & kFlagSymmetric) {
      SymHalfMatrix<double> s(std::move(arrays));
      if (!s.diag_present()) throw FormatError(".spcg symmetric matrix lacks a stored diagonal");
      system.matrix = std::move(s);
    } else {
      system.matrix = CsrMatrix<double>(std::move(arrays));
    }
  } catch (const ConstructionError& e) {
    throw FormatError(std::string(".spcg arrays are inconsistent: ") + e.what());
  }
  system.b = r.array<double, double>(n);
  if (flags & kFlagReference) system.x_ref = r.array<double, double>(n);
  return system;
}

LinearSystem read_system(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_system(in);
}

void write_system(const LinearSystem& system, std::ostream& out) {
  system.validate();
  const auto& a = arrays_of(system.matrix);
  std::uint32_t flags = 0;
  if (system.storage() == StorageKind::kSymHalf) flags |= kFlagSymmetric;
  if (system.x_ref) flags |= kFlagReference;

  out.write(kMagic, 4);
  Writer w(out);
  w.scalar<std::uint32_t>(kVersion);
  w.scalar<std::uint32_t>(flags);
  w.scalar<std::uint64_t>(a.n);
  w.scalar<std::uint64_t>(a.nnz());
  w.array<std::uint64_t>(a.row_start);
  w.array<std::uint32_t>(a.col_idx);
  w.array<double>(a.values);
  w.array<double>(system.b);
  if (system.x_ref) w.array<double>(*system.x_ref);
  if (!out) throw FormatError("failed writing .spcg data");
}

void write_system(const LinearSystem& system, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  write_system(system, out);
  out.close();
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

FileFormat detect_format(const std::filesystem::path& path,
                         std::optional<std::string_view> override_name) {
  if (override_name) {
    const std::string name = lower(std::string(*override_name));
    if (name == "spcg") return FileFormat::kSpcg;
    if (name == "mm" || name == "mtx") return FileFormat::kMatrixMarket;
    throw FormatError("unknown input format '" + std::string(*override_name) + "'");
  }
  const std::string ext = lower(path.extension().string());
  if (ext == ".spcg") return FileFormat::kSpcg;
  if (ext == ".mtx" || ext == ".mm") return FileFormat::kMatrixMarket;
  throw FormatError("cannot tell the format of '" + path.string() +
                    "' from its extension; pass --in-format");
}

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;

  template <typename U>
  void add(const std::vector<U>& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(U); ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  }
};

}  // namespace

std::uint64_t checksum(const LinearSystem& system) {
  const auto& a = arrays_of(system.matrix);
  Fnv1a f;
  f.add(std::vector<std::uint64_t>{a.n, static_cast<std::uint64_t>(system.storage())});
  f.add(a.row_start);
  f.add(a.col_idx);
  f.add(a.values);
  f.add(system.b);
  if (system.x_ref) f.add(*system.x_ref);
  return f.h;
}

}  // namespace spcg
