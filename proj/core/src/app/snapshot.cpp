#include "facetflow/app/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "facetflow/error.hpp"

namespace facetflow::app {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

constexpr char kMagic[4] = {'F', 'C', 'T', 'F'};

class Writer {
 public:
  template <class T>
  void put(T v) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    bytes.insert(bytes.end(), raw, raw + sizeof(T));
  }
  void put_array(const std::vector<double>& v) {
    for (double x : v) put(x);
  }
  std::vector<unsigned char> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& b) : bytes_(b) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ValidationError("snapshot truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::vector<double> get_array(std::size_t n) {
    if (pos_ + n * sizeof(double) > bytes_.size()) throw ValidationError("snapshot truncated");
    std::vector<double> v(n);
    std::memcpy(v.data(), bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Snapshot make_snapshot(const Grid& grid, double tau, const StepState& state) {
  Snapshot s;
  s.dim = static_cast<std::uint32_t>(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    s.cells.push_back(static_cast<std::uint32_t>(grid.cells(a)));
    s.lengths.push_back(grid.length(a));
  }
  s.tau = tau;
  s.k = state.k;
  s.wall_time = state.wall_seconds;
  s.residual = state.residual;
  s.u = state.u.vector();
  s.psi = state.psi.vector();
  s.rho = state.rho.vector();
  return s;
}

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  Writer w;
  for (char c : kMagic) w.put(c);
  w.put<std::uint32_t>(s.version);
  w.put<std::uint32_t>(s.dim);
  for (auto c : s.cells) w.put<std::uint32_t>(c);
  for (double l : s.lengths) w.put(l);
  w.put(s.tau);
  w.put<std::uint64_t>(s.k);
  w.put(s.wall_time);
  w.put(s.residual);
  w.put<std::uint64_t>(s.u.size());
  w.put_array(s.u);
  w.put_array(s.psi);
  w.put_array(s.rho);
  return std::move(w.bytes);
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.get<char>() != c) throw ValidationError("not a snapshot file (bad magic)");
  }
  Snapshot s;
  s.version = r.get<std::uint32_t>();
  if (s.version != kSnapshotVersion) {
    throw ValidationError("unsupported snapshot version " + std::to_string(s.version));
  }
  s.dim = r.get<std::uint32_t>();
  if (s.dim != 1 && s.dim != 2) throw ValidationError("snapshot dim must be 1 or 2");
  std::uint64_t expected = 1;
  for (std::uint32_t a = 0; a < s.dim; ++a) {
    s.cells.push_back(r.get<std::uint32_t>());
    expected *= s.cells.back() + 1ULL;
  }
  for (std::uint32_t a = 0; a < s.dim; ++a) s.lengths.push_back(r.get<double>());
  s.tau = r.get<double>();
  s.k = r.get<std::uint64_t>();
  s.wall_time = r.get<double>();
  s.residual = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  if (n != expected) throw ValidationError("snapshot node count does not match its grid");
  s.u = r.get_array(n);
  s.psi = r.get_array(n);
  s.rho = r.get_array(n);
  if (!r.done()) throw ValidationError("snapshot has trailing bytes");
  return s;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open snapshot " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace facetflow::app
